"""Command-line front end: ``edgeheat <subcommand> ...``.

Every artifact embeds the tool version and a hash of the canonical
arguments.  CSV output starts with one ``#`` comment line carrying both;
JSON output carries them under ``"meta"``.  Exit codes: 0 success,
1 failed verification, 2 usage error, 3 invalid input data.
"""

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from . import asymptotics as asy
from . import trace_lab as tl
from .boundary import load_boundary_json, lagrangian_defect, validate_lagrangian
from .errors import (AccuracyError, CompositionError, ConditioningError, DomainError,
                     EnumerationError, SingularSymbolError, UnsupportedReductionError)
from .model_kernel import (TimeProfile, boundary_kernel, extract_boundary_coeffs,
                           fit_window, friedrichs_kernel, signaling_solution)
from .transforms import ContourSpec, SymbolFunction, bromwich_inverse, kappa_theta

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3


class InputDataError(Exception):
    """Input that parses but is not a valid experiment; carries a JSON report."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report or {}


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    """A validated experiment description.

    JSON layout: the boundary keys ``nus``, ``b``, ``theta`` at top level,
    plus optional ``realizations`` (list of ``{"nu", "bc", "theta"}``),
    ``t_grid`` (``{"t_min", "t_max", "per_decade"}``), ``contour``
    (keyword overrides for the inverse Laplace contour) and ``output_dir``.
    """

    spectrum: object = None
    lagrangian: object = None
    realizations: list = field(default_factory=list)
    t_grid: dict = field(default_factory=dict)
    contour: dict = field(default_factory=dict)
    output_dir: str = None

    KEYS = ("nus", "b", "theta", "realizations", "t_grid", "contour", "output_dir")

    @classmethod
    def from_mapping(cls, data):
        if not isinstance(data, dict):
            raise InputDataError("configuration must be a JSON object")
        unknown = sorted(set(data) - set(cls.KEYS))
        if unknown:
            raise InputDataError(f"unknown configuration keys: {unknown}")
        cfg = cls(output_dir=data.get("output_dir"))
        if "nus" in data:
            try:
                cfg.spectrum, cfg.lagrangian = load_boundary_json(
                    {k: data[k] for k in ("nus", "b", "theta") if k in data})
            except (ValueError, TypeError, KeyError) as exc:
                raise InputDataError(f"invalid boundary data: {exc}") from None
        for item in data.get("realizations", []):
            try:
                cfg.realizations.append(tl.IntervalRealization(
                    item["nu"], item.get("bc", tl.FRIEDRICHS), item.get("theta", 0.0)))
            except (ValueError, TypeError, KeyError) as exc:
                raise InputDataError(f"invalid realization {item!r}: {exc}") from None
        grid = dict(data.get("t_grid", {}))
        if grid:
            bad = sorted(set(grid) - {"t_min", "t_max", "per_decade"})
            if bad:
                raise InputDataError(f"unknown t_grid keys: {bad}")
            lo, hi = float(grid.get("t_min", 1e-6)), float(grid.get("t_max", 1e-2))
            if not 0 < lo < hi:
                raise InputDataError("t_grid needs 0 < t_min < t_max")
        cfg.t_grid = grid
        contour = dict(data.get("contour", {}))
        try:
            ContourSpec(**contour)
        except (TypeError, ValueError) as exc:
            raise InputDataError(f"invalid contour overrides: {exc}") from None
        cfg.contour = contour
        return cfg

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise InputDataError(f"cannot read {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise InputDataError(f"{path} is not valid JSON: {exc}") from None
        return cls.from_mapping(data)

    def grid(self):
        g = self.t_grid
        return tl.log_grid(float(g.get("t_min", 1e-6)), float(g.get("t_max", 1e-2)),
                           int(g.get("per_decade", 6)))

    def require_boundary(self):
        if self.spectrum is None:
            raise InputDataError("configuration has no 'nus' entry")
        defect = lagrangian_defect(self.lagrangian, self.spectrum)
        if not validate_lagrangian(self.lagrangian, self.spectrum):
            raise InputDataError("boundary rows are not Lagrangian",
                                 {"lagrangian_defect": float(np.max(np.abs(defect))),
                                  "defect_matrix": defect.tolist()})
        return self.spectrum, self.lagrangian


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------

def parse_grid(text):
    """``"a,b,c"``, ``"start:stop:n"`` (linear) or ``"start:stop:n:log"``."""
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
                raise ValueError
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 1:
                raise ValueError
            return list(np.geomspace(lo, hi, n) if len(parts) == 4 else np.linspace(lo, hi, n))
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"bad grid {text!r}; use 'a,b,c', 'start:stop:n' or 'start:stop:n:log'") from None


def _nonneg_nu(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"nu must be a number, got {text!r}") from None
    if not 0.0 <= v < 1.0:
        raise argparse.ArgumentTypeError("nu must lie in [0, 1)")
    return v


def threads():
    """Worker cap from ``EDGEHEAT_THREADS`` (default: CPU count)."""
    raw = os.environ.get("EDGEHEAT_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def parallel_map(func, items):
    """Ordered map; results come back in input order for any worker count."""
    items = list(items)
    n = min(threads(), len(items))
    if n <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, items))


def config_hash(args):
    skip = {"func", "out", "command"}
    payload = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    if getattr(args, "config", None):
        with open(args.config, "rb") as fh:
            payload["config_sha256"] = hashlib.sha256(fh.read()).hexdigest()
    text = json.dumps(payload, sort_keys=True, default=str, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def fmt(v):
    """12 significant digits, locale independent."""
    return format(float(v), ".12g")


def _emit(args, text):
    if args.out:
        directory = os.path.dirname(args.out)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def emit_csv(args, header, rows):
    buf = io.StringIO()
    buf.write(f"# edgeheat {__version__} {args.command} config={config_hash(args)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    _emit(args, buf.getvalue())


def emit_json(args, payload):
    doc = dict(payload)
    doc["meta"] = {"tool": "edgeheat", "version": __version__, "command": args.command,
                   "config_hash": config_hash(args)}
    _emit(args, json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_kernel(args):
    if args.ne:
        grid = [(t, x) for t in args.t for x in args.x]
        vals = parallel_map(lambda p: boundary_kernel(args.nu, p[0], p[1]), grid)
        emit_csv(args, ["t", "x", "ne_kernel"], [(t, x, v) for (t, x), v in zip(grid, vals)])
        return EXIT_OK
    if args.xt is None:
        raise argparse.ArgumentTypeError("--xt is required unless --ne is given")
    grid = [(t, x, xt) for t in args.t for x in args.x for xt in args.xt]
    vals = parallel_map(lambda p: friedrichs_kernel(args.nu, *p), grid)
    emit_csv(args, ["t", "x", "xt", "kernel"], [(*p, v) for p, v in zip(grid, vals)])
    return EXIT_OK


def cmd_signal(args):
    h = TimeProfile.exponential(args.rate)
    if args.extract:
        def row(t):
            x = fit_window(t)
            u = np.array([signaling_solution(args.nu, args.b, h, t, xi, args.y) for xi in x])
            c = extract_boundary_coeffs(args.nu, x, u, basis=args.basis)
            return (t, c.cminus, c.cplus, float(h(t)), c.residual, c.condition)
        rows = parallel_map(row, args.t)
        emit_csv(args, ["t", "cminus", "cplus", "h", "residual", "condition"], rows)
        return EXIT_OK
    grid = [(t, x) for t in args.t for x in args.x]
    vals = parallel_map(lambda p: signaling_solution(args.nu, args.b, h, p[0], p[1], args.y), grid)
    emit_csv(args, ["t", "x", "u"], [(t, x, v) for (t, x), v in zip(grid, vals)])
    return EXIT_OK


def _realization(args):
    if args.bc == tl.FRIEDRICHS:
        return tl.IntervalRealization.friedrichs(args.nu)
    return tl.IntervalRealization.mixed(args.nu, args.theta)


def cmd_spectrum(args):
    r = _realization(args)
    s = tl.eigenvalues(r, args.lambda_max)
    if not args.oracle:
        emit_csv(args, ["n", "eigenvalue"], [(n, v) for n, v in enumerate(s.values)])
        return EXIT_OK
    count = min(args.oracle_count, len(s))
    orc = tl.fd_eigen_oracle(r, count=count)
    rows = []
    for n in range(count):
        v, o = float(s.values[n]), float(orc.values[n])
        rows.append((n, v, o, abs(v - o) / max(1.0, abs(v))))
    emit_csv(args, ["n", "eigenvalue", "oracle", "rel_diff"], rows)
    return EXIT_OK


def _trace_for(r, grid, difference, lambda_max):
    if difference:
        return tl.trace_difference(r, tl.IntervalRealization.friedrichs(r.nu), grid, lambda_max)
    lm = tl.lambda_max_for(min(grid)) if lambda_max is None else lambda_max
    return tl.trace_curve(tl.eigenvalues(r, lm), grid, r.label)


def cmd_trace(args):
    grid = np.sort(np.asarray(args.t, float))
    if args.config:
        cfg = ExperimentConfig.load(args.config)
        if not cfg.realizations:
            raise InputDataError("configuration lists no realizations")
        grid = cfg.grid() if cfg.t_grid else grid
        curves = parallel_map(lambda r: _trace_for(r, grid, args.difference, args.lambda_max),
                              cfg.realizations)
    else:
        curves = [_trace_for(_realization(args), grid, args.difference, args.lambda_max)]
    rows = [(c.label, t, v, b) for c in curves for t, v, b in zip(c.t, c.values, c.tail_bound)]
    emit_csv(args, ["realization", "t", "trace", "tail_bound"], rows)
    return EXIT_OK


def _read_curve(path):
    t, d = [], []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln for ln in fh if not ln.startswith("#")]
    except OSError as exc:
        raise InputDataError(f"cannot read {path}: {exc.strerror}") from None
    reader = csv.DictReader(lines)
    if not reader.fieldnames or not {"t", "trace"} <= set(reader.fieldnames):
        raise InputDataError("curve CSV needs 't' and 'trace' columns")
    for row in reader:
        t.append(float(row["t"]))
        d.append(float(row["trace"]))
    return tl.TraceCurve(np.array(t), np.array(d), np.zeros(len(t)), path)


def cmd_fit(args):
    if args.input:
        curve = _read_curve(args.input)
    else:
        r = tl.IntervalRealization.mixed(args.nu, args.theta)
        grid = tl.log_grid(args.window[0], args.window[1], args.per_decade)
        curve = tl.trace_difference(r, tl.IntervalRealization.friedrichs(args.nu), grid)
    try:
        res = tl.fit_leading(curve, family=args.family, window=tuple(args.window))
    except ValueError as exc:
        raise InputDataError(str(exc), {"points": int(curve.t.size)}) from None
    emit_json(args, res.to_json())
    return EXIT_OK


def cmd_predict(args):
    cfg = ExperimentConfig.load(args.config)
    spectrum, G = cfg.require_boundary()
    corr = asy.predict_trace_correction(spectrum, G, depth=args.depth,
                                        truncation=(args.rho_window, args.alpha_window),
                                        resolve_vanishing=args.resolve_vanishing)
    doc = corr.to_json()
    doc["nus"] = [float(v) for v in spectrum.nus]
    emit_json(args, doc)
    return EXIT_OK


def _symbol(args):
    if args.symbol == "log":
        kappa = args.kappa if args.kappa is not None else kappa_theta(args.theta)
        return SymbolFunction.log_power(kappa, args.alpha, args.rho)
    if args.symbol == "power":
        return SymbolFunction.power(args.rho)
    return SymbolFunction.shifted_pole(args.a, args.power)


def cmd_invlap(args):
    F = _symbol(args)
    try:
        spec = ContourSpec(kind=args.contour, delta=args.delta, radius=args.radius,
                           nodes=args.nodes, rtol=args.rtol)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None

    def one(t):
        res = bromwich_inverse(F, t, spec)
        return {"t": t, "value": res.value, "imag_residue": res.imag_residue,
                "diagnostics": res.diagnostics}

    emit_json(args, {"symbol": F.label, "alpha": F.alpha, "rho": F.rho,
                     "results": parallel_map(one, args.t)})
    return EXIT_OK


def _index_family(data, name):
    try:
        cut = data.get("gamma_max")
        cut = None if cut is None else Fraction(str(cut))
        return tuple(asy.IndexSet([(Fraction(str(g)), int(p)) for g, p in data[face]], cut)
                     for face in ("lf", "rf"))
    except (AttributeError, KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputDataError(f"invalid index family {name}: {exc}") from None


def cmd_indexset(args):
    try:
        left, right = json.loads(args.left), json.loads(args.right)
    except json.JSONDecodeError as exc:
        raise InputDataError(f"index families must be JSON: {exc}") from None
    E, Ep = _index_family(left, "left"), _index_family(right, "right")
    p_lf, p_rf = asy.index_compose(E, Ep, Fraction(str(args.l)), Fraction(str(args.lp)))
    emit_json(args, {"lf": p_lf.to_json(), "rf": p_rf.to_json()})
    return EXIT_OK


def cmd_verify(args):
    from . import acceptance

    numbers = acceptance.SUITES[args.suite]
    results = parallel_map(lambda n: acceptance.CHECKS[n](), numbers)
    for r in results:
        print(r.line(), file=sys.stderr)
    failed = [r.number for r in results if not r.passed]
    emit_json(args, {"suite": args.suite, "passed": not failed, "failed": failed,
                     "criteria": [r.to_json() for r in results]})
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(
        prog="edgeheat",
        description="Heat kernels, spectra and small-time heat-trace asymptotics "
                    "for inverse-square operators.")
    p.add_argument("--version", action="version", version=f"edgeheat {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.set_defaults(func=func)
        return sp

    k = add("kernel", cmd_kernel, "Friedrichs heat kernel or its boundary kernel on a grid")
    k.add_argument("--nu", type=_nonneg_nu, required=True)
    k.add_argument("--t", type=parse_grid, required=True)
    k.add_argument("--x", type=parse_grid, required=True)
    k.add_argument("--xt", type=parse_grid)
    k.add_argument("--ne", action="store_true", help="boundary kernel NE_nu(t, x)")

    s = add("signal", cmd_signal, "signaling solution for h(t) = exp(-rate t)")
    s.add_argument("--nu", type=_nonneg_nu, required=True)
    s.add_argument("--b", type=int, choices=(0, 1), default=0)
    s.add_argument("--rate", type=float, default=1.0)
    s.add_argument("--y", type=float, default=0.0)
    s.add_argument("--t", type=parse_grid, required=True)
    s.add_argument("--x", type=parse_grid, default=[0.1, 0.5, 1.0])
    s.add_argument("--extract", action="store_true", help="fit edge coefficients c-, c+")
    s.add_argument("--basis", choices=("frobenius", "powers"), default="frobenius")

    def realization_flags(sp, require_nu=True):
        sp.add_argument("--nu", type=_nonneg_nu, required=require_nu)
        sp.add_argument("--bc", choices=(tl.FRIEDRICHS, tl.MIXED), default=tl.FRIEDRICHS)
        sp.add_argument("--theta", type=float, default=0.0)

    sp = add("spectrum", cmd_spectrum, "eigenvalues of an interval realization")
    realization_flags(sp)
    sp.add_argument("--lambda-max", type=float, required=True)
    sp.add_argument("--oracle", action="store_true", help="compare with the finite-volume oracle")
    sp.add_argument("--oracle-count", type=int, default=10)

    tr = add("trace", cmd_trace, "heat trace or trace difference with tail bounds")
    realization_flags(tr, require_nu=False)
    tr.add_argument("--t", type=parse_grid, default=parse_grid("1e-6:1e-2:25:log"))
    tr.add_argument("--difference", action="store_true", help="subtract the Friedrichs trace")
    tr.add_argument("--lambda-max", type=float)
    tr.add_argument("--config", help="experiment JSON with a realization list")

    f = add("fit", cmd_fit, "fit the leading small-time behaviour of a trace difference")
    f.add_argument("--input", help="CSV with t and trace columns (from 'trace')")
    f.add_argument("--nu", type=_nonneg_nu, default=0.0)
    f.add_argument("--theta", type=float, default=0.0)
    f.add_argument("--window", type=float, nargs=2, default=(1e-6, 1e-2), metavar=("TMIN", "TMAX"))
    f.add_argument("--per-decade", type=int, default=6)
    f.add_argument("--family", choices=("auto", "power", "log", "const"), default="auto")

    pr = add("predict", cmd_predict, "symbolic small-time expansion of the trace correction")
    pr.add_argument("--config", required=True, help="boundary JSON {nus, b, theta}")
    pr.add_argument("--depth", type=int, default=3)
    pr.add_argument("--rho-window", type=float, default=1.0)
    pr.add_argument("--alpha-window", type=int, default=3)
    pr.add_argument("--resolve-vanishing", action="store_true")

    il = add("invlap", cmd_invlap, "numerical inverse Laplace transform with diagnostics")
    il.add_argument("--symbol", choices=("log", "power", "pole"), required=True)
    il.add_argument("--t", type=parse_grid, required=True)
    il.add_argument("--kappa", type=float)
    il.add_argument("--theta", type=float, default=0.0, help="sets kappa when --kappa is absent")
    il.add_argument("--alpha", type=int, default=1)
    il.add_argument("--rho", type=float, default=0.0)
    il.add_argument("--a", type=float, default=1.0, help="pole location -a")
    il.add_argument("--power", type=float, default=0.0)
    il.add_argument("--contour", choices=("auto", "vertical", "deformed"), default="auto")
    il.add_argument("--delta", type=float)
    il.add_argument("--radius", type=float)
    il.add_argument("--nodes", type=int, default=64)
    il.add_argument("--rtol", type=float, default=1e-8)

    ix = add("indexset", cmd_indexset, "compose side-face index sets")
    ix.add_argument("--left", required=True, help='JSON {"lf": [[g, p], ...], "rf": [...]}')
    ix.add_argument("--right", required=True)
    ix.add_argument("--l", type=float, required=True, help="order of the left factor")
    ix.add_argument("--lp", type=float, required=True, help="order of the right factor")

    v = add("verify", cmd_verify, "run acceptance checks")
    from .acceptance import SUITES
    v.add_argument("--suite", choices=sorted(SUITES), default="all")
    return p


DATA_ERRORS = (InputDataError, DomainError, CompositionError, SingularSymbolError,
               UnsupportedReductionError, EnumerationError, ConditioningError, AccuracyError)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
    except DATA_ERRORS as exc:
        report = {"error": type(exc).__name__, "message": str(exc)}
        report.update(getattr(exc, "report", None) or {})
        sys.stderr.write(json.dumps(report, sort_keys=True, default=str) + "\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

"""Executable acceptance checks shared by the test suite and ``edgeheat verify``.

Each ``check_*`` function runs one criterion at its fixed tolerance and
returns a :class:`CriterionResult`; none of them raise on failure.
"""

from dataclasses import dataclass, field
import math
import time

import numpy as np
from scipy import integrate

from . import asymptotics as asy
from .boundary import LagrangianMatrix, NuSpectrum, validate_lagrangian
from .model_kernel import (TimeProfile, extract_boundary_coeffs, fit_window,
                           friedrichs_kernel, gn_symbol, images_kernel, signaling_solution)
from .trace_lab import (IntervalRealization, eigenvalues, fd_eigen_oracle, fit_leading,
                        log_grid, trace_difference)
from .transforms import (ContourSpec, SymbolFunction, arc_decay_check, arc_integrand_bound,
                         bromwich_inverse, kappa_theta)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    measured: dict = field(default_factory=dict)
    note: str = ""
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        text = f"criterion {self.number:2d} {status}: {self.title}"
        return f"{text} ({self.note})" if self.note else text

    def to_json(self):
        return {"criterion": self.number, "title": self.title, "passed": self.passed,
                "measured": _plain(self.measured), "note": self.note,
                "seconds": round(self.seconds, 3)}


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _timed(fn):
    def run():
        t0 = time.perf_counter()
        res = fn()
        res.seconds = time.perf_counter() - t0
        return res
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


@_timed
def check_closed_form_kernel():
    """E_{1/2} against the images formula on a 20x20x10 grid."""
    x = np.linspace(0.05, 5.0, 20)
    t = np.geomspace(1e-2, 10.0, 10)
    X, XT, T = np.meshgrid(x, x, t, indexing="ij")
    e = friedrichs_kernel(0.5, T, X, XT)
    ref = images_kernel(T, X, XT)
    rel = float(np.max(np.abs(e - ref) / np.abs(ref)))
    return CriterionResult(1, "E_1/2 equals the images kernel", rel <= 1e-12,
                           {"max_rel_error": rel, "tolerance": 1e-12}, f"max rel {rel:.2e}")


def _semigroup_error(nu, t, s, x, xt):
    def f(z):
        return friedrichs_kernel(nu, t, x, z) * friedrichs_kernel(nu, s, z, xt)
    lo, hi = sorted((x, xt))
    width = 12.0 * math.sqrt(max(t, s))
    pts = [0.0, max(lo - width, 0.0) * 0.5, lo, hi, hi + width, hi + 3 * width]
    pts = sorted(set(pts))
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        total += integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-12, limit=400)[0]
    total += integrate.quad(f, pts[-1], np.inf, epsabs=0.0, epsrel=1e-12, limit=400)[0]
    ref = friedrichs_kernel(nu, t + s, x, xt)
    return abs(total - ref) / abs(ref)


@_timed
def check_semigroup(seed=20240601):
    """``int E(t,x,z) E(s,z,xt) dz = E(t+s,x,xt)`` at random points."""
    rng = np.random.default_rng(seed)
    worst = {}
    for nu in (0.0, 0.3, 0.5, 0.7):
        errs = []
        for _ in range(5):
            t, s = rng.uniform(0.05, 2.0, 2)
            x, xt = rng.uniform(0.1, 3.0, 2)
            errs.append(_semigroup_error(nu, t, s, x, xt))
        worst[str(nu)] = max(errs)
    m = max(worst.values())
    return CriterionResult(2, "semigroup identity", m <= 1e-8,
                           {"max_rel_error_by_nu": worst, "tolerance": 1e-8}, f"max rel {m:.2e}")


def reference_outgoing(nu, t):
    """``L^{-1}[G(zeta)/(zeta+1)](t)`` by the deformed contour."""
    F = SymbolFunction(lambda z: gn_symbol(nu, z, allow_cut=True) / (z + 1.0), 0, 1.0 - nu,
                       "log" if nu == 0.0 else "power", 2.0)
    return bromwich_inverse(F, t, ContourSpec(kind="deformed", radius=2.0)).value


@_timed
def check_signaling(times=(0.2, 0.35, 0.6, 1.0, 1.5, 2.0)):
    """Extracted edge coefficients of the signaling solution with h = e^{-t}."""
    h = TimeProfile.exponential(1.0)
    rows = {}
    worst_minus = worst_plus = 0.0
    for nu in (0.0, 0.4):
        for t in times:
            x = fit_window(t)
            u = np.array([signaling_solution(nu, 0, h, t, xi) for xi in x])
            c = extract_boundary_coeffs(nu, x, u)
            em = abs(c.cminus - h(t)) / abs(h(t))
            ref = reference_outgoing(nu, t)
            ep = abs(c.cplus - ref) / abs(ref)
            worst_minus, worst_plus = max(worst_minus, em), max(worst_plus, ep)
            rows[f"nu={nu},t={t}"] = {"cminus": c.cminus, "h": h(t), "cplus": c.cplus,
                                      "reference": ref}
    ok = worst_minus <= 1e-3 and worst_plus <= 1e-3
    return CriterionResult(3, "signaling solution edge coefficients", ok,
                           {"max_rel_cminus": worst_minus, "max_rel_cplus": worst_plus,
                            "rows": rows, "tolerance": 1e-3},
                           f"c- {worst_minus:.1e}, c+ {worst_plus:.1e}")


@_timed
def check_log_inverse(times=(1e-4, 1e-6, 1e-8)):
    """Ratios of ``t log(1/t) L^{-1}[(log zeta + kappa)^{-1}]`` across decades."""
    kappa = kappa_theta(0.0)
    F = SymbolFunction.log_power(kappa, 1)
    vals = [bromwich_inverse(F, t).value for t in times]
    scaled = [t * math.log(1 / t) * v for t, v in zip(times, vals)]
    ratios = [scaled[i + 1] / scaled[i] for i in range(len(scaled) - 1)]
    sq = [t * math.log(1 / t) ** 2 * v for t, v in zip(times, vals)]
    sq_ratios = [sq[i + 1] / sq[i] for i in range(len(sq) - 1)]
    ok = all(0.8 <= r <= 1.25 for r in ratios)
    note = "ratios " + ", ".join(f"{r:.3f}" for r in ratios)
    if not ok:
        note += ("; with log^2 scaling " + ", ".join(f"{r:.3f}" for r in sq_ratios)
                 + ": leading order is t^-1 log^-2 because 1/Gamma(0) removes the log^-1 term")
    return CriterionResult(4, "inverse Laplace of a log symbol scales as t^-1 log^-1", ok,
                           {"times": list(times), "values": vals, "t_log_f": scaled,
                            "ratios": ratios, "t_log2_f": sq, "log2_ratios": sq_ratios,
                            "window": [0.8, 1.25]}, note)


def trace_curve_for(nu, theta, t_min=1e-6, t_max=1e-2, per_decade=6):
    grid = log_grid(t_min, t_max, per_decade)
    return trace_difference(IntervalRealization.mixed(nu, theta),
                            IntervalRealization.friedrichs(nu), grid)


@_timed
def check_half_order_constant():
    """nu = 1/2, Neumann minus Dirichlet: the difference tends to 1/2."""
    c = trace_curve_for(0.5, 0.0)
    at = trace_difference(IntervalRealization.mixed(0.5, 0.0),
                          IntervalRealization.friedrichs(0.5), [1e-4]).values[0]
    fit = fit_leading(c)
    ok = abs(at - 0.5) <= 0.01 and abs(fit.power) <= 0.02 and fit.conclusive
    return CriterionResult(5, "nu=1/2 trace difference tends to 1/2", ok,
                           {"d_1e-4": at, "fit": fit.to_json()},
                           f"d(1e-4)={at:.6f}, a={fit.power:.4f}")


@_timed
def check_log_trace():
    """nu = 0, theta = 0: the difference decays like 1/log(1/t)."""
    c = trace_curve_for(0.0, 0.0)
    fit = fit_leading(c, family="log")
    power = fit_leading(c, family="power")
    gain = power.residual / fit.residual
    ok = abs(fit.power) <= 0.05 and abs(fit.logpower - 1) <= 0.15 and gain >= 10.0
    return CriterionResult(6, "nu=0 trace difference decays like log^-1", ok,
                           {"fit": fit.to_json(), "power_fit": power.to_json(),
                            "residual_gain": gain},
                           f"a={fit.power:.4f}, k={fit.logpower:.3f}, gain {gain:.0f}x")


@_timed
def check_constant_trace():
    """nu = 0.3, theta = 1: a constant leading term (not t^{nu})."""
    c = trace_curve_for(0.3, 1.0)
    fit = fit_leading(c)
    power = fit_leading(c, family="power")
    const_fit = fit_leading(c, family="const")
    if fit.conclusive and abs(fit.power) <= 0.05:
        observed = f"t^0 (constant {const_fit.constant:.4f})"
    elif abs(power.power - 0.3) <= 0.05:
        observed = "t^0.3: the t^nu order rather than the predicted constant"
    else:
        observed = f"t^{fit.power:.3f}"
    ok = fit.conclusive and abs(fit.power) <= 0.05
    return CriterionResult(7, "nu=0.3 trace difference has a constant leading term", ok,
                           {"fit": fit.to_json(), "power_fit_a": power.power,
                            "const_fit": const_fit.to_json(), "observed_leading": observed,
                            "predicted_leading": "t^0"},
                           f"observed {observed}; remainder t^{const_fit.remainder_power:.3f}")


MAIN_ROWS = [
    ((0.0, 0.0, False), (0, 2)),
    ((0.0, 0.4, False), (asy.exact("0.4"), 1)),
    ((0.0, 0.0, True), (0, 1)),
    ((0.3, 0.5, False), (asy.exact("0.8"), 0)),
    ((0.3, 0.3, True), (0, 0)),
]


def random_configurations(count=20, seed=8, max_size=3):
    rng = np.random.default_rng(seed)
    choices = [0.0, 0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
    out = []
    for _ in range(count):
        n = int(rng.integers(1, max_size + 1))
        nus = sorted(float(rng.choice(choices)) for _ in range(n))
        out.append((nus, asy.random_lagrangian(nus, rng)))
    return out


@_timed
def check_symbolic_table(count=20):
    """Table rows and the composed pipeline agree exactly."""
    rows_ok = all(asy.main_leading_order(*args).order == expect for args, expect in MAIN_ROWS)
    mismatches = []
    for nus, G in random_configurations(count):
        sp = NuSpectrum.from_list(nus)
        if not validate_lagrangian(G, sp):
            mismatches.append({"nus": nus, "error": "not Lagrangian"})
            continue
        for i, j, got, want in asy.all_orders_consistent(sp, G):
            mismatches.append({"nus": nus, "entry": [i, j], "pipeline": str(got), "table": str(want)})
    ok = rows_ok and not mismatches
    return CriterionResult(8, "leading-order table equals the composed pipeline", ok,
                           {"rows_ok": rows_ok, "configurations": count, "mismatches": mismatches},
                           f"{count} configurations, {len(mismatches)} mismatches")


LK_CASES = [
    ([0.0], [[0.5]]),
    ([0.3], [[1.0]]),
    ([0.5], [[0.0]]),
    ([0.3, 0.5], [[1.0, 0.5], [0.3, 2.0]]),
    ([0.0, 0.4], [[0.2, 0.8], [1.0, 1.0]]),
    ([0.0, 0.0], [[0.1, 0.3], [0.3, -0.2]]),
    ([0.3, 0.3], [[1.0, -0.7], [-0.7, 0.5]]),
    ([0.3, 0.5], [[1.0, 0.0], [0.0, 2.0]]),
]


@_timed
def check_symbol_inverse():
    """Leading terms of the inverse symbol and the identity residual."""
    problems = []
    for nus, theta in LK_CASES:
        sp = NuSpectrum.from_list(nus)
        G = LagrangianMatrix.mixed(theta)
        M = asy.assemble_gn_matrix(sp, G)
        K = asy.invert_symbol_matrix(M)
        n = len(nus)
        for i in range(n):
            for j in range(n):
                entry = K.entries[i][j]
                if theta[i][j] == 0.0 and i != j:
                    if entry:
                        problems.append((nus, i, j, "off-diagonal block should vanish"))
                    continue
                lead = entry.leading
                want = asy.lk_leading_shape(nus[i], nus[j], i == j)
                if lead is None or (lead.rho, lead.abs_alpha) != want:
                    problems.append((nus, i, j, "leading", None if lead is None else
                                     (str(lead.rho), lead.abs_alpha), (str(want[0]), want[1])))
        for row in asy.identity_residual(M, K):
            for r in row:
                if r or not (r.rho_cut is None or r.rho_cut > 0):
                    problems.append((nus, "residual", repr(r)))
    ok = not problems
    return CriterionResult(9, "inverse symbol leading terms and identity residual", ok,
                           {"cases": len(LK_CASES), "problems": [str(p) for p in problems]},
                           f"{len(LK_CASES)} matrices, {len(problems)} problems")


def _reference_compose(E_lf, Ep_lf, l_prime):
    # the composition formula written out on plain sets, cut at the common cutoff
    cut = min(Ep_lf.gamma_max, E_lf.gamma_max + asy.exact(l_prime))
    shifted = {(g + asy.exact(l_prime), p) for g, p in E_lf.pairs}
    base = {x for x in set(Ep_lf.pairs) | shifted if x[0] <= cut}
    extra = {(z, p + q + 1) for z, p in Ep_lf.pairs for w, q in shifted if z == w and z <= cut}
    return base | extra


def random_index_set(rng, gamma_max_offset=4):
    n = int(rng.integers(0, 4))
    seeds = [(asy.exact(int(rng.integers(-2, 7))) / 2, int(rng.integers(0, 3))) for _ in range(n)]
    low = min((g for g, _ in seeds), default=asy.exact(0))
    return asy.IndexSet(seeds, low + gamma_max_offset)


@_timed
def check_index_algebra(count=50, seed=11):
    """Composition of random truncated index sets against the formula."""
    rng = np.random.default_rng(seed)
    bad = []
    overlaps = 0
    done = 0
    while done < count:
        E = (random_index_set(rng), random_index_set(rng))
        Ep = (random_index_set(rng), random_index_set(rng))
        l, lp = (asy.exact(int(rng.integers(0, 5))) / 2 for _ in range(2))
        if not (E[0].pairs and Ep[1].pairs) or E[0].min_gamma + Ep[1].min_gamma <= -1:
            continue
        done += 1
        P_lf, P_rf = asy.index_compose(E, Ep, l, lp)
        want_lf = _reference_compose(E[0], Ep[0], lp)
        want_rf = _reference_compose(Ep[1], E[1], l)
        if P_lf.pairs != want_lf or P_rf.pairs != want_rf:
            bad.append(done)
        if not (P_lf.is_valid() and P_rf.is_valid()):
            bad.append(("invalid", done))
        shifted = {(g + lp, p) for g, p in E[0].pairs}
        overlaps += any((g, 0) in shifted for g, _ in Ep[0].pairs)
    ok = not bad and overlaps > 0
    return CriterionResult(10, "index-set composition formula", ok,
                           {"cases": count, "with_overlap": overlaps, "mismatches": bad},
                           f"{count} cases, {overlaps} with overlapping exponents")


ORACLE_REALIZATIONS = [IntervalRealization(nu, bc, th)
                       for nu in (0.0, 0.3, 0.5)
                       for bc, th in (("friedrichs", 0.0), ("mixed", 0.0), ("mixed", 1.0))]


@_timed
def check_oracle_agreement():
    """First ten eigenvalues: secular roots versus the finite-volume oracle."""
    worst = {}
    for r in ORACLE_REALIZATIONS:
        s = eigenvalues(r, 60.0)
        o = fd_eigen_oracle(r)
        ref = s.values[:10]
        rel = np.abs(o.values - ref) / np.maximum(1.0, np.abs(ref))
        worst[r.label] = float(rel.max())
    m = max(worst.values())
    return CriterionResult(11, "secular eigenvalues match the finite-volume oracle", m <= 1e-4,
                           {"max_rel_by_realization": worst, "tolerance": 1e-4},
                           f"{len(worst)} realizations, max rel {m:.1e}")


@_timed
def check_arc_bound():
    """Arc integral over the bound stays within a factor 2 between R = 1e3 and 1e4."""
    cases = {"alpha=1,nu_beta=0": (1, 0.0), "alpha=0,nu_beta=0.5": (0, 0.5)}
    out = {}
    ok = True
    for name, (alpha, nb) in cases.items():
        c3 = arc_decay_check(alpha, nb, 1e3) / arc_integrand_bound(alpha, nb, 1e3)
        c4 = arc_decay_check(alpha, nb, 1e4) / arc_integrand_bound(alpha, nb, 1e4)
        ratio = c4 / c3
        out[name] = {"C_1e3": c3, "C_1e4": c4, "ratio": ratio}
        ok = ok and 0.5 <= ratio <= 2.0
    return CriterionResult(12, "arc integral decays like (log R)^-|alpha| R^-nu_beta", ok, out,
                           ", ".join(f"{k}: {v['ratio']:.3f}" for k, v in out.items()))


CHECKS = {
    1: check_closed_form_kernel, 2: check_semigroup, 3: check_signaling, 4: check_log_inverse,
    5: check_half_order_constant, 6: check_log_trace, 7: check_constant_trace,
    8: check_symbolic_table, 9: check_symbol_inverse, 10: check_index_algebra,
    11: check_oracle_agreement, 12: check_arc_bound,
}

SUITES = {
    "model": (1, 2, 3, 4, 12),
    "trace": (5, 6, 7, 11),
    "symbolic": (8, 9, 10),
}
SUITES["all"] = tuple(sorted(set().union(*SUITES.values())))


def run_suite(name="all"):
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return [CHECKS[n]() for n in SUITES[name]]

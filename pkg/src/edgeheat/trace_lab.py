"""Interval realizations of ``l_nu`` and their heat traces.

The operator ``-d^2/dx^2 + (nu^2 - 1/4)/x^2`` acts on (0, 1] with Dirichlet
data at x = 1 and, at x = 0, either the Friedrichs condition ``c^- = 0`` or
the mixed condition ``c^+ = theta c^-``.  Here ``c^+`` and ``c^-`` are the
coefficients of ``x^{nu+1/2}`` and ``x^{-nu+1/2}`` (``sqrt x`` and
``sqrt x log x`` when nu = 0).
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy import linalg, optimize

from . import specfun
from .errors import AccuracyError, DomainError, EnumerationError

FRIEDRICHS = "friedrichs"
MIXED = "mixed"

# Lower bound on the gap between consecutive Bessel zeros j_{nu,n}, nu in [0, 1).
ZERO_GAP = 3.0


@dataclass(frozen=True)
class IntervalRealization:
    """One self-adjoint realization on (0, 1].

    Parameters
    ----------
    nu : float
        Exponent in [0, 1).
    bc : {"friedrichs", "mixed"}
    theta : float
        Mixed-condition parameter; ignored for Friedrichs.
    """

    nu: float
    bc: str = FRIEDRICHS
    theta: float = 0.0

    def __post_init__(self):
        nu = float(self.nu)
        if not 0.0 <= nu < 1.0:
            raise DomainError(f"nu = {nu} outside [0, 1)")
        if self.bc not in (FRIEDRICHS, MIXED):
            raise ValueError(f"bc must be '{FRIEDRICHS}' or '{MIXED}'")
        theta = float(self.theta) if self.bc == MIXED else 0.0
        if not math.isfinite(theta):
            raise DomainError("theta must be finite")
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "theta", theta)

    @classmethod
    def friedrichs(cls, nu):
        return cls(nu, FRIEDRICHS)

    @classmethod
    def mixed(cls, nu, theta):
        return cls(nu, MIXED, theta)

    @property
    def label(self):
        if self.bc == FRIEDRICHS:
            return f"nu={self.nu:g},friedrichs"
        return f"nu={self.nu:g},mixed({self.theta:g})"

    def lowest_sign(self):
        """Sign of the lowest eigenvalue: -1, 0 or +1.

        Only mixed conditions can push it below zero: for nu > 0 when
        ``theta < -1`` and for nu = 0 when ``theta > 0``.
        """
        if self.bc == FRIEDRICHS:
            return 1
        critical = 0.0 if self.nu == 0.0 else -1.0
        if self.theta == critical:
            return 0
        if self.nu == 0.0:
            return -1 if self.theta > 0.0 else 1
        return -1 if self.theta < -1.0 else 1


def _mixed_constant(nu):
    return specfun.gamma_fn(1.0 + nu) / specfun.gamma_fn(1.0 - nu)


def _edge_series(nu, theta, z):
    """Secular data near the edge as power series in ``z = (x/2)^2`` (signed).

    Writes the secular function as ``theta B(z) + A(z)`` for nu > 0 and
    ``theta B(z) - S(z)`` at nu = 0, with ``B`` the normalised regular
    solution.  ``A - B`` and ``S`` start at order ``z``, so summing them
    separately avoids the cancellation of the closed forms near ``x = 0``.

    Returns
    -------
    (float, float)
        The series value and ``B(z)``.
    """
    ta = tb = 1.0
    b_sum, rest, harmonic = 1.0, 0.0, 0.0
    for k in range(1, 80):
        if nu == 0.0:
            tb *= z / (k * k)
            harmonic += 1.0 / k
            step = -harmonic * tb
        else:
            ta *= z / (k * (k - nu))
            tb *= z / (k * (k + nu))
            step = ta - tb
        b_sum += tb
        rest += step
        if abs(tb) + abs(step) <= 1e-17 * (abs(b_sum) + abs(rest)):
            break
    lead = theta if nu == 0.0 else 1.0 + theta
    return lead * b_sum + rest, b_sum


# below this argument the secular functions are summed from their edge series
_SERIES_ARG = 2.0


def secular_function(r, lam):
    """Value at ``x = 1`` of the solution obeying the condition at 0.

    Its positive zeros are the square roots of the positive eigenvalues.

    Parameters
    ----------
    r : IntervalRealization
    lam : float
        Positive spectral parameter.

    Returns
    -------
    float
        ``J_nu(lam)`` for Friedrichs; for mixed data
        ``J_{-nu}(lam) + theta G (lam/2)^{-2nu} J_nu(lam)`` with
        ``G = Gamma(1+nu)/Gamma(1-nu)``, or at nu = 0
        ``(2/pi)(theta - log(lam/2) - gamma) J_0(lam) + Y_0(lam)``.
    """
    lam = float(lam)
    if not lam > 0.0:
        raise DomainError("secular_function needs lambda > 0")
    nu = r.nu
    if r.bc == FRIEDRICHS:
        return specfun.bessel_j(nu, lam)
    if lam <= _SERIES_ARG:
        value, _ = _edge_series(nu, r.theta, -0.25 * lam * lam)
        if nu == 0.0:
            return 2.0 / math.pi * value
        return (0.5 * lam) ** (-nu) / specfun.gamma_fn(1.0 - nu) * value
    if nu == 0.0:
        j0, y0, _, _ = specfun.bessel_jy(0.0, lam)
        a = 2.0 / math.pi * (r.theta - math.log(0.5 * lam) - specfun.EULER_GAMMA)
        return a * j0 + y0
    scale = _mixed_constant(nu) * (0.5 * lam) ** (-2.0 * nu)
    return specfun.bessel_j(-nu, lam) + r.theta * scale * specfun.bessel_j(nu, lam)


def negative_secular_function(r, kappa):
    """Secular function at ``lambda^2 = -kappa^2``, normalised to stay finite.

    For nu = 0 this is ``theta - log(kappa/2) - gamma - K_0/I_0``; for nu > 0
    it is ``I_{-nu}/I_nu + theta G (kappa/2)^{-2nu}``.  Both are monotone in
    kappa and share their root with the unnormalised equation.
    """
    kappa = float(kappa)
    if not kappa > 0.0:
        raise DomainError("kappa must be positive")
    nu = r.nu
    if kappa <= _SERIES_ARG:
        value, b = _edge_series(nu, r.theta, 0.25 * kappa * kappa)
        if nu == 0.0:
            return value / b
        return _mixed_constant(nu) * (0.5 * kappa) ** (-2.0 * nu) * value / b
    ratio = specfun.bessel_k_scaled(nu, kappa) / specfun.bessel_i_scaled(nu, kappa) * math.exp(-2.0 * kappa)
    if nu == 0.0:
        return r.theta - math.log(0.5 * kappa) - specfun.EULER_GAMMA - ratio
    # I_{-nu} = I_nu + (2/pi) sin(nu pi) K_nu
    return (1.0 + 2.0 / math.pi * math.sin(nu * math.pi) * ratio
            + r.theta * _mixed_constant(nu) * (0.5 * kappa) ** (-2.0 * nu))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues ``lambda_n^2`` below ``lambda_max^2``, ascending.

    A mixed realization may contribute one eigenvalue that is zero or
    negative.  ``certificate`` records how completeness was established.
    """

    values: np.ndarray
    lambda_max: float
    certificate: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise ValueError("a spectrum needs at least one eigenvalue")
        if np.any(np.diff(v) <= 0.0):
            raise ValueError("eigenvalues must be strictly increasing")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_values(cls, values, lambda_max=None):
        v = np.sort(np.asarray(values, dtype=float))
        lm = float(lambda_max) if lambda_max is not None else math.sqrt(max(v[-1], 0.0))
        return cls(v, lm, {"source": "given"})

    @property
    def lambdas(self):
        """``sqrt`` of the eigenvalues; negative ones give negative numbers."""
        return np.sign(self.values) * np.sqrt(np.abs(self.values))

    def __len__(self):
        return self.values.size


def _root(f, a, b, fa=None, fb=None):
    fa = f(a) if fa is None else fa
    fb = f(b) if fb is None else fb
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        raise EnumerationError(f"no sign change on [{a}, {b}]", (a, b))
    rtol = 4.0 * np.finfo(float).eps
    if a > 0.0 and b > 1e3 * a:
        # brackets spanning many decades are located in log x, then polished in x
        u = optimize.brentq(lambda v: f(math.exp(v)), math.log(a), math.log(b),
                            xtol=1e-13, rtol=rtol, maxiter=200)
        lo, hi = math.exp(u) * (1 - 1e-9), math.exp(u) * (1 + 1e-9)
        flo, fhi = f(max(lo, a)), f(min(hi, b))
        if (flo > 0.0) != (fhi > 0.0):
            a, b = max(lo, a), min(hi, b)
        else:
            return math.exp(u)
    # absolute tolerance scaled to the bracket so roots near 0 keep full precision
    xtol = max(1e-15 * min(abs(a), abs(b)), 1e-300)
    return optimize.brentq(f, a, b, xtol=xtol, rtol=rtol, maxiter=200)


def _negative_root(r):
    g = lambda k: negative_secular_function(r, k)
    lo, hi = 1e-3, 1.0
    # the function tends to its small-kappa limit sign at 0 and to the other sign at infinity
    while (g(lo) > 0.0) == (g(hi) > 0.0):
        if (g(lo) > 0.0) == (r.nu == 0.0):
            hi *= 2.0
            if hi > 1e300:
                raise EnumerationError("negative eigenvalue bracket diverged", (lo, hi))
        else:
            lo *= 1e-3
            if lo < 1e-300:
                raise EnumerationError("negative eigenvalue bracket collapsed", (lo, hi))
    return _root(g, lo, hi)


def _first_positive_root(r, f, upper, f_upper):
    # as lambda -> 0 the secular function has the sign of (1 + theta) for nu > 0
    # and of theta for nu = 0; walk down until that sign appears
    limit_sign = (1.0 + r.theta) if r.nu > 0.0 else r.theta
    lo = 0.5 * upper
    while True:
        flo = f(lo)
        if (flo > 0.0) != (f_upper > 0.0):
            return _root(f, lo, upper, flo, f_upper)
        if (flo > 0.0) == (limit_sign > 0.0) and lo < 1e-8:
            raise EnumerationError("lowest positive eigenvalue not bracketed", (lo, upper))
        lo *= 0.5
        if lo < 1e-300:
            raise EnumerationError("lowest positive eigenvalue not bracketed", (lo, upper))


def eigenvalues(r, lambda_max):
    """All eigenvalues with ``lambda < lambda_max``.

    Friedrichs eigenvalues are squared zeros of ``J_nu``.  Mixed eigenvalues
    interlace with them: exactly one lies between consecutive Friedrichs
    values, and one below the first.  Each bracket is checked for a sign
    change before the root is refined, so a missing sign change is reported
    instead of silently losing a root.

    Raises
    ------
    EnumerationError
        When a bracket shows no sign change.
    """
    lambda_max = float(lambda_max)
    if lambda_max < 10.0:
        raise DomainError("lambda_max must be at least 10")
    zeros = specfun.bessel_j_zeros_below(r.nu, lambda_max)
    if r.bc == FRIEDRICHS:
        return Spectrum(zeros ** 2, lambda_max,
                        {"method": "bessel zeros", "count": int(zeros.size)})
    f = lambda lam: secular_function(r, lam)
    upper = np.append(zeros, specfun.bessel_j_zeros(r.nu, zeros.size + 1))
    fz = [f(z) for z in upper]
    out = []
    sign = r.lowest_sign()
    if sign < 0:
        out.append(-_negative_root(r) ** 2)
    elif sign == 0:
        out.append(0.0)
    else:
        out.append(_first_positive_root(r, f, upper[0], fz[0]) ** 2)
    changes = 0
    for k in range(upper.size - 1):
        a, b = upper[k], upper[k + 1]
        if (fz[k] > 0.0) == (fz[k + 1] > 0.0):
            raise EnumerationError(f"bracket [{a}, {b}] has no sign change", (a, b))
        changes += 1
        lam = _root(f, a, b, fz[k], fz[k + 1])
        if lam < lambda_max:
            out.append(lam * lam)
    cert = {"method": "interlacing brackets", "brackets": int(upper.size - 1),
            "sign_changes": changes, "lowest_sign": sign}
    return Spectrum(np.array(out), lambda_max, cert)


# ---------------------------------------------------------------------------
# finite-volume oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OracleResult:
    """Richardson-extrapolated eigenvalues with the raw mesh sequence."""

    values: np.ndarray
    meshes: tuple
    raw: np.ndarray
    order: np.ndarray
    error_estimate: np.ndarray


def _fv_eigenvalues(r, m, count):
    # v = x^{nu - 1/2} u turns the problem into -(p v')' = lambda^2 p v, p = x^{1-2nu};
    # local solutions near 0 are 1 and x^{2nu} (1 and log x at nu = 0)
    nu = r.nu
    h = 1.0 / m
    x = h * np.arange(1, m)                 # unknowns; v(1) = 0
    faces = np.concatenate([[0.0], h * (np.arange(1, m) + 0.5)])
    faces[-1] = min(faces[-1], 1.0)
    e = 2.0 - 2.0 * nu
    mass = (faces[1:] ** e - faces[:-1] ** e) / e
    xr = h * np.arange(2, m + 1)
    if nu == 0.0:
        res = np.log(xr / x)
    else:
        res = x ** (2.0 * nu) * np.expm1(2.0 * nu * np.log1p(h / x)) / (2.0 * nu)
    cond = 1.0 / res
    diag = cond.copy()
    diag[1:] += cond[:-1]
    x1 = x[0]
    if r.bc == FRIEDRICHS:
        sigma = 0.0 if nu == 0.0 else 2.0 * nu / x1 ** (2.0 * nu)
    elif nu == 0.0:
        sigma = 1.0 / (r.theta + math.log(x1))
    else:
        sigma = 2.0 * nu * r.theta / (1.0 + r.theta * x1 ** (2.0 * nu))
    diag[0] += sigma
    s = 1.0 / np.sqrt(mass)
    d = diag * s * s
    off = -cond[:-1] * s[:-1] * s[1:]
    return linalg.eigh_tridiagonal(d, off, select="i", select_range=(0, count - 1),
                                   eigvals_only=True, check_finite=False)


def fd_eigen_oracle(r, m=4000, count=10, levels=3):
    """Brute-force eigenvalues from a finite-volume discretisation.

    The problem is rewritten in the variable ``v = x^{nu-1/2} u`` where the
    two local solutions at 0 are ``1`` and ``x^{2nu}`` (``1`` and ``log x``).
    Face fluxes use exact resistances ``int dx/p`` on a uniform mesh and the
    flux through ``x = 0`` is the one the boundary condition prescribes for
    the local solution through the first node.  Meshes ``m, 2m, 4m`` are
    combined by Richardson extrapolation with the observed order.

    Raises
    ------
    AccuracyError
        If the mesh sequence does not contract.
    """
    if m < 200:
        raise DomainError("mesh size must be at least 200")
    meshes = tuple(m * 2 ** k for k in range(levels))
    raw = np.array([_fv_eigenvalues(r, mm, count) for mm in meshes])
    d1 = raw[-2] - raw[-3]
    d2 = raw[-1] - raw[-2]
    scale = np.maximum(1.0, np.abs(raw[-1]))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.abs(d1 / d2)
    contracting = ratio >= 1.5
    # without clean contraction the finest mesh is used when its last step is tiny
    small = np.maximum(np.abs(d1), np.abs(d2)) <= 1e-6 * scale
    if np.any(~contracting & ~small):
        raise AccuracyError("finite-volume eigenvalues do not converge under refinement",
                            {"ratio": ratio.tolist(), "meshes": meshes})
    order = np.where(contracting, np.log2(np.where(contracting, ratio, 2.0)), np.nan)
    corr = np.where(contracting, d2 / np.where(contracting, ratio - 1.0, 1.0), 0.0)
    values = raw[-1] + corr
    err = np.where(contracting, np.abs(corr), np.maximum(np.abs(d1), np.abs(d2)))
    return OracleResult(values, meshes, raw, order, err)


# ---------------------------------------------------------------------------
# heat traces
# ---------------------------------------------------------------------------

def tail_bound(lambda_max, t):
    """Bound on ``sum exp(-lambda_n^2 t)`` over eigenvalues beyond ``lambda_max``.

    At most one eigenvalue sits between consecutive Friedrichs values and
    those are at least ``ZERO_GAP`` apart, so the tail is dominated by
    ``exp(-L^2 t) (2 + 1/(2 L gap t))``.
    """
    L = float(lambda_max)
    return math.exp(-L * L * t) * (2.0 + 1.0 / (2.0 * L * ZERO_GAP * t))


def lambda_max_for(t_min):
    """``max(50, sqrt(46/t_min))``, so that ``exp(-lambda_max^2 t_min) <= 1e-20``."""
    return max(50.0, math.sqrt(46.0 / float(t_min)))


def _check_t(s, t):
    if not t > 0.0:
        raise DomainError("t must be positive")
    partial = math.fsum(np.exp(-s.values * t))
    bound = tail_bound(s.lambda_max, t)
    if bound > 1e-10 * abs(partial):
        need = math.sqrt(46.0 / t)
        raise DomainError(f"t = {t:g} below the valid range of this spectrum; "
                          f"needs lambda_max >= {need:.6g} (have {s.lambda_max:.6g})")
    return partial, bound


def heat_trace(s, t):
    """``sum_n exp(-lambda_n^2 t)`` with compensated summation.

    Returns
    -------
    (float, float)
        The partial sum and a bound on the neglected tail.

    Raises
    ------
    DomainError
        If the tail bound exceeds ``1e-10`` of the sum.
    """
    return _check_t(s, float(t))


@dataclass(frozen=True)
class TraceCurve:
    """Heat-trace values (or differences) on a time grid with tail bounds."""

    t: np.ndarray
    values: np.ndarray
    tail_bound: np.ndarray
    label: str = ""

    def __post_init__(self):
        for name in ("t", "values", "tail_bound"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not (self.t.shape == self.values.shape == self.tail_bound.shape):
            raise ValueError("grid, values and bounds must have equal shapes")

    def window(self, lo, hi):
        keep = (self.t >= lo * (1 - 1e-12)) & (self.t <= hi * (1 + 1e-12))
        return TraceCurve(self.t[keep], self.values[keep], self.tail_bound[keep], self.label)


def trace_curve(s, t_grid, label=""):
    t_grid = np.asarray(t_grid, dtype=float)
    vals, bounds = zip(*(heat_trace(s, t) for t in t_grid))
    return TraceCurve(t_grid, np.array(vals), np.array(bounds), label)


def trace_difference(r_mixed, r_friedrichs, t_grid, lambda_max=None):
    """``Tr exp(-t L_mixed) - Tr exp(-t L_F)`` on a grid.

    Both spectra are enumerated to the same ``lambda_max`` (by default
    ``max(50, sqrt(46/t_min))``); differences are summed with ``fsum`` over
    the joint list of exponentials so the large common part cancels exactly.
    """
    if r_mixed.nu != r_friedrichs.nu:
        raise ValueError("both realizations must share nu")
    t_grid = np.sort(np.asarray(t_grid, dtype=float))
    if t_grid.size == 0 or t_grid[0] <= 0.0:
        raise DomainError("time grid must be positive and nonempty")
    lm = lambda_max_for(t_grid[0]) if lambda_max is None else float(lambda_max)
    sa = eigenvalues(r_mixed, lm)
    sb = eigenvalues(r_friedrichs, lm)
    vals, bounds = [], []
    for t in t_grid:
        _check_t(sa, t)
        _check_t(sb, t)
        terms = np.concatenate([np.exp(-sa.values * t), -np.exp(-sb.values * t)])
        vals.append(math.fsum(terms))
        bounds.append(2.0 * tail_bound(lm, t))
    return TraceCurve(t_grid, np.array(vals), np.array(bounds),
                      f"{r_mixed.label} - {r_friedrichs.label}")


# ---------------------------------------------------------------------------
# leading-order fits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FitResult:
    """Leading behaviour ``const + amp t^a log(1/t)^{-k}`` fitted on a window.

    For the ``const`` family the leading term is the constant, ``power`` is
    0 and the exponent of the decaying remainder is ``remainder_power``.
    ``residual`` is the RMS of ``log|d| - log|model|``.
    """

    family: str
    power: float
    logpower: float
    amplitude: float
    constant: float
    residual: float
    window: tuple
    remainder_power: float = float("nan")
    conclusive: bool = True
    note: str = ""
    alternatives: dict = field(default_factory=dict)
    sensitivity: dict = field(default_factory=dict)

    def to_json(self):
        def num(v):
            return None if v is None or not math.isfinite(v) else float(v)
        return {"family": self.family, "a": num(self.power), "k": num(self.logpower),
                "amp": num(self.amplitude), "const": num(self.constant),
                "remainder_a": num(self.remainder_power), "residual": num(self.residual),
                "window": [float(w) for w in self.window], "conclusive": self.conclusive,
                "note": self.note,
                "alternatives": {k: num(v) for k, v in sorted(self.alternatives.items())},
                "sensitivity": {k: num(v) for k, v in sorted(self.sensitivity.items())}}


def _rms(x):
    return float(np.sqrt(np.mean(np.square(x))))


def _fit_power(t, d):
    A = np.column_stack([np.ones_like(t), np.log(t)])
    coef, *_ = np.linalg.lstsq(A, np.log(np.abs(d)), rcond=None)
    res = _rms(A @ coef - np.log(np.abs(d)))
    return {"a": coef[1], "k": 0.0, "amp": math.copysign(math.exp(coef[0]), d[0]),
            "const": 0.0, "residual": res}


def _fit_log(t, d):
    L = np.log(1.0 / t)
    A = np.column_stack([np.ones_like(t), np.log(t), -np.log(L)])
    coef, *_ = np.linalg.lstsq(A, np.log(np.abs(d)), rcond=None)
    res = _rms(A @ coef - np.log(np.abs(d)))
    return {"a": coef[1], "k": coef[2], "amp": math.copysign(math.exp(coef[0]), d[0]),
            "const": 0.0, "residual": res}


def _fit_const(t, d):
    # d = C + A t^a; for fixed a the model is linear in (C, A)
    def solve(a):
        B = np.column_stack([np.ones_like(t), t ** a])
        w = 1.0 / np.abs(d)
        coef, *_ = np.linalg.lstsq(B * w[:, None], d * w, rcond=None)
        return coef, B @ coef

    def loss(a):
        _, model = solve(a)
        return float(np.sum(((model - d) / d) ** 2))

    grid = np.linspace(0.02, 3.0, 150)
    a0 = grid[int(np.argmin([loss(a) for a in grid]))]
    opt = optimize.minimize_scalar(loss, bounds=(max(0.005, a0 - 0.05), a0 + 0.05),
                                   method="bounded", options={"xatol": 1e-10})
    a = float(opt.x)
    (C, amp), model = solve(a)
    with np.errstate(divide="ignore", invalid="ignore"):
        res = _rms(np.log(np.abs(model)) - np.log(np.abs(d))) if np.all(model * d > 0) else math.inf
    return {"a": 0.0, "k": 0.0, "amp": float(amp), "const": float(C), "residual": res,
            "remainder_a": a}


_FITTERS = {"power": _fit_power, "log": _fit_log, "const": _fit_const}


def fit_leading(curve, family="auto", window=(1e-6, 1e-2), threshold=0.05, gain=10.0):
    """Estimate the leading small-time behaviour of a curve.

    Parameters
    ----------
    curve : TraceCurve
    family : {"auto", "power", "log", "const"}
        ``power`` fits ``A t^a``; ``log`` fits ``A t^a log(1/t)^{-k}``;
        ``const`` fits ``C + A t^a``.  ``auto`` keeps the power law unless a
        three-parameter family lowers the residual by the factor ``gain``.
    window : (float, float)
        Time window; at least 12 points spanning 3 decades are required.
    threshold : float
        Residual (RMS in log space) above which the fit is marked inconclusive.

    Returns
    -------
    FitResult
        Inconclusive fits are returned with ``conclusive=False`` and a note.
    """
    c = curve.window(*window)
    t, d = c.t, c.values
    if t.size < 12 or math.log10(t.max() / t.min()) < 3.0 - 1e-9:
        raise ValueError("fit needs at least 12 points spanning 3 decades")
    if family not in ("auto", *_FITTERS):
        raise ValueError(f"unknown family {family!r}")
    window = (float(t.min()), float(t.max()))
    notes = []
    if np.any(d == 0.0) or np.any(np.sign(d) != np.sign(d[0])):
        return FitResult(family, math.nan, math.nan, math.nan, math.nan, math.inf, window,
                         conclusive=False, note="curve changes sign in the window")
    order = np.argsort(t)
    steps = np.diff(np.abs(d[order]))
    tol = 1e-9 * np.max(np.abs(d))
    if np.any(steps > tol) and np.any(steps < -tol):
        notes.append("non-monotone data")
    fits = {name: fn(t, d) for name, fn in _FITTERS.items()}
    alternatives = {name: f["residual"] for name, f in fits.items()}
    if fits["log"]["k"] < 0.0:
        # a growing log factor lies outside the log^{-k} family
        if family == "log":
            notes.append("log fit gave k < 0")
    if family == "auto":
        eligible = [n for n in ("log", "const") if not (n == "log" and fits[n]["k"] < 0.0)]
        best3 = min(eligible, key=lambda n: fits[n]["residual"])
        chosen = best3 if fits[best3]["residual"] * gain <= fits["power"]["residual"] else "power"
    else:
        chosen = family
    f = fits[chosen]
    # window sensitivity: refit the chosen family on each half of the window
    mid = math.sqrt(t.min() * t.max())
    sens = {}
    for part, mask in (("lower", t <= mid), ("upper", t >= mid)):
        if mask.sum() >= 4:
            g = _FITTERS[chosen](t[mask], d[mask])
            sens[f"a_{part}"] = float(g["remainder_a"] if chosen == "const" else g["a"])
            sens[f"k_{part}"] = float(g["k"])
    conclusive = f["residual"] <= threshold and not notes
    if f["residual"] > threshold:
        notes.append("residual above threshold")
    return FitResult(chosen, float(f["a"]), float(f["k"]), float(f["amp"]), float(f["const"]),
                     float(f["residual"]), window, float(f.get("remainder_a", math.nan)),
                     conclusive, "; ".join(notes), alternatives, sens)


def log_grid(t_min=1e-6, t_max=1e-2, per_decade=6):
    """Log-spaced time grid including both ends."""
    n = int(round(math.log10(t_max / t_min) * per_decade)) + 1
    return np.logspace(math.log10(t_min), math.log10(t_max), n)

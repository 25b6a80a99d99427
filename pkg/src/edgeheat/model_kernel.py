"""Model heat kernels of ``l_nu = -d^2/dx^2 + (nu^2 - 1/4)/x^2`` on the half-line.

``friedrichs_kernel`` is the heat kernel of the Friedrichs realization,
``boundary_kernel`` its normalized limit as one point approaches the edge, and
``signaling_solution`` the solution of the heat equation with zero initial
data whose incoming edge coefficient is a prescribed source ``h``.
"""

from dataclasses import dataclass, field
import cmath
import math
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from ._backend import kernels as _k
from .errors import AccuracyError, ConditioningError, DomainError
from .specfun import EULER_GAMMA, bessel_k, gamma_fn

LOG2 = math.log(2.0)


def _check_nu(nu):
    nu = float(nu)
    if not 0.0 <= nu < 1.0:
        raise DomainError(f"nu must lie in [0, 1), got {nu}")
    return nu


def c_nu(nu):
    """Normalization of the signaling solution: -1 at nu = 0, else 2 nu."""
    nu = _check_nu(nu)
    return -1.0 if nu == 0.0 else 2.0 * nu


def friedrichs_kernel(nu, t, x, xt):
    """Friedrichs heat kernel ``E_nu(t, x, xt)``.

    Evaluated as ``sqrt(x xt)/(2t) * [e^{-r} I_nu(r)] * exp(-(x - xt)^2/(4t))``
    with ``r = x xt / 2t`` so that large ``r`` cannot overflow.

    Parameters
    ----------
    nu : float
        Exponent, ``nu >= 0``.
    t, x, xt : float or array_like
        Positive time and the two spatial points; arrays broadcast.

    Returns
    -------
    float or ndarray
    """
    nu = float(nu)
    if nu < 0:
        raise DomainError("nu must be nonnegative")
    if np.ndim(t) or np.ndim(x) or np.ndim(xt):
        ta, xa, xta = (np.asarray(v, float) for v in (t, x, xt))
        if np.any(ta <= 0) or np.any(xa <= 0) or np.any(xta <= 0):
            raise DomainError("t, x and xt must be positive")
        return _k.friedrichs_kernel_array(nu, ta, xa, xta)
    t, x, xt = float(t), float(x), float(xt)
    if t <= 0 or x <= 0 or xt <= 0:
        raise DomainError("t, x and xt must be positive")
    r = x * xt / (2.0 * t)
    gap = x - xt
    return math.sqrt(x * xt) / (2.0 * t) * _k.bessel_i_scaled(nu, r) * math.exp(-gap * gap / (4.0 * t))


def images_kernel(t, x, xt):
    """Dirichlet heat kernel of the half-line; equals ``E_{1/2}``."""
    t, x, xt = (np.asarray(v, float) for v in (t, x, xt))
    # e^{-(x-xt)^2/4t} - e^{-(x+xt)^2/4t} without cancellation when x xt << t
    return np.exp(-(x - xt) ** 2 / (4 * t)) * -np.expm1(-x * xt / t) / np.sqrt(4 * np.pi * t)


def boundary_kernel(nu, t, x):
    """``NE_nu(t, x) = x^{nu+1/2} e^{-x^2/4t} / (Gamma(nu+1) 2^{2nu+1} t^{nu+1})``."""
    nu = float(nu)
    if nu < 0:
        raise DomainError("nu must be nonnegative")
    t = np.asarray(t, float)
    x = np.asarray(x, float)
    if np.any(t <= 0) or np.any(x <= 0):
        raise DomainError("t and x must be positive")
    logv = ((nu + 0.5) * np.log(x) - x * x / (4.0 * t) - math.lgamma(nu + 1.0)
            - (2.0 * nu + 1.0) * LOG2 - (nu + 1.0) * np.log(t))
    out = np.exp(logv)
    return float(out) if out.ndim == 0 else out


def boundary_kernel_laplace(nu, x, zeta):
    """Closed-form Laplace transform in t of ``NE_nu(t, x)`` for real zeta > 0.

    ``sqrt(x) zeta^{nu/2} K_nu(x sqrt(zeta)) / (2^nu Gamma(nu+1))``.
    """
    nu, x, zeta = float(nu), float(x), float(zeta)
    if zeta <= 0:
        raise DomainError("zeta must be positive")
    s = math.sqrt(zeta)
    return math.sqrt(x) * zeta ** (0.5 * nu) * bessel_k(nu, x * s) / (2.0 ** nu * gamma_fn(nu + 1.0))


def euclid_kernel(b, t, u=()):
    """Heat kernel of ``R^b``: ``(4 pi t)^{-b/2} exp(-|u|^2 / 4t)``; 1 when b = 0."""
    b = int(b)
    if b < 0:
        raise DomainError("b must be nonnegative")
    if b == 0:
        return 1.0
    t = float(t)
    if t <= 0:
        raise DomainError("t must be positive")
    u = np.asarray(u, float).reshape(-1)
    if u.size != b:
        raise ValueError(f"expected a vector of length {b}")
    return (4 * math.pi * t) ** (-0.5 * b) * math.exp(-float(u @ u) / (4 * t))


def gn_symbol(nu, zeta, allow_cut=False):
    """Outgoing-over-incoming symbol of the signaling problem.

    ``log sqrt(zeta) + gamma - log 2`` at nu = 0 and
    ``Gamma(-nu)/Gamma(nu) 2^{-2nu} zeta^nu`` otherwise, principal branch on
    the plane cut along ``(-inf, 0]``.  With ``allow_cut`` a point on the cut
    is read as a boundary value: the sign of its zero imaginary part picks
    the bank.
    """
    nu = _check_nu(nu)
    zeta = complex(zeta)
    if zeta.imag == 0.0 and zeta.real <= 0.0 and not (allow_cut and zeta.real < 0.0):
        raise DomainError("zeta lies on the branch cut (-inf, 0]")
    if nu == 0.0:
        return 0.5 * cmath.log(zeta) + EULER_GAMMA - LOG2
    return gamma_fn(-nu) / gamma_fn(nu) * 2.0 ** (-2.0 * nu) * cmath.exp(nu * cmath.log(zeta))


@dataclass(frozen=True)
class TimeProfile:
    """A decaying source ``h(t)`` with an exact Laplace transform.

    Use :meth:`exponential` or :meth:`t_exponential`; arbitrary callables are
    accepted through :meth:`from_callable` but carry no transform.
    """

    kind: str
    rate: float = 1.0
    func: Optional[Callable] = field(default=None, compare=False)
    laplace_func: Optional[Callable] = field(default=None, compare=False)
    decays: bool = True

    @classmethod
    def exponential(cls, a=1.0):
        """``h(t) = e^{-a t}``."""
        return cls("exp", float(a))

    @classmethod
    def t_exponential(cls, a=1.0):
        """``h(t) = t e^{-a t}``."""
        return cls("texp", float(a))

    @classmethod
    def from_callable(cls, func, laplace=None, decays=True):
        return cls("callable", 0.0, func, laplace, decays)

    def __call__(self, t):
        t = np.asarray(t, float)
        if self.kind == "exp":
            out = np.exp(-self.rate * t)
        elif self.kind == "texp":
            out = t * np.exp(-self.rate * t)
        else:
            out = np.asarray(self.func(t), float)
        return float(out) if out.ndim == 0 else out

    def laplace(self, zeta):
        if self.kind == "exp":
            return 1.0 / (zeta + self.rate)
        if self.kind == "texp":
            return 1.0 / (zeta + self.rate) ** 2
        if self.laplace_func is None:
            raise ValueError("profile has no closed-form Laplace transform")
        return self.laplace_func(zeta)

    def sample(self, t_max, n=64, t_min=None):
        """Values on a geometric grid in ``(0, t_max]``."""
        t_min = t_max * 1e-6 if t_min is None else t_min
        grid = np.geomspace(t_min, t_max, n)
        return grid, np.asarray(self(grid), float)


def _spatial_factor(width, y, s):
    # R-convolution of the heat kernel with exp(-y^2/(4 width))
    return math.sqrt(width / (width + s)) * math.exp(-y * y / (4.0 * (width + s)))


def signaling_solution(nu, b, h, t, x, y=0.0, width=1.0, epsabs=1e-13, epsrel=1e-11):
    """Signaling solution ``c_nu * int_0^t NE_nu(s, x) [H * h](t - s) ds``.

    With ``u = x^2/(4s)`` the convolution becomes
    ``c_nu x^{1/2-nu} / (2 Gamma(nu+1)) * int_{x^2/4t}^inf u^{nu-1} e^{-u} h(t - x^2/4u) du``,
    and ``v = u^nu`` (``u = e^w`` at nu = 0) removes the endpoint singularity,
    leaving a smooth integrand for adaptive quadrature.

    Parameters
    ----------
    nu : float
        Exponent in [0, 1).
    b : {0, 1}
        Dimension of the edge directions.  For b = 1 the source is
        ``h(t) exp(-y^2/(4 width))``, convolved in closed form.
    h : TimeProfile
        Decaying source.
    t, x : float
        Positive time and distance to the edge.

    Raises
    ------
    AccuracyError
        If the quadrature reports non-convergence.
    """
    nu = _check_nu(nu)
    if b not in (0, 1):
        raise DomainError("only b = 0 and b = 1 are supported")
    if not getattr(h, "decays", True):
        raise DomainError("source must decay")
    t, x = float(t), float(x)
    if x <= 0:
        raise DomainError("x must be positive")
    if t <= 0:
        return 0.0
    u0 = x * x / (4.0 * t)
    q = x * x / 4.0

    def source(u):
        s = q / u
        val = h(t - s) if s < t else h(0.0)
        if b == 1:
            val *= _spatial_factor(width, y, s)
        return val

    if nu > 0.0:
        inv = 1.0 / nu
        v0 = u0 ** nu
        vmax = max(v0, 0.0) + (750.0 ** nu)

        def f(v):
            u = v ** inv
            return math.exp(-u) * source(u)

        val, err, info = _quad(f, v0, vmax, epsabs, epsrel)
        integral = val / nu
        err /= nu
    else:
        w0 = math.log(u0)
        wmax = max(w0, 0.0) + math.log(750.0)

        def f(w):
            u = math.exp(w)
            return math.exp(-u) * source(u)

        integral, err, info = _quad(f, w0, wmax, epsabs, epsrel)
    pref = c_nu(nu) * x ** (0.5 - nu) / (2.0 * math.gamma(nu + 1.0))
    return pref * integral


def _quad(f, a, b, epsabs, epsrel):
    val, err, info = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=400,
                                    full_output=True)[:3]
    if err > max(epsabs, epsrel * abs(val)) * 100:
        raise AccuracyError("signaling quadrature did not converge",
                            {"value": val, "error": err, "evaluations": info.get("neval")})
    return val, err, info


def fit_window(t, n=30):
    """Default extraction window: 30 log-spaced points in ``[0.01, 0.1] min(1, sqrt t)``."""
    s = min(1.0, math.sqrt(float(t)))
    return np.geomspace(0.01 * s, 0.1 * s, n)


@dataclass(frozen=True)
class ExtractedCoefficients:
    cplus: float
    cminus: float
    residual: float
    condition: float


def _correction_columns(nu, x, basis, order):
    if basis == "powers":
        return [x ** e for e in (1.5, 2.5)]
    if basis != "frobenius":
        raise ValueError(f"unknown basis {basis!r}")
    cols = []
    for k in range(1, order + 1):
        if nu == 0.0:
            cols += [x ** (0.5 + 2 * k), x ** (0.5 + 2 * k) * np.log(x)]
        else:
            cols += [x ** (0.5 - nu + 2 * k), x ** (0.5 + nu + 2 * k)]
    return cols


def extract_boundary_coeffs(nu, x, u, basis="frobenius", order=2, max_condition=1e12):
    """Least-squares edge coefficients ``(c^+, c^-)`` of samples ``u(x)``.

    The leading basis is ``x^{nu+1/2}`` and ``x^{-nu+1/2}`` (``sqrt(x) log x``
    at nu = 0).  Corrections are either the Frobenius terms
    ``x^{+-nu+1/2+2k}``, k = 1..order (with their log partners at nu = 0),
    which is what a solution of the heat equation actually contains, or with
    ``basis="powers"`` the fixed pair ``x^{3/2}, x^{5/2}``.

    Returns
    -------
    ExtractedCoefficients
        ``residual`` is the residual norm relative to the data norm and
        ``condition`` the condition number of the column-scaled design.

    Raises
    ------
    ConditioningError
        When the scaled design matrix is numerically rank deficient.
    """
    nu = _check_nu(nu)
    x = np.asarray(x, float)
    u = np.asarray(u, float)
    if x.shape != u.shape or x.ndim != 1:
        raise ValueError("x and u must be 1-d arrays of equal length")
    cols = [x ** (nu + 0.5), np.sqrt(x) * np.log(x) if nu == 0.0 else x ** (0.5 - nu)]
    cols += _correction_columns(nu, x, basis, order)
    A = np.column_stack(cols)
    if A.shape[0] < A.shape[1]:
        raise ConditioningError("fewer samples than basis functions")
    scale = np.linalg.norm(A, axis=0)
    As = A / scale
    cond = float(np.linalg.cond(As))
    if not math.isfinite(cond) or cond > max_condition:
        raise ConditioningError(f"design matrix condition {cond:.3g} exceeds {max_condition:.3g}")
    coef, *_ = np.linalg.lstsq(As, u, rcond=None)
    coef = coef / scale
    resid = float(np.linalg.norm(A @ coef - u) / max(np.linalg.norm(u), 1e-300))
    return ExtractedCoefficients(float(coef[0]), float(coef[1]), resid, cond)

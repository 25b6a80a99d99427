"""Gamma and Bessel functions of real argument.

The Bessel routines are evaluated by the kernels in ``_backend`` (compiled
when available).  Orders are real; ``bessel_j`` also accepts negative
non-integer orders, which the secular equations need.
"""

import math

import numpy as np

from ._backend import kernels as _k
from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061


def gamma_fn(x):
    """Gamma function on the real line.

    Parameters
    ----------
    x : float
        Any real number other than 0, -1, -2, ...

    Returns
    -------
    float

    Raises
    ------
    DomainError
        At the poles.
    """
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise DomainError(f"gamma has a pole at {x}")
    return math.gamma(x)


def _check_positive(name, value):
    if not value > 0.0:
        raise DomainError(f"{name} must be positive, got {value}")


def bessel_i_scaled(nu, r):
    """``exp(-r) I_nu(r)``; negative non-integer orders use reflection through K."""
    nu = float(nu)
    r = float(r)
    _check_positive("r", r)
    if nu >= 0.0:
        return _k.bessel_i_scaled(nu, r)
    mu = -nu
    if mu == math.floor(mu):
        return _k.bessel_i_scaled(mu, r)
    # I_{-mu} = I_mu + (2/pi) sin(mu pi) K_mu
    ke = _k.bessel_k_scaled(mu, r)[0]
    return _k.bessel_i_scaled(mu, r) + 2.0 / math.pi * math.sin(mu * math.pi) * ke * math.exp(-2.0 * r)


def bessel_i(nu, r):
    """Modified Bessel function of the first kind ``I_nu(r)``.

    Saturates to ``inf`` once ``I_nu(r)`` exceeds the double range
    (r beyond about 713); use :func:`bessel_i_scaled` there.
    """
    scaled = bessel_i_scaled(nu, r)
    try:
        return scaled * math.exp(float(r))
    except OverflowError:
        return math.inf


def bessel_k_scaled(nu, z):
    """``exp(z) K_nu(z)`` for nu >= 0 and z > 0."""
    z = float(z)
    _check_positive("z", z)
    return _k.bessel_k_scaled(abs(float(nu)), z)[0]


def bessel_k(nu, z):
    """Modified Bessel function of the second kind ``K_nu(z)``.

    Parameters
    ----------
    nu : float
        Order; K is even in nu so the sign is ignored.
    z : float
        Positive argument.

    Returns
    -------
    float
        Underflows to 0 for z beyond about 745.
    """
    return bessel_k_scaled(nu, z) * math.exp(-float(z))


def bessel_k_prime(nu, z):
    """Derivative ``K'_nu(z) = (nu/z) K_nu(z) - K_{nu+1}(z)``."""
    z = float(z)
    _check_positive("z", z)
    nu = abs(float(nu))
    k0, k1 = _k.bessel_k_scaled(nu, z)
    return (nu / z * k0 - k1) * math.exp(-z)


def bessel_i_prime(nu, r):
    """Derivative ``I'_nu(r) = I_{nu+1}(r) + (nu/r) I_nu(r)``."""
    return bessel_i(nu + 1.0, r) + float(nu) / float(r) * bessel_i(nu, r)


def bessel_j(nu, x):
    """Bessel function of the first kind ``J_nu(x)`` for real order and x > 0."""
    x = float(x)
    _check_positive("x", x)
    return _k.bessel_j_any(float(nu), x)[0]


def bessel_j_prime(nu, x):
    """Derivative of ``J_nu`` with respect to x."""
    x = float(x)
    _check_positive("x", x)
    return _k.bessel_j_any(float(nu), x)[1]


def bessel_y(nu, x):
    """Bessel function of the second kind ``Y_nu(x)`` for nu >= 0."""
    x = float(x)
    _check_positive("x", x)
    if nu < 0:
        raise DomainError("bessel_y supports nu >= 0 only")
    return _k.bessel_jy(float(nu), x)[1]


def bessel_jy(nu, x):
    """``(J_nu, Y_nu, J'_nu, Y'_nu)`` at once, nu >= 0."""
    x = float(x)
    _check_positive("x", x)
    if nu < 0:
        raise DomainError("bessel_jy supports nu >= 0 only")
    return _k.bessel_jy(float(nu), x)


def bessel_j_array(nu, x):
    """Vectorised :func:`bessel_j` over an array of positive arguments."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("all arguments must be positive")
    return _k.bessel_j_array(float(nu), x)


def bessel_j_zeros(nu, n):
    """The n-th positive zero of ``J_nu`` for nu in (-1, 1).

    Parameters
    ----------
    nu : float
        Order in (-1, 1).
    n : int or array_like of int
        1-based index (or indices) of the zero.

    Returns
    -------
    float or ndarray
    """
    nu = float(nu)
    if not -1.0 < nu < 1.0:
        raise DomainError("zeros are provided for orders in (-1, 1)")
    if np.ndim(n) == 0:
        if int(n) < 1:
            raise DomainError("zero index starts at 1")
        return _k.bessel_j_zero(nu, int(n))
    idx = np.asarray(n, dtype=int)
    if np.any(idx < 1):
        raise DomainError("zero index starts at 1")
    return np.array([_k.bessel_j_zero(nu, int(i)) for i in idx.ravel()]).reshape(idx.shape)


def bessel_j_zeros_below(nu, xmax):
    """All positive zeros of ``J_nu`` smaller than ``xmax``, ascending."""
    out = []
    n = 1
    while True:
        z = _k.bessel_j_zero(float(nu), n)
        if z >= xmax:
            return np.array(out)
        out.append(z)
        n += 1

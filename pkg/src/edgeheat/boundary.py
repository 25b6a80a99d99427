"""Channel spectra, the symplectic boundary form and Lagrangian matrices.

A channel j carries an exponent ``nu_j`` in [0, 1) and two basis labels
``psi_j^+`` and ``psi_j^-`` standing for the solutions ``x^{nu+1/2}`` and
``x^{-nu+1/2}`` (``sqrt(x) log x`` when nu = 0).  Channels are indexed from 0,
zero exponents first.
"""

from dataclasses import dataclass
import json
import math

import numpy as np

from .errors import DomainError

PLUS = "+"
MINUS = "-"


def _sign(s):
    if s in (PLUS, 1, "plus"):
        return PLUS
    if s in (MINUS, -1, "minus"):
        return MINUS
    raise ValueError(f"sign must be '+' or '-', got {s!r}")


@dataclass(frozen=True)
class NuSpectrum:
    """Ordered channel exponents with multiplicities.

    Parameters
    ----------
    values : tuple of (float, int)
        ``(nu, multiplicity)`` pairs, nu nondecreasing in [0, 1).
    """

    values: tuple

    def __post_init__(self):
        vals = tuple((float(nu), int(m)) for nu, m in self.values)
        last = -1.0
        for nu, m in vals:
            if not 0.0 <= nu < 1.0:
                raise DomainError(f"channel exponent {nu} outside [0, 1)")
            if m < 1:
                raise ValueError("multiplicities must be positive")
            if nu < last:
                raise ValueError("exponents must be nondecreasing")
            last = nu
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_list(cls, nus):
        """Build from a flat list of exponents; equal neighbours are merged."""
        pairs = []
        for nu in sorted(float(v) for v in nus):
            if pairs and pairs[-1][0] == nu:
                pairs[-1][1] += 1
            else:
                pairs.append([nu, 1])
        return cls(tuple(tuple(p) for p in pairs))

    @property
    def nus(self):
        """Exponents expanded by multiplicity."""
        return tuple(nu for nu, m in self.values for _ in range(m))

    @property
    def p(self):
        return sum(m for _, m in self.values)

    @property
    def q(self):
        return sum(m for nu, m in self.values if nu == 0.0)

    def symplectic_weight(self, j):
        """``omega(psi_j^+, psi_j^-)``: ``2 nu_j`` or 1 for a zero exponent."""
        nu = self.nus[j]
        return 2.0 * nu if nu > 0.0 else 1.0


@dataclass(frozen=True)
class LagrangianMatrix:
    """Boundary-condition rows ``Gamma_i = b_ii psi_i^- + sum_j theta_ij psi_j^+``.

    A row with ``b_ii = 0`` must be the Friedrichs row: ``theta_ii = 1`` and
    zero elsewhere.
    """

    b: tuple
    theta: tuple

    def __post_init__(self):
        b = tuple(int(v) for v in self.b)
        theta = tuple(tuple(float(v) for v in row) for row in self.theta)
        n = len(b)
        if any(v not in (0, 1) for v in b):
            raise ValueError("diagonal flags b_jj must be 0 or 1")
        if len(theta) != n or any(len(row) != n for row in theta):
            raise ValueError(f"theta must be {n}x{n}")
        for i in range(n):
            if b[i] == 0:
                expect = tuple(1.0 if j == i else 0.0 for j in range(n))
                if theta[i] != expect:
                    raise ValueError(f"row {i} has b=0 but is not a Friedrichs row")
        if not all(math.isfinite(v) for row in theta for v in row):
            raise ValueError("theta entries must be finite")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "theta", theta)

    @property
    def size(self):
        return len(self.b)

    @classmethod
    def friedrichs(cls, n):
        """The Friedrichs rows ``Gamma = diag(psi_1^+, ..., psi_n^+)``."""
        return cls((0,) * n, tuple(tuple(1.0 if i == j else 0.0 for j in range(n)) for i in range(n)))

    @classmethod
    def mixed(cls, theta):
        """All rows with ``b_jj = 1`` and the given theta matrix."""
        theta = np.atleast_2d(np.asarray(theta, dtype=float))
        return cls((1,) * theta.shape[0], tuple(map(tuple, theta)))

    def theta_array(self):
        return np.array(self.theta, dtype=float).reshape(self.size, self.size)


@dataclass(frozen=True)
class BoundaryCoefficients:
    """Coefficient vectors ``c^+`` and ``c^-`` of a function near the edge."""

    cplus: tuple
    cminus: tuple

    def __post_init__(self):
        cp = tuple(float(v) for v in self.cplus)
        cm = tuple(float(v) for v in self.cminus)
        if len(cp) != len(cm):
            raise ValueError("cplus and cminus must have equal length")
        if not all(math.isfinite(v) for v in cp + cm):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "cplus", cp)
        object.__setattr__(self, "cminus", cm)


def omega_form(i, s1, j, s2, spectrum):
    """Symplectic pairing of two basis labels.

    ``omega(psi_j^+, psi_j^-) = 2 nu_j`` (1 when nu_j = 0), its negative for the
    swapped order, and zero for every other pair.
    """
    s1, s2 = _sign(s1), _sign(s2)
    if not (0 <= i < spectrum.p and 0 <= j < spectrum.p):
        raise IndexError("channel index out of range")
    if i != j or s1 == s2:
        return 0.0
    w = spectrum.symplectic_weight(i)
    return w if s1 == PLUS else -w


def _check_sizes(G, spectrum):
    if G.size != spectrum.p:
        raise ValueError(f"Lagrangian has {G.size} rows but spectrum has {spectrum.p} channels")


def lagrangian_defect(G, spectrum):
    """Matrix of ``omega(Gamma_i, Gamma_k)``; zero exactly for a Lagrangian."""
    _check_sizes(G, spectrum)
    n = G.size
    c = np.array([spectrum.symplectic_weight(j) for j in range(n)])
    th = G.theta_array()
    b = np.array(G.b, dtype=float)
    # omega(Gamma_i, Gamma_k) = theta_ik c_k b_kk - theta_ki c_i b_ii
    return th * (c * b)[None, :] - th.T * (c * b)[:, None]


def validate_lagrangian(G, spectrum, tol=1e-12):
    """True iff the form vanishes on the row span of ``G``."""
    d = lagrangian_defect(G, spectrum)
    scale = max(1.0, float(np.max(np.abs(G.theta_array()))))
    return bool(np.all(np.abs(d) <= tol * scale))


def is_non_logarithmic(G, spectrum):
    """True iff every zero-exponent channel has ``b_jj = 0``."""
    _check_sizes(G, spectrum)
    return all(G.b[j] == 0 for j, nu in enumerate(spectrum.nus) if nu == 0.0)


def domain_residual(G, c, spectrum):
    """Residuals ``omega(u, Gamma_i)`` of boundary data ``c`` against each row.

    Returns
    -------
    ndarray
        ``b_ii c_i c_i^+ - sum_j theta_ij c_j c_j^-`` with ``c_j`` the
        symplectic weights; all zero iff ``c`` lies in the domain.
    """
    _check_sizes(G, spectrum)
    if len(c.cplus) != spectrum.p:
        raise ValueError("coefficient vectors do not match the spectrum")
    w = np.array([spectrum.symplectic_weight(j) for j in range(spectrum.p)])
    cp = np.array(c.cplus)
    cm = np.array(c.cminus)
    b = np.array(G.b, dtype=float)
    return b * w * cp - G.theta_array() @ (w * cm)


def indicial_roots(nu):
    """``(nu + 1/2, -nu + 1/2)``."""
    nu = float(nu)
    if nu < 0.0:
        raise DomainError("nu must be nonnegative")
    return nu + 0.5, -nu + 0.5


def nu_squared_from_fiber(mu, l, f, coexact=True):
    """Squared exponents produced by one fiber eigenvalue.

    Parameters
    ----------
    mu : float
        Eigenvalue of the fiber Laplacian on coexact (l-1)-forms.
    l : int
        Form degree, ``0 <= l <= f + 1``.
    f : int
        Fiber dimension.
    coexact : bool
        When False (or mu = 0) the off-diagonal coupling vanishes and the
        two diagonal entries are returned.

    Returns
    -------
    list of float
        Two values, ascending.
    """
    mu = float(mu)
    if mu < 0.0:
        raise DomainError("fiber eigenvalue must be nonnegative")
    if not 0 <= l <= f + 1:
        raise DomainError("form degree outside [0, f+1]")
    a = l - (f + 3) / 2.0
    b = l - (f - 1) / 2.0
    d1 = mu + a * a
    d2 = mu + b * b
    if mu == 0.0 or not coexact:
        return sorted([d1, d2])
    mean = 0.5 * (d1 + d2)
    rad = math.hypot(0.5 * (d1 - d2), 2.0 * math.sqrt(mu))
    # the determinant is (mu + ab)^2 >= 0, so only rounding can go negative
    return [max(mean - rad, 0.0), mean + rad]


def load_boundary_json(text):
    """Parse ``{"nus": [...], "b": [...], "theta": [[...]]}``.

    Without ``b`` and ``theta`` the rows are Friedrichs; ``theta`` without
    ``b`` means every row is mixed (``b_jj = 1``).
    """
    data = json.loads(text) if isinstance(text, str) else dict(text)
    if "nus" not in data:
        raise ValueError("boundary JSON needs a 'nus' list")
    spectrum = NuSpectrum.from_list(data["nus"])
    if list(data["nus"]) != list(spectrum.nus):
        raise ValueError("'nus' must be sorted ascending")
    if "theta" in data:
        b = data["b"] if "b" in data else [1] * spectrum.p
        G = LagrangianMatrix(tuple(b), tuple(map(tuple, data["theta"])))
    elif "b" in data:
        raise ValueError("'b' given without 'theta'")
    else:
        G = LagrangianMatrix.friedrichs(spectrum.p)
    _check_sizes(G, spectrum)
    return spectrum, G


def dump_boundary_json(spectrum, G):
    return json.dumps({"nus": list(spectrum.nus), "b": list(G.b),
                       "theta": [list(r) for r in G.theta]}, sort_keys=True)

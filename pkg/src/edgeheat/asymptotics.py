"""Exact bookkeeping of asymptotic orders.

Large-``zeta`` symbols are finite sums of monomials

    c * prod_k L_k^{alpha_k} * zeta^{-rho},    L_k = (log zeta + kappa_k)^{-1},

one ``L_k`` per zero-exponent channel.  Exponents are exact ``Fraction``
values and coefficients are sympy expressions, so unknown constants stay as
named markers and cancellations are decided exactly.  Small-time expansions
are sums of ``c * (sqrt t)^a * log(t)^{-k}``.

Every truncated series carries a box ``rho <= rho_cut``, ``|alpha| <= alpha_cut``
(``None`` meaning exact) inside which its terms are known exactly.
"""

from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
import cmath
import math

import numpy as np
import sympy
from sympy.polys.fields import FracElement, field as rational_field

from .boundary import LagrangianMatrix, NuSpectrum
from .errors import (CompositionError, DomainError, SingularSymbolError,
                     UnsupportedReductionError)

INF = math.inf


def exact(x):
    """Convert a number to ``Fraction``; floats go through their shortest repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not exponents")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise DomainError("exponent must be finite")
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, sympy.Rational):
        return Fraction(int(x.p), int(x.q))
    return Fraction(str(x))


def _rational(x):
    q = exact(x)
    return sympy.Rational(q.numerator, q.denominator)


def format_exponent(q):
    """Decimal text for a Fraction: exact when the expansion terminates."""
    q = exact(q)
    if q.denominator == 1:
        return str(q.numerator)
    d = q.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d != 1:
        return format(float(q), ".12g")
    with localcontext() as ctx:
        ctx.prec = 50
        text = str((Decimal(q.numerator) / Decimal(q.denominator)).normalize())
    return text


def _norm(c):
    """Canonical coefficient: field elements pass through, expressions are expanded."""
    if isinstance(c, FracElement):
        return c
    return sympy.expand(sympy.sympify(c))


def _to_expr(c):
    return c.as_expr() if isinstance(c, FracElement) else c


def simple_rational(x, max_den=10 ** 6):
    """Exact value of a float, snapped to a small denominator when within 1e-12.

    Floats such as ``0.3 * 0.8 / 0.6`` stand for simple fractions; keeping
    their full binary expansion would only bloat symbolic coefficients.
    """
    q = exact(x)
    snap = q.limit_denominator(max_den)
    if abs(snap - q) <= Fraction(1, 10 ** 12) * max(1, abs(q)):
        q = snap
    return sympy.Rational(q.numerator, q.denominator)


def _cut_min(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _cut_add(a, b):
    return None if a is None else a + b


def _within(v, cut):
    return cut is None or v <= cut


# ---------------------------------------------------------------------------
# zeta symbols
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZetaTerm:
    """One monomial ``c * prod L_k^{alpha_k} * zeta^{-rho}``.

    ``alpha`` may carry negative entries: a zero channel's diagonal symbol is
    ``-L_k^{-1} / 2``.
    """

    coefficient: object
    alpha: tuple
    rho: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coefficient", sympy.sympify(_to_expr(self.coefficient)))
        object.__setattr__(self, "alpha", tuple(int(a) for a in self.alpha))
        object.__setattr__(self, "rho", exact(self.rho))

    @property
    def abs_alpha(self):
        return sum(self.alpha)

    @property
    def key(self):
        return (self.rho, self.alpha)

    def dominance(self):
        """Sort key: most dominant at large ``|zeta|`` first."""
        return (self.rho, self.abs_alpha, self.alpha)

    def __mul__(self, other):
        return ZetaTerm(self.coefficient * other.coefficient,
                        tuple(a + b for a, b in zip(self.alpha, other.alpha)),
                        self.rho + other.rho)


class ZetaSeries:
    """Truncated sum of ``ZetaTerm`` with a shared number of log variables.

    Parameters
    ----------
    terms : dict or iterable
        ``{(rho, alpha): coefficient}`` or ``ZetaTerm`` objects.
    nlog : int
        Number of log variables (length of every ``alpha``).
    rho_cut, alpha_cut : Fraction or int or None
        Known-exactly box; ``None`` means exact in that direction.
    """

    def __init__(self, terms=(), nlog=0, rho_cut=None, alpha_cut=None):
        self.nlog = int(nlog)
        self.rho_cut = None if rho_cut is None else exact(rho_cut)
        self.alpha_cut = None if alpha_cut is None else int(alpha_cut)
        acc = {}
        items = terms.items() if isinstance(terms, dict) else (
            ((t.rho, t.alpha), t.coefficient) for t in terms)
        for (rho, alpha), c in items:
            rho = exact(rho)
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.nlog:
                raise ValueError(f"alpha {alpha} does not have {self.nlog} entries")
            c = c if isinstance(c, FracElement) else sympy.sympify(c)
            acc[(rho, alpha)] = acc[(rho, alpha)] + c if (rho, alpha) in acc else c
        self._terms = {}
        for (rho, alpha), c in acc.items():
            if not (_within(rho, self.rho_cut) and _within(sum(alpha), self.alpha_cut)):
                continue
            c = _norm(c)
            if c != 0:
                self._terms[(rho, alpha)] = c

    # construction -----------------------------------------------------------
    @classmethod
    def constant(cls, c, nlog=0):
        return cls({(Fraction(0), (0,) * nlog): c}, nlog)

    @classmethod
    def monomial(cls, c, alpha, rho):
        alpha = tuple(alpha)
        return cls({(exact(rho), alpha): c}, len(alpha))

    # inspection -------------------------------------------------------------
    @property
    def terms(self):
        """Terms sorted by dominance: ``rho`` then ``|alpha|`` ascending."""
        out = [ZetaTerm(c, a, r) for (r, a), c in self._terms.items()]
        return sorted(out, key=ZetaTerm.dominance)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    @property
    def leading(self):
        ts = self.terms
        return ts[0] if ts else None

    def coefficient(self, rho, alpha):
        return _to_expr(self._terms.get((exact(rho), tuple(alpha)), sympy.Integer(0)))

    def map_coefficients(self, fn):
        """Apply ``fn`` to every coefficient, keeping the truncation box."""
        return ZetaSeries({k: fn(c) for k, c in self._terms.items()}, self.nlog,
                          self.rho_cut, self.alpha_cut)

    def free_symbols(self):
        out = set()
        for c in self._terms.values():
            out |= sympy.sympify(_to_expr(c)).free_symbols
        return out

    def rho_floor(self):
        """Smallest ``rho`` among the terms (the cut when there are none)."""
        vals = [r for r, _ in self._terms]
        return min(vals) if vals else self.rho_cut

    def alpha_floor(self):
        vals = [sum(a) for _, a in self._terms]
        return min(vals) if vals else self.alpha_cut

    @property
    def remainder(self):
        """The box ``(rho_cut, alpha_cut)`` beyond which terms are unknown."""
        return (self.rho_cut, self.alpha_cut)

    def is_exact(self):
        return self.rho_cut is None and self.alpha_cut is None

    # arithmetic -------------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, ZetaSeries):
            other = ZetaSeries.constant(other, self.nlog)
        if other.nlog != self.nlog:
            raise ValueError("series have different numbers of log variables")
        return other

    def __add__(self, other):
        other = self._check(other)
        terms = dict(self._terms)
        for k, c in other._terms.items():
            terms[k] = terms.get(k, 0) + c
        return ZetaSeries(terms, self.nlog, _cut_min(self.rho_cut, other.rho_cut),
                          _cut_min(self.alpha_cut, other.alpha_cut))

    __radd__ = __add__

    def __neg__(self):
        return ZetaSeries({k: -c for k, c in self._terms.items()}, self.nlog,
                          self.rho_cut, self.alpha_cut)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if not isinstance(other, ZetaSeries):
            c = other if isinstance(other, FracElement) else sympy.sympify(other)
            return ZetaSeries({k: c * v for k, v in self._terms.items()}, self.nlog,
                              self.rho_cut, self.alpha_cut)
        other = self._check(other)
        if (not self and self.is_exact()) or (not other and other.is_exact()):
            return ZetaSeries((), self.nlog)
        # a product term is exact only if no unknown factor can reach it
        rf_a, rf_b = self.rho_floor(), other.rho_floor()
        af_a, af_b = self.alpha_floor(), other.alpha_floor()
        rho_cut = _cut_min(_cut_add(self.rho_cut, rf_b), _cut_add(other.rho_cut, rf_a))
        alpha_cut = _cut_min(_cut_add(self.alpha_cut, af_b), _cut_add(other.alpha_cut, af_a))
        terms = {}
        for (r1, a1), c1 in self._terms.items():
            for (r2, a2), c2 in other._terms.items():
                r = r1 + r2
                a = tuple(x + y for x, y in zip(a1, a2))
                if _within(r, rho_cut) and _within(sum(a), alpha_cut):
                    terms[(r, a)] = terms.get((r, a), 0) + c1 * c2
        return ZetaSeries(terms, self.nlog, rho_cut, alpha_cut)

    __rmul__ = __mul__

    def truncate(self, rho_cut=None, alpha_cut=None):
        """Tighten the known box to at most the given cuts."""
        return ZetaSeries(self._terms, self.nlog, _cut_min(self.rho_cut, rho_cut),
                          _cut_min(self.alpha_cut, alpha_cut))

    def known_terms_vanish(self):
        return not self._terms

    # numerics ---------------------------------------------------------------
    def evaluate(self, zeta, kappas=(), values=None):
        """Numeric value at complex ``zeta`` with markers replaced by ``values``."""
        logz = cmath.log(zeta)
        total = 0j
        values = values or {}
        for (rho, alpha), c in self._terms.items():
            cv = sympy.sympify(_to_expr(c)).subs(values)
            if cv.free_symbols:
                raise ValueError(f"no value for markers {sorted(map(str, cv.free_symbols))}")
            cv = complex(sympy.N(cv))
            v = cv * complex(zeta) ** (-float(rho))
            for ak, kap in zip(alpha, kappas):
                v *= (logz + kap) ** (-ak)
            total += v
        return total

    def __repr__(self):
        body = " + ".join(f"({c})*L^{a}*zeta^(-{format_exponent(r)})"
                          for (r, a), c in sorted(self._terms.items(),
                                                  key=lambda kv: (kv[0][0], sum(kv[0][1]))))
        return f"ZetaSeries({body or '0'}; cut={self.rho_cut}, {self.alpha_cut})"


@dataclass
class SymbolMatrix:
    """Square matrix of ``ZetaSeries`` plus what is needed to evaluate it.

    ``channels`` lists the original channel indices of the rows, ``kappas``
    the constants of the log variables, and ``values`` exact values of the
    coefficient markers that have one.
    """

    entries: list
    channels: tuple = ()
    nus: tuple = ()
    kappas: tuple = ()
    log_channels: tuple = ()
    values: dict = field(default_factory=dict)

    @property
    def size(self):
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def evaluate(self, zeta, markers=None):
        """Numeric matrix at ``zeta``; ``markers`` supplies any free constants."""
        values = {**self.values, **(markers or {})}
        n = self.size
        out = np.zeros((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                out[i, j] = self.entries[i][j].evaluate(zeta, self.kappas, values)
        return out

    def with_entries(self, entries):
        return SymbolMatrix(entries, self.channels, self.nus, self.kappas,
                            self.log_channels, dict(self.values))


def kappa_value(theta):
    """``kappa_theta = 2(gamma - log 2 - theta)`` as a float."""
    return 2.0 * (0.5772156649015329 - math.log(2.0) - float(theta))


def gn_constant(nu):
    """Exact ``Gamma(-nu)/Gamma(nu) 2^{-2nu}`` for ``0 < nu < 1``."""
    q = _rational(nu)
    return sympy.gamma(-q) / sympy.gamma(q) * sympy.Integer(2) ** (-2 * q)


def assemble_gn_matrix(spectrum, G):
    """Large-``zeta`` symbol matrix of the reduced boundary problem.

    Entry ``(i, j)`` is ``theta_ij`` off the diagonal.  On the diagonal the
    channel symbol and the marker ``theta_nu`` (nonzero only at nu = 1/2) are
    subtracted: a zero channel gives ``-(log zeta + kappa)/2`` and a channel
    with nu > 0 gives ``theta_ii - theta_nu - C zeta^nu``.

    Raises
    ------
    UnsupportedReductionError
        If some channel has ``b_jj = 0``.
    """
    if G.size != spectrum.p:
        raise ValueError("Lagrangian and spectrum sizes differ")
    for j, b in enumerate(G.b):
        if b == 0:
            raise UnsupportedReductionError(
                f"channel {j} has b_jj = 0; only b_jj = 1 channels reduce to a symbol matrix")
    nus = spectrum.nus
    n = len(nus)
    zero = [j for j, nu in enumerate(nus) if nu == 0.0]
    nlog = len(zero)
    none = (0,) * nlog
    values = {}
    kappas = []
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            theta = simple_rational(G.theta[i][j])
            if i != j:
                row.append(ZetaSeries({(0, none): theta}, nlog))
                continue
            nu = nus[i]
            if nu == 0.0:
                k = zero.index(i)
                kappas.append(kappa_value(G.theta[i][i]))
                alpha = tuple(-1 if m == k else 0 for m in range(nlog))
                row.append(ZetaSeries({(0, alpha): sympy.Rational(-1, 2)}, nlog))
            else:
                c = sympy.Symbol(f"C_{i}")
                values[c] = gn_constant(nu)
                marker = sympy.Symbol(f"theta_nu_{i}") if exact(nu) == Fraction(1, 2) else 0
                row.append(ZetaSeries({(-exact(nu), none): -c, (0, none): theta - marker}, nlog))
        rows.append(row)
    return SymbolMatrix(rows, tuple(range(n)), tuple(nus), tuple(kappas), tuple(zero), values)


def _entries(M):
    return M.entries if isinstance(M, SymbolMatrix) else [list(r) for r in M]


def _det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    total = None
    for j in range(n):
        if not m[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    if total is None:
        return m[0][0] * 0
    return total


def _dominant_term(series):
    """The unique term dividing every other term with nonnegative exponents."""
    for cand in series.terms:
        if all(t is cand or (t.rho >= cand.rho and
                             all(a >= b for a, b in zip(t.alpha, cand.alpha)))
               for t in series.terms):
            return cand
    return None


def invert_symbol_matrix(M, truncation=(1, 3)):
    """Inverse of a symbol matrix as truncated series.

    The determinant is written as ``Lead * (1 + R)`` with ``Lead`` its
    dominant monomial; ``(1 + R)^{-1}`` is a Neumann series kept inside the
    box ``rho <= truncation[0]``, ``|alpha| <= truncation[1]``, and the
    inverse is the adjugate times ``Lead^{-1} (1 + R)^{-1}``.

    Parameters
    ----------
    M : SymbolMatrix or nested list of ZetaSeries
    truncation : (rho window, alpha window)
        Depth of the Neumann expansion relative to the leading term.

    Returns
    -------
    SymbolMatrix or list of lists
        Same container type as the input.

    Raises
    ------
    SingularSymbolError
        If the determinant has no dominant monomial or it vanishes.
    """
    entries = _entries(M)
    n = len(entries)
    if n == 0 or any(len(r) != n for r in entries):
        raise ValueError("symbol matrix must be square and nonempty")
    nlog = entries[0][0].nlog
    # exact rational-function arithmetic is far cheaper than repeated expand
    symbols = sorted(set().union(*(e.free_symbols() for r in entries for e in r)), key=str)
    K = rational_field(symbols or [sympy.Dummy("unit")], sympy.QQ)[0]
    entries = [[e.map_coefficients(lambda c: K.from_expr(sympy.sympify(_to_expr(c))))
                for e in r] for r in entries]
    drho, dalpha = exact(truncation[0]), int(truncation[1])
    det = _det(entries)
    if not det:
        raise SingularSymbolError("determinant vanishes identically")
    lead = _dominant_term(det)
    if lead is None:
        raise SingularSymbolError(
            "determinant has no dominant monomial: " + repr(det))
    inv_lead = ZetaSeries.monomial(1 / K.from_expr(lead.coefficient),
                                   tuple(-a for a in lead.alpha), -lead.rho)
    rest = det * inv_lead - ZetaSeries.constant(K.one, nlog)
    for t in rest.terms:
        if t.rho < 0 or any(a < 0 for a in t.alpha) or (t.rho == 0 and t.abs_alpha == 0):
            raise SingularSymbolError("determinant correction is not small relative to its lead")
    # powers of R only grow along the directions R actually moves in, so
    # only those directions need a cut
    pos = [t.rho for t in rest.terms if t.rho > 0]
    rho_cut = drho if pos else None
    alpha_cut = dalpha if any(t.abs_alpha for t in rest.terms) else None
    rest = rest.truncate(rho_cut, alpha_cut)
    nmax = (int(drho / min(pos)) if pos else 0) + (dalpha if alpha_cut is not None else 0) + 1
    neg_rest = -rest
    geometric = ZetaSeries.constant(K.one, nlog).truncate(rho_cut, alpha_cut)
    power = geometric
    for _ in range(nmax):
        power = power * neg_rest
        if not power:
            break
        geometric = geometric + power
    inv_det = geometric * inv_lead
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [r[:i] + r[i + 1:] for k, r in enumerate(entries) if k != j]
            cof = _det(minor) if minor else ZetaSeries.constant(K.one, nlog)
            if (i + j) % 2:
                cof = -cof
            row.append((cof * inv_det).map_coefficients(lambda c: _norm(_to_expr(c))))
        out.append(row)
    return M.with_entries(out) if isinstance(M, SymbolMatrix) else out


def matmul(A, B):
    """Product of two symbol matrices (truncation-aware)."""
    a, b = _entries(A), _entries(B)
    n = len(a)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = a[i][0] * b[0][j]
            for k in range(1, n):
                acc = acc + a[i][k] * b[k][j]
            out[i][j] = acc
    return A.with_entries(out) if isinstance(A, SymbolMatrix) else out


def identity_residual(M, K):
    """``M K - I``; every known term vanishing means ``K`` inverts ``M``."""
    P = _entries(matmul(M, K))
    n = len(P)
    return [[P[i][j] - (1 if i == j else 0) for j in range(n)] for i in range(n)]


def lk_leading_shape(nu_i, nu_j, same_channel):
    """Expected leading ``(rho, |alpha|)`` of an inverse entry.

    The five cases: two zero channels ``(0, 2)``, one zero channel
    ``(nu_other, 1)``, one zero channel on the diagonal ``(0, 1)``, two
    positive channels ``(nu_i + nu_j, 0)``, a positive diagonal ``(nu_i, 0)``.
    """
    a, b = exact(nu_i), exact(nu_j)
    if same_channel:
        if a != b:
            raise ValueError("a diagonal entry has a single exponent")
        return (Fraction(0), 1) if a == 0 else (a, 0)
    if a == 0 and b == 0:
        return (Fraction(0), 2)
    if a == 0 or b == 0:
        return (a + b, 1)
    return (a + b, 0)


# ---------------------------------------------------------------------------
# small-time expansions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimeTerm:
    """``c * (sqrt t)^a * log(t)^{-k}``."""

    coefficient: object
    sqrt_t_power: Fraction
    logpower: int

    def __post_init__(self):
        object.__setattr__(self, "coefficient", sympy.sympify(self.coefficient))
        object.__setattr__(self, "sqrt_t_power", exact(self.sqrt_t_power))
        k = int(self.logpower)
        if k < 0:
            raise ValueError("logpower must be nonnegative")
        object.__setattr__(self, "logpower", k)

    @property
    def order(self):
        """``(a, k)``; lexicographically smaller dominates as t -> 0."""
        return (self.sqrt_t_power, self.logpower)

    def dominates(self, other):
        return self.order < other.order

    @property
    def t_power(self):
        return self.sqrt_t_power / 2

    def render(self, coefficient=True):
        """Canonical text ``c * t^{a} * log(t)^-k``; unit parts are omitted."""
        parts = []
        c = self.coefficient
        if coefficient and c != 1:
            parts.append(f"({c})" if isinstance(c, sympy.Add) else str(c))
        if self.t_power != 0:
            parts.append(f"t^{{{format_exponent(self.t_power)}}}")
        if self.logpower:
            parts.append(f"log(t)^-{self.logpower}")
        return " * ".join(parts) if parts else "1"

    def to_json(self):
        return {"coefficient": str(self.coefficient),
                "sqrt_t_power": format_exponent(self.sqrt_t_power),
                "t_power": format_exponent(self.t_power),
                "logpower": self.logpower,
                "text": self.render()}


class TimeExpansion:
    """Sum of ``TimeTerm`` sorted by dominance.

    ``remainder`` is an order ``(a, k)`` (``k`` may be ``inf``) such that every
    term left out is dominated by it; ``None`` means nothing is left out.
    Terms with equal orders are merged.
    """

    def __init__(self, terms=(), remainder=None):
        acc = {}
        for t in terms:
            acc.setdefault(t.order, []).append(t.coefficient)
        # sympy's Add combines structurally equal products, which is all the
        # cancellation marker coefficients can undergo
        merged = {key: (cs[0] if len(cs) == 1 else sympy.Add(*cs)) for key, cs in acc.items()}
        self.terms = [TimeTerm(c, a, k) for (a, k), c in sorted(merged.items()) if c != 0]
        self.remainder = remainder

    @property
    def leading(self):
        return self.terms[0] if self.terms else None

    def __len__(self):
        return len(self.terms)

    def __add__(self, other):
        rem = self.remainder
        if other.remainder is not None:
            rem = other.remainder if rem is None else min(rem, other.remainder)
        return TimeExpansion(self.terms + other.terms, rem)

    def truncated(self):
        """Drop terms not determined given the remainder."""
        if self.remainder is None:
            return self
        return TimeExpansion([t for t in self.terms if t.order <= self.remainder], self.remainder)

    def orders(self):
        return [t.order for t in self.terms]

    def render(self):
        return " + ".join(t.render() for t in self.terms) if self.terms else "0"

    def to_json(self):
        rem = None
        if self.remainder is not None:
            a, k = self.remainder
            rem = {"sqrt_t_power": format_exponent(a),
                   "logpower": None if k == INF else int(k)}
        return {"terms": [t.to_json() for t in self.terms], "remainder": rem,
                "leading": self.leading.render(coefficient=False) if self.terms else None}


def _marker(name, *labels):
    text = ",".join(format_exponent(x) if isinstance(x, Fraction) else str(x) for x in labels)
    return sympy.Symbol(f"{name}[{text}]")


def inverse_laplace_orders(term, depth=3, resolve_vanishing=False):
    """Small-time expansion of the inverse Laplace transform of one monomial.

    ``L_alpha zeta^{-rho}`` maps to ``sum_k E_k t^{-1+rho} log(t)^{-|alpha|-k}``,
    ``k = 0..depth``, modulo smooth terms.  With ``alpha = 0`` the transform is
    the single power ``t^{rho-1}/Gamma(rho)``; a nonpositive integer ``rho``
    then gives a distribution at ``t = 0`` and an empty expansion.

    Parameters
    ----------
    term : ZetaTerm
    depth : int
        Number of log corrections beyond the leading one.
    resolve_vanishing : bool
        Drop the ``k = 0`` term when ``rho`` is a nonpositive integer (its
        coefficient carries ``1/Gamma(rho) = 0``).  Off by default, so the
        leading marker is kept.
    """
    if term.rho < 0:
        raise DomainError("inverse_laplace_orders needs rho >= 0")
    if any(a < 0 for a in term.alpha):
        raise DomainError("log exponents must be nonnegative")
    a = 2 * (term.rho - 1)
    na = term.abs_alpha
    integer_rho = term.rho.denominator == 1
    if na == 0:
        if integer_rho and term.rho <= 0:
            return TimeExpansion()
        return TimeExpansion([TimeTerm(term.coefficient / sympy.gamma(_rational(term.rho)), a, 0)])
    start = 1 if (resolve_vanishing and integer_rho and term.rho <= 0) else 0
    terms = [TimeTerm(term.coefficient * _marker("E", term.rho, na, k), a, na + k)
             for k in range(start, depth + 1)]
    return TimeExpansion(terms, (a, na + depth))


def trace_order(gamma, nu_i, nu_j, depth=3):
    """Trace of a kernel with front-face order ``gamma``: ``(sqrt t)^{gamma-nu_i-nu_j+m}``."""
    a0 = exact(gamma) - exact(nu_i) - exact(nu_j)
    terms = [TimeTerm(_marker("d", m), a0 + m, 0) for m in range(depth + 1)]
    return TimeExpansion(terms, (a0 + depth, INF))


def ght_trace_order(gamma, nu_i, nu_j, alpha, rho, depth=3):
    """Trace order of a composition carrying ``log^{-|alpha|}`` and ``zeta^{-rho}``.

    Leading ``(sqrt t)^{gamma-(nu_i+nu_j)+2 rho} log(t)^{-|alpha|}`` with a
    ladder of further powers of ``sqrt t`` and (when ``|alpha| > 0``) of
    inverse logs.  ``alpha`` is an integer ``|alpha|`` or a vector.
    """
    na = alpha if isinstance(alpha, int) else sum(int(v) for v in alpha)
    if na < 0:
        raise DomainError("|alpha| must be nonnegative")
    if na == 0:
        base = trace_order(exact(gamma) + 2 * exact(rho), nu_i, nu_j, depth)
        return base
    a0 = exact(gamma) - exact(nu_i) - exact(nu_j) + 2 * exact(rho)
    terms = [TimeTerm(_marker("B", m, na + l), a0 + m, na + l)
             for m in range(depth + 1) for l in range(depth + 1)]
    return TimeExpansion(terms, (a0, na + depth))


def main_leading_order(nu_i, nu_j, same_channel):
    """Leading small-time order of the trace correction from entry ``(i, j)``.

    Two zero exponents in different channels give ``log^{-2}``; exactly one
    zero exponent gives ``(sqrt t)^{nu} log^{-1}`` with ``nu`` the other one;
    a zero diagonal gives ``log^{-1}``; two positive exponents in different
    channels give ``(sqrt t)^{nu_i+nu_j}``; a positive diagonal gives
    ``(sqrt t)^0``.
    """
    a, b = exact(nu_i), exact(nu_j)
    for v in (a, b):
        if not 0 <= v < 1:
            raise DomainError("exponents must lie in [0, 1)")
    if same_channel:
        if a != b:
            raise ValueError("a diagonal entry has a single exponent")
        return TimeTerm(1, 0, 1 if a == 0 else 0)
    if a == 0 and b == 0:
        return TimeTerm(1, 0, 2)
    if a == 0 or b == 0:
        return TimeTerm(1, a + b, 1)
    return TimeTerm(1, a + b, 0)


def entry_trace_expansion(series, nu_i, nu_j, gamma=0, depth=3, resolve_vanishing=False):
    """Push one inverse-symbol entry through the inverse Laplace and trace maps."""
    collected, rems = [], []
    for term in series.terms:
        for tt in inverse_laplace_orders(term, depth, resolve_vanishing).terms:
            exp = ght_trace_order(gamma, nu_i, nu_j, tt.logpower, term.rho, depth)
            collected.extend(TimeTerm(tt.coefficient * s.coefficient, s.sqrt_t_power, s.logpower)
                             for s in exp.terms)
            if exp.remainder is not None:
                rems.append(exp.remainder)
    shift = exact(gamma) - exact(nu_i) - exact(nu_j)
    if series.rho_cut is not None:
        rems.append((shift + 2 * series.rho_cut, INF))
    if series.alpha_cut is not None and series.nlog and series.rho_floor() is not None:
        rems.append((shift + 2 * series.rho_floor(), series.alpha_cut))
    return TimeExpansion(collected, min(rems) if rems else None)


@dataclass
class TraceCorrection:
    """Per-entry and aggregate small-time expansions of the trace correction."""

    entries: dict
    total: TimeExpansion

    @property
    def leading(self):
        return self.total.leading

    def to_json(self):
        per = [{"i": int(i), "j": int(j), **exp.to_json()}
               for (i, j), exp in sorted(self.entries.items())]
        return {"entries": per, **self.total.to_json()}


def reduce_friedrichs(spectrum, G):
    """Drop Friedrichs channels; they decouple exactly from the rest.

    Returns the kept channel indices, their exponents and the reduced
    Lagrangian.
    """
    keep = [j for j, b in enumerate(G.b) if b == 1]
    nus = [spectrum.nus[j] for j in keep]
    theta = tuple(tuple(G.theta[i][j] for j in keep) for i in keep)
    return keep, nus, LagrangianMatrix((1,) * len(keep), theta)


def predict_trace_correction(spectrum, G, gamma=0, depth=3, truncation=(1, 3),
                             resolve_vanishing=False):
    """Small-time expansion of ``Tr e^{-t Delta_Gamma} - Tr e^{-t Delta_F}``.

    Friedrichs rows are removed, the remaining symbol matrix is assembled and
    inverted, and each entry is mapped to time orders.  ``gamma`` offsets all
    powers and is 0 for the trace normalisation used throughout.
    """
    keep, nus, Gr = reduce_friedrichs(spectrum, G)
    if not keep:
        return TraceCorrection({}, TimeExpansion())
    # exponents stay in channel order after dropping rows, so no re-sort
    sub = NuSpectrum.from_list(nus)
    if list(sub.nus) != nus:
        raise ValueError("channel exponents must be sorted")
    K = invert_symbol_matrix(assemble_gn_matrix(sub, Gr), truncation)
    entries = {}
    total = TimeExpansion()
    for a, i in enumerate(keep):
        for b, j in enumerate(keep):
            if not K.entries[a][b] and K.entries[a][b].is_exact():
                continue  # decoupled channels
            exp = entry_trace_expansion(K.entries[a][b], nus[a], nus[b], gamma, depth,
                                        resolve_vanishing).truncated()
            entries[(i, j)] = exp
            total = total + exp
    return TraceCorrection(entries, total.truncated())


# ---------------------------------------------------------------------------
# front-face orders
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrontFaceOrder:
    """Leading exponent at the front face of a kernel over a base of dimension ``b``."""

    order: Fraction
    b: int

    def __post_init__(self):
        object.__setattr__(self, "order", exact(self.order))
        if int(self.b) < 0:
            raise ValueError("base dimension must be nonnegative")
        object.__setattr__(self, "b", int(self.b))

    @classmethod
    def from_alpha(cls, alpha, b):
        """The order ``-2 - b + alpha``."""
        return cls(-2 - int(b) + exact(alpha), b)

    @property
    def alpha(self):
        """Improvement over the neutral order ``-2 - b``."""
        return self.order + 2 + self.b

    def y_derivative(self):
        """One tangential derivative lowers the order by one."""
        return FrontFaceOrder(self.order - 1, self.b)


def compose_front_face(k1, k2):
    """Order of a convolution: ``(-2-b+a1) o (-2-b+a2) = -2-b+a1+a2``."""
    if k1.b != k2.b:
        raise ValueError(f"base dimensions differ: {k1.b} and {k2.b}")
    return FrontFaceOrder(k1.order + k2.order + 2 + k1.b, k1.b)


def d_kernel_order(nu_i, nu_j, same_channel, b):
    """Order ``-2-b+2 nu_ij`` of the remainder kernel ``D_ij``.

    ``nu_ij = nu_i + nu_j`` across channels and ``nu_i`` on the diagonal.
    """
    nij = exact(nu_i) if same_channel else exact(nu_i) + exact(nu_j)
    return FrontFaceOrder.from_alpha(2 * nij, b)


def g_kernel_order(nu_j, b):
    """Order of ``G' + G'' d_y`` for channel ``j``: ``-1-b-2 nu_j``."""
    base = FrontFaceOrder(-2 * exact(nu_j) - b, b)
    return base.y_derivative()


def dg_improvement(nu_i, nu_j, same_channel, b=0):
    """``1 + 2(nu_ij - nu_j)``, the gain of one ``D o G`` composition."""
    return compose_front_face(d_kernel_order(nu_i, nu_j, same_channel, b),
                              g_kernel_order(nu_j, b)).alpha


# ---------------------------------------------------------------------------
# index sets
# ---------------------------------------------------------------------------

class IndexSet:
    """Truncated index set: pairs ``(gamma, p)`` with ``gamma <= gamma_max``.

    The stored set is closed under ``(gamma, p) -> (gamma + j, p')`` for
    integers ``j >= 0`` and ``0 <= p' <= p`` up to the cutoff.
    """

    def __init__(self, pairs=(), gamma_max=None):
        pairs = [(exact(g), int(p)) for g, p in pairs]
        if any(p < 0 for _, p in pairs):
            raise ValueError("log powers must be nonnegative")
        if gamma_max is None:
            gamma_max = (min(g for g, _ in pairs) if pairs else Fraction(0)) + 4
        self.gamma_max = exact(gamma_max)
        closed = set()
        for g, p in pairs:
            j = 0
            while g + j <= self.gamma_max:
                closed.update((g + j, q) for q in range(p + 1))
                j += 1
        self.pairs = frozenset(closed)

    @classmethod
    def from_seeds(cls, seeds, gamma_max=None):
        return cls(seeds, gamma_max)

    def __iter__(self):
        return iter(sorted(self.pairs))

    def __len__(self):
        return len(self.pairs)

    def __contains__(self, item):
        g, p = item
        return (exact(g), int(p)) in self.pairs

    def __eq__(self, other):
        return (isinstance(other, IndexSet) and self.pairs == other.pairs
                and self.gamma_max == other.gamma_max)

    def __hash__(self):
        return hash((self.pairs, self.gamma_max))

    def __repr__(self):
        body = ", ".join(f"({format_exponent(g)},{p})" for g, p in self)
        return f"IndexSet({{{body}}}, gamma_max={format_exponent(self.gamma_max)})"

    @property
    def min_gamma(self):
        return min((g for g, _ in self.pairs), default=INF)

    def shift(self, s):
        s = exact(s)
        return IndexSet([(g + s, p) for g, p in self.pairs], self.gamma_max + s)

    def max_power(self, gamma):
        return max((p for g, p in self.pairs if g == exact(gamma)), default=-1)

    def is_valid(self):
        """Check the closure hypotheses on the truncation."""
        for g, p in self.pairs:
            if g > self.gamma_max:
                return False
            for q in range(p):
                if (g, q) not in self.pairs:
                    return False
            if g + 1 <= self.gamma_max and (g + 1, p) not in self.pairs:
                return False
        return True

    def to_json(self):
        return {"gamma_max": format_exponent(self.gamma_max),
                "pairs": [[format_exponent(g), p] for g, p in self]}


def extended_union(A, B):
    """``A u B u {(z, p+q+1) : (z, p) in A, (z, q) in B}`` cut at the lower cutoff."""
    cut = min(A.gamma_max, B.gamma_max)
    out = {x for x in A.pairs | B.pairs if x[0] <= cut}
    bpow = {}
    for z, q in B.pairs:
        bpow.setdefault(z, []).append(q)
    for z, p in A.pairs:
        if z <= cut:
            out.update((z, p + q + 1) for q in bpow.get(z, ()))
    return IndexSet(out, cut)


def index_compose(E, E_prime, l, l_prime):
    """Side-face index sets of a composition of two heat-calculus kernels.

    Parameters
    ----------
    E, E_prime : (IndexSet, IndexSet)
        ``(E_lf, E_rf)`` of the left and right factor.
    l, l_prime : real
        Their orders.

    Returns
    -------
    (IndexSet, IndexSet)
        ``P_lf = E'_lf ext-u (E_lf + l')`` and ``P_rf = E_rf ext-u (E'_rf + l)``.

    Raises
    ------
    CompositionError
        Unless ``min E_lf + min E'_rf > -1``.
    """
    e_lf, e_rf = E
    ep_lf, ep_rf = E_prime
    if e_lf.min_gamma + ep_rf.min_gamma <= -1:
        raise CompositionError(
            f"integrability fails: min E_lf + min E'_rf = {e_lf.min_gamma + ep_rf.min_gamma} <= -1")
    p_lf = extended_union(ep_lf, e_lf.shift(l_prime))
    p_rf = extended_union(e_rf, ep_rf.shift(l))
    return p_lf, p_rf


def all_orders_consistent(spectrum, G, depth=3):
    """Compare the pipeline leading order with the table for every entry.

    Returns a list of ``(i, j, pipeline_order, table_order)`` mismatches.
    """
    pred = predict_trace_correction(spectrum, G, depth=depth)
    bad = []
    for (i, j), exp in pred.entries.items():
        table = main_leading_order(spectrum.nus[i], spectrum.nus[j], i == j).order
        got = exp.leading.order if exp.leading else None
        if got != table:
            bad.append((i, j, got, table))
    return bad


def random_lagrangian(nus, rng, scale=2.0, digits=1):
    """Mixed Lagrangian with all theta nonzero for the given exponents.

    ``theta_ik`` for ``i < k`` and the diagonal are drawn at random; the rest
    follow from ``theta_ki = theta_ik c_k / c_i`` with ``c`` the symplectic
    weights, so the result is exactly Lagrangian.
    """
    n = len(nus)
    w = [exact(2 * exact(nu)) if nu > 0 else Fraction(1) for nu in nus]
    th = [[Fraction(0)] * n for _ in range(n)]

    def draw():
        while True:
            v = round(float(rng.uniform(-scale, scale)), digits)
            if v != 0:
                return exact(v)

    for i in range(n):
        th[i][i] = draw()
        for k in range(i + 1, n):
            th[i][k] = draw()
            th[k][i] = th[i][k] * w[k] / w[i]
    return LagrangianMatrix((1,) * n, tuple(tuple(float(v) for v in row) for row in th))


__all__ = [
    "ZetaTerm", "ZetaSeries", "SymbolMatrix", "TimeTerm", "TimeExpansion",
    "FrontFaceOrder", "IndexSet", "TraceCorrection",
    "assemble_gn_matrix", "invert_symbol_matrix", "matmul", "identity_residual",
    "inverse_laplace_orders", "compose_front_face", "trace_order", "ght_trace_order",
    "main_leading_order", "predict_trace_correction", "index_compose", "extended_union",
    "lk_leading_shape", "d_kernel_order", "g_kernel_order", "dg_improvement",
    "kappa_value", "gn_constant", "exact", "format_exponent", "random_lagrangian",
    "reduce_friedrichs", "entry_trace_expansion", "all_orders_consistent",
]

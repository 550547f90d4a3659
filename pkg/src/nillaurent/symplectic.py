"""The antisymmetric residue form on A((x^(1/d))) and the action of the
nil-Laurent group on it.

<g, h> = -sum_n (n/d) g[n] h[-n], so <x^s, x^t> = t when s + t = 0 and 0
otherwise; it agrees with res(g dh).  The constant direction pairs
trivially with everything and is left out of every window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from gmpy2 import mpq

from .errors import DomainError, PrecisionError
from .laurent import INF, LaurentSeries, derivative, power, power_table, residue
from .nil_laurent import NilLaurentElement, certify, comp_inverse, compose
from .ring import RingDescriptor, RingElement, mul_terms

# --- the form ---


def _require_covered(g: LaurentSeries, h: LaurentSeries):
    # every unknown coefficient of g (numerator >= P_g) must meet a known zero of h
    if g.prec != INF and not g.prec > -h.valuation():
        raise PrecisionError(
            f"pairing needs precision {g.prec}/{g.den} > {-h.valuation()}/{h.den} to cover the other factor's tail"
        )


def pairing(g: LaurentSeries, h: LaurentSeries) -> RingElement:
    """<g, h> = -sum_n (n/d) g[n] h[-n], exact."""
    g, h = g._unify(h)
    _require_covered(g, h)
    _require_covered(h, g)
    g, h = g.classical(), h.classical()
    ring = g.ring
    d = g.den
    acc: dict = {}
    for n, a in g.coeffs.items():
        b = h.coeffs.get(-n)
        if n and b is not None:
            mul_terms(ring, a.terms, b.terms, acc, scale=mpq(-n, d))
    return RingElement(ring, acc)


def residue_form(g: LaurentSeries, h: LaurentSeries) -> RingElement:
    """res(g dh), computed independently of :func:`pairing`."""
    g, h = g._unify(h)
    _require_covered(g, h)
    _require_covered(h, g)
    prod = g * derivative(h)
    if prod.prec <= -prod.den:
        raise PrecisionError("product g*dh does not reach the residue term")
    return residue(prod)


# --- windows and sectors ---


@dataclass(frozen=True)
class PairingWindow:
    """Basis x^(n/d) for 0 < |n| <= K, ordered by numerator."""

    K: int
    d: int = 1

    def __post_init__(self):
        if self.d < 1:
            raise DomainError("window denominator must be positive")
        if self.K < self.d:
            raise DomainError(f"window needs K >= d (got K={self.K}, d={self.d})")

    @property
    def basis(self) -> list[int]:
        return [n for n in range(-self.K, self.K + 1) if n]

    def __contains__(self, n: int) -> bool:
        return n != 0 and -self.K <= n <= self.K


@dataclass(frozen=True)
class SectorLabel:
    """V_a inside Q((x^(1/p))): exponents +-(k + a/p), k >= 0, never 0."""

    p: int
    a: int

    def __post_init__(self):
        if self.p < 2:
            raise DomainError("sector modulus must be at least 2")
        if not 0 <= self.a < self.p:
            raise DomainError(f"sector label {self.a} is not in 0..{self.p - 1}")

    def contains(self, n: int) -> bool:
        """Does numerator n (exponent n/p) belong to this sector?"""
        return n != 0 and abs(n) % self.p == self.a


def sector_project(g: LaurentSeries, s: SectorLabel) -> LaurentSeries:
    if g.den != s.p:
        raise DomainError(f"sector projection needs denominator {s.p}, series has {g.den}")
    return LaurentSeries(g.ring, {n: c for n, c in g.coeffs.items() if s.contains(n)}, g.den, g.gprec)


def gram_matrix(w: PairingWindow) -> list[list[mpq]]:
    return [[mpq(n, w.d) if m + n == 0 else mpq(0) for n in w.basis] for m in w.basis]


def rank(rows: list[list]) -> int:
    """Rank over Q by fraction-exact Gaussian elimination."""
    m = [[mpq(x) for x in row] for row in rows]
    r = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        pivot = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
    return r


# --- the Sp_L action ---


@dataclass(frozen=True)
class SpMatrix:
    """Window matrix of h -> h o f^-1: entry [m][n] = [x^m] (x^n o f^-1).

    ``escaped_below`` flags mass at numerators below -K (which would feed
    back into the window under a further composition); ``escaped_above``
    flags mass above K, or a column with an unknown tail.
    """

    window: PairingWindow
    ring: RingDescriptor
    entries: tuple
    escaped_below: bool
    escaped_above: bool

    @property
    def escaped(self) -> bool:
        return self.escaped_below or self.escaped_above

    def __getitem__(self, mn: tuple[int, int]) -> RingElement:
        basis = self.window.basis
        m, n = mn
        return self.entries[basis.index(m)][basis.index(n)]

    def __matmul__(self, other: "SpMatrix") -> list[list[RingElement]]:
        return matmul(self.entries, other.entries, self.ring)

    def restrict(self, inner: PairingWindow) -> list[list[RingElement]]:
        idx = [self.window.basis.index(n) for n in inner.basis]
        return [[self.entries[i][j] for j in idx] for i in idx]


def matmul(a, b, ring: RingDescriptor) -> list[list[RingElement]]:
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc: dict = {}
            for t in range(k):
                x, y = a[i][t], b[t][j]
                if x.terms and y.terms:
                    mul_terms(ring, x.terms, y.terms, acc)
            row.append(RingElement(ring, acc))
        out.append(row)
    return out


def _as_element(f) -> NilLaurentElement:
    return certify(f)


def _columns(finv: NilLaurentElement, ns, top: int) -> dict[int, LaurentSeries]:
    cols = power_table(finv.series, ns)
    for n, col in cols.items():
        _check_column(n, col, top)
    return cols


def _check_column(n: int, col: LaurentSeries, top: int):
    if col.prec <= top:
        raise PrecisionError(f"column x^{n} o f^-1 known only below x^{col.prec}; window needs x^{top}")


def sp_matrix(f, w: PairingWindow, inverse: NilLaurentElement | None = None) -> SpMatrix:
    """Matrix of h -> h o f^-1 on the window (integer exponents only)."""
    f = _as_element(f)
    if w.d != 1:
        raise DomainError("sp_matrix acts on integer-exponent windows (d = 1)")
    finv = inverse if inverse is not None else comp_inverse(f)[0]
    cols = []
    below = above = False
    table = _columns(finv, w.basis, w.K)
    for n in w.basis:
        col = table[n]
        below = below or any(m < -w.K for m in col.coeffs)
        above = above or not col.is_exact or any(m > w.K for m in col.coeffs)
        cols.append([col.coefficient(m) for m in w.basis])
    entries = tuple(tuple(cols[j][i] for j in range(len(cols))) for i in range(len(w.basis)))
    return SpMatrix(w, f.ring, entries, below, above)


def downward_spread(finv: NilLaurentElement) -> int:
    """How far x^n o f^-1 can reach below x^n, given f^-1: (nu - 1)(1 + t).

    t is the depth of the tail of f^-1 (its most negative exponent, negated).
    """
    t = max((-n for n in finv.minus.coeffs), default=0)
    return (finv.nu - 1) * (1 + t)


@dataclass(frozen=True)
class HomomorphismReport:
    ok: bool
    inner: PairingWindow
    outer: PairingWindow
    escape_free: bool


def sp_homomorphism_check(f1, f2, K: int) -> HomomorphismReport:
    """sp(f1 o f2) == sp(f1) sp(f2) on the window |n| <= K.

    The intermediate sum runs over an outer window wide enough that nothing
    outside it can reach back into |n| <= K; ``escape_free`` confirms no
    column of sp(f2) has mass below the outer window.
    """
    f1, f2 = _as_element(f1), _as_element(f2)
    inv1 = comp_inverse(f1)[0]
    inv2 = comp_inverse(f2)[0]
    inner = PairingWindow(K)
    outer = PairingWindow(K + max(downward_spread(inv1), downward_spread(inv2)))
    ring = f1.ring
    m2 = []
    escape_free = True
    table2 = _columns(inv2, inner.basis, outer.K)
    for n in inner.basis:
        col = table2[n]
        escape_free = escape_free and all(m >= -outer.K for m in col.coeffs)
        m2.append([col.coefficient(j) for j in outer.basis])
    m1 = _columns(inv1, outer.basis, K)
    lhs = sp_matrix(compose(f1, f2), inner).entries
    ok = True
    for ci, n in enumerate(inner.basis):
        for ri, m in enumerate(inner.basis):
            acc: dict = {}
            for jj, j in enumerate(outer.basis):
                a = m1[j].coefficient(m)
                b = m2[ci][jj]
                if a.terms and b.terms:
                    mul_terms(ring, a.terms, b.terms, acc)
            if RingElement(ring, acc) != lhs[ri][ci]:
                ok = False
    return HomomorphismReport(ok, inner, outer, escape_free)


# --- invariance ---


@dataclass
class InvarianceReport:
    checked: int = 0
    skipped: int = 0
    violations: list = field(default_factory=list)
    infinitesimal_checked: int = 0
    infinitesimal_violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and not self.infinitesimal_violations


def infinitesimal_change(n: int, k: int, l: int, prec: int | None = None) -> RingElement:
    """First-order change of <x^k, x^l> under f = x + eps x^(n+1) over Q[eps^2]."""
    ring = RingDescriptor(1, (("eps", 2),))
    if prec is None:
        prec = 4 * (abs(n) + abs(k) + abs(l)) + 8
    f = LaurentSeries.x(ring, prec) + LaurentSeries.monomial(ring, n + 1, coeff=ring.generator("eps"))
    base = pairing(LaurentSeries.monomial(ring, k), LaurentSeries.monomial(ring, l))
    return pairing(power(f, k), power(f, l)) - base


def check_invariance(f, w: PairingWindow, infinitesimal_range: int | None = 4) -> InvarianceReport:
    """<x^i o f, x^j o f> == <x^i, x^j> on the window, plus the first-order check.

    Pairs whose composed series are not known far enough are skipped and
    counted; the first-order check covers all n, k, l in the given range.
    """
    f = _as_element(f)
    if w.d != 1:
        raise DomainError("invariance check acts on integer-exponent windows (d = 1)")
    ring = f.ring
    report = InvarianceReport()
    pulled = power_table(f.series, w.basis)
    for i in w.basis:
        for j in w.basis:
            try:
                got = pairing(pulled[i], pulled[j])
            except PrecisionError:
                report.skipped += 1
                continue
            want = ring.scalar(j) if i + j == 0 else ring.zero()
            report.checked += 1
            if got != want:
                report.violations.append((i, j, got))
    if infinitesimal_range is not None:
        r = infinitesimal_range
        for n in range(-r, r + 1):
            for k in range(-r, r + 1):
                for l in range(-r, r + 1):
                    change = infinitesimal_change(n, k, l)
                    report.infinitesimal_checked += 1
                    if not change.is_zero():
                        report.infinitesimal_violations.append((n, k, l, change))
    return report


# --- gamma normalizations (double precision) ---


def _rgamma(t: float) -> float:
    """1/Gamma(t), zero at the poles."""
    if t <= 0 and float(t).is_integer():
        return 0.0
    return 1.0 / math.gamma(t)


def gamma_pairing(n: int, m: int, p: int) -> float:
    """<gamma_(n/p), gamma_(m/p)> with gamma_s = x^s / Gamma(s + 1)."""
    if p < 2:
        raise DomainError("p must be at least 2")
    if n + m:
        return 0.0
    return -math.sin(n * math.pi / p) / math.pi


def gamma_quotient(n: int, m: int, p: int) -> float:
    """Same pairing by the Gamma route: (m/p) / (Gamma(1+n/p) Gamma(1+m/p)) when n + m = 0.

    Since t / Gamma(1+t) = 1 / Gamma(t), this equals 1 / (Gamma(1+n/p) Gamma(m/p)).
    """
    if n + m:
        return 0.0
    return (m / p) * _rgamma(1 + n / p) * _rgamma(1 + m / p)


def reflection_gap(s: float) -> float:
    """|Gamma(1+s) Gamma(1-s) - pi s / sin(pi s)| for non-integer s."""
    return abs(math.gamma(1 + s) * math.gamma(1 - s) - math.pi * s / math.sin(math.pi * s))


SignedIndex = tuple  # (sign, k): exponent sign * (k + a/p)


def normalized_basis_pairing(a: int, j: SignedIndex, k: SignedIndex, p: int) -> float:
    """Pairing of |sin(a pi/p)|^(-1/2) gamma_(+-(k + a/p)) basis vectors.

    For opposite indices (sigma, k) and (-sigma, k) the value is
    -sigma (-1)^k sgn(sin(a pi/p)) / pi, by Gamma reflection.
    """
    if a % p == 0:
        raise DomainError("normalized basis needs a not divisible by p")
    (sj, kj), (sk, kk) = j, k
    if sj not in (1, -1) or sk not in (1, -1) or kj < 0 or kk < 0:
        raise DomainError("signed indices are (+1 or -1, k >= 0)")
    if sj != -sk or kj != kk:
        return 0.0
    sgn = 1.0 if math.sin(a * math.pi / p) > 0 else -1.0
    return -sj * (-1) ** kj * sgn / math.pi


def normalized_basis_pairing_numeric(a: int, j: SignedIndex, k: SignedIndex, p: int) -> float:
    """Oracle: gamma_pairing with the |sin|^(-1/2) factor applied to both sides."""
    (sj, kj), (sk, kk) = j, k
    n = sj * (kj * p + a)
    m = sk * (kk * p + a)
    scale = abs(math.sin(a * math.pi / p))
    return gamma_pairing(n, m, p) / scale

"""The multiplicative Witt group W(A) = 1 + x A[[x]] with its involution,
norm, Frobenius and the two kernel conditions.

* Schur-Q kernel: q(x) q(-x) = 1, equivalently log q is odd.
* Frobenius kernel at p: prod_a w(zeta_p^a x) = 1, equivalently log w has
  no exponent divisible by p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConsistencyError, DomainError
from .laurent import LaurentSeries, exp, lift_ring, log, map_coefficients, mul_inverse, rescale, root_substitute
from .ring import RingDescriptor, descend, root_of_unity
from .symplectic import SectorLabel, sector_project

DEFAULT_PREC = 16


@dataclass(frozen=True, eq=False)
class WittVector:
    """A power series with constant term 1."""

    series: LaurentSeries

    def __post_init__(self):
        s = self.series
        if s.den != 1:
            raise DomainError("Witt vectors have integer exponents")
        if any(n < 0 for n in s.coeffs):
            raise DomainError("Witt vectors have no negative exponents")
        if s.prec < 1 or s.coefficient(0) != s.ring.one():
            raise DomainError("Witt vectors have constant term 1")

    @property
    def ring(self) -> RingDescriptor:
        return self.series.ring

    @property
    def prec(self):
        return self.series.prec

    def __mul__(self, other: "WittVector") -> "WittVector":
        return w_mul(self, other)

    def is_one(self) -> bool:
        """True when every known coefficient past the constant term vanishes."""
        return list(self.series.coeffs) == [0]

    def agrees_with(self, other) -> bool:
        other = other.series if isinstance(other, WittVector) else other
        return self.series.agrees_with(other)

    def __str__(self):
        return str(self.series)


def witt(series: LaurentSeries) -> WittVector:
    return series if isinstance(series, WittVector) else WittVector(series)


def w_mul(v: WittVector, w: WittVector) -> WittVector:
    return WittVector(witt(v).series * witt(w).series)


def w_inv(w: WittVector, prec=None) -> WittVector:
    w = witt(w)
    return WittVector(mul_inverse(w.series, prec if prec is not None else DEFAULT_PREC))


def involution(w: WittVector) -> WittVector:
    """w*(x) = w(-x)."""
    return WittVector(rescale(witt(w).series, -1))


def norm(w: WittVector) -> WittVector:
    """w(x) w(-x), always even."""
    w = witt(w)
    return w_mul(w, involution(w))


def schur_q_test(q: WittVector) -> bool:
    return norm(q).is_one()


def schur_q_generate(ell: LaurentSeries, prec=None) -> WittVector:
    """exp(ell) for an odd-supported ell; always in the Schur-Q kernel."""
    bad = [n for n in ell.coeffs if n < 1 or n % 2 == 0]
    if ell.den != 1 or bad:
        raise DomainError(f"generator must be odd-supported, found exponent {bad[0] if bad else 'fractional'}")
    return WittVector(exp(ell, prec if prec is not None else DEFAULT_PREC))


def frobenius_with_meta(w: WittVector, p: int, auto_lift: bool = True) -> tuple[WittVector, dict]:
    """N(w)(x) = prod_a w(zeta_p^a x), plus a note of any cyclotomic lift."""
    w = witt(w)
    if p < 2:
        raise DomainError("Frobenius needs p >= 2")
    ring = w.ring
    meta = {"lifted_to": None}
    series = w.series
    work = ring
    if ring.cyclotomic_order % p:
        if not auto_lift:
            raise DomainError(f"ring {ring} has no primitive {p}th root of unity (auto-lift disabled)")
        work = ring.with_cyclotomic_order(math.lcm(ring.cyclotomic_order, p))
        series = lift_ring(series, work)
        meta["lifted_to"] = str(work)
    zeta = root_of_unity(work, work.cyclotomic_order // p)
    result = series
    scale = zeta
    for _ in range(1, p):
        result = result * rescale(series, scale)
        scale = scale * zeta
    if work != ring:
        try:
            result = map_coefficients(result, lambda c: descend(c, ring), ring)
        except DomainError:
            raise ConsistencyError("Frobenius image is not Galois invariant") from None
    bad = [n for n in result.coeffs if n % p]
    if bad:
        raise ConsistencyError(f"Frobenius image has exponent {bad[0]} not divisible by {p}")
    return WittVector(result), meta


def frobenius(w: WittVector, p: int, auto_lift: bool = True) -> WittVector:
    return frobenius_with_meta(w, p, auto_lift)[0]


def hl_kernel_test(w: WittVector, p: int, prec=None) -> bool:
    """Projection of log w(x^(1/p)) to the sector V_0 vanishes."""
    w = witt(w)
    ell = log(w.series, prec if prec is not None else DEFAULT_PREC)
    projected = sector_project(root_substitute(ell, p), SectorLabel(p, 0))
    return projected.is_zero()

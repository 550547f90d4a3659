"""Nil-Laurent series: Laurent series whose reduction mod nilpotents is a
formal diffeomorphism.

An element g = g_+ + g_- splits into a power series g_+ with unit linear
coefficient and a Laurent polynomial g_- (exponents <= 0) with nilpotent
coefficients.  Composition expands around g_+ by divided derivatives,
which terminates because g_- is nilpotent; inversion follows the
quadratically convergent correction scheme x -> 2x - residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

from .diffeo import DEFAULT_PREC, FormalDiffeo, bracket_ring, commutator_coefficient, flow, powers
from .diffeo import comp_inverse as diffeo_inverse
from .errors import ConsistencyError, DomainError, NotAUnitError, NotNilpotentError, PrecisionError
from .laurent import (
    INF,
    LaurentSeries,
    _binomial,
    _inverse_unit_series,
    change_denominator,
    check_nilpotent_tail,
    gmin,
    grades_of,
    gscale,
    gshift,
    power,
    rescale,
    root_substitute,
    split,
)
from .ring import RingElement, invert_unit, is_unit, mul_terms, reduce

MIN_INVERSE_PREC = 4


def ideal_nilpotency_index(generators: list[RingElement]) -> int:
    """Least n with I^n = 0 for the ideal I generated by ``generators``."""
    gens = [g for g in generators if not g.is_zero()]
    if not gens:
        return 1
    bound = gens[0].ring.nil_bound
    products = {(i,): g for i, g in enumerate(gens)}
    for n in range(2, bound + 1):
        nxt = {}
        for combo in combinations_with_replacement(range(len(gens)), n):
            prev = products.get(combo[:-1])
            if prev is None:
                continue
            p = prev * gens[combo[-1]]
            if not p.is_zero():
                nxt[combo] = p
        if not nxt:
            return n
        products = nxt
    raise ConsistencyError(f"ideal not nilpotent within the ring bound {bound}")


@dataclass(frozen=True, eq=False)
class NilLaurentElement:
    """A certified member of the nil-Laurent group (construct via :func:`certify`)."""

    series: LaurentSeries
    plus: LaurentSeries = field(repr=False)
    minus: LaurentSeries = field(repr=False)
    nu: int

    @property
    def ring(self):
        return self.series.ring

    @property
    def prec(self):
        return self.series.prec

    def __matmul__(self, other: "NilLaurentElement") -> "NilLaurentElement":
        return compose(self, other)

    def agrees_with(self, other) -> bool:
        other = other.series if isinstance(other, NilLaurentElement) else other
        return self.series.agrees_with(other)

    def __str__(self):
        return str(self.series)


def certify(g: LaurentSeries | FormalDiffeo | NilLaurentElement) -> NilLaurentElement:
    """Check the unit and nilpotency conditions and cache the split and nu."""
    if isinstance(g, NilLaurentElement):
        return g
    if isinstance(g, FormalDiffeo):
        g = g.series
    if g.den != 1:
        raise DomainError("nil-Laurent elements have integer exponents")
    if g.prec <= 1:
        raise PrecisionError("the linear coefficient is not within precision")
    lead = g.coefficient(1)
    if not is_unit(lead):
        raise NotAUnitError(f"coefficient of x ({lead}) is not a unit")
    plus, minus = split(g)
    # the constant term is nilpotent, so its reduced part is zero
    if 0 in plus.coeffs:
        raise NotNilpotentError(f"constant coefficient {g.coeffs[0]} is not nilpotent", 0)
    check_nilpotent_tail(minus)
    nu = ideal_nilpotency_index(list(minus.coeffs.values()))
    return NilLaurentElement(g, plus, minus, nu)


def substitute(h: LaurentSeries, g: NilLaurentElement) -> LaurentSeries:
    """h(g(x)) for any Laurent series h with integer exponents.

    h_+(g) = sum_k (D_k h_+)(g_+) g_-^k (finite: g_-^nu = 0), and every
    non-positive power of g is expanded binomially around g_+.
    """
    if isinstance(h, (NilLaurentElement, FormalDiffeo)):
        h = h.series
    g = certify(g)
    h._check(g.series)
    if h.den != 1:
        raise DomainError("outer series must have integer exponents")
    ring = h.ring
    if h.prec <= 0:
        raise PrecisionError("outer series must be known through its constant term")
    hp = {n: c for n, c in h.coeffs.items() if n > 0}
    hm = {n: c for n, c in h.coeffs.items() if n <= 0}
    gp, gm = g.plus, g.minus

    result = LaurentSeries(ring, {}, 1)
    if hp or not h.is_exact:
        # v(g_+) = 1, so the grade-j unknown tail of h feeds D_k at P_j - k
        top = max(hp, default=0)
        gp_pows = powers(gp, top, h.gprec[0])
        gm_power = LaurentSeries(ring, {0: 1}, 1)
        k = 0
        while True:
            prec = gshift(h.gprec, -k)
            kcap = prec[0]
            acc: dict = {}
            for m, c in hp.items():
                if m < k:
                    continue
                b = _binomial(m, k)
                pw = gp_pows[m - k]
                ct = c.terms
                prec = gmin(prec, gscale(pw.gprec, grades_of(ring, ct)))
                for n, a in pw.coeffs.items():
                    if n >= kcap:
                        continue
                    slot = acc.get(n)
                    if slot is None:
                        slot = acc[n] = {}
                    mul_terms(ring, ct, a.terms, slot, scale=b)
            term = LaurentSeries._raw(ring, acc, 1, prec)
            result = result + term * gm_power
            k += 1
            gm_power = gm_power * gm
            if gm_power.is_zero():
                break
    if hm:
        result = result + _negative_part(hm, gp, gm)
    return result


def _negative_part(hm: dict, gp: LaurentSeries, gm: LaurentSeries) -> LaurentSeries:
    """sum_n h_n g^n over n <= 0, with g^n = sum_i binom(n, i) g_-^i g_+^(n-i).

    Powers of 1/g_+ and of g_- are shared across all n; each h_n g_-^i is
    formed exactly first, so products it annihilates cost no precision.
    """
    ring = gp.ring
    one = LaurentSeries(ring, {0: 1}, 1)
    gm_pows = [one]
    while True:
        nxt = gm_pows[-1] * gm
        if nxt.is_zero():
            break
        gm_pows.append(nxt)
    inv_pows = [one, _inverse_unit_series(gp)]
    result = LaurentSeries(ring, {}, 1)
    for n, c in sorted(hm.items()):
        m = -n
        for i, gmi in enumerate(gm_pows):
            if i and not m:
                break
            cg = gmi * c
            if cg.is_zero():
                break
            while len(inv_pows) <= m + i:
                inv_pows.append(inv_pows[-1] * inv_pows[1])
            result = result + inv_pows[m + i] * cg * _binomial(n, i)
    return result


def compose(h: NilLaurentElement, g: NilLaurentElement) -> NilLaurentElement:
    """h o g (g substituted into h), certified."""
    h = certify(h)
    g = certify(g)
    return certify(substitute(h.series, g))


def _residual_is_identity(r: LaurentSeries) -> bool:
    one = r.ring.one()
    return all((n == 1 and c == one) for n, c in r.coeffs.items()) and 1 in r.coeffs


def comp_inverse(g: NilLaurentElement) -> tuple[NilLaurentElement, int]:
    """Compositional inverse and the number of correction rounds used.

    Round 0 inverts g_+ in the formal group and rescales so that g o h has
    linear coefficient 1 and agrees with x modulo the ideal I of the tail
    coefficients.  Each further round composes with x -> 2x - r (r the
    current residual g o h), then rescales by the new linear coefficient;
    the error ideal goes I -> I^2 -> I^4 ...
    """
    g = certify(g)
    s = g.series
    if s.prec == INF:
        s = s.truncate(max(DEFAULT_PREC, max(s.coeffs) + 1))
        g = certify(s)
    if s.prec < MIN_INVERSE_PREC:
        raise PrecisionError(f"inversion needs precision >= {MIN_INVERSE_PREC}")
    ring = s.ring
    h_plus = diffeo_inverse(FormalDiffeo(g.plus)).series
    r = substitute(s, certify(h_plus))
    u0_inv = invert_unit(r.coefficient(1))
    h = rescale(h_plus, u0_inv)
    r = rescale(r, u0_inv)
    limit = math.ceil(math.log2(g.nu)) if g.nu > 1 else 0
    iterations = 0
    x2 = LaurentSeries(ring, {1: 2}, 1)
    while not _residual_is_identity(r):
        if iterations > limit:
            raise ConsistencyError(f"inversion did not converge within {limit + 1} corrections (nu = {g.nu})")
        corr_plus = certify(x2 - r)
        s_ = substitute(r, corr_plus)
        u_inv = invert_unit(s_.coefficient(1))
        corr = certify(rescale(corr_plus.series, u_inv))
        h = substitute(h, corr)
        r = rescale(s_, u_inv)
        iterations += 1
    return certify(h), iterations


def lie_bracket_extended(k: int, l: int, prec: int = DEFAULT_PREC) -> tuple[RingElement, int]:
    """[v_k, v_l] for any integers via commutators of nil-Laurent flows."""
    ring = bracket_ring()
    prec = max(prec, k + l + 3, k + 3, l + 3)
    fk = certify(flow(ring, "e1", k, prec))
    fl = certify(flow(ring, "e2", l, prec))
    fk_inv, _ = comp_inverse(fk)
    fl_inv, _ = comp_inverse(fl)
    comm = compose(compose(fl, fk), compose(fl_inv, fk_inv))
    c = commutator_coefficient(comm.series, k, l)
    if c != l - k:
        raise ConsistencyError(f"bracket [v_{k}, v_{l}] came out as {c}, not {l - k}")
    return c, k + l


def periodic_certify(g, p: int) -> bool:
    """True iff every nonzero coefficient sits at an exponent = 1 mod p."""
    s = g.series if isinstance(g, (NilLaurentElement, FormalDiffeo)) else g
    return all((n - s.den) % (p * s.den) == 0 for n in s.coeffs)


def cover_map(g, p: int) -> NilLaurentElement:
    """g(x^(1/p))^p, written back over integer exponents."""
    g = certify(g)
    if not periodic_certify(g, p):
        raise DomainError(f"series is not {p}-periodic (exponents must be 1 mod {p})")
    lifted = root_substitute(g.series, p)
    powered = power(lifted, p)
    try:
        back = change_denominator(powered, 1)
    except DomainError as exc:
        raise ConsistencyError(f"cover map produced a fractional exponent: {exc}") from None
    return certify(back)


def reduce_series(g: LaurentSeries) -> LaurentSeries:
    """Coefficientwise image in A_red((x))."""
    return LaurentSeries(g.ring, {n: reduce(c) for n, c in g.coeffs.items()}, g.den, g.prec)

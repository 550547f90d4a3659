"""Formal diffeomorphisms g(x) = g_0 x + g_1 x^2 + ... with g_0 a unit.

Composition is substitution ``compose(g, h) = g(h(x))``: ``h`` is applied
first.  Inverses are solved one coefficient at a time.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .errors import ConsistencyError, DomainError, NotAUnitError, PrecisionError
from .laurent import INF, LaurentSeries, grades_of, gmin, gscale, rescale, series_mul
from .ring import RingDescriptor, RingElement, evaluate, invert_unit, is_unit, mul_terms

DEFAULT_PREC = 16


def powers(g: LaurentSeries, top: int, cap=INF) -> list[LaurentSeries]:
    """[g^0, g^1, ..., g^top], each truncated at ``cap``."""
    out = [LaurentSeries(g.ring, {0: 1}, g.den)]
    for _ in range(top):
        out.append(series_mul(out[-1], g, cap))
    return out


def substitute_power_series(f: LaurentSeries, g: LaurentSeries, g_powers: list | None = None) -> LaurentSeries:
    """f(g) for a power series f (exponents >= 0, d = 1) and g of positive valuation.

    The unknown tail of f at grade k, I^k O(x^P_k), contributes
    I^k O(g^P_k), so grade k of the result is capped at P_k * v(g).
    """
    if f.den != 1:
        raise DomainError("outer series of a substitution must have integer exponents")
    if any(n < 0 for n in f.coeffs):
        raise DomainError("outer series has negative exponents")
    v = g.valuation()
    if not v > 0:
        raise DomainError("inner series must have positive valuation")
    ring = f.ring
    prec = tuple(p * v if p != INF else INF for p in f.gprec)
    cap = prec[0]
    top = max(f.coeffs, default=0)
    if g_powers is None or len(g_powers) <= top:
        g_powers = powers(g, top, cap)
    acc: dict = {}
    for m, c in f.coeffs.items():
        pw = g_powers[m]
        ct = c.terms
        prec = gmin(prec, gscale(pw.gprec, grades_of(ring, ct)))
        for n, a in pw.coeffs.items():
            if n >= cap:
                continue
            slot = acc.get(n)
            if slot is None:
                slot = acc[n] = {}
            mul_terms(ring, ct, a.terms, slot)
    return LaurentSeries._raw(ring, acc, g.den, prec)


@dataclass(frozen=True, eq=False)
class FormalDiffeo:
    series: LaurentSeries

    def __post_init__(self):
        s = self.series
        if s.den != 1:
            raise DomainError("formal diffeomorphisms have integer exponents")
        low = [n for n in s.coeffs if n < 1]
        if low:
            raise DomainError(f"formal diffeomorphism has a term at exponent {min(low)}")
        if s.prec <= 1:
            raise PrecisionError("linear coefficient is not within precision")
        if not is_unit(self.leading):
            raise NotAUnitError(f"leading coefficient {self.leading} is not a unit")

    @property
    def ring(self) -> RingDescriptor:
        return self.series.ring

    @property
    def leading(self) -> RingElement:
        return self.series.coefficient(1)

    def __matmul__(self, other: "FormalDiffeo") -> "FormalDiffeo":
        return compose(self, other)

    def agrees_with(self, other) -> bool:
        other = other.series if isinstance(other, FormalDiffeo) else other
        return self.series.agrees_with(other)

    def __str__(self):
        return str(self.series)


def identity(ring: RingDescriptor, prec=INF) -> FormalDiffeo:
    return FormalDiffeo(LaurentSeries.x(ring, prec))


def compose(g: FormalDiffeo, h: FormalDiffeo) -> FormalDiffeo:
    """g o h, i.e. h substituted into g."""
    g_series = g.series if isinstance(g, FormalDiffeo) else g
    h_series = h.series if isinstance(h, FormalDiffeo) else h
    g_series._check(h_series)
    return FormalDiffeo(substitute_power_series(g_series, h_series))


def comp_inverse(g: FormalDiffeo, prec=None) -> FormalDiffeo:
    """Compositional inverse, solved coefficient by coefficient.

    Uses h(g(x)) = x: the coefficient of x^(n+1) reads
    g_0^(n+1) h_n + sum_{m<n} h_m [x^(n+1)] g^(m+1) = delta_{n,0}.
    """
    s = g.series if isinstance(g, FormalDiffeo) else g
    if s.prec == INF:
        if len(s.coeffs) == 1:
            c = invert_unit(s.coefficient(1))
            return FormalDiffeo(LaurentSeries(s.ring, {1: c}))
        s = s.truncate(prec if prec is not None else max(DEFAULT_PREC, max(s.coeffs) + 1))
    elif prec is not None:
        s = s.truncate(prec)
    s = s.classical()
    ring = s.ring
    top = s.prec - 1  # highest exponent we can solve for
    g_pows = powers(s, top, s.prec)
    g0_inv = invert_unit(s.coefficient(1))
    lead_inv = [ring.one()]
    for _ in range(top):
        lead_inv.append(lead_inv[-1] * g0_inv)
    h: dict[int, dict] = {}
    for n in range(top):
        acc: dict = {} if n else dict(ring.one().terms)
        for m, hm in h.items():
            c = g_pows[m + 1].coeffs.get(n + 1)
            if c is not None:
                mul_terms(ring, hm, c.terms, acc, scale=mpq(-1))
        hn = mul_terms(ring, acc, lead_inv[n + 1].terms) if acc else {}
        hn = {k: v for k, v in hn.items() if v}
        if hn:
            h[n] = hn
    return FormalDiffeo(LaurentSeries._raw(ring, {m + 1: t for m, t in h.items()}, 1, s.prec))


# --- universal composition coefficients ---


def carrier_ring(n: int, names: str = "gh") -> RingDescriptor:
    """Free polynomial ring on symbols <name>0 .. <name>n for each letter."""
    gens = tuple(f"{c}{i}" for c in names for i in range(n + 1))
    return RingDescriptor(1, (), gens)


def generic_series(ring: RingDescriptor, letter: str, n: int) -> LaurentSeries:
    return LaurentSeries(ring, {i + 1: ring.generator(f"{letter}{i}") for i in range(n + 1)}, 1, n + 2)


def universal_composition(n: int, ring: RingDescriptor | None = None) -> RingElement:
    """[x^(n+1)] (g o h) for generic g = sum g_i x^(i+1), h = sum h_j x^(j+1)."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    ring = ring or carrier_ring(n)
    g = generic_series(ring, "g", n)
    h = generic_series(ring, "h", n)
    return substitute_power_series(g, h).coefficient(n + 1)


def universal_table(n: int, ring: RingDescriptor | None = None) -> list[RingElement]:
    """[Delta_0, ..., Delta_n] over one shared carrier ring."""
    ring = ring or carrier_ring(n)
    g = generic_series(ring, "g", n)
    h = generic_series(ring, "h", n)
    comp = substitute_power_series(g, h)
    return [comp.coefficient(i + 1) for i in range(n + 1)]


def specialize(poly: RingElement, g: LaurentSeries, h: LaurentSeries) -> RingElement:
    """Evaluate a polynomial in g_i, h_j at the coefficients of concrete series."""
    target = g.ring
    images = {}
    for name in poly.ring.generator_names:
        letter, idx = name[0], int(name[1:])
        src = g if letter == "g" else h
        images[name] = src.coefficient(idx + 1) if idx + 1 < src.prec else None
        if images[name] is None:
            raise PrecisionError(f"{name} is beyond the precision of the specialization")
    return evaluate(poly, images, target)


# --- Lie algebra via dual-number flows ---


def bracket_ring() -> RingDescriptor:
    return RingDescriptor(1, (("e1", 2), ("e2", 2)))


def commutator_coefficient(comm: LaurentSeries, k: int, l: int) -> RingElement:
    """Check comm = x + c e1 e2 x^(k+l+1) and return c (as a rational ring scalar)."""
    comm = comm.classical()
    ring = comm.ring
    e12 = ring.generator("e1") * ring.generator("e2")
    target = k + l + 1
    if target >= comm.prec:
        raise PrecisionError("commutator precision does not reach the bracket term")
    c = mpq(0)
    for n, coeff in comm.coeffs.items():
        expect = ring.one() if n == 1 else ring.zero()
        rest = coeff - expect
        if n == target:
            c = rest.terms.get(next(iter(e12.terms)), mpq(0))
            rest = rest - e12 * c
        if not rest.is_zero():
            raise ConsistencyError(f"commutator has unexpected term {coeff} at exponent {n}")
    return ring.scalar(c)


def flow(ring: RingDescriptor, eps: str, k: int, prec) -> LaurentSeries:
    """x + eps x^(k+1)."""
    return LaurentSeries.x(ring, prec) + LaurentSeries.monomial(ring, k + 1, coeff=ring.generator(eps))


def lie_bracket(k: int, l: int, prec: int = DEFAULT_PREC) -> tuple[RingElement, int]:
    """[v_k, v_l] from the group commutator of x + e1 x^(k+1) and x + e2 x^(l+1)."""
    if k < 0 or l < 0:
        raise DomainError("negative indices need nil-Laurent flows (nil_laurent.lie_bracket_extended)")
    ring = bracket_ring()
    prec = max(prec, k + l + 3)
    fk = FormalDiffeo(flow(ring, "e1", k, prec))
    fl = FormalDiffeo(flow(ring, "e2", l, prec))
    # f_l o f_k o f_l^-1 o f_k^-1 carries +(l - k); the reverse order gives k - l
    comm = compose(compose(fl, fk), compose(comp_inverse(fl), comp_inverse(fk)))
    c = commutator_coefficient(comm.series, k, l)
    if c != l - k:
        raise ConsistencyError(f"bracket [v_{k}, v_{l}] came out as {c}, not {l - k}")
    return c, k + l


def rescale_diffeo(g: FormalDiffeo, u) -> FormalDiffeo:
    return FormalDiffeo(rescale(g.series, u))

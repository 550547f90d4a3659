"""Fock spaces of twisted Heisenberg algebras and their Sugawara Virasoro
operators, with exact commutator checks.

Modes: for twist theta the mode set is M = ((theta + Z) u (-theta + Z)) \\ {0},
with [a_r, a_s] = r delta_(r+s, 0).  For theta in {0, 1/2} this is just
theta + Z (one real boson, c = 1).  Otherwise it pairs the sectors
theta and 1 - theta (one complex boson, c = 2), which is the smallest
mode set on which the stated bracket is defined.  When theta = 0 the zero
mode a_0 acts as the scalar momentum mu.

Mode indices are stored as integer numerators over the denominator q of
theta.  A Fock state is a finite rational combination of monomials in
creation operators a_(-r), r > 0, written as sorted tuples of the r's.

L_n = 1/2 sum_r :a_(n-r) a_r: + delta_(n,0) h0, annihilators to the right.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from gmpy2 import mpq

from .errors import DomainError

Monomial = tuple  # sorted positive mode numerators


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if type(v).__name__ == "mpq":
        return Fraction(int(v.numerator), int(v.denominator))
    return Fraction(v)


@dataclass(frozen=True)
class SectorSpec:
    """Twist theta in [0, 1), momentum mu (untwisted only), normal-ordering constant h0."""

    theta: Fraction = Fraction(0)
    mu: Fraction = Fraction(0)
    h0: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "theta", _frac(self.theta))
        object.__setattr__(self, "mu", _frac(self.mu))
        object.__setattr__(self, "h0", _frac(self.h0))
        if not 0 <= self.theta < 1:
            raise DomainError(f"twist {self.theta} is not in [0, 1)")
        if self.theta and self.mu:
            raise DomainError("momentum is only defined in the untwisted sector")

    @property
    def q(self) -> int:
        return self.theta.denominator

    @property
    def twisted(self) -> bool:
        return self.theta != 0

    @property
    def central_charge(self) -> Fraction:
        """1 for a real boson (2 theta integral), 2 for the paired complex boson."""
        return Fraction(1) if (2 * self.theta).denominator == 1 else Fraction(2)

    def is_mode(self, m: int) -> bool:
        """Is the numerator m (mode m/q) in the mode set?"""
        if m == 0:
            return not self.twisted
        t = self.theta.numerator
        return (m - t) % self.q == 0 or (m + t) % self.q == 0

    def positive_modes(self, limit: int) -> list[int]:
        """Positive mode numerators up to ``limit`` (inclusive)."""
        return [m for m in range(1, limit + 1) if self.is_mode(m)]

    def numerator(self, r) -> int:
        r = _frac(r) * self.q
        if r.denominator != 1:
            raise DomainError(f"mode {r / self.q} is not a multiple of 1/{self.q}")
        return int(r)

    def with_h0(self, h0) -> "SectorSpec":
        return SectorSpec(self.theta, self.mu, h0)


@dataclass(frozen=True)
class FockVector:
    """Finite rational combination of creation monomials (zero never stored)."""

    q: int
    terms: dict = field(default_factory=dict, hash=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", {k: mpq(v) for k, v in self.terms.items() if v})

    @classmethod
    def vacuum(cls, q: int) -> "FockVector":
        return cls(q, {(): mpq(1)})

    @classmethod
    def basis(cls, q: int, mono: Monomial) -> "FockVector":
        return cls(q, {tuple(sorted(mono)): mpq(1)})

    def __add__(self, other: "FockVector") -> "FockVector":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return FockVector(self.q, out)

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + other * -1

    def __mul__(self, c) -> "FockVector":
        c = mpq(c)
        return FockVector(self.q, {k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, FockVector):
            return NotImplemented
        return self.q == other.q and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, mono: Monomial) -> mpq:
        return self.terms.get(tuple(sorted(mono)), mpq(0))

    def norm1(self) -> mpq:
        """Sum of absolute coefficients (zero iff the vector is zero)."""
        return sum((abs(v) for v in self.terms.values()), mpq(0))

    def level(self, mono: Monomial) -> Fraction:
        return Fraction(sum(mono), self.q)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in sorted(self.terms.items()):
            state = "|0>" if not mono else "{" + ",".join(str(Fraction(m, self.q)) for m in mono) + "}"
            parts.append(state if c == 1 else f"{c}*{state}")
        return " + ".join(parts).replace("+ -", "- ")


# --- Heisenberg action on monomials ---


def _create(mono: Monomial, m: int) -> Monomial:
    out = list(mono)
    out.append(m)
    out.sort()
    return tuple(out)


def _annihilate(mono: Monomial, m: int, q: int) -> tuple[Monomial, mpq] | None:
    """a_(m/q) on a monomial: (m/q) * (multiplicity of m), one copy removed."""
    count = mono.count(m)
    if not count:
        return None
    out = list(mono)
    out.remove(m)
    return tuple(out), mpq(m * count, q)


def heisenberg_apply(spec: SectorSpec, r, v: FockVector) -> FockVector:
    m = spec.numerator(r)
    if not spec.is_mode(m):
        if m == 0:
            raise DomainError("the twisted sector has no zero mode")
        raise DomainError(f"{_frac(r)} is not a mode of the sector with twist {spec.theta}")
    if m == 0:
        return v * spec.mu
    out: dict = {}
    for mono, c in v.terms.items():
        if m < 0:
            key = _create(mono, -m)
            out[key] = out.get(key, 0) + c
        else:
            hit = _annihilate(mono, m, spec.q)
            if hit is not None:
                key, f = hit
                out[key] = out.get(key, 0) + c * f
    return FockVector(spec.q, out)


# --- Sugawara operators ---


@lru_cache(maxsize=None)
def _virasoro_on_monomial(spec: SectorSpec, n: int, mono: Monomial) -> tuple:
    """L_n applied to one creation monomial, as ((monomial, coeff), ...)."""
    q = spec.q
    nq = n * q
    out: dict = {}

    def add(key, c):
        out[key] = out.get(key, 0) + c

    half = mpq(1, 2)
    # both creation: a_(n-r) a_r with r < 0 and n - r < 0, i.e. nq < r < 0
    if n < 0:
        for r in range(nq + 1, 0):
            if spec.is_mode(r) and spec.is_mode(nq - r):
                add(_create(_create(mono, -r), -(nq - r)), half)
    # mixed: sum over s > 0 with n - s < 0 of a_(n-s) a_s (the two orderings of the half-sum)
    for s in sorted(set(mono)):
        t = nq - s
        if t < 0 and spec.is_mode(t):
            key, f = _annihilate(mono, s, q)
            add(_create(key, -t), f)
    # both annihilation: 0 < r < n
    if n > 0:
        for r in range(1, nq):
            if spec.is_mode(r) and spec.is_mode(nq - r):
                first = _annihilate(mono, r, q)
                if first is None:
                    continue
                key, f1 = first
                second = _annihilate(key, nq - r, q)
                if second is None:
                    continue
                key2, f2 = second
                add(key2, half * f1 * f2)
    # zero mode (untwisted): mu a_n for n != 0, mu^2 / 2 for n = 0
    if not spec.twisted and spec.mu:
        mu = mpq(spec.mu.numerator, spec.mu.denominator)
        if n == 0:
            add(mono, mu * mu / 2)
        elif n < 0:
            add(_create(mono, -nq), mu)
        else:
            hit = _annihilate(mono, nq, q)
            if hit is not None:
                add(hit[0], mu * hit[1])
    # level operator part of L_0: the mixed sum above gives sum_s a_-s a_s = level
    if n == 0 and spec.h0:
        add(mono, mpq(spec.h0.numerator, spec.h0.denominator))
    return tuple((k, c) for k, c in out.items() if c)


def virasoro_apply(spec: SectorSpec, n: int, v: FockVector) -> FockVector:
    out: dict = {}
    for mono, c in v.terms.items():
        for key, f in _virasoro_on_monomial(spec, n, mono):
            out[key] = out.get(key, 0) + c * f
    return FockVector(spec.q, out)


def basis_states(spec: SectorSpec, level) -> list[Monomial]:
    """All creation monomials of level <= ``level``."""
    limit = int(_frac(level) * spec.q)
    modes = spec.positive_modes(limit)
    out: list[Monomial] = []

    def rec(start: int, remaining: int, acc: list):
        out.append(tuple(acc))
        for i in range(start, len(modes)):
            m = modes[i]
            if m > remaining:
                break
            acc.append(m)
            rec(i, remaining - m, acc)
            acc.pop()

    rec(0, limit, [])
    return out


# --- checks and derived constants ---


@dataclass(frozen=True)
class VirasoroReport:
    m: int
    n: int
    D: int
    c_expected: Fraction
    states: int
    residual: mpq
    failures: tuple = ()
    vacuum_value: mpq | None = None
    central_value: mpq | None = None
    c_extracted: Fraction | None = None

    @property
    def ok(self) -> bool:
        return self.residual == 0


def _commutator(spec: SectorSpec, m: int, n: int, v: FockVector) -> FockVector:
    return virasoro_apply(spec, m, virasoro_apply(spec, n, v)) - virasoro_apply(spec, n, virasoro_apply(spec, m, v))


def virasoro_commutator_check(spec: SectorSpec, m: int, n: int, D: int, c_expected=None) -> VirasoroReport:
    """Residual of [L_m, L_n] - (m-n) L_(m+n) - delta (c/12)(m^3 - m) on all states of level <= D."""
    c = _frac(c_expected) if c_expected is not None else spec.central_charge
    central = mpq(c.numerator, c.denominator) * (m**3 - m) / 12 if m + n == 0 else mpq(0)
    residual = mpq(0)
    failures = []
    states = basis_states(spec, D)
    for mono in states:
        v = FockVector.basis(spec.q, mono)
        r = _commutator(spec, m, n, v) - virasoro_apply(spec, m + n, v) * (m - n) - v * central
        if not r.is_zero():
            residual += r.norm1()
            failures.append(mono)
    vacuum_value = central_value = c_extracted = None
    if m + n == 0:
        vac = FockVector.vacuum(spec.q)
        vacuum_value = _commutator(spec, m, n, vac).coefficient(())
        l0 = virasoro_apply(spec, 0, vac).coefficient(())
        central_value = vacuum_value - 2 * m * l0
        if m**3 != m:
            x = central_value * 12 / (m**3 - m)
            c_extracted = Fraction(int(x.numerator), int(x.denominator))
    return VirasoroReport(m, n, D, c, len(states), residual, tuple(failures), vacuum_value, central_value, c_extracted)


def ground_state_weight(spec: SectorSpec) -> Fraction:
    """h = 1/2 <0|[L_1, L_-1]|0> computed with h0 = 0 (includes mu^2/2 when untwisted)."""
    bare = spec.with_h0(0)
    vac = FockVector.vacuum(spec.q)
    value = _commutator(bare, 1, -1, vac).coefficient(()) / 2
    return Fraction(int(value.numerator), int(value.denominator))


def normal_ordering_constant(spec: SectorSpec) -> Fraction:
    """h0 making [L_1, L_-1] = 2 L_0 on the vacuum."""
    h = ground_state_weight(spec)
    return h - (spec.mu**2 / 2 if not spec.twisted else 0)


def derived_spec(theta=0, mu=0) -> SectorSpec:
    """Sector with h0 set from the vacuum oracle."""
    spec = SectorSpec(theta, mu)
    return spec.with_h0(normal_ordering_constant(spec))


def candidate_weight(theta) -> Fraction:
    """Closed form a(p - a) / (4 p^2) for theta = a/p (real-boson twist field)."""
    theta = _frac(theta)
    a, p = theta.numerator, theta.denominator
    return Fraction(a * (p - a), 4 * p * p)


@dataclass(frozen=True)
class SectorSumReport:
    p: int
    per_sector: tuple
    oracle: Fraction
    closed_form: Fraction  # (p^2 - 1)/48
    match: bool


def sector_sum_weight(p: int) -> SectorSumReport:
    """sum_(a=1)^(p-1) ground_state_weight(a/p), next to (p^2 - 1)/48."""
    if p < 2:
        raise DomainError("p must be at least 2")
    per = tuple((Fraction(a, p), ground_state_weight(SectorSpec(Fraction(a, p)))) for a in range(1, p))
    total = sum((h for _, h in per), Fraction(0))
    closed_form = Fraction(p * p - 1, 48)
    return SectorSumReport(p, per, total, closed_form, total == closed_form)

"""Truncated Laurent series over a coefficient ring, in powers of x^(1/d).

A series stores finitely many nonzero coefficients keyed by integer
numerators ``n`` (exponent ``n/d``) together with a graded precision.
Write I for the ideal generated by the nilpotent generators of the ring
and N for the least power with I^N = 0.  The unknown part of the series
is a sum of terms I^k x^(P_k/d) A[[x^(1/d)]], k = 0 .. N-1, with
P_0 >= P_1 >= ... >= P_(N-1).  So a coefficient at numerator n is

* exact when n < P_(N-1) (this is ``prec``, the classical precision),
* known modulo I^k when P_k <= n < P_(k-1) (stored reduced: monomials of
  nilpotent degree >= k dropped),
* unknown when n >= P_0.

For rings without nilpotents N = 1 and this is ordinary truncation.
Tracking the grades matters because an unknown tail multiplied by a
nilpotent coefficient stays known modulo a higher power of I, which is
what keeps nil-Laurent composition and inversion from losing all
precision.  ``math.inf`` marks exact (finite) data.

The hot loops operate on the raw ``RingElement.terms`` dictionaries.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping

from gmpy2 import mpq

from .errors import DomainError, NotAUnitError, NotNilpotentError, PrecisionError, RingMismatchError
from .ring import RingDescriptor, RingElement, invert_unit, is_nilpotent, lift, mul_terms, reduce, to_mpq

INF = math.inf


def _is_scalar(value) -> bool:
    return isinstance(value, (int, Fraction)) or type(value).__name__ == "mpq"


# --- graded precision helpers ---


def _int_or_inf(p):
    return p if p == INF else int(p)


def norm_prec(ring: RingDescriptor, prec) -> tuple:
    """Graded precision tuple from a scalar or tuple, made non-increasing."""
    n = ring.nil_bound
    if isinstance(prec, tuple):
        if len(prec) != n:
            raise ValueError(f"graded precision needs {n} entries, got {len(prec)}")
        out = []
        cur = INF
        for p in prec:
            cur = min(cur, _int_or_inf(p))
            out.append(cur)
        return tuple(out)
    return (_int_or_inf(prec),) * n


def gmin(a: tuple, b: tuple) -> tuple:
    return tuple(min(x, y) for x, y in zip(a, b))


def gshift(a: tuple, s) -> tuple:
    return tuple(x + s for x in a)


def grades_of(ring: RingDescriptor, terms: Mapping) -> set:
    return {ring.grade(k) for k in terms}


def gscale(gprec: tuple, grades) -> tuple:
    """Precision after multiplying by an exact element with the given grades."""
    n = len(gprec)
    out = []
    for k in range(n):
        best = INF
        for i in grades:
            if i <= k:
                best = min(best, gprec[k - i])
        out.append(best)
    return tuple(out)


def _build(ring: RingDescriptor, raw: Mapping[int, Mapping], gprec: tuple) -> dict:
    """Drop unknown coefficient data and wrap terms as RingElements."""
    top, low = gprec[0], gprec[-1]
    grade = ring.grade
    out = {}
    for n, terms in raw.items():
        if n >= top:
            continue
        if n >= low:
            k = sum(1 for p in gprec if p > n)
            terms = {key: v for key, v in terms.items() if grade(key) < k}
        c = RingElement(ring, terms)
        if c.terms:
            out[n] = c
    return out


class LaurentSeries:
    __slots__ = ("ring", "den", "coeffs", "gprec", "_gval")

    def __init__(self, ring: RingDescriptor, coeffs: Mapping[int, RingElement] | None = None, den: int = 1, prec=INF):
        if den < 1:
            raise DomainError("exponent denominator must be positive")
        self.ring = ring
        self.den = den
        self.gprec = norm_prec(ring, prec)
        self._gval = None
        raw = {}
        for n, c in (coeffs or {}).items():
            if not isinstance(c, RingElement):
                c = ring.scalar(c)
            elif c.ring != ring:
                raise RingMismatchError(f"coefficient over {c.ring} in series over {ring}")
            raw[int(n)] = c.terms
        self.coeffs = _build(ring, raw, self.gprec)

    # construction helpers

    @classmethod
    def monomial(cls, ring: RingDescriptor, n: int, den: int = 1, coeff=1, prec=INF) -> "LaurentSeries":
        return cls(ring, {n: coeff}, den, prec)

    @classmethod
    def x(cls, ring: RingDescriptor, prec=INF) -> "LaurentSeries":
        return cls(ring, {1: 1}, 1, prec)

    @classmethod
    def constant(cls, ring: RingDescriptor, value, prec=INF) -> "LaurentSeries":
        return cls(ring, {0: value}, 1, prec)

    @classmethod
    def _raw(cls, ring, raw: Mapping[int, dict], den: int, prec) -> "LaurentSeries":
        s = cls.__new__(cls)
        s.ring = ring
        s.den = den
        s.gprec = norm_prec(ring, prec)
        s._gval = None
        s.coeffs = _build(ring, raw, s.gprec)
        return s

    # basic queries

    @property
    def prec(self):
        """Classical precision: every coefficient below it is exact."""
        return self.gprec[-1]

    @property
    def is_exact(self) -> bool:
        return self.gprec[-1] == INF

    def valuation(self):
        """Least numerator that may carry a nonzero coefficient."""
        if self.coeffs:
            return min(min(self.coeffs), self.prec)
        return self.prec

    def graded_valuations(self) -> list:
        """v_i = least numerator whose stored coefficient has a grade-i part."""
        if self._gval is None:
            ring = self.ring
            v = [INF] * ring.nil_bound
            grade = ring.grade
            for n, c in self.coeffs.items():
                for key in c.terms:
                    g = grade(key)
                    if n < v[g]:
                        v[g] = n
            self._gval = v
        return self._gval

    def coefficient(self, n: int) -> RingElement:
        if n >= self.prec:
            raise PrecisionError(f"coefficient of x^({n}/{self.den}) is beyond precision {self.prec}/{self.den}")
        return self.coeffs.get(n, self.ring.zero())

    def known_grade(self, n: int) -> int:
        """k such that the coefficient at numerator n is known modulo I^k."""
        return sum(1 for p in self.gprec if p > n)

    def __getitem__(self, exponent) -> RingElement:
        """Coefficient of ``x**exponent`` (exponent may be a Fraction)."""
        e = Fraction(exponent) * self.den
        if e.denominator != 1:
            return self.ring.zero()
        return self.coefficient(int(e))

    def items(self):
        return sorted(self.coeffs.items())

    def truncate(self, prec) -> "LaurentSeries":
        return LaurentSeries(self.ring, self.coeffs, self.den, gmin(self.gprec, norm_prec(self.ring, prec)))

    def classical(self) -> "LaurentSeries":
        """Forget the graded refinement: uniform precision ``prec``."""
        return LaurentSeries(self.ring, self.coeffs, self.den, self.prec)

    def with_precision(self, prec) -> "LaurentSeries":
        """Declare ``prec``; only legal when it does not claim unknown coefficients."""
        if prec > self.prec:
            raise PrecisionError("cannot raise precision of a truncated series")
        return self.truncate(prec)

    def is_zero(self) -> bool:
        """True when all known coefficients vanish."""
        return not self.coeffs

    def _check(self, other: "LaurentSeries"):
        if self.ring != other.ring:
            raise RingMismatchError(f"ring mismatch: {self.ring} vs {other.ring}")

    def _unify(self, other: "LaurentSeries"):
        self._check(other)
        if self.den == other.den:
            return self, other
        d = math.lcm(self.den, other.den)
        return change_denominator(self, d), change_denominator(other, d)

    def _coerce(self, other) -> "LaurentSeries":
        if isinstance(other, LaurentSeries):
            return other
        if isinstance(other, RingElement) or _is_scalar(other):
            return LaurentSeries(self.ring, {0: other}, self.den)
        return NotImplemented

    # arithmetic

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        f, g = self._unify(other)
        gprec = gmin(f.gprec, g.gprec)
        top = gprec[0]
        out = {n: c.terms for n, c in f.coeffs.items() if n < top}
        for n, c in g.coeffs.items():
            if n >= top:
                continue
            if n in out:
                acc = dict(out[n])
                for k, v in c.terms.items():
                    acc[k] = acc.get(k, 0) + v
                out[n] = acc
            else:
                out[n] = c.terms
        return LaurentSeries._raw(f.ring, out, f.den, gprec)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries._raw(
            self.ring, {n: {k: -v for k, v in c.terms.items()} for n, c in self.coeffs.items()}, self.den, self.gprec
        )

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RingElement) or _is_scalar(other):
            if _is_scalar(other):
                c = to_mpq(other)
                if not c:
                    return LaurentSeries(self.ring, {}, self.den)
                return LaurentSeries._raw(
                    self.ring, {n: {k: v * c for k, v in a.terms.items()} for n, a in self.coeffs.items()}, self.den, self.gprec
                )
            if other.ring != self.ring:
                raise RingMismatchError(f"ring mismatch: {self.ring} vs {other.ring}")
            gprec = gscale(self.gprec, grades_of(self.ring, other.terms))
            ring = self.ring
            return LaurentSeries._raw(
                ring, {n: mul_terms(ring, a.terms, other.terms) for n, a in self.coeffs.items()}, self.den, gprec
            )
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return series_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        return power(self, n)

    # comparison

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (
            self.ring == other.ring and self.den == other.den and self.gprec == other.gprec and self.coeffs == other.coeffs
        )

    __hash__ = None

    def agrees_with(self, other) -> bool:
        """Equality of everything known to both series (graded)."""
        other = self._coerce(other)
        f, g = self._unify(other)
        zero = {}
        grade = f.ring.grade
        for n in set(f.coeffs) | set(g.coeffs):
            k = min(f.known_grade(n), g.known_grade(n))
            if k == 0:
                continue
            a = f.coeffs.get(n)
            b = g.coeffs.get(n)
            a = a.terms if a is not None else zero
            b = b.terms if b is not None else zero
            keys = {key for key in a if grade(key) < k} | {key for key in b if grade(key) < k}
            if any(a.get(key, 0) != b.get(key, 0) for key in keys):
                return False
        return True

    def __repr__(self):
        extra = "" if len(set(self.gprec)) == 1 else f", graded precision {self.gprec}"
        return f"LaurentSeries({self.ring}, {self}{extra})"

    def __str__(self):
        return format_series(self)


# --- kernels ---


def product_precision(f: LaurentSeries, g: LaurentSeries) -> tuple:
    """Graded precision of f*g.

    Unknown parts combine as F E_g + E_f G + E_f E_g; a grade-i part of F at
    valuation v times I^j x^(P_j) lands in I^(i+j) x^(v + P_j).
    """
    vf, vg = f.graded_valuations(), g.graded_valuations()
    pf, pg = f.gprec, g.gprec
    out = []
    for k in range(len(pf)):
        best = INF
        for i in range(k + 1):
            j = k - i
            best = min(best, vf[i] + pg[j], vg[i] + pf[j], pf[i] + pg[j])
        out.append(best)
    return tuple(out)


def series_mul(f: LaurentSeries, g: LaurentSeries, prec_cap=INF) -> LaurentSeries:
    """Product with sound graded precision, optionally capped."""
    f, g = f._unify(g)
    ring = f.ring
    gprec = product_precision(f, g)
    if prec_cap != INF:
        gprec = gmin(gprec, norm_prec(ring, prec_cap))
    top = gprec[0]
    out: dict = {}
    gs = sorted(g.coeffs.items())
    for n1, a in f.coeffs.items():
        lim = top - n1
        at = a.terms
        for n2, b in gs:
            if n2 >= lim:
                break
            n = n1 + n2
            acc = out.get(n)
            if acc is None:
                acc = out[n] = {}
            mul_terms(ring, at, b.terms, acc)
    return LaurentSeries._raw(ring, out, f.den, gprec)


def split(g: LaurentSeries) -> tuple[LaurentSeries, LaurentSeries]:
    """Split into (g_plus, g_minus).

    g_plus: every term with positive exponent plus the reduced part of the
    constant term.  g_minus: the remaining terms (exponent <= 0), exact.
    """
    if g.prec <= 0:
        raise PrecisionError("split needs every non-positive exponent within precision")
    plus, minus = {}, {}
    for n, c in g.coeffs.items():
        if n > 0:
            plus[n] = c
        elif n == 0:
            r = reduce(c)
            plus[0] = r
            minus[0] = c - r
        else:
            minus[n] = c
    return LaurentSeries(g.ring, plus, g.den, g.gprec), LaurentSeries(g.ring, minus, g.den)


def check_nilpotent_tail(g_minus: LaurentSeries):
    for n, c in sorted(g_minus.coeffs.items()):
        if not is_nilpotent(c)[0]:
            raise NotNilpotentError(
                f"coefficient {c} at exponent {Fraction(n, g_minus.den)} is not nilpotent", Fraction(n, g_minus.den)
            )


def _top_finite(gprec: tuple):
    """Largest finite entry (INF when the series is exact)."""
    finite = [p for p in gprec if p != INF]
    return max(finite) if finite else INF


def _inverse_unit_series(g: LaurentSeries) -> LaurentSeries:
    """Inverse of g = c x^(v/d) (1 + higher) with c a unit."""
    v = g.valuation()
    if v == INF or v >= g.prec:
        raise PrecisionError("cannot invert a series with no known leading term")
    lead = g.coeffs[v]
    try:
        c_inv = invert_unit(lead)
    except NotAUnitError:
        raise NotAUnitError(f"leading coefficient {lead} is not a unit") from None
    if g.is_exact and len(g.coeffs) == 1:
        return LaurentSeries(g.ring, {-v: c_inv}, g.den)
    ring = g.ring
    top = _top_finite(g.gprec)
    count = top - v  # relative coefficients U_0 .. U_{count-1}, some known only modulo I^k
    if count == INF:
        raise PrecisionError("inverse of an exact non-monomial series needs a precision bound")
    u = {i - v: c.terms for i, c in g.coeffs.items()}
    neg_c_inv = (-c_inv).terms
    out = [c_inv.terms]
    for n in range(1, count):
        acc: dict = {}
        for i in range(1, n + 1):
            ui = u.get(i)
            if ui is None:
                continue
            vn = out[n - i]
            if vn:
                mul_terms(ring, ui, vn, acc)
        out.append(mul_terms(ring, acc, neg_c_inv) if acc else {})
    gprec = gshift(gmin(g.gprec, norm_prec(ring, top)), -2 * v)
    return LaurentSeries._raw(ring, {i - v: t for i, t in enumerate(out) if t}, g.den, gprec)


def mul_inverse(g: LaurentSeries, prec=None) -> LaurentSeries:
    """Multiplicative inverse sum_k (-g_-)^k g_+^(-k-1).

    Requires g_+ to have a unit leading coefficient and g_- to be nilpotent.
    ``prec`` bounds the result for exact inputs whose inverse is infinite.
    """
    if g.is_exact and len(g.coeffs) != 1:
        g = g.truncate(prec if prec is not None else max(16 * g.den, max(g.coeffs, default=0) + 1))
    gp, gm = split(g)
    check_nilpotent_tail(gm)
    inv_plus = _inverse_unit_series(gp)
    result = inv_plus
    neg_gm = -gm
    term_power = neg_gm
    plus_power = inv_plus
    while not term_power.is_zero():
        plus_power = plus_power * inv_plus
        result = result + term_power * plus_power
        term_power = term_power * neg_gm
    return result


def _binomial(top, k: int):
    """Generalized binomial coefficient for rational ``top``."""
    out = mpq(1)
    top = to_mpq(top)
    for i in range(k):
        out = out * (top - i) / (i + 1)
    return out


def power(g: LaurentSeries, n: int, coeff: RingElement | None = None) -> LaurentSeries:
    """coeff * g**n for any integer n, expanding binomially around the nilpotent tail.

    ``coeff`` multiplies each tail power g_-^i before it meets the truncated
    part, so terms it annihilates cost no precision.
    """
    one = LaurentSeries(g.ring, {0: 1}, g.den)
    start = one if coeff is None else one * coeff
    if n == 0:
        return start
    if g.is_exact and n > 0:
        return _pow_plain(g, n) * start
    gp, gm = split(g)
    if n > 0:
        if gm.is_zero():
            return _pow_plain(gp, n) * start
        result = LaurentSeries(g.ring, {}, g.den)
        gm_power = start
        for i in range(n + 1):
            if gm_power.is_zero():
                break
            result = result + _pow_plain(gp, n - i) * gm_power * _binomial(n, i)
            gm_power = gm_power * gm
        return result
    check_nilpotent_tail(gm)
    m = -n
    inv_plus = _inverse_unit_series(gp)
    plus_power = _pow_plain(inv_plus, m)
    gm_power = start
    result = LaurentSeries(g.ring, {}, g.den)
    i = 0
    while not gm_power.is_zero():
        result = result + plus_power * gm_power * _binomial(-m, i)
        i += 1
        gm_power = gm_power * gm
        plus_power = plus_power * inv_plus
    return result


def power_table(g: LaurentSeries, ns) -> dict[int, LaurentSeries]:
    """{n: g**n} for many n at once, sharing the powers of g_+, 1/g_+ and g_-."""
    ns = sorted(set(ns))
    one = LaurentSeries(g.ring, {0: 1}, g.den)
    if g.is_exact and all(n >= 0 for n in ns):
        out, cur, last = {}, one, 0
        for n in ns:
            cur = cur * _pow_plain(g, n - last) if n > last else cur
            last = n
            out[n] = cur
        return out
    gp, gm = split(g)
    check_nilpotent_tail(gm)
    gm_pows = [one]
    while True:
        nxt = gm_pows[-1] * gm
        if nxt.is_zero():
            break
        gm_pows.append(nxt)
    depth = len(gm_pows)
    pos = [one]
    neg = [one]
    top = max(ns[-1], 0)
    bottom = max(-ns[0], 0)
    for _ in range(top):
        pos.append(pos[-1] * gp)
    if bottom:
        inv = _inverse_unit_series(gp)
        for _ in range(bottom + depth - 1):
            neg.append(neg[-1] * inv)
    out = {}
    for n in ns:
        result = LaurentSeries(g.ring, {}, g.den)
        for i, gmi in enumerate(gm_pows):
            if n >= 0 and i > n:
                break
            base = pos[n - i] if n >= 0 else neg[i - n]
            result = result + base * gmi * _binomial(n, i)
        out[n] = result
    return out


def _pow_plain(g: LaurentSeries, n: int) -> LaurentSeries:
    if n == 0:
        return LaurentSeries(g.ring, {0: 1}, g.den)
    result = None
    base = g
    while n:
        if n & 1:
            result = base if result is None else result * base
        n >>= 1
        if n:
            base = base * base
    return result


def derivative(g: LaurentSeries) -> LaurentSeries:
    d = g.den
    out = {n - d: c * mpq(n, d) for n, c in g.coeffs.items() if n}
    return LaurentSeries(g.ring, out, d, gshift(g.gprec, -d))


def divided_derivative(g: LaurentSeries, k: int) -> LaurentSeries:
    """D_k x^s = binom(s, k) x^(s-k); D_0 is the identity."""
    if k < 0:
        raise DomainError("divided derivative order must be nonnegative")
    if k == 0:
        return g
    d = g.den
    out = {}
    for n, c in g.coeffs.items():
        b = _binomial(mpq(n, d), k)
        if b:
            out[n - k * d] = c * b
    return LaurentSeries(g.ring, out, d, gshift(g.gprec, -k * d))


def residue(g: LaurentSeries) -> RingElement:
    """Coefficient of x^(-1)."""
    return g.coefficient(-g.den)


def _exp_positive(g: LaurentSeries) -> LaurentSeries:
    # x d/dx recurrence: n E_n = sum_j j g_j E_{n-j}
    ring = g.ring
    prec = _top_finite(g.gprec)
    if prec == INF:
        raise PrecisionError("exp of an exact series needs a precision bound")
    gj = {n: c.terms for n, c in g.coeffs.items()}
    out = [ring.one().terms]
    for n in range(1, prec):
        acc: dict = {}
        for j, t in gj.items():
            if j <= n and out[n - j]:
                mul_terms(ring, t, out[n - j], acc, scale=mpq(j, n))
        out.append(acc)
    return LaurentSeries._raw(ring, dict(enumerate(out)), g.den, gmin(g.gprec, norm_prec(ring, prec)))


def exp(g: LaurentSeries, prec=None) -> LaurentSeries:
    """Formal exponential; non-positive part must be nilpotent."""
    if g.is_exact:
        g = g.truncate(prec if prec is not None else 16 * g.den)
    pos = LaurentSeries(g.ring, {n: c for n, c in g.coeffs.items() if n > 0}, g.den, g.gprec)
    nonpos = LaurentSeries(g.ring, {n: c for n, c in g.coeffs.items() if n <= 0}, g.den)
    if g.prec <= 0:
        raise PrecisionError("exp needs the non-positive part within precision")
    check_nilpotent_tail(nonpos)
    exp_pos = _exp_positive(pos)
    result = exp_pos
    term = LaurentSeries(g.ring, {0: 1}, g.den)
    k = 0
    while True:
        k += 1
        term = term * nonpos * mpq(1, k)
        if term.is_zero():
            break
        result = result + exp_pos * term
    return result


def log(g: LaurentSeries, prec=None) -> LaurentSeries:
    """Formal logarithm of 1 + (positive part) + (nilpotent part)."""
    if g.is_exact:
        g = g.truncate(prec if prec is not None else 16 * g.den)
    gp, gm = split(g)
    check_nilpotent_tail(gm)
    ring = g.ring
    if gp.valuation() != 0 or gp.coeffs[0] != ring.one():
        raise DomainError("log needs constant term 1 modulo nilpotents")
    # n L_n = n G_n - sum_{0<j<n} j L_j G_{n-j}
    G = {n: c.terms for n, c in gp.coeffs.items()}
    L: dict = {}
    top = _top_finite(gp.gprec)
    for n in range(1, top):
        acc = dict(G.get(n, {}))
        for j, lj in L.items():
            gn = G.get(n - j)
            if gn:
                mul_terms(ring, lj, gn, acc, scale=mpq(-j, n))
        acc = {k: v for k, v in acc.items() if v}
        if acc:
            L[n] = acc
    result = LaurentSeries._raw(ring, L, g.den, gmin(gp.gprec, norm_prec(ring, top)))
    if gm.is_zero():
        return result
    m = gm * mul_inverse(gp)
    power_m = m
    for k in range(1, ring.nil_bound):
        result = result + power_m * mpq((-1) ** (k + 1), k)
        power_m = power_m * m
    return result


def rescale(g: LaurentSeries, u) -> LaurentSeries:
    """g(u x): coefficient at n/d multiplied by u^(n/d)."""
    if not isinstance(u, RingElement):
        u = g.ring.scalar(u)
    d = g.den
    if any(n % d for n in g.coeffs):
        raise DomainError("rescale of a fractional exponent would need a root of the scale factor")
    u_inv = None
    out = {}
    for n, c in g.coeffs.items():
        e = n // d
        if e >= 0:
            out[n] = c * u**e
        else:
            if u_inv is None:
                u_inv = invert_unit(u)
            out[n] = c * u_inv ** (-e)
    return LaurentSeries(g.ring, out, d, g.gprec)


def change_denominator(g: LaurentSeries, new_den: int) -> LaurentSeries:
    """Same series written over x^(1/new_den)."""
    d = g.den
    if new_den == d:
        return g
    if new_den % d == 0:
        m = new_den // d
        return LaurentSeries(g.ring, {n * m: c for n, c in g.coeffs.items()}, new_den, tuple(p * m for p in g.gprec))
    if d % new_den == 0:
        m = d // new_den
        bad = [n for n in g.coeffs if n % m]
        if bad:
            raise DomainError(f"exponent {Fraction(bad[0], d)} is not a multiple of 1/{new_den}")
        prec = tuple(p if p == INF else -(-p // m) for p in g.gprec)
        return LaurentSeries(g.ring, {n // m: c for n, c in g.coeffs.items()}, new_den, prec)
    raise DomainError(f"denominators {d} and {new_den} are not comparable")


def root_substitute(g: LaurentSeries, p: int) -> LaurentSeries:
    """g(x^(1/p)): numerators kept, denominator multiplied by p."""
    return LaurentSeries(g.ring, g.coeffs, g.den * p, g.gprec)


def coarsen(g: LaurentSeries) -> LaurentSeries:
    """Write g over the smallest denominator its support allows."""
    d = g.den
    g_ = 0
    for n in g.coeffs:
        g_ = math.gcd(g_, n)
    for p in g.gprec:
        if p != INF:
            g_ = math.gcd(g_, p)
    step = math.gcd(g_, d) if g_ else d
    return change_denominator(g, d // step) if step > 1 else g


def lift_ring(g: LaurentSeries, target: RingDescriptor) -> LaurentSeries:
    return LaurentSeries(target, {n: lift(c, target) for n, c in g.coeffs.items()}, g.den, _carry_prec(g, target))


def map_coefficients(g: LaurentSeries, fn, ring: RingDescriptor | None = None) -> LaurentSeries:
    ring = ring or g.ring
    return LaurentSeries(ring, {n: fn(c) for n, c in g.coeffs.items()}, g.den, _carry_prec(g, ring))


def _carry_prec(g: LaurentSeries, target: RingDescriptor):
    return g.gprec if target.nil_bound == g.ring.nil_bound else g.prec


def series_arith(f: LaurentSeries, g: LaurentSeries, op: str) -> LaurentSeries:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise DomainError(f"unknown series operation {op!r}")


# --- formatting ---


def format_exponent(n: int, d: int) -> str:
    e = Fraction(n, d)
    if e == 1:
        return "x"
    if e.denominator == 1 and e > 0:
        return f"x^{e.numerator}"
    return f"x^({e})"


def format_series(g: LaurentSeries) -> str:
    """Human form of the classical view (coefficients below ``prec``)."""
    pieces = []
    for n, c in sorted(g.coeffs.items()):
        if n >= g.prec:
            break
        body = str(c)
        neg = False
        multi = len(c.terms) > 1
        if not multi and body.startswith("-"):
            neg, body = True, body[1:]
        if n == 0:
            text = f"({body})" if multi else body
        else:
            mono = format_exponent(n, g.den)
            if body == "1":
                text = mono
            else:
                text = (f"({body})" if multi else body) + "*" + mono
        pieces.append(("-" if neg else "+", text))
    if g.prec != INF:
        e = Fraction(g.prec, g.den)
        pieces.append(("+", f"O(x^{e})" if e.denominator == 1 and e >= 0 else f"O(x^({e}))"))
    if not pieces:
        return "0"
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, text in pieces[1:]:
        out += f" {sign} {text}"
    return out

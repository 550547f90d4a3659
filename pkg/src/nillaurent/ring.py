"""Coefficient rings ``K[e_1, ..., e_m] / (e_i^{n_i})`` with ``K = Q`` or ``Q(zeta_N)``.

Elements are stored sparsely as ``{(zeta_power, exponents): mpq}``.  The
exponent tuple lists the nilpotent generators first, then any free
polynomial generators (used only as a symbolic carrier for universal
composition coefficients).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Mapping

from gmpy2 import mpq

from .errors import DomainError, NotAUnitError, RingMismatchError

Key = tuple  # (zeta_power, exponent tuple)


# --- integer / rational polynomial helpers (coefficients low -> high) ---


def _poly_trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(num: list, den: list) -> tuple[list, list]:
    num = [mpq(c) for c in num]
    den = [mpq(c) for c in den]
    _poly_trim(num)
    _poly_trim(den)
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    quo = [mpq(0)] * max(len(num) - len(den) + 1, 0)
    lead = den[-1]
    while len(num) >= len(den) and num:
        shift = len(num) - len(den)
        c = num[-1] / lead
        quo[shift] = c
        for i, d in enumerate(den):
            num[shift + i] -= c * d
        _poly_trim(num)
    return quo, num


def _poly_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly_trim(out)


def _poly_sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return _poly_trim([mpq(c) for c in out])


_CYCLOTOMIC_CACHE: dict[int, tuple[int, ...]] = {}


def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first.

    Computed as (x^n - 1) / prod_{d | n, d < n} Phi_d.
    """
    if n < 1:
        raise ValueError("cyclotomic order must be positive")
    if n in _CYCLOTOMIC_CACHE:
        return _CYCLOTOMIC_CACHE[n]
    num = [mpq(-1)] + [mpq(0)] * (n - 1) + [mpq(1)]
    for d in range(1, n):
        if n % d == 0:
            num, rem = _poly_divmod(num, list(cyclotomic_polynomial(d)))
            assert not rem
    coeffs = tuple(int(c) for c in num)
    _CYCLOTOMIC_CACHE[n] = coeffs
    return coeffs


# --- descriptors ---


@dataclass(frozen=True)
class RingDescriptor:
    """Shape of a coefficient ring.

    ``cyclotomic_order`` N = 1 means the base field is Q.  Each nil generator
    ``(name, n)`` satisfies ``name**n == 0``.  ``poly_generators`` are free
    commuting symbols with no relations.
    """

    cyclotomic_order: int = 1
    nil_generators: tuple[tuple[str, int], ...] = ()
    poly_generators: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "nil_generators", tuple((str(n), int(o)) for n, o in self.nil_generators))
        object.__setattr__(self, "poly_generators", tuple(self.poly_generators))
        if self.cyclotomic_order < 1:
            raise DomainError("cyclotomic order must be >= 1")
        names = [n for n, _ in self.nil_generators] + list(self.poly_generators)
        if len(set(names)) != len(names):
            raise DomainError(f"generator names must be distinct: {names}")
        for name in names:
            if name in ("x", "zeta", "O") or not name.isidentifier():
                raise DomainError(f"invalid generator name {name!r}")
        for name, order in self.nil_generators:
            if order < 2:
                raise DomainError(f"nilpotency order of {name} must be >= 2")

    # structure

    @cached_property
    def phi(self) -> tuple[int, ...]:
        return cyclotomic_polynomial(self.cyclotomic_order)

    @cached_property
    def zeta_degree(self) -> int:
        return len(self.phi) - 1

    @cached_property
    def generator_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.nil_generators) + self.poly_generators

    @cached_property
    def orders(self) -> tuple:
        """Per-generator exponent bound (None for free generators)."""
        return tuple(o for _, o in self.nil_generators) + (None,) * len(self.poly_generators)

    @cached_property
    def n_nil(self) -> int:
        return len(self.nil_generators)

    @cached_property
    def zero_exps(self) -> tuple[int, ...]:
        return (0,) * len(self.generator_names)

    @cached_property
    def one_key(self) -> Key:
        return (0, self.zero_exps)

    @cached_property
    def nil_bound(self) -> int:
        """1 + sum(n_i - 1): every product of this many nilpotents vanishes."""
        return 1 + sum(o - 1 for _, o in self.nil_generators)

    @cached_property
    def _zeta_table(self) -> dict[int, tuple[tuple[int, mpq], ...]]:
        # zeta^k reduced mod Phi_N for 0 <= k < max(N, 2 deg - 1)
        deg = self.zeta_degree
        top = max(self.cyclotomic_order, 2 * deg - 1, 1)
        table = {}
        for k in range(top):
            if k < deg:
                table[k] = ((k, mpq(1)),)
                continue
            _, rem = _poly_divmod([0] * k + [1], list(self.phi))
            table[k] = tuple((i, c) for i, c in enumerate(rem) if c)
        return table

    @cached_property
    def _mul_cache(self) -> dict:
        return {}

    @cached_property
    def _monomial_table(self) -> dict | None:
        if self.cyclotomic_order == 1 and not self.poly_generators:
            return {}
        return None

    def monomial_product(self, ka: Key, kb: Key) -> Key | None:
        """Product of two basis monomials over Q (None when it vanishes)."""
        exps = []
        for x, y, bound in zip(ka[1], kb[1], self.orders):
            s = x + y
            if s >= bound:
                return None
            exps.append(s)
        return (0, tuple(exps))

    @cached_property
    def _grade_cache(self) -> dict:
        return {}

    def grade(self, key: Key) -> int:
        """Total degree of a basis monomial in the nilpotent generators."""
        g = self._grade_cache.get(key)
        if g is None:
            g = self._grade_cache[key] = sum(key[1][: self.n_nil])
        return g

    def key_product(self, ka: Key, kb: Key) -> tuple:
        """Expansion of the product of two basis monomials as ((key, coeff), ...)."""
        cache = self._mul_cache
        pair = (ka, kb)
        hit = cache.get(pair)
        if hit is not None:
            return hit
        exps = []
        for x, y, bound in zip(ka[1], kb[1], self.orders):
            s = x + y
            if bound is not None and s >= bound:
                cache[pair] = ()
                return ()
            exps.append(s)
        exps = tuple(exps)
        res = tuple(((j, exps), c) for j, c in self._zeta_table[ka[0] + kb[0]])
        if not self.poly_generators:
            cache[pair] = res
        return res

    def zeta_power_terms(self, k: int) -> tuple[tuple[int, mpq], ...]:
        return self._zeta_table[k % self.cyclotomic_order]

    # constructors

    def zero(self) -> "RingElement":
        return RingElement(self, {})

    def one(self) -> "RingElement":
        return RingElement(self, {self.one_key: mpq(1)})

    def scalar(self, value) -> "RingElement":
        value = to_mpq(value)
        return RingElement(self, {self.one_key: value} if value else {})

    def generator(self, name: str) -> "RingElement":
        if name == "zeta":
            return root_of_unity(self, 1)
        try:
            idx = self.generator_names.index(name)
        except ValueError:
            raise DomainError(f"ring {self} has no generator {name!r}") from None
        exps = tuple(1 if i == idx else 0 for i in range(len(self.generator_names)))
        return RingElement(self, {(0, exps): mpq(1)})

    def basis(self) -> list[Key]:
        """All basis labels (only for rings without free generators)."""
        if self.poly_generators:
            raise DomainError("ring with free generators has infinite basis")
        ranges = [range(o) for _, o in self.nil_generators]
        return [(j, exps) for j in range(self.zeta_degree) for exps in product(*ranges)]

    def with_cyclotomic_order(self, n: int) -> "RingDescriptor":
        return RingDescriptor(n, self.nil_generators, self.poly_generators)

    def __str__(self) -> str:
        base = "Q" if self.cyclotomic_order == 1 else f"Q(zeta_{self.cyclotomic_order})"
        gens = [f"{n}^{o}" for n, o in self.nil_generators] + list(self.poly_generators)
        return base + (f"[{', '.join(gens)}]" if gens else "")


QQ = RingDescriptor()


def to_mpq(value) -> mpq:
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    return mpq(value)


# --- elements ---


class RingElement:
    """Immutable element in canonical sparse form."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: RingDescriptor, terms: Mapping[Key, mpq]):
        self.ring = ring
        self.terms = {k: v for k, v in terms.items() if v}
        self._hash = None

    # coercion

    def _coerce(self, other) -> "RingElement":
        if isinstance(other, RingElement):
            if other.ring != self.ring:
                raise RingMismatchError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)) or type(other).__name__ == "mpq":
            return self.ring.scalar(other)
        return NotImplemented

    # arithmetic

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return RingElement(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return RingElement(self.ring, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) - v
        return RingElement(self.ring, out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) or type(other).__name__ == "mpq":
            c = to_mpq(other)
            return RingElement(self.ring, {k: v * c for k, v in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RingElement(self.ring, mul_terms(self.ring, self.terms, other.terms))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return invert_unit(self) ** (-n)
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, RingElement):
            return self * invert_unit(other)
        return self * (1 / to_mpq(other))

    # comparison

    def __eq__(self, other):
        if isinstance(other, RingElement):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)) or type(other).__name__ == "mpq":
            return self.terms == self.ring.scalar(other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_scalar(self) -> bool:
        return all(k == self.ring.one_key for k in self.terms)

    def scalar_value(self) -> mpq:
        if not self.is_scalar():
            raise DomainError(f"{self} is not a rational scalar")
        return self.terms.get(self.ring.one_key, mpq(0))

    def __repr__(self):
        return f"RingElement({self.ring}, {self})"

    def __str__(self):
        return format_element(self)


_MISSING = object()


def mul_terms(ring: RingDescriptor, a: Mapping, b: Mapping, out: dict | None = None, scale=None) -> dict:
    """Accumulate ``scale * a * b`` into ``out`` (raw term dictionaries)."""
    if out is None:
        out = {}
    get = out.get
    table = ring._monomial_table
    if table is not None:
        # over Q without free generators a monomial product is one monomial (or zero)
        simple = ring.monomial_product
        for ka, va in a.items():
            if scale is not None:
                va = va * scale
            row = table.get(ka)
            if row is None:
                row = table[ka] = {}
            for kb, vb in b.items():
                k = row.get(kb, _MISSING)
                if k is _MISSING:
                    k = row[kb] = simple(ka, kb)
                if k is not None:
                    out[k] = get(k, 0) + va * vb
        return out
    key_product = ring.key_product
    for ka, va in a.items():
        if scale is not None:
            va = va * scale
        for kb, vb in b.items():
            prod = key_product(ka, kb)
            if not prod:
                continue
            vab = va * vb
            for k, c in prod:
                out[k] = get(k, 0) + vab * c
    return out


def format_element(a: RingElement) -> str:
    if not a.terms:
        return "0"
    ring = a.ring
    names = ring.generator_names

    def sort_key(item):
        (j, exps), _ = item
        return (sum(exps[: ring.n_nil]), sum(exps), exps, j)

    pieces = []
    for (j, exps), c in sorted(a.terms.items(), key=sort_key):
        factors = []
        if j:
            factors.append("zeta" if j == 1 else f"zeta^{j}")
        for name, e in zip(names, exps):
            if e:
                factors.append(name if e == 1 else f"{name}^{e}")
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = str(mag) + "*" + "*".join(factors)
        pieces.append((sign, body))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


# --- named operations ---


def ring_arith(a: RingElement, b: RingElement, op: str) -> RingElement:
    if a.ring != b.ring:
        raise RingMismatchError(f"ring mismatch: {a.ring} vs {b.ring}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise DomainError(f"unknown ring operation {op!r}")


def reduce(a: RingElement) -> RingElement:
    """Image in A_red: drop every term carrying a nilpotent generator."""
    n = a.ring.n_nil
    return RingElement(a.ring, {k: v for k, v in a.terms.items() if not any(k[1][:n])})


def nilpotent_part(a: RingElement) -> RingElement:
    n = a.ring.n_nil
    return RingElement(a.ring, {k: v for k, v in a.terms.items() if any(k[1][:n])})


def is_nilpotent(a: RingElement) -> tuple[bool, int | None]:
    """Return ``(True, k)`` with k least such that a**k == 0, else ``(False, None)``."""
    if a.is_zero():
        return True, 1
    if not reduce(a).is_zero():
        return False, None
    power = a
    for k in range(2, a.ring.nil_bound + 1):
        power = power * a
        if power.is_zero():
            return True, k
    raise AssertionError(f"nilpotent element {a} survived {a.ring.nil_bound} powers")


def _field_inverse(u: RingElement) -> RingElement:
    """Inverse of a nonzero element of Q(zeta_N) by extended Euclid against Phi_N."""
    ring = u.ring
    poly = [mpq(0)] * ring.zeta_degree
    for (j, _), c in u.terms.items():
        poly[j] += c
    _poly_trim(poly)
    if not poly:
        raise NotAUnitError("zero is not a unit")
    # invariant: s * poly == r (mod Phi)
    r0, r1 = [mpq(c) for c in ring.phi], poly
    s0, s1 = [], [mpq(1)]
    while len(r1) > 1:
        q, rem = _poly_divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        if not r1:
            raise NotAUnitError(f"{u} is not invertible")
    c = r1[0]
    _, s = _poly_divmod([x / c for x in s1], list(ring.phi))
    return RingElement(ring, {(j, ring.zero_exps): v for j, v in enumerate(s) if v})


def invert_unit(a: RingElement) -> RingElement:
    """a^{-1} = u^{-1} sum_k (-u^{-1} n)^k where a = u + n, n nilpotent."""
    ring = a.ring
    u = reduce(a)
    if u.is_zero():
        raise NotAUnitError(f"{a} is not a unit (its reduction is zero)")
    if any(any(k[1][ring.n_nil:]) for k in u.terms):
        raise NotAUnitError(f"{a} is not a unit (non-constant in free generators)")
    u_inv = _field_inverse(u)
    m = -(u_inv * (a - u))
    total = ring.one()
    power = ring.one()
    while True:
        power = power * m
        if power.is_zero():
            break
        total = total + power
    return u_inv * total


def root_of_unity(ring: RingDescriptor, k: int) -> RingElement:
    if ring.cyclotomic_order == 1:
        raise DomainError("ring has no nontrivial root of unity (N = 1)")
    return RingElement(ring, {(j, ring.zero_exps): c for j, c in ring.zeta_power_terms(k)})


def is_unit(a: RingElement) -> bool:
    try:
        invert_unit(a)
    except NotAUnitError:
        return False
    return True


# --- change of cyclotomic field ---


def lift(a: RingElement, target: RingDescriptor) -> RingElement:
    """Embed Q(zeta_N)[...] into Q(zeta_M)[...] for N | M via zeta_N -> zeta_M^(M/N)."""
    src = a.ring
    if target.nil_generators != src.nil_generators or target.poly_generators != src.poly_generators:
        raise RingMismatchError(f"cannot lift {src} to {target}")
    if target.cyclotomic_order % src.cyclotomic_order:
        raise RingMismatchError(f"{src.cyclotomic_order} does not divide {target.cyclotomic_order}")
    step = target.cyclotomic_order // src.cyclotomic_order
    out: dict = {}
    for (j, exps), c in a.terms.items():
        for jj, cc in target.zeta_power_terms(j * step):
            key = (jj, exps)
            out[key] = out.get(key, 0) + c * cc
    return RingElement(target, out)


def descend(a: RingElement, target: RingDescriptor) -> RingElement:
    """Inverse of :func:`lift`; raises DomainError if ``a`` is not in the image."""
    src = a.ring
    step = src.cyclotomic_order // target.cyclotomic_order
    # image of the basis zeta_N^j, j < deg Phi_N, as vectors in Q(zeta_M)
    images = []
    for j in range(target.zeta_degree):
        vec = [mpq(0)] * src.zeta_degree
        for jj, cc in src.zeta_power_terms(j * step):
            vec[jj] += cc
        images.append(vec)
    by_exps: dict = {}
    for (j, exps), c in a.terms.items():
        by_exps.setdefault(exps, [mpq(0)] * src.zeta_degree)[j] += c
    out = {}
    for exps, vec in by_exps.items():
        sol = _solve_in_span(images, vec)
        if sol is None:
            raise DomainError(f"{a} does not lie in {target}")
        for j, c in enumerate(sol):
            if c:
                out[(j, exps)] = c
    return RingElement(target, out)


def _solve_in_span(columns: list[list], target: list) -> list | None:
    """Exact least-effort solve of sum c_j columns[j] = target (columns independent)."""
    n_rows = len(target)
    n_cols = len(columns)
    rows = [[columns[c][r] for c in range(n_cols)] + [target[r]] for r in range(n_rows)]
    pivots = []
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(row[-1] for row in rows[r:]):
        return None
    sol = [mpq(0)] * n_cols
    for i, c in enumerate(pivots):
        sol[c] = rows[i][-1]
    return sol


def evaluate(a: RingElement, images: Mapping[str, RingElement], target: RingDescriptor) -> RingElement:
    """Ring homomorphism substituting generators by ``images``.

    Generators not mentioned in ``images`` must also exist in ``target``
    and map to themselves; zeta maps to zeta of the target.
    """
    names = a.ring.generator_names
    powers: dict = {}

    def image(name):
        if name in images:
            return images[name]
        return target.generator(name)

    def power(name, e):
        key = (name, e)
        if key not in powers:
            powers[key] = image(name) ** e
        return powers[key]

    acc: dict = {}
    for (j, exps), c in a.terms.items():
        term = target.scalar(c)
        if j:
            term = term * power("zeta", j)
        for name, e in zip(names, exps):
            if e:
                term = term * power(name, e)
        for k, v in term.terms.items():
            acc[k] = acc.get(k, 0) + v
    return RingElement(target, acc)

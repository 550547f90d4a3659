"""Seeded property suites exposed through ``nillaurent suite <name>``.

Each property runs a fixed number of cases and records the first few
counterexamples.  The same seed always reproduces the same cases.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import sampling
from .diffeo import carrier_ring, generic_series, specialize, substitute_power_series, universal_table
from .diffeo import comp_inverse as diffeo_inverse
from .diffeo import compose as diffeo_compose
from .errors import NilLaurentError
from .fock import SectorSpec, derived_spec, ground_state_weight, sector_sum_weight, virasoro_commutator_check
from .laurent import LaurentSeries
from .nil_laurent import comp_inverse, compose, cover_map, lie_bracket_extended
from .ring import QQ, RingDescriptor
from .symplectic import (
    PairingWindow,
    check_invariance,
    gamma_pairing,
    gamma_quotient,
    infinitesimal_change,
    pairing,
    residue_form,
    sp_homomorphism_check,
)
from .witt import frobenius, hl_kernel_test, norm, schur_q_test

DEFAULT_SEED = 20240611
MAX_COUNTEREXAMPLES = 3


@dataclass
class PropertyResult:
    name: str
    cases: int = 0
    counterexamples: list = field(default_factory=list)
    failed: int = 0
    seconds: float = 0.0
    notes: str = ""

    @property
    def passed(self) -> bool:
        return self.failed == 0 and self.cases > 0

    def fail(self, detail: str):
        self.failed += 1
        if len(self.counterexamples) < MAX_COUNTEREXAMPLES:
            self.counterexamples.append(detail)


@dataclass
class SuiteReport:
    name: str
    seed: int
    results: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)


class _Property:
    """Context manager that times a property and turns library errors into failures."""

    def __init__(self, results: list, name: str):
        self.result = PropertyResult(name)
        results.append(self.result)

    def __enter__(self) -> PropertyResult:
        self.start = time.perf_counter()
        return self.result

    def __exit__(self, kind, exc, tb):
        self.result.seconds = time.perf_counter() - self.start
        if exc is not None and isinstance(exc, NilLaurentError):
            self.result.fail(f"{type(exc).__name__}: {exc}")
            return True
        return False


def _count(default: int, count: int | None) -> int:
    return default if count is None else max(1, count)


def _guard(res: PropertyResult, label: str, check):
    """Run one case; a library error counts as a failed case."""
    res.cases += 1
    try:
        ok, detail = check()
    except NilLaurentError as exc:
        res.fail(f"{label}: {type(exc).__name__}: {exc}")
        return
    if not ok:
        res.fail(f"{label}: {detail}")


# --- suites ---

GROUP_RINGS = (RingDescriptor(1, (("e", 3),)), RingDescriptor(1, (("e1", 2), ("e2", 2))))


def group_laws(seed: int, count: int | None = None) -> list[PropertyResult]:
    results: list = []
    n = _count(100, count)
    x = {ring: LaurentSeries.x(ring) for ring in GROUP_RINGS}
    for ring in GROUP_RINGS:
        rng = random.Random(f"{seed}:group:{ring}")
        elems = [sampling.nil_laurent(rng, ring, prec=24, depth=3) for _ in range(n)]
        with _Property(results, f"inverse two-sided over {ring}") as res:
            for i, f in enumerate(elems):

                def check(f=f):
                    inv, its = comp_inverse(f)
                    bound = math.ceil(math.log2(f.nu)) if f.nu > 1 else 0
                    left, right = compose(f, inv), compose(inv, f)
                    ok = left.agrees_with(x[ring]) and right.agrees_with(x[ring]) and its <= bound
                    return ok, f"f = {f}; iterations {its} (bound {bound}); f o f^-1 = {left}"

                _guard(res, f"case {i}", check)
        with _Property(results, f"associativity over {ring}") as res:
            for i in range(n):
                f, g, h = elems[i], elems[(i + 1) % n], elems[(i + 2) % n]

                def check(f=f, g=g, h=h):
                    lhs, rhs = compose(compose(f, g), h), compose(f, compose(g, h))
                    return lhs.agrees_with(rhs), f"f = {f}; g = {g}; h = {h}"

                _guard(res, f"case {i}", check)
    ring = RingDescriptor(3)
    xr = LaurentSeries.x(ring)
    rng = random.Random(f"{seed}:diffeo")
    with _Property(results, f"formal diffeomorphism inverse over {ring}") as res:
        for i in range(_count(30, count)):
            g = sampling.diffeo(rng, ring)

            def check(g=g):
                inv = diffeo_inverse(g)
                both = diffeo_compose(g, inv), diffeo_compose(inv, g)
                return all(c.agrees_with(xr) for c in both), f"g = {g}"

            _guard(res, f"case {i}", check)
    with _Property(results, "universal composition coassociative (n <= 8)") as res:
        for k in range(9):

            def check(k=k):
                R = carrier_ring(k, "ghk")
                g, h, kk = (generic_series(R, c, k) for c in "ghk")
                a = substitute_power_series(substitute_power_series(g, h), kk).coefficient(k + 1)
                b = substitute_power_series(g, substitute_power_series(h, kk)).coefficient(k + 1)
                return a == b, f"coefficient {k}: {a} != {b}"

            _guard(res, f"n = {k}", check)
    with _Property(results, "universal composition specializes to compose") as res:
        rng = random.Random(f"{seed}:universal")
        table = universal_table(8)
        for i in range(_count(50, count)):
            ring = rng.choice((QQ, RingDescriptor(3)))
            g, h = sampling.diffeo(rng, ring, prec=10), sampling.diffeo(rng, ring, prec=10)

            def check(g=g, h=h):
                comp = diffeo_compose(g, h).series
                bad = [k for k, poly in enumerate(table) if specialize(poly, g.series, h.series) != comp.coefficient(k + 1)]
                return not bad, f"g = {g}; h = {h}; first mismatch at x^{bad[0] + 1}" if bad else ""

            _guard(res, f"case {i}", check)
    return results


def bracket_table(seed: int, count: int | None = None) -> list[PropertyResult]:
    results: list = []
    with _Property(results, "[v_k, v_l] = (l - k) v_(k+l) for -4 <= k, l <= 4") as res:
        for k in range(-4, 5):
            for l in range(-4, 5):

                def check(k=k, l=l):
                    c, idx = lie_bracket_extended(k, l)
                    return c == l - k and idx == k + l, f"got {c} v_{idx}"

                _guard(res, f"k = {k}, l = {l}", check)
    return results


INVARIANCE_RING = RingDescriptor(1, (("e", 3),))
PAIRING_RINGS = (RingDescriptor(1, (("e", 3),)), RingDescriptor(3, (("e", 2),)))


def invariance(seed: int, count: int | None = None) -> list[PropertyResult]:
    results: list = []
    rng = random.Random(f"{seed}:pairing")
    with _Property(results, "pairing equals res(g dh)") as res:
        for i in range(_count(200, count)):
            ring = rng.choice(PAIRING_RINGS)
            den = rng.choice((1, 2, 3))
            prec = rng.choice((None, 10))
            g = sampling.laurent(rng, ring, den, prec=prec)
            h = sampling.laurent(rng, ring, den, prec=prec)

            def check(g=g, h=h):
                a, b = pairing(g, h), residue_form(g, h)
                return a == b, f"g = {g}; h = {h}; pairing {a}, residue {b}"

            _guard(res, f"case {i}", check)
    rng = random.Random(f"{seed}:invariance")
    window = PairingWindow(8)
    with _Property(results, "<g o f, h o f> = <g, h> on |n| <= 8") as res:
        for i in range(_count(50, count)):
            f = sampling.nil_laurent(rng, INVARIANCE_RING, prec=40)

            def check(f=f):
                rep = check_invariance(f, window, None)
                return rep.ok and rep.skipped == 0, f"f = {f}; violations {rep.violations[:1]}; skipped {rep.skipped}"

            _guard(res, f"case {i}", check)
    with _Property(results, "first-order invariance for -4 <= n, k, l <= 4") as res:
        for n in range(-4, 5):
            for k in range(-4, 5):
                for l in range(-4, 5):

                    def check(n=n, k=k, l=l):
                        change = infinitesimal_change(n, k, l)
                        return change.is_zero(), f"change {change}"

                    _guard(res, f"n = {n}, k = {k}, l = {l}", check)
    rng = random.Random(f"{seed}:sp")
    with _Property(results, "sp(f1 o f2) = sp(f1) sp(f2) on escape-free windows") as res:
        for i in range(_count(25, count)):
            f1 = sampling.nil_laurent(rng, INVARIANCE_RING, prec=32, depth=1)
            f2 = sampling.nil_laurent(rng, INVARIANCE_RING, prec=32, depth=1)

            def check(f1=f1, f2=f2):
                rep = sp_homomorphism_check(f1, f2, 4)
                return rep.ok and rep.escape_free, f"f1 = {f1}; f2 = {f2}; ok {rep.ok}, escape-free {rep.escape_free}"

            _guard(res, f"case {i}", check)
    with _Property(results, "gamma pairing matches the Gamma-quotient route") as res:
        for p in (2, 3, 5, 7):
            for n in range(1 - 2 * p, 2 * p):
                if n % p == 0:
                    continue

                def check(n=n, p=p):
                    a, b = gamma_pairing(n, -n, p), gamma_quotient(n, -n, p)
                    return abs(a - b) < 1e-12, f"{a} vs {b}"

                _guard(res, f"n = {n}, p = {p}", check)
    return results


def witt_kernels(seed: int, count: int | None = None) -> list[PropertyResult]:
    results: list = []
    n = _count(100, count)
    for p in (2, 3):
        rng = random.Random(f"{seed}:witt:{p}")
        corpus = [(i % 2 == 0, sampling.witt_vector(rng, p, 20, i % 2 == 0)) for i in range(n)]
        with _Property(results, f"frobenius(w, {p}) = 1 iff hl_kernel_test(w, {p})") as res:
            for i, (expect, w) in enumerate(corpus):

                def check(w=w, expect=expect):
                    fr, hl = frobenius(w, p).is_one(), hl_kernel_test(w, p)
                    return fr == hl == expect, f"w = {w}; frobenius trivial {fr}; kernel test {hl}; built in kernel {expect}"

                _guard(res, f"case {i}", check)
        if p == 2:
            with _Property(results, "at p = 2 frobenius is the norm and the kernels agree") as res:
                for i, (_, w) in enumerate(corpus):

                    def check(w=w):
                        same = frobenius(w, 2).agrees_with(norm(w)) and schur_q_test(w) == hl_kernel_test(w, 2)
                        return same, f"w = {w}"

                    _guard(res, f"case {i}", check)
    return results


VIRASORO_SPECS = ((Fraction(0), Fraction(0)), (Fraction(0), Fraction(1, 2)), (Fraction(1, 2), Fraction(0)))


def virasoro(seed: int, count: int | None = None) -> list[PropertyResult]:
    results: list = []
    for theta, mu in VIRASORO_SPECS:
        spec = derived_spec(theta, mu)
        with _Property(results, f"Virasoro relations, theta = {theta}, mu = {mu}, level <= 8") as res:
            for m in range(-4, 5):
                for n in range(-4, 5):

                    def check(m=m, n=n):
                        rep = virasoro_commutator_check(spec, m, n, 8, 1)
                        ok = rep.ok and (rep.c_extracted is None or rep.c_extracted == 1)
                        return ok, f"residual {rep.residual}, c extracted {rep.c_extracted}"

                    _guard(res, f"m = {m}, n = {n}", check)
    with _Property(results, "ground-state weight at theta = 1/2 is 1/16") as res:
        _guard(res, "theta = 1/2", lambda: (ground_state_weight(SectorSpec(Fraction(1, 2))) == Fraction(1, 16), "weight differs"))
    for p in (2, 3):
        with _Property(results, f"sector sum at p = {p}") as res:

            def check(p=p):
                rep, again = sector_sum_weight(p), sector_sum_weight(p)
                consistent = rep == again and rep.oracle == sum(h for _, h in rep.per_sector) and rep.match == (rep.oracle == rep.closed_form)
                ok = consistent and (rep.match if p == 2 else True)
                return ok, f"oracle {rep.oracle}, (p^2-1)/48 = {rep.closed_form}, match {rep.match}"

            _guard(res, f"p = {p}", check)
            rep = sector_sum_weight(p)
            res.notes = f"oracle {rep.oracle}, (p^2-1)/48 = {rep.closed_form}, {'match' if rep.match else 'MISMATCH'}"
    return results


COVER_RINGS = (RingDescriptor(1, (("e", 3),)), RingDescriptor(1, (("e", 2),)))


def covers(seed: int, count: int | None = None) -> list[PropertyResult]:
    results: list = []
    rng = random.Random(f"{seed}:covers")
    with _Property(results, "cover(f o g) = cover(f) o cover(g)") as res:
        for i in range(_count(50, count)):
            p = 2 if i % 2 == 0 else 3
            ring = rng.choice(COVER_RINGS)
            f = sampling.periodic(rng, ring, p, prec=6 * p + 10)
            g = sampling.periodic(rng, ring, p, prec=6 * p + 10)

            def check(f=f, g=g, p=p):
                lhs = cover_map(compose(f, g), p)
                rhs = compose(cover_map(f, p), cover_map(g, p))
                return lhs.agrees_with(rhs), f"p = {p}; f = {f}; g = {g}"

            _guard(res, f"case {i}", check)
    ring = RingDescriptor(1, (("e", 2),))
    eps = ring.generator("e")
    with _Property(results, "cover(x + e x^(kp+1)) = x + p e x^(k+1)") as res:
        for p in (2, 3):
            for k in range(1, 5):

                def check(p=p, k=k):
                    got = cover_map(LaurentSeries(ring, {1: 1, k * p + 1: eps}, 1, k * p + 8), p)
                    want = LaurentSeries(ring, {1: 1, k + 1: eps * p})
                    return got.agrees_with(want) and got.prec > k + 1, f"got {got}"

                _guard(res, f"p = {p}, k = {k}", check)
    return results


SUITES = {
    "group-laws": group_laws,
    "bracket-table": bracket_table,
    "invariance": invariance,
    "witt-kernels": witt_kernels,
    "virasoro": virasoro,
    "covers": covers,
}


def run_suite(name: str, seed: int = DEFAULT_SEED, count: int | None = None) -> list[SuiteReport]:
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise KeyError(name)
    return [SuiteReport(n, seed, SUITES[n](seed, count)) for n in names]

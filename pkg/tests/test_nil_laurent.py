from __future__ import annotations

import math
import random

import pytest
from conftest import E2, E3, E4, E1E2, nil_laurent_series
from hypothesis import given

from nillaurent import sampling
from nillaurent.diffeo import FormalDiffeo
from nillaurent.diffeo import comp_inverse as diffeo_inverse
from nillaurent.diffeo import compose as diffeo_compose
from nillaurent.errors import DomainError, NotAUnitError, NotNilpotentError, PrecisionError
from nillaurent.laurent import LaurentSeries, rescale
from nillaurent.nil_laurent import (
    certify,
    comp_inverse,
    compose,
    cover_map,
    ideal_nilpotency_index,
    lie_bracket_extended,
    periodic_certify,
    _residual_is_identity,
    reduce_series,
    substitute,
)
from nillaurent.ring import QQ, invert_unit


def S(ring, coeffs, prec=float("inf")):
    return LaurentSeries(ring, coeffs, 1, prec)


e2 = E2.generator("e")
e4 = E4.generator("e")


# --- certify ---


def test_certify_dual_tail():
    g = certify(S(E2, {1: 1, -1: e2}))
    assert g.nu == 2


def test_certify_rejects_non_nilpotent_tail():
    with pytest.raises(NotNilpotentError) as info:
        certify(S(QQ, {1: 1, -1: 1}))
    assert info.value.exponent == -1


def test_certify_formal_diffeo():
    g = certify(FormalDiffeo(S(E3, {1: 2, 2: 1}, 8)))
    assert g.nu == 1 and g.minus.is_zero()


def test_certify_rejects_nonunit_lead():
    with pytest.raises(NotAUnitError):
        certify(S(E2, {1: e2, -1: e2}))


def test_ideal_index_of_two_generators():
    a, b = E1E2.generator("e1"), E1E2.generator("e2")
    # (e1, e2)^2 contains e1*e2 != 0, (e1, e2)^3 = 0
    assert ideal_nilpotency_index([a, b]) == 3
    assert ideal_nilpotency_index([]) == 1


# --- compose ---


def test_compose_example():
    h = certify(S(E2, {1: 1, 2: 1}))
    g = certify(S(E2, {1: 1, -1: e2}))
    assert compose(h, g).series == S(E2, {1: 1, 2: 1, 0: 2 * e2, -1: e2})


def test_compose_identities():
    g = certify(S(E2, {1: 1, -1: e2, 3: 5}, 10))
    x = certify(S(E2, {1: 1}))
    assert compose(x, g).agrees_with(g)
    assert compose(g, x).agrees_with(g)


def test_compose_negative_outer_part():
    # (x + e/x) o (x + e/x) = x + 2e/x  when e^2 = 0
    g = certify(S(E2, {1: 1, -1: e2}))
    assert compose(g, g).agrees_with(S(E2, {1: 1, -1: 2 * e2}))


# --- comp_inverse ---


def test_inverse_dual_tail():
    h, it = comp_inverse(certify(S(E2, {1: 1, -1: e2})))
    assert h.agrees_with(S(E2, {1: 1, -1: -e2}))
    assert it <= 1


def test_inverse_of_formal_diffeo_uses_reduction_step_only():
    g = certify(S(QQ, {1: 1, 2: 1}, 10))
    h, it = comp_inverse(g)
    assert it == 0
    assert h.series == diffeo_inverse(FormalDiffeo(g.series)).series


def test_inverse_order_four_tail():
    g = certify(S(E4, {1: 1, -2: e4}, 20))
    assert g.nu == 4
    h, it = comp_inverse(g)
    x = S(E4, {1: 1})
    assert compose(g, h).agrees_with(x) and compose(h, g).agrees_with(x)
    assert it <= 2


def test_inverse_precision_floor():
    with pytest.raises(PrecisionError):
        comp_inverse(certify(S(E2, {1: 1, -1: e2}, 3)))


# --- brackets ---


@pytest.mark.parametrize("k, l, want", [(-2, 1, (3, -1)), (-1, -1, (0, -2)), (-3, 2, (5, -1))])
def test_extended_bracket_examples(k, l, want):
    assert lie_bracket_extended(k, l) == want


def test_extended_bracket_grid():
    for k in range(-4, 5):
        for l in range(-4, 5):
            assert lie_bracket_extended(k, l) == (l - k, k + l)


# --- periodic subgroup and cover ---


def test_periodic_certify_examples():
    assert periodic_certify(S(QQ, {1: 1, 3: 1}), 2)
    assert not periodic_certify(S(QQ, {1: 1, 2: 1}), 2)
    assert periodic_certify(S(E2, {1: 1, -2: e2}), 3)


def test_cover_examples():
    assert cover_map(S(E2, {1: 1, 3: e2}), 2).series == S(E2, {1: 1, 2: 2 * e2})
    for p in (2, 3, 5):
        assert cover_map(S(QQ, {1: 1}), p).series == S(QQ, {1: 1})
    assert cover_map(S(QQ, {1: 3}), 2).series == S(QQ, {1: 9})


def test_cover_rejects_non_periodic():
    with pytest.raises(DomainError):
        cover_map(S(QQ, {1: 1, 2: 1}), 2)


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_cover_on_generators(p, k):
    got = cover_map(S(E2, {1: 1, k * p + 1: e2}), p)
    assert got.series == S(E2, {1: 1, k + 1: p * e2})


@pytest.mark.parametrize("p", [2, 3])
def test_cover_is_homomorphism(p):
    rng = random.Random(p)
    for _ in range(20):
        g = sampling.periodic(rng, E3, p, 6 * p + 10)
        h = sampling.periodic(rng, E3, p, 6 * p + 10)
        lhs = cover_map(compose(g, h), p)
        rhs = compose(cover_map(g, p), cover_map(h, p))
        assert lhs.agrees_with(rhs)


# --- properties ---


@pytest.mark.parametrize("ring", [E3, E1E2], ids=str)
def test_group_laws(ring):
    rng = random.Random(3)
    x = S(ring, {1: 1})
    one = certify(x)
    for _ in range(100):
        f, g, h = (sampling.nil_laurent(rng, ring, prec=20, depth=3) for _ in range(3))
        assert compose(compose(f, g), h).agrees_with(compose(f, compose(g, h)))
        assert compose(f, one).agrees_with(f) and compose(one, f).agrees_with(f)
        inv, it = comp_inverse(f)
        assert compose(f, inv).agrees_with(x) and compose(inv, f).agrees_with(x)
        assert it <= (math.ceil(math.log2(f.nu)) if f.nu > 1 else 0)


@given(nil_laurent_series(E3, depth=3, top=5, prec=16), nil_laurent_series(E3, depth=3, top=5, prec=16))
def test_reduction_compatibility(g, h):
    lhs = reduce_series(compose(g, h).series)
    rhs = diffeo_compose(FormalDiffeo(reduce_series(g)), FormalDiffeo(reduce_series(h)))
    assert lhs.agrees_with(rhs.series)


@pytest.mark.parametrize("ring", [E3, E1E2], ids=str)
def test_composition_precision_soundness(ring):
    # recomputing from longer inputs never contradicts the short result
    # (short inputs may legitimately refuse with PrecisionError)
    rng = random.Random(17)
    computed = 0
    for _ in range(40):
        g = sampling.nil_laurent(rng, ring, prec=24, depth=3)
        h = sampling.nil_laurent(rng, ring, prec=24, depth=3)
        cut_g, cut_h = rng.randint(4, 20), rng.randint(4, 20)
        try:
            lo = compose(g.series.truncate(cut_g), h.series.truncate(cut_h))
        except PrecisionError:
            continue
        computed += 1
        hi = compose(g, h)
        assert lo.agrees_with(hi)
        for n in range(min(lo.series.coeffs, default=1), int(min(lo.prec, hi.prec))):
            assert lo.series.coefficient(n) == hi.series.coefficient(n)
    assert computed >= 20


@pytest.mark.parametrize("ring", [E3, E1E2], ids=str)
def test_inverse_precision_soundness(ring):
    rng = random.Random(23)
    computed = 0
    for _ in range(20):
        g = sampling.nil_laurent(rng, ring, prec=24, depth=3)
        try:
            lo, _ = comp_inverse(g.series.truncate(rng.randint(10, 20)))
        except PrecisionError:
            continue
        computed += 1
        hi, _ = comp_inverse(g)
        assert lo.agrees_with(hi)
    assert computed >= 10


def _rescale_then_correct_inverse(g):
    """The other reading of the inversion loop: rescale first, then correct."""
    s = g.series
    h = diffeo_inverse(FormalDiffeo(g.plus)).series
    r = substitute(s, certify(h))
    x2 = S(s.ring, {1: 2})
    rounds = 0
    while not _residual_is_identity(r):
        u_inv = invert_unit(r.coefficient(1))
        h, r = rescale(h, u_inv), rescale(r, u_inv)
        if _residual_is_identity(r):
            break
        corr = certify(x2 - r)
        h, r = substitute(h, corr), substitute(r, corr)
        rounds += 1
        assert rounds <= 8
    return certify(h), rounds


@pytest.mark.parametrize("ring", [E3, E1E2, E4], ids=str)
def test_other_inversion_order_also_terminates(ring):
    rng = random.Random(1)
    x = S(ring, {1: 1})
    for _ in range(30):
        g = sampling.nil_laurent(rng, ring, prec=24, depth=3)
        h, rounds = _rescale_then_correct_inverse(g)
        assert compose(g, h).agrees_with(x) and compose(h, g).agrees_with(x)
        assert rounds <= (math.ceil(math.log2(g.nu)) if g.nu > 1 else 0)
        assert h.agrees_with(comp_inverse(g)[0])

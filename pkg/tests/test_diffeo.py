from __future__ import annotations

import random

import pytest
from conftest import E2
from gmpy2 import mpq

from nillaurent import sampling
from nillaurent.diffeo import (
    FormalDiffeo,
    carrier_ring,
    comp_inverse,
    compose,
    generic_series,
    identity,
    lie_bracket,
    specialize,
    substitute_power_series,
    universal_composition,
    universal_table,
)
from nillaurent.errors import DomainError, NotAUnitError, PrecisionError
from nillaurent.laurent import LaurentSeries
from nillaurent.ring import QQ, RingDescriptor


def F(coeffs, prec=float("inf"), ring=QQ):
    return FormalDiffeo(LaurentSeries(ring, coeffs, 1, prec))


def test_shape_validation():
    with pytest.raises(DomainError):
        F({0: 1, 1: 1})
    with pytest.raises(NotAUnitError):
        F({1: E2.generator("e"), 2: 1}, ring=E2)
    with pytest.raises(PrecisionError):
        F({}, prec=1)


def test_compose_example():
    got = compose(F({1: 1, 2: 1}), F({1: 1, 3: 1}))
    assert got.series == LaurentSeries(QQ, {1: 1, 2: 1, 3: 1, 4: 2, 6: 1})


def test_compose_applies_right_argument_first():
    # g o h = g(h(x)): (x + x^2) o 2x = 2x + 4x^2, not 2x + 2x^2
    got = compose(F({1: 1, 2: 1}), F({1: 2}))
    assert got.series == LaurentSeries(QQ, {1: 2, 2: 4})


def test_compose_identity_and_linear():
    g = F({1: 3, 2: 1, 5: -2}, 9)
    assert compose(g, identity(QQ)).series == g.series
    assert compose(F({1: 2}), F({1: 3})).series == LaurentSeries(QQ, {1: 6})


def test_inverse_is_signed_catalan():
    inv = comp_inverse(F({1: 1, 2: 1}), 7)
    assert inv.series == LaurentSeries(QQ, {1: 1, 2: -1, 3: 2, 4: -5, 5: 14, 6: -42}, 1, 7)


def test_inverse_of_linear():
    assert comp_inverse(identity(QQ)).series == LaurentSeries.x(QQ)
    assert comp_inverse(F({1: 2})).series == LaurentSeries(QQ, {1: mpq(1, 2)})


def test_universal_low_orders():
    R0 = carrier_ring(0)
    assert universal_composition(0, R0) == R0.generator("g0") * R0.generator("h0")
    R1 = carrier_ring(1)
    g0, g1, h0, h1 = (R1.generator(n) for n in ("g0", "g1", "h0", "h1"))
    assert universal_composition(1, R1) == g0 * h1 + g1 * h0**2


def test_universal_specializes_to_compose():
    g = LaurentSeries(QQ, {1: 1, 2: 1}, 1, 8)
    h = LaurentSeries(QQ, {1: 1, 3: 1}, 1, 8)
    assert specialize(universal_composition(1), g, h) == QQ.one()


@pytest.mark.parametrize("k, l, want", [(1, 2, (1, 3)), (2, 2, (0, 4)), (0, 3, (3, 3))])
def test_lie_bracket_examples(k, l, want):
    c, idx = lie_bracket(k, l)
    assert (c.scalar_value(), idx) == want


def test_lie_bracket_rejects_negative():
    with pytest.raises(DomainError):
        lie_bracket(-1, 2)


# --- properties ---


@pytest.mark.parametrize("ring", [QQ, E2, RingDescriptor(3)], ids=str)
def test_group_laws(ring):
    rng = random.Random(11)
    x = LaurentSeries.x(ring)
    for _ in range(100):
        f, g, h = (sampling.diffeo(rng, ring, prec=12) for _ in range(3))
        assert compose(compose(f, g), h).agrees_with(compose(f, compose(g, h)))
        assert compose(f, identity(ring)).agrees_with(f) and compose(identity(ring), f).agrees_with(f)
        inv = comp_inverse(f)
        assert compose(f, inv).agrees_with(x) and compose(inv, f).agrees_with(x)


@pytest.mark.parametrize("n", range(9))
def test_universal_coassociativity(n):
    R = carrier_ring(n, "ghk")
    g, h, k = (generic_series(R, c, n) for c in "ghk")
    lhs = substitute_power_series(substitute_power_series(g, h), k)
    rhs = substitute_power_series(g, substitute_power_series(h, k))
    assert lhs.coefficient(n + 1) == rhs.coefficient(n + 1)


def test_universal_at_inverse_gives_identity():
    rng = random.Random(5)
    table = universal_table(6)
    for _ in range(10):
        g = sampling.diffeo(rng, QQ, prec=9)
        inv = comp_inverse(g)
        values = [specialize(p, g.series, inv.series) for p in table]
        assert values == [QQ.one()] + [QQ.zero()] * 6


def test_bracket_antisymmetry_and_jacobi():
    rng = range(0, 4)
    c = {(k, l): lie_bracket(k, l)[0].scalar_value() for k in range(7) for l in range(7)}
    for k in rng:
        for l in rng:
            assert c[(k, l)] == -c[(l, k)]
    for a in range(3):
        for b in range(3):
            for d in range(3):
                jac = c[(a, b)] * c[(a + b, d)] + c[(b, d)] * c[(b + d, a)] + c[(d, a)] * c[(d + a, b)]
                assert jac == 0

from __future__ import annotations

from fractions import Fraction

import pytest
from gmpy2 import mpq

from nillaurent.errors import DomainError
from nillaurent.fock import (
    FockVector,
    SectorSpec,
    basis_states,
    candidate_weight,
    derived_spec,
    ground_state_weight,
    heisenberg_apply,
    sector_sum_weight,
    virasoro_apply,
    virasoro_commutator_check,
)

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)
SPECS = [SectorSpec(), SectorSpec(mu=HALF), SectorSpec(HALF), SectorSpec(THIRD)]


def vac(spec):
    return FockVector.vacuum(spec.q)


# --- Heisenberg ---


def test_creation_on_vacuum():
    spec = SectorSpec(HALF)
    assert heisenberg_apply(spec, -HALF, vac(spec)) == FockVector.basis(2, (1,))


def test_annihilation_oracle():
    spec = SectorSpec(HALF)
    two = FockVector.basis(2, (1, 1))
    # a_(1/2) a_(-1/2)^2 |0> = 2 * (1/2) a_(-1/2) |0>
    assert heisenberg_apply(spec, HALF, two) == FockVector.basis(2, (1,))


def test_annihilate_vacuum():
    spec = SectorSpec()
    assert heisenberg_apply(spec, 1, vac(spec)).is_zero()


def test_zero_mode():
    spec = SectorSpec(mu=Fraction(3, 2))
    assert heisenberg_apply(spec, 0, vac(spec)) == vac(spec) * mpq(3, 2)
    with pytest.raises(DomainError):
        heisenberg_apply(SectorSpec(HALF), 0, vac(SectorSpec(HALF)))


def test_non_mode_rejected():
    with pytest.raises(DomainError):
        heisenberg_apply(SectorSpec(HALF), 1, vac(SectorSpec(HALF)))


def test_spec_validation():
    with pytest.raises(DomainError):
        SectorSpec(Fraction(3, 2))
    with pytest.raises(DomainError):
        SectorSpec(HALF, mu=1)


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: f"theta={s.theta},mu={s.mu}")
def test_heisenberg_relations(spec):
    q = spec.q
    modes = [m for m in range(-4 * q, 4 * q + 1) if spec.is_mode(m)]
    states = basis_states(spec, 6)
    for mono in states:
        v = FockVector.basis(q, mono)
        for r in modes:
            ar = heisenberg_apply(spec, Fraction(r, q), v)
            for s in modes:
                lhs = heisenberg_apply(spec, Fraction(r, q), heisenberg_apply(spec, Fraction(s, q), v))
                lhs = lhs - heisenberg_apply(spec, Fraction(s, q), ar)
                want = v * mpq(r, q) if r + s == 0 else FockVector(q)
                assert lhs == want, (mono, r, s)


# --- Virasoro operators ---


def test_untwisted_l_minus_two():
    spec = SectorSpec()
    assert virasoro_apply(spec, -2, vac(spec)) == FockVector.basis(1, (1, 1)) * mpq(1, 2)


def test_half_twisted_l_minus_one():
    spec = SectorSpec(HALF)
    assert virasoro_apply(spec, -1, vac(spec)) == FockVector.basis(2, (1, 1)) * mpq(1, 2)


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: f"theta={s.theta},mu={s.mu}")
def test_positive_modes_kill_vacuum(spec):
    for n in range(1, 6):
        assert virasoro_apply(spec, n, vac(spec)).is_zero()


def test_central_value_untwisted():
    rep = virasoro_commutator_check(SectorSpec(), 2, -2, 6, c_expected=1)
    assert rep.ok
    assert rep.vacuum_value == mpq(1, 2)
    assert rep.c_extracted == 1


def test_half_twisted_vacuum_value():
    spec = derived_spec(HALF)
    assert spec.h0 == Fraction(1, 16)
    rep = virasoro_commutator_check(spec, 1, -1, 6, c_expected=1)
    assert rep.ok and rep.vacuum_value == mpq(1, 8)


def test_trivial_commutator():
    rep = virasoro_commutator_check(SectorSpec(), 0, 0, 6)
    assert rep.ok and rep.residual == 0


@pytest.mark.parametrize("theta, mu", [(0, 0), (0, HALF), (HALF, 0)])
def test_virasoro_relations_c1(theta, mu):
    spec = derived_spec(theta, mu)
    for m in range(-4, 5):
        for n in range(-4, 5):
            rep = virasoro_commutator_check(spec, m, n, 8, c_expected=1)
            assert rep.ok, (m, n, rep.failures[:3])
            if m + n == 0 and m**3 != m:
                assert rep.c_extracted == 1


def test_virasoro_relations_complex_boson():
    spec = derived_spec(THIRD)
    assert spec.central_charge == 2
    for m in range(-3, 4):
        for n in range(-3, 4):
            assert virasoro_commutator_check(spec, m, n, 5, c_expected=2).ok


@pytest.mark.parametrize("spec", [derived_spec(), derived_spec(0, HALF), derived_spec(HALF), derived_spec(THIRD)])
def test_l0_grading(spec):
    extra = spec.mu**2 / 2 if not spec.twisted else 0
    for mono in basis_states(spec, 5):
        v = FockVector.basis(spec.q, mono)
        weight = Fraction(sum(mono), spec.q) + spec.h0 + extra
        assert virasoro_apply(spec, 0, v) == v * mpq(weight.numerator, weight.denominator)


def test_no_storage_bound_effects():
    spec = derived_spec(HALF)
    small = basis_states(spec, 3)
    large = basis_states(spec, 6)
    assert set(small) <= set(large)
    # acting on a sum of many states equals the sum of single-state results
    combo = FockVector(spec.q, {mono: i + 1 for i, mono in enumerate(large)})
    for n in (-3, -1, 0, 2):
        parts = FockVector(spec.q)
        for i, mono in enumerate(large):
            parts = parts + virasoro_apply(spec, n, FockVector.basis(spec.q, mono)) * (i + 1)
        assert virasoro_apply(spec, n, combo) == parts
    a = virasoro_commutator_check(spec, 2, -1, 3, 1)
    b = virasoro_commutator_check(spec, 2, -1, 6, 1)
    assert a.ok and b.ok and b.states > a.states


@pytest.mark.parametrize("spec", [derived_spec(), derived_spec(HALF), derived_spec(0, HALF)])
def test_vacuum_two_point_two_ways(spec):
    c = spec.central_charge
    for m in range(1, 6):
        direct = virasoro_apply(spec, m, virasoro_apply(spec, -m, vac(spec))).coefficient(())
        h = virasoro_apply(spec, 0, vac(spec)).coefficient(())
        via_bracket = 2 * m * h + mpq(c.numerator, c.denominator) * (m**3 - m) / 12
        assert direct == via_bracket


# --- ground state weights ---


def test_ground_state_weights():
    assert ground_state_weight(SectorSpec(HALF)) == Fraction(1, 16)
    assert ground_state_weight(SectorSpec()) == 0
    assert ground_state_weight(SectorSpec(mu=HALF)) == Fraction(1, 8)


def test_third_twist_against_candidate():
    h = ground_state_weight(SectorSpec(THIRD))
    # complex-boson twist field weight theta (1 - theta) / 2
    assert h == THIRD * (1 - THIRD) / 2 == Fraction(1, 9)
    assert candidate_weight(THIRD) == Fraction(1, 18)
    assert h != candidate_weight(THIRD)


@pytest.mark.parametrize("theta", [Fraction(1, 5), Fraction(2, 5), Fraction(1, 4), Fraction(3, 7)])
def test_complex_twist_weights(theta):
    assert ground_state_weight(SectorSpec(theta)) == theta * (1 - theta) / 2


def test_sector_sums():
    two = sector_sum_weight(2)
    assert two.oracle == Fraction(1, 16) == two.closed_form and two.match
    assert two.oracle == ground_state_weight(SectorSpec(HALF))
    three = sector_sum_weight(3)
    assert three.closed_form == Fraction(1, 6)
    assert three.oracle == sum(h for _, h in three.per_sector)
    assert three.oracle == Fraction(2, 9) and not three.match

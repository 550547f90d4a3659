from __future__ import annotations

import sys

import hypothesis.strategies as st
from gmpy2 import mpq
from hypothesis import HealthCheck, settings

from nillaurent.laurent import LaurentSeries
from nillaurent.ring import RingDescriptor, RingElement

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

E2 = RingDescriptor(1, (("e", 2),))
E3 = RingDescriptor(1, (("e", 3),))
E4 = RingDescriptor(1, (("e", 4),))
E1E2 = RingDescriptor(1, (("e1", 2), ("e2", 2)))
Z3 = RingDescriptor(3)
Z3E2 = RingDescriptor(3, (("e", 2),))
Z4E3 = RingDescriptor(4, (("e", 3),))
RINGS = [RingDescriptor(), E2, E3, E1E2, Z3, Z3E2, Z4E3, RingDescriptor(6, (("a", 2), ("b", 3)))]

small_rationals = st.builds(lambda n, d: mpq(n, d), st.integers(-5, 5), st.integers(1, 4))


@st.composite
def ring_elements(draw, ring: RingDescriptor, nil_only: bool = False):
    keys = ring.basis()
    if nil_only:
        keys = [k for k in keys if any(k[1][: ring.n_nil])]
    chosen = draw(st.lists(st.sampled_from(keys), max_size=4, unique=True)) if keys else []
    return RingElement(ring, {k: draw(small_rationals) for k in chosen})


@st.composite
def units(draw, ring: RingDescriptor):
    lead = draw(small_rationals.filter(bool))
    return ring.scalar(lead) + draw(ring_elements(ring, nil_only=True))


@st.composite
def series(draw, ring: RingDescriptor, low: int = -3, high: int = 6, den: int = 1, prec=None, nil_below: int = 1):
    """Random Laurent series; coefficients below ``nil_below`` are nilpotent."""
    coeffs = {}
    for n in range(low, high + 1):
        if draw(st.booleans()):
            coeffs[n] = draw(ring_elements(ring, nil_only=n < nil_below))
    if prec is None:
        prec = draw(st.integers(high + 1, high + 6))
    return LaurentSeries(ring, coeffs, den, prec)


@st.composite
def nil_laurent_series(draw, ring: RingDescriptor, depth: int = 3, top: int = 5, prec: int = 16):
    """Certifiable shape: unit at x, nilpotent tail down to x^-depth."""
    s = draw(series(ring, -depth, top, prec=prec))
    coeffs = dict(s.coeffs)
    coeffs[1] = draw(units(ring))
    return LaurentSeries(ring, coeffs, 1, prec)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

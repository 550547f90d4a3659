"""Seeded random elements for the property suites and tests."""

from __future__ import annotations

import random

from gmpy2 import mpq

from .diffeo import FormalDiffeo
from .laurent import LaurentSeries, exp
from .nil_laurent import NilLaurentElement, certify
from .ring import QQ, RingDescriptor, RingElement
from .witt import WittVector


def rational(rng: random.Random, size: int = 3) -> mpq:
    return mpq(rng.randint(-size, size), rng.randint(1, size))


def nilpotent(rng: random.Random, ring: RingDescriptor) -> RingElement:
    """Random element of the nil ideal (linear part plus an occasional product)."""
    gens = [ring.generator(n) for n, _ in ring.nil_generators]
    c = ring.zero()
    for g in gens:
        c = c + g * rational(rng)
    if gens and rng.random() < 0.5:
        c = c + gens[0] * gens[-1] * rational(rng)
    return c


def coefficient(rng: random.Random, ring: RingDescriptor) -> RingElement:
    c = ring.scalar(rational(rng))
    if ring.cyclotomic_order > 1 and rng.random() < 0.5:
        c = c + ring.generator("zeta") * rational(rng)
    return c


def nil_laurent(rng: random.Random, ring: RingDescriptor, prec: int = 24, depth: int = 3, top: int = 5) -> NilLaurentElement:
    """x-leading unit coefficient, power-series part to x^top, nilpotent tail down to x^-depth."""
    coeffs = {1: ring.scalar(rng.choice([1, 2, -1, mpq(1, 2)])) + nilpotent(rng, ring)}
    for n in range(2, top + 1):
        if rng.random() < 0.6:
            coeffs[n] = coefficient(rng, ring) + nilpotent(rng, ring)
    for n in range(-depth, 1):
        if rng.random() < 0.6:
            coeffs[n] = nilpotent(rng, ring)
    return certify(LaurentSeries(ring, coeffs, 1, prec))


def diffeo(rng: random.Random, ring: RingDescriptor, prec: int = 16, top: int = 6) -> FormalDiffeo:
    coeffs = {1: ring.scalar(rng.choice([1, 2, -1, mpq(1, 3)]))}
    for n in range(2, top + 1):
        if rng.random() < 0.7:
            coeffs[n] = coefficient(rng, ring)
    return FormalDiffeo(LaurentSeries(ring, coeffs, 1, prec))


def periodic(rng: random.Random, ring: RingDescriptor, p: int, prec: int, terms: int = 3) -> NilLaurentElement:
    """Element with every exponent = 1 mod p, including a nilpotent x^(1-p) term."""
    coeffs = {1: ring.one() + nilpotent(rng, ring)}
    for k in range(1, terms + 1):
        if rng.random() < 0.7:
            coeffs[1 + k * p] = coefficient(rng, ring) + nilpotent(rng, ring)
    if ring.nil_generators and rng.random() < 0.7:
        coeffs[1 - p] = nilpotent(rng, ring)
    return certify(LaurentSeries(ring, coeffs, 1, prec))


def laurent(rng: random.Random, ring: RingDescriptor, den: int = 1, low: int = -6, high: int = 8, prec: int | None = None) -> LaurentSeries:
    """Random Laurent series with numerators in [low, high]; exact unless ``prec`` given."""
    coeffs = {}
    for n in range(low, high + 1):
        if rng.random() < 0.5:
            coeffs[n] = coefficient(rng, ring) + nilpotent(rng, ring)
    return LaurentSeries(ring, coeffs, den, prec if prec is not None else float("inf"))


def witt_vector(rng: random.Random, p: int, prec: int, in_kernel: bool, ring: RingDescriptor = QQ) -> WittVector:
    """exp of a log supported off multiples of p, plus one multiple of p when not in the kernel."""
    ell = {n: ring.scalar(rational(rng, 4)) for n in range(1, prec) if n % p and rng.random() < 0.5}
    if not in_kernel:
        k = p * rng.randint(1, (prec - 1) // p)
        ell[k] = ring.scalar(mpq(rng.choice([-2, -1, 1, 2]), rng.randint(1, 3)))
    return WittVector(exp(LaurentSeries(ring, ell, 1, prec), prec))

"""Seeded random differential polynomials, operators and currents for property checks."""

from __future__ import annotations

import random
from fractions import Fraction

from .diffops import DiffOperator, adjoint
from .jetalgebra import DiffFunction, Signature, indices_up_to, jet


def random_coefficient(rng: random.Random, small: bool = True):
    num = rng.choice([-3, -2, -1, 1, 1, 2, 3]) if small else rng.randint(-9, 9) or 1
    den = rng.choice([1, 1, 1, 2, 3])
    return Fraction(num, den)


def random_function(rng: random.Random, sig: Signature, degree: int = 3, order: int = 3,
                    terms: int = 3, x_degree: int = 1, families: range | None = None) -> DiffFunction:
    """Sum of ``terms`` random monomials with jet order ``<= order`` and total degree ``<= degree``."""
    fams = list(families if families is not None else range(sig.n))
    jets = [jet(alpha, i) for alpha in fams for i in indices_up_to(sig.m, order)]
    out = DiffFunction()
    for _ in range(rng.randint(1, terms)):
        mono = DiffFunction.constant(random_coefficient(rng))
        d = rng.randint(0, degree)
        xd = 0
        for _ in range(d):
            if x_degree and xd < x_degree and rng.random() < 0.15:
                mono = mono * DiffFunction.x(rng.randrange(sig.m))
                xd += 1
            else:
                mono = mono * DiffFunction.var(rng.choice(jets))
        out = out + mono
    return out


def random_characteristic(rng, sig: Signature, degree=2, order=2, terms=2) -> tuple[DiffFunction, ...]:
    return tuple(random_function(rng, sig, degree, order, terms) for _ in range(sig.n))


def random_current(rng, sig: Signature, degree=3, order=3, terms=3) -> tuple[DiffFunction, ...]:
    return tuple(random_function(rng, sig, degree, order, terms) for _ in range(sig.m))


def random_operator(rng, sig: Signature, rows: int | None = None, cols: int | None = None,
                    order: int = 3, coeff_degree: int = 2, coeff_order: int = 2, density: float = 0.6) -> DiffOperator:
    rows = sig.n if rows is None else rows
    cols = sig.n if cols is None else cols
    entries = {}
    idx = indices_up_to(sig.m, order)
    for r in range(rows):
        for c in range(cols):
            if rng.random() > density:
                continue
            e = {}
            for _ in range(rng.randint(1, 3)):
                e[rng.choice(idx)] = random_function(rng, sig, coeff_degree, coeff_order, 2)
            entries[(r, c)] = e
    return DiffOperator(rows, cols, sig.m, entries)


def random_skew_operator(rng, sig: Signature, order: int = 3, coeff_degree: int = 1, coeff_order: int = 1) -> DiffOperator:
    """``(P - P*) / 2`` for a random square ``P``; never the zero operator."""
    while True:
        P = random_operator(rng, sig, order=order, coeff_degree=coeff_degree, coeff_order=coeff_order)
        S = (P - adjoint(P)).scale(Fraction(1, 2))
        if not S.is_zero():
            return S

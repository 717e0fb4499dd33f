"""Seeded random chains, elements, and sample pairs.

All randomness in the package flows through an explicit random.Random so
identical seeds reproduce identical objects; balls are sorted, so choice
by index is stable across runs.
"""

from __future__ import annotations

from fractions import Fraction
from random import Random

from .algebra import AlgebraElement, Chain
from .groups import GroupRealization
from .scalars import Scalar


def random_scalar(rng: Random, gaussian: bool = False, span: int = 3) -> Scalar:
    """Small nonzero exact coefficient; optionally with an imaginary part."""
    while True:
        re = Fraction(rng.randint(-span, span))
        im = Fraction(rng.randint(-span, span)) if gaussian else Fraction(0)
        if rng.random() < 0.25:
            re /= rng.randint(2, 4)
        s = Scalar(re, im)
        if not s.is_zero:
            return s


def random_element(rng: Random, group: GroupRealization, radius: int,
                   cap=None):
    ball = group.ball(radius, cap=cap)
    return ball[rng.randrange(len(ball))]


def random_tuple(rng: Random, group: GroupRealization, degree: int,
                 total_length_bound: int, cap=None) -> tuple:
    """(degree+1)-tuple with summed word length <= bound, by per-slot budget."""
    per_slot = total_length_bound // (degree + 1)
    return tuple(
        random_element(rng, group, per_slot, cap=cap) for _ in range(degree + 1)
    )


def random_chain(rng: Random, group: GroupRealization, degree: int,
                 total_length_bound: int, terms: int = 4,
                 gaussian: bool = False, cap=None) -> Chain:
    """Sparse chain whose every term satisfies the total-length bound.

    Term collisions may cancel; retry a few times to return a nonzero
    chain (degenerate bounds can still legitimately produce zero).
    """
    for _ in range(8):
        items = [
            (random_tuple(rng, group, degree, total_length_bound, cap=cap),
             random_scalar(rng, gaussian=gaussian))
            for _ in range(terms)
        ]
        chain = Chain(group, degree, items)
        if not chain.is_zero:
            return chain
    return chain


def random_algebra_element(rng: Random, group: GroupRealization, radius: int,
                           terms: int = 4, gaussian: bool = False,
                           cap=None) -> AlgebraElement:
    items = [
        (random_element(rng, group, radius, cap=cap),
         random_scalar(rng, gaussian=gaussian))
        for _ in range(terms)
    ]
    return AlgebraElement(group, items)


def dominated_pair(rng: Random, xp: AlgebraElement):
    """(x, xp) with |coeff x| <= |coeff xp| pointwise: scale by rationals in [0,1]."""
    items = []
    for g, v in xp.items_sorted():
        num = rng.randint(0, 4)
        items.append((g, v * Scalar(Fraction(num, 4))))
    return AlgebraElement(xp.group, items), xp

"""
Test the standard apartment: dominant representatives, parabolic types and fixed points.
"""

import random
from itertools import product

from sympy.combinatorics import Permutation

from src.building.weyl import (
    apply_permutation,
    coordinate_flag,
    dominant_representative,
    fixed_point_labels,
    fixed_points,
    multinomial,
    parabolic_type,
)
from src.models import DominantWeight, ParabolicType, Subspace


def test_dominant_representative():
    d, w = dominant_representative((1, 3, 2))
    assert d.weights == (3, 2, 1)
    assert apply_permutation(w, d.weights) == (1, 3, 2)

    d, w = dominant_representative((0, 0))
    assert d.weights == (0, 0)
    assert w == Permutation([0, 1])

    d, w = dominant_representative((5, 5, 1))
    assert d.weights == (5, 5, 1)
    assert w == Permutation([0, 1, 2])


def test_dominant_representative_random():
    rng = random.Random(11)
    for _ in range(50):
        v = tuple(rng.randint(-4, 4) for _ in range(rng.randint(1, 5)))
        d, w = dominant_representative(v)
        assert list(d.weights) == sorted(v, reverse=True)
        assert apply_permutation(w, d.weights) == v


def test_parabolic_type():
    assert parabolic_type(DominantWeight(weights=(3, 2, 1))).blocks == (1, 1, 1)
    assert parabolic_type(DominantWeight(weights=(2, 2, 0))).blocks == (2, 1)
    assert parabolic_type(DominantWeight(weights=(7, 7, 7))).blocks == (3,)


def test_fixed_point_counts():
    assert multinomial(ParabolicType(blocks=(1, 2))) == 3
    assert len(fixed_points(ParabolicType(blocks=(1, 2)))) == 3
    assert len(fixed_points(ParabolicType(blocks=(1, 1, 1)))) == 6
    assert len(fixed_points(ParabolicType(blocks=(4,)))) == 1


def test_fixed_point_labels_are_lexicographic():
    assert fixed_point_labels(ParabolicType(blocks=(1, 2))) == [(0, 1, 1), (1, 0, 1), (1, 1, 0)]


def test_coordinate_flag():
    flag = coordinate_flag((1, 0, 1))
    assert flag.dims == (1, 3)
    assert flag.steps[0] == Subspace.spanned_by(3, [(0, 1, 0)])
    assert flag.composition == (1, 2)


def compositions(r: int):
    for cuts in product((False, True), repeat=r - 1):
        blocks = [1]
        for cut in cuts:
            if cut:
                blocks.append(1)
            else:
                blocks[-1] += 1
        yield ParabolicType(blocks=tuple(blocks))


def test_fixed_point_counts_for_every_composition():
    for r in range(1, 6):
        seen = 0
        for q in compositions(r):
            seen += 1
            points = fixed_points(q)
            assert len(points) == multinomial(q)
            assert len(set(points)) == len(points)
            assert all(p.composition == q.blocks for p in points)
        assert seen == 2 ** (r - 1)

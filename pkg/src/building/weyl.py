"""
Standard apartment Z^r of the diagonal torus of GL(r) and its Weyl group S_r.

The fixed Borel is the upper-triangular group, the stabilizer of the
coordinate flag <e_1> ⊂ <e_1, e_2> ⊂ ...; dominant weights are weakly
decreasing. Permutations are sympy Permutation objects acting on
positions: (w·d)[w(k)] = d[k].
"""

from math import factorial, prod
from typing import Sequence

from sympy.combinatorics import Permutation
from sympy.utilities.iterables import multiset_permutations

from src.models import DominantWeight, Flag, IntVector, ParabolicType, Subspace


def apply_permutation(w: Permutation, v: Sequence) -> tuple:
    out = [None] * len(v)
    for k, target in enumerate(w.array_form):
        out[target] = v[k]
    return tuple(out)


def dominant_representative(v: Sequence[int]) -> tuple[DominantWeight, Permutation]:
    """Sorted-descending weight d and w with apply_permutation(w, d) == v; ties keep index order."""
    values = tuple(int(x) for x in v)
    order = sorted(range(len(values)), key=lambda i: (-values[i], i))
    dominant = DominantWeight(weights=tuple(values[i] for i in order))
    return dominant, Permutation(order)


def parabolic_type(d: DominantWeight) -> ParabolicType:
    blocks: list[int] = []
    previous = None
    for x in d.weights:
        if blocks and x == previous:
            blocks[-1] += 1
        else:
            blocks.append(1)
        previous = x
    return ParabolicType(blocks=tuple(blocks))


def multinomial(q: ParabolicType) -> int:
    return factorial(q.rank) // prod(factorial(m) for m in q.blocks)


def fixed_point_labels(q: ParabolicType) -> list[IntVector]:
    """
    Torus-fixed points of G/Q as block labels: labels[i] is the block of
    the coordinate vector e_i. Listed in lexicographic order.
    """
    word = [b for b, m in enumerate(q.blocks) for _ in range(m)]
    return [tuple(p) for p in multiset_permutations(word)]


def coordinate_flag(labels: Sequence[int]) -> Flag:
    """The coordinate flag whose j-th step (from 0) is spanned by the e_i with labels[i] <= j."""
    r = len(labels)
    steps = tuple(
        Subspace.spanned_by(r, [[int(i == k) for k in range(r)] for i in range(r) if labels[i] <= j])
        for j in range(max(labels) + 1)
    )
    return Flag(ambient=r, steps=steps)


def fixed_points(q: ParabolicType) -> list[Flag]:
    return [coordinate_flag(labels) for labels in fixed_point_labels(q)]

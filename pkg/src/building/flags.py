"""
Points of the extended building of GL(r) as weighted flags of Q^r.

A frame is an invertible matrix whose columns form a basis; a weight
vector attaches one rational weight to each column. The weighted flag of
(frame, weights) has the distinct weights t_1 > ... > t_k and steps
F_j = span of the columns of weight >= t_j.
"""

import logging
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence, Union

from src.models import (
    Flag,
    KlyachkoFiltration,
    Matrix,
    OneParamSubgroup,
    ParabolicType,
    Subspace,
    WeightedFlag,
    as_vector,
)
from src.utils.exactlin import columns, det, kernel_basis, matvec, rank, transpose

logger = logging.getLogger(__name__)


# =========================================
# Subspace lattice operations
# =========================================

def join(ambient: int, *spaces: Subspace) -> Subspace:
    return Subspace.spanned_by(ambient, [row for s in spaces for row in s.rows])


def meet(a: Subspace, b: Subspace) -> Subspace:
    """Intersection of two subspaces of the same Q^r."""
    if not a.rows or not b.rows:
        return Subspace(ambient=a.ambient)
    # x = Σ α_i a_i = Σ β_j b_j  <=>  (α, β) in the kernel of [Aᵀ | -Bᵀ]
    stacked = list(a.rows) + [tuple(-x for x in row) for row in b.rows]
    relations = kernel_basis(transpose(stacked), len(stacked))
    vectors = [
        tuple(sum((c * row[k] for c, row in zip(rel[:a.dim], a.rows)), Fraction(0)) for k in range(a.ambient))
        for rel in relations
    ]
    return Subspace.spanned_by(a.ambient, vectors)


# =========================================
# Weighted flags
# =========================================

def weighted_flag_from_frame(frame: Matrix, weights: Sequence) -> WeightedFlag:
    values = as_vector(weights)
    basis = columns(frame)
    r = len(basis)
    levels = sorted(set(values), reverse=True)
    steps = tuple(
        Subspace.spanned_by(r, [basis[i] for i in range(r) if values[i] >= t])
        for t in levels
    )
    return WeightedFlag(flag=Flag(ambient=r, steps=steps), weights=tuple(levels))


def from_onepar(lam: OneParamSubgroup) -> WeightedFlag:
    return weighted_flag_from_frame(lam.frame, lam.weights)


def wf_equal(a: WeightedFlag, b: WeightedFlag) -> bool:
    """Same weight sequence and the same chain of canonical subspaces."""
    return a.rank == b.rank and a.weights == b.weights and a.flag.steps == b.flag.steps


def flag_type(flag: Flag) -> ParabolicType:
    return ParabolicType(blocks=flag.composition)


def act(g: Matrix, flag: Flag) -> Flag:
    """Image g·F of a flag; vectors are acted on as columns."""
    steps = tuple(
        Subspace.spanned_by(flag.ambient, [matvec(g, row) for row in step.rows])
        for step in flag.steps
    )
    return Flag(ambient=flag.ambient, steps=steps)


def act_weighted(g: Matrix, wf: WeightedFlag) -> WeightedFlag:
    return WeightedFlag(flag=act(g, wf.flag), weights=wf.weights)


def is_adapted(basis: Matrix, flag: Flag) -> bool:
    """True iff the columns of `basis` are a basis of Q^r and every step is spanned by the columns it contains."""
    cols = columns(basis)
    if len(cols) != flag.ambient or det(basis) == 0:
        return False
    for step in flag.steps:
        inside = [c for c in cols if step.contains(c)]
        if len(inside) != step.dim:
            return False
    return True


def stabilizes(x: Matrix, flag: Flag) -> bool:
    return act(x, flag) == flag


# =========================================
# Common splittings
# =========================================

def _as_flag(item: Union[Flag, WeightedFlag]) -> Flag:
    return item.flag if isinstance(item, WeightedFlag) else item


def common_splitting(flags: Sequence[Union[Flag, WeightedFlag]], rank_hint: Optional[int] = None) -> Optional[Matrix]:
    """
    A basis of Q^r adapted to every flag in the family, as a matrix whose
    columns are the basis vectors, or None when no such basis exists.

    For a multi-index I (one step index per flag) let V_I be the
    intersection of the chosen steps and gr_I = V_I / Σ_j V_{I - e_j}.
    A common adapted basis exists iff Σ dim gr_I = r; it is obtained by
    lifting each graded piece in lexicographic order of I.
    """
    family = [_as_flag(f) for f in flags]
    if not family:
        if rank_hint is None:
            raise ValueError("rank_hint is required for an empty family")
        return tuple(tuple(Fraction(int(i == j)) for j in range(rank_hint)) for i in range(rank_hint))
    r = family[0].ambient
    zero = Subspace(ambient=r)
    chains = [(zero,) + f.steps for f in family]

    cache: dict[tuple[int, ...], Subspace] = {}

    def piece(index: tuple[int, ...]) -> Subspace:
        if index not in cache:
            if any(i == 0 for i in index):
                cache[index] = zero
            else:
                space = chains[0][index[0]]
                for chain, i in zip(chains[1:], index[1:]):
                    space = meet(space, chain[i])
                    if not space.rows:
                        break
                cache[index] = space
        return cache[index]

    chosen: list[tuple] = []
    total = 0
    for index in product(*(range(1, len(chain)) for chain in chains)):
        top = piece(index)
        if not top.rows:
            continue
        lower = [
            piece(index[:j] + (index[j] - 1,) + index[j + 1:])
            for j in range(len(index))
        ]
        below = join(r, *lower)
        graded = top.dim - below.dim
        if graded <= 0:
            continue
        total += graded
        if total > r:
            logger.debug(f"[SPLIT] graded dimensions exceed {r}; no common splitting")
            return None
        span = list(below.rows)
        for row in top.rows:
            if rank(span + [row]) > len(span):
                span.append(row)
                chosen.append(row)
                graded -= 1
                if graded == 0:
                    break

    if total != r:
        logger.debug(f"[SPLIT] graded dimensions sum to {total}, expected {r}")
        return None
    basis = transpose(chosen)
    if det(basis) == 0 or not all(is_adapted(basis, f) for f in family):
        logger.warning("[SPLIT] graded lift is not adapted to every flag")
        return None
    return basis


# =========================================
# Klyachko filtrations
# =========================================

def filtration_piece(f: KlyachkoFiltration, i: int) -> Subspace:
    """E(i): the piece at the smallest listed index >= i, zero above the last one."""
    for index, space in f.pieces:
        if index >= i:
            return space
    return Subspace(ambient=f.ambient)


def klyachko_convert(f: KlyachkoFiltration) -> WeightedFlag:
    """Each distinct nonzero piece becomes a flag step weighted by the last index where it occurs."""
    last: dict[Subspace, int] = {}
    for index, space in f.pieces:
        if space.rows:
            last[space] = index
    ordered = sorted(last.items(), key=lambda item: -item[1])
    steps = tuple(space for space, _ in ordered)
    weights = tuple(Fraction(index) for _, index in ordered)
    return WeightedFlag(flag=Flag(ambient=f.ambient, steps=steps), weights=weights)


def klyachko_from_flag(wf: WeightedFlag) -> KlyachkoFiltration:
    if any(t.denominator != 1 for t in wf.weights):
        raise ValueError(f"Klyachko filtrations need integer weights, got {wf.weights}")
    pieces = tuple(
        (int(t), step) for t, step in sorted(zip(wf.weights, wf.flag.steps), key=lambda item: item[0])
    )
    return KlyachkoFiltration(ambient=wf.rank, pieces=pieces)

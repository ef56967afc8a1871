"""
Rational polyhedral fans: construction, validation and face structure.

Faces, strong convexity and the fan axiom are all decided by exact
Fourier-Motzkin feasibility of supporting functionals u in M_Q:
    S is a face of σ  <=>  some u has u·v = 0 on S and u·v >= 1 on σ(1) \\ S.
"""

import logging
from collections import deque
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from src.errors import InputFormatError, NonPrimitiveRay, NotAFan, NotStronglyConvex
from src.models import Cone, Fan, IntMatrix, IntVector, Matrix, Vector
from src.utils.exactlin import (
    cone_member,
    fm_feasible,
    inverse,
    matmul,
    matvec,
    primitive_vector,
    rank,
    saturated_lattice_basis,
    transpose,
)

logger = logging.getLogger(__name__)


# =========================================
# Supporting functionals
# =========================================

def _is_face(rays: IntMatrix, cone: IntVector, subset: IntVector) -> bool:
    n = len(rays[0]) if rays else 0
    on = [(rays[i], 0) for i in subset]
    off = [(rays[i], 1) for i in cone if i not in subset]
    return fm_feasible(n, on, off)


def _separated(rays: IntMatrix, first: IntVector, second: IntVector, common: IntVector) -> bool:
    """A functional vanishing on the common rays, positive on first, negative on second."""
    n = len(rays[0]) if rays else 0
    on = [(rays[i], 0) for i in common]
    above = [(rays[i], 1) for i in first if i not in common]
    below = [(tuple(-x for x in rays[i]), 1) for i in second if i not in common]
    return fm_feasible(n, on, above + below)


def _faces_of(rays: IntMatrix, cone: IntVector) -> list[IntVector]:
    faces = []
    for k in range(len(cone) + 1):
        for subset in combinations(cone, k):
            if _is_face(rays, cone, subset):
                faces.append(subset)
    return faces


def _make_cone(rays: IntMatrix, indices: IntVector) -> Cone:
    if not indices:
        return Cone(rays=(), dim=0, lattice_basis=())
    vectors = [rays[i] for i in indices]
    return Cone(
        rays=indices,
        dim=rank(vectors),
        lattice_basis=saturated_lattice_basis(vectors),
    )


# =========================================
# Construction
# =========================================

def build_fan(n: int, rays: Sequence[Sequence[int]], maximal_cones: Sequence[Sequence[int]]) -> Fan:
    """
    Validate raw fan data and compute its face lattice.

    Raises NonPrimitiveRay, NotStronglyConvex or NotAFan for geometric
    problems and InputFormatError for malformed indices or shapes.
    """
    ray_tuple: list[IntVector] = []
    for i, ray in enumerate(rays):
        if len(ray) != n:
            raise InputFormatError("fan", f"rays[{i}]", f"ray must have {n} entries")
        if any(isinstance(x, bool) or int(x) != x for x in ray):
            raise InputFormatError("fan", f"rays[{i}]", "ray entries must be integers")
        vector = tuple(int(x) for x in ray)
        if not any(vector):
            raise InputFormatError("fan", f"rays[{i}]", "ray must be nonzero")
        if primitive_vector(vector) != vector:
            raise NonPrimitiveRay(i, vector)
        if vector in ray_tuple:
            raise InputFormatError("fan", f"rays[{i}]", f"ray duplicates rays[{ray_tuple.index(vector)}]")
        ray_tuple.append(vector)
    all_rays: IntMatrix = tuple(ray_tuple)

    cones: list[IntVector] = []
    for c, raw in enumerate(maximal_cones):
        indices = tuple(sorted(int(i) for i in raw))
        if len(set(indices)) != len(indices):
            raise InputFormatError("fan", f"maximal_cones[{c}]", "ray indices must be distinct")
        if any(i < 0 or i >= len(all_rays) for i in indices):
            raise InputFormatError("fan", f"maximal_cones[{c}]", "ray index out of range")
        cones.append(indices)

    used = {i for cone in cones for i in cone}
    for i in range(len(all_rays)):
        if i not in used:
            raise InputFormatError("fan", f"rays[{i}]", "ray is not a ray of any listed cone")

    faces: dict[IntVector, None] = {}
    for cone in cones:
        if not _is_face(all_rays, cone, ()):
            raise NotStronglyConvex(cone)
        for i in cone:
            if not _is_face(all_rays, cone, (i,)):
                raise NotAFan(cone, reason=f"ray {i} is not an extremal ray of the cone")
        for face in _faces_of(all_rays, cone):
            faces[face] = None

    for a, b in combinations(range(len(cones)), 2):
        first, second = cones[a], cones[b]
        if first == second:
            raise NotAFan(first, second, reason="cone listed twice")
        common = tuple(i for i in first if i in second)
        if common in (first, second):
            raise NotAFan(first, second, reason="one listed cone is a face of the other")
        if not _separated(all_rays, first, second, common):
            raise NotAFan(first, second)

    face_cones = sorted((_make_cone(all_rays, f) for f in faces), key=lambda c: (c.dim, len(c.rays), c.rays))
    logger.debug(f"[FAN] {len(cones)} maximal cones, {len(face_cones)} cones in total")
    return Fan(
        lattice_rank=n,
        rays=all_rays,
        maximal_cones=tuple(cones),
        cones=tuple(face_cones),
    )


# =========================================
# Queries
# =========================================

def ray_vectors(fan: Fan, cone: Cone) -> list[IntVector]:
    return [fan.rays[i] for i in cone.rays]


def is_simplicial(generators: Sequence[Sequence[int]]) -> bool:
    """True iff the ray generators are linearly independent."""
    if not generators:
        return True
    return rank(generators) == len(generators)


def cone_is_simplicial(fan: Fan, cone: Cone) -> bool:
    return is_simplicial(ray_vectors(fan, cone))


def maximal_containing(fan: Fan, cone: Cone) -> list[Cone]:
    """Maximal cones having `cone` as a face, in input order."""
    members = set(cone.rays)
    return [fan.cone(m) for m in fan.maximal_cones if members.issubset(m)]


def facets_shared(fan: Fan) -> dict[IntVector, list[IntVector]]:
    """Every (n-1)-dimensional cone of the fan with the maximal cones containing it."""
    target = fan.lattice_rank - 1
    return {
        c.rays: [m.rays for m in maximal_containing(fan, c)]
        for c in fan.cones
        if c.dim == target
    }


def is_complete(fan: Fan) -> bool:
    """
    Pure of full dimension, every facet in exactly two maximal cones, and
    the maximal cones connected through shared facets.
    """
    maximal = fan.maximal()
    if not maximal or any(c.dim != fan.lattice_rank for c in maximal):
        return False
    shared = facets_shared(fan)
    if any(len(incident) != 2 for incident in shared.values()):
        return False

    neighbours: dict[IntVector, set[IntVector]] = {c.rays: set() for c in maximal}
    for first, second in shared.values():
        neighbours[first].add(second)
        neighbours[second].add(first)
    start = maximal[0].rays
    seen = {start}
    queue = deque([start])
    while queue:
        for nxt in neighbours[queue.popleft()]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return len(seen) == len(maximal)


def locate(fan: Fan, v: Sequence) -> Optional[Cone]:
    """The minimal cone of the fan containing v, or None outside |Σ|."""
    point = [Fraction(x) for x in v]
    for cone in fan.cones:
        if cone_member(point, ray_vectors(fan, cone)):
            return cone
    return None


# =========================================
# Lattice coordinates on a cone
# =========================================

def coordinate_matrix(cone: Cone) -> Matrix:
    """
    d x n matrix C with C·b = e_k for the saturated basis vectors b of
    N ∩ span(cone); on span(cone) it returns lattice coordinates.
    """
    basis = cone.lattice_basis
    if not basis:
        return ()
    gram = matmul(basis, transpose(basis))
    return matmul(inverse(gram), basis)


def cone_coordinates(cone: Cone, v: Sequence) -> Vector:
    """Coordinates of v ∈ span(cone) in the saturated lattice basis."""
    if not cone.lattice_basis:
        return ()
    coords = matvec(coordinate_matrix(cone), v)
    rebuilt = matvec(transpose(cone.lattice_basis), coords)
    if tuple(rebuilt) != tuple(Fraction(x) for x in v):
        raise ValueError(f"{tuple(v)} is not in the span of cone {cone.rays}")
    return coords

"""
Example corpus: small fans with piecewise linear maps, classes and candidates.

Used by the test-suite and by the `samples` subcommand.
"""

from src.bundles.charclass import psi_from_plmap
from src.bundles.plmap import from_ray_weights
from src.fan import build_fan
from src.models import Fan, Flag, ModuliCandidate, PiecewisePolynomial, PLMap, PsiData, Subspace
from src.utils import polynomials
from src.utils.exactlin import identity, matvec


# =========================================
# Fans
# =========================================

def p1_fan() -> Fan:
    return build_fan(1, [[1], [-1]], [[0], [1]])


def p2_fan() -> Fan:
    return build_fan(2, [[1, 0], [0, 1], [-1, -1]], [[0, 1], [1, 2], [0, 2]])


def p1xp1_fan() -> Fan:
    return build_fan(2, [[1, 0], [0, 1], [-1, 0], [0, -1]], [[0, 1], [1, 2], [2, 3], [0, 3]])


def weighted_plane_fan() -> Fan:
    """Complete simplicial fan with the non-smooth cone spanned by (1,0) and (-1,-2)."""
    return build_fan(2, [[1, 0], [0, 1], [-1, -2]], [[0, 1], [1, 2], [0, 2]])


CUBE_RAYS = [
    [1, 1, 1], [1, 1, -1], [1, -1, 1], [1, -1, -1],
    [-1, 1, 1], [-1, 1, -1], [-1, -1, 1], [-1, -1, -1],
]


def cube_fan() -> Fan:
    """Face fan of the cube [-1,1]^3: six cones over the square faces, none simplicial."""
    faces = []
    for axis in range(3):
        for sign in (1, -1):
            faces.append([i for i, v in enumerate(CUBE_RAYS) if v[axis] == sign])
    return build_fan(3, CUBE_RAYS, faces)


def single_ray_fan() -> Fan:
    return build_fan(1, [[1]], [[0]])


def quadrant_fan() -> Fan:
    """One cone, not complete."""
    return build_fan(2, [[1, 0], [0, 1]], [[0, 1]])


# =========================================
# Piecewise linear maps
# =========================================

def _from_rays(fan: Fan, rank: int, frames: dict, weights: list) -> PLMap:
    charts = tuple(
        from_ray_weights(
            fan, rank, cone,
            frames.get(cone, identity(rank)),
            [weights[i] for i in cone],
        )
        for cone in fan.maximal_cones
    )
    return PLMap(fan=fan, rank=rank, charts=charts)


def p1_plmap() -> PLMap:
    """Weights (2,1) along the positive ray in the standard frame, zero on the other side."""
    return _from_rays(p1_fan(), 2, {}, [(2, 1), (0, 0)])


def p2_lines_plmap() -> PLMap:
    """Each ray sends its generator to the weights (1,0) on the lines <e1>, <e2>, <e1+e2>."""
    fan = p2_fan()
    e1, e2, e12 = (1, 0), (0, 1), (1, 1)

    def frame(a, b):
        return tuple(zip(a, b))

    frames = {(0, 1): frame(e1, e2), (1, 2): frame(e2, e12), (0, 2): frame(e1, e12)}
    charts = tuple(
        from_ray_weights(fan, 2, cone, frames[cone], [(1, 0), (0, 1)])
        for cone in fan.maximal_cones
    )
    return PLMap(fan=fan, rank=2, charts=charts)


def p1xp1_plmap() -> PLMap:
    return _from_rays(p1xp1_fan(), 2, {}, [(1, 0), (0, 1), (1, 0), (0, 1)])


def weighted_plane_plmap() -> PLMap:
    return _from_rays(weighted_plane_fan(), 2, {}, [(1, 0), (0, 1), (1, 2)])


CUBE_LINEAR = ((1, 0, 0), (0, 1, 1))


def cube_plmap() -> PLMap:
    """The split map v ↦ M·v in the standard frame on every cone of the cube fan."""
    fan = cube_fan()
    return _from_rays(fan, 2, {}, [matvec(CUBE_LINEAR, v) for v in fan.rays])


def single_ray_plmap(weights) -> PLMap:
    return _from_rays(single_ray_fan(), len(weights), {}, [tuple(weights)])


def plmaps() -> dict[str, PLMap]:
    return {
        "p1": p1_plmap(),
        "p2": p2_lines_plmap(),
        "p1xp1": p1xp1_plmap(),
        "weighted_plane": weighted_plane_plmap(),
        "cube": cube_plmap(),
    }


# =========================================
# Classes and candidates
# =========================================

def non_split_psi() -> PsiData:
    """Ψ on P¹ with (c1, c2) = (1, 1) at the positive ray: t² - t + 1 has no integer root."""
    fan = p1_fan()
    ring = polynomials.lattice_ring(1)
    t = ring.gens[0]
    e1 = PiecewisePolynomial(fan=fan, pieces=(t, ring.zero))
    e2 = PiecewisePolynomial(fan=fan, pieces=(t ** 2, ring.zero))
    return PsiData(rank=2, classes=(e1, e2))


def p2_lines_candidate() -> ModuliCandidate:
    lines = [(1, 0), (0, 1), (1, 1)]
    flags = tuple(
        Flag(ambient=2, steps=(Subspace.spanned_by(2, [line]), Subspace.whole(2)))
        for line in lines
    )
    return ModuliCandidate(fan=p2_fan(), rank=2, flags=flags)


def samples() -> dict[str, dict]:
    """Every corpus example as (fan, plmap, psi) triples keyed by name."""
    out = {}
    for name, phi in plmaps().items():
        out[name] = {"fan": phi.fan, "plmap": phi, "psi": psi_from_plmap(phi)}
    return out


__all__ = [
    "cube_fan",
    "cube_plmap",
    "non_split_psi",
    "p1_fan",
    "p1_plmap",
    "p1xp1_fan",
    "p1xp1_plmap",
    "p2_fan",
    "p2_lines_candidate",
    "p2_lines_plmap",
    "plmaps",
    "quadrant_fan",
    "samples",
    "single_ray_fan",
    "single_ray_plmap",
    "weighted_plane_fan",
    "weighted_plane_plmap",
]

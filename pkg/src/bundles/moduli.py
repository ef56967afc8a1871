"""
Framed toric principal GL(r)-bundles with a fixed characteristic class Ψ,
described as tuples of flags (one per ray) satisfying the compatibility
conditions cone by cone.

For a maximal cone σ the check is:
  1. find a basis adapted to the flags of all rays of σ (a common torus);
  2. read off γ_ρ: each basis vector gets the weight of the first flag step
     containing it, with the weights of the dominant representative of Ψ at v_ρ;
  3. simplicial cones are accepted; otherwise every linear relation among
     the v_ρ must also hold among the γ_ρ.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import product
from math import prod
from typing import Optional, Sequence

from src.building import flags as building
from src.building.weyl import coordinate_flag, fixed_point_labels, multinomial, parabolic_type
from src.bundles import charclass, plmap
from src.errors import CensusTooLarge, NonLinearChart, ReconstructionInconsistent, TypeMismatch
from src.fan import cone_is_simplicial, ray_vectors
from src.models import (
    Cone,
    ConeWitness,
    DominantWeight,
    Fan,
    Flag,
    IntVector,
    Matrix,
    ModuliCandidate,
    PLMap,
    PsiData,
    Verdict,
    VerdictStatus,
    as_matrix,
)
from src.utils import polynomials
from src.utils.exactlin import columns, identity, inverse, kernel_basis, transpose

logger = logging.getLogger(__name__)


# =========================================
# Ray data
# =========================================

def ray_data(psi: PsiData) -> list[DominantWeight]:
    """Dominant weight of Ψ at every ray, in fan ray order."""
    return [charclass.psi_ray_weights(psi, i) for i in range(len(psi.fan.rays))]


def check_types(cand: ModuliCandidate, dominants: Sequence[DominantWeight]) -> None:
    for i, (flag, dominant) in enumerate(zip(cand.flags, dominants)):
        expected = parabolic_type(dominant).blocks
        if flag.composition != expected:
            raise TypeMismatch(i, expected, flag.composition)


def cocharacter(basis: Matrix, flag: Flag, dominant: DominantWeight) -> IntVector:
    """γ_ρ in basis coordinates: the weight of the first step containing each basis vector."""
    levels = sorted(set(dominant.weights), reverse=True)
    gamma = []
    for vector in columns(basis):
        step = next(j for j, space in enumerate(flag.steps) if space.contains(vector))
        gamma.append(levels[step])
    return tuple(gamma)


# =========================================
# Membership
# =========================================

def _check_cone(
    fan: Fan,
    cone: Cone,
    cand: ModuliCandidate,
    dominants: Sequence[DominantWeight],
    basis: Optional[Matrix] = None,
    psi: Optional[PsiData] = None,
) -> ConeWitness:
    flags = [cand.flags[i] for i in cone.rays]
    if basis is None:
        basis = building.common_splitting(flags, rank_hint=cand.rank)
    if basis is None:
        return ConeWitness(
            cone=cone.rays,
            status=VerdictStatus.REJECTED,
            reason="the flags at the rays of the cone have no common adapted basis",
        )
    gammas = tuple(cocharacter(basis, cand.flags[i], dominants[i]) for i in cone.rays)

    if not cone_is_simplicial(fan, cone):
        relations = kernel_basis(transpose(ray_vectors(fan, cone)), len(cone.rays))
        residuals = tuple(
            tuple(sum((c * g[k] for c, g in zip(relation, gammas)), Fraction(0)) for k in range(cand.rank))
            for relation in relations
        )
        if any(any(x != 0 for x in res) for res in residuals):
            return ConeWitness(
                cone=cone.rays,
                status=VerdictStatus.INDETERMINATE,
                basis=basis,
                cocharacters=gammas,
                reason="the cocharacters of this splitting break a linear relation among the rays",
                kernel=tuple(relations),
                residuals=residuals,
            )

    if psi is not None:
        mismatch = _class_mismatch(fan, cone, cand.rank, basis, gammas, psi)
        if mismatch is not None:
            return ConeWitness(
                cone=cone.rays,
                status=VerdictStatus.REJECTED,
                basis=basis,
                cocharacters=gammas,
                reason=mismatch,
            )

    return ConeWitness(cone=cone.rays, status=VerdictStatus.ACCEPTED, basis=basis, cocharacters=gammas)


def _class_mismatch(fan: Fan, cone: Cone, rank: int, basis: Matrix, gammas, psi: PsiData) -> Optional[str]:
    """Compare Ψ with the class of the linear map the cocharacters span, on a maximal cone."""
    if cone.rays not in fan.maximal_cones:
        return None
    chart = plmap.from_ray_weights(fan, rank, cone.rays, basis, gammas)
    local = PLMap(fan=fan, rank=rank, charts=(chart,))
    position = fan.maximal_cones.index(cone.rays)
    forms = charclass.linear_forms(local, cone.rays)
    for k, cls in enumerate(psi.classes, start=1):
        expected = polynomials.substitute(
            charclass.elementary_symmetric(rank, k), polynomials.lattice_ring(fan.lattice_rank), forms
        )
        if expected != cls.pieces[position]:
            return f"class {k} on this cone differs from the class of the cocharacters"
    return None


def _aggregate(witnesses: list[ConeWitness]) -> Verdict:
    witnesses = sorted(witnesses, key=lambda w: w.cone)
    statuses = {w.status for w in witnesses}
    if VerdictStatus.REJECTED in statuses:
        status = VerdictStatus.REJECTED
    elif VerdictStatus.INDETERMINATE in statuses:
        status = VerdictStatus.INDETERMINATE
    else:
        status = VerdictStatus.ACCEPTED
    return Verdict(status=status, witnesses=tuple(witnesses))


def _run(fan: Fan, cones: list[Cone], cand: ModuliCandidate, dominants, parallel: int, psi) -> Verdict:
    def job(cone: Cone) -> ConeWitness:
        return _check_cone(fan, cone, cand, dominants, psi=psi)

    if parallel > 1 and len(cones) > 1:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            witnesses = list(pool.map(job, cones))
    else:
        witnesses = [job(c) for c in cones]
    return _aggregate(witnesses)


def check_membership(
    fan: Fan,
    psi: PsiData,
    cand: ModuliCandidate,
    parallel: int = 1,
    strict: bool = False,
) -> Verdict:
    """
    Compatibility check of a candidate against Ψ on every maximal cone.

    With strict=True, Ψ restricted to each maximal cone must also equal
    the class of the linear map spanned by the cocharacters, not only
    match it at the ray generators.
    """
    dominants = ray_data(psi)
    check_types(cand, dominants)
    verdict = _run(fan, fan.maximal(), cand, dominants, parallel, psi if strict else None)
    logger.info(f"[MODULI] verdict {verdict.status.value} over {len(verdict.witnesses)} maximal cones")
    return verdict


def check_all_cones(fan: Fan, psi: PsiData, cand: ModuliCandidate, parallel: int = 1) -> Verdict:
    """The same check on every nonzero cone of the fan, faces included."""
    dominants = ray_data(psi)
    check_types(cand, dominants)
    cones = [c for c in fan.cones if c.rays]
    return _run(fan, cones, cand, dominants, parallel, None)


# =========================================
# Reconstruction and the forward map
# =========================================

def reconstruct_plmap(fan: Fan, psi: PsiData, cand: ModuliCandidate, verdict: Verdict) -> PLMap:
    """The piecewise linear map behind an accepted candidate: chart frames are the witness bases."""
    if verdict.status != VerdictStatus.ACCEPTED:
        raise ReconstructionInconsistent(f"cannot reconstruct from a {verdict.status.value} verdict")
    witnesses = {w.cone: w for w in verdict.witnesses}
    charts = []
    for rays in fan.maximal_cones:
        witness = witnesses.get(rays)
        if witness is None or witness.basis is None:
            raise ReconstructionInconsistent(f"no witness for maximal cone {rays}")
        try:
            charts.append(plmap.from_ray_weights(fan, cand.rank, rays, witness.basis, witness.cocharacters))
        except NonLinearChart as e:
            raise ReconstructionInconsistent(str(e)) from e
    phi = PLMap(fan=fan, rank=cand.rank, charts=tuple(charts))
    violations = plmap.validate(phi)
    if violations:
        raise ReconstructionInconsistent(f"reconstructed map is invalid: {violations[0].kind} on {violations[0].cone}")
    rebuilt = charclass.psi_from_plmap(phi)
    for k, (mine, theirs) in enumerate(zip(rebuilt.classes, psi.classes), start=1):
        if not charclass.pp_equal(mine, theirs):
            raise ReconstructionInconsistent(f"class {k} of the reconstructed map differs from Ψ")
    return phi


def candidate_from_plmap(phi: PLMap) -> ModuliCandidate:
    """The flag underlying Φ(v_ρ) at every ray."""
    flags = tuple(wf.flag for wf in plmap.ray_flags(phi))
    return ModuliCandidate(fan=phi.fan, rank=phi.rank, flags=flags)


def act(g, cand: ModuliCandidate) -> ModuliCandidate:
    g = as_matrix(g)
    return ModuliCandidate(
        fan=cand.fan,
        rank=cand.rank,
        flags=tuple(building.act(g, f) for f in cand.flags),
    )


def orbit_decomposition(cand: ModuliCandidate, verdict: Verdict) -> list[tuple[IntVector, Matrix, tuple[IntVector, ...]]]:
    """
    For every cone with a witness basis g: (cone, g, labels) where labels
    describe torus-fixed coordinate flags x_ρ with flag_ρ = g·x_ρ.
    """
    out = []
    for witness in verdict.witnesses:
        if witness.basis is None:
            continue
        g = witness.basis
        g_inv = inverse(g)
        labels = []
        for i in witness.cone:
            local = building.act(g_inv, cand.flags[i])
            labels.append(tuple(
                next(j for j, step in enumerate(local.steps) if step.contains(e))
                for e in identity(cand.rank)
            ))
        out.append((witness.cone, g, tuple(labels)))
    return out


# =========================================
# Census of torus-fixed points
# =========================================

def census_size(psi: PsiData) -> int:
    return prod(multinomial(parabolic_type(d)) for d in ray_data(psi))


def census(fan: Fan, psi: PsiData, limit: int = 20000, parallel: int = 1, strict: bool = False) -> list[ModuliCandidate]:
    """
    Every tuple of coordinate flags of the right types that passes the
    compatibility check with the standard basis as common torus on every
    maximal cone. Order: lexicographic in the per-ray fixed-point labels.
    """
    dominants = ray_data(psi)
    size = prod(multinomial(parabolic_type(d)) for d in dominants)
    if size > limit:
        raise CensusTooLarge(size, limit)
    logger.info(f"[CENSUS] enumerating {size} torus-fixed tuples")

    options = [[coordinate_flag(labels) for labels in fixed_point_labels(parabolic_type(d))] for d in dominants]
    standard = identity(psi.rank)
    maximal = fan.maximal()

    def keep(choice) -> Optional[ModuliCandidate]:
        cand = ModuliCandidate(fan=fan, rank=psi.rank, flags=tuple(choice))
        for cone in maximal:
            witness = _check_cone(fan, cone, cand, dominants, basis=standard, psi=psi if strict else None)
            if witness.status != VerdictStatus.ACCEPTED:
                return None
        return cand

    choices = list(product(*options))
    if parallel > 1 and len(choices) > 1:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(keep, choices))
    else:
        results = [keep(c) for c in choices]
    points = [c for c in results if c is not None]
    logger.info(f"[CENSUS] {len(points)} of {size} tuples pass")
    return points

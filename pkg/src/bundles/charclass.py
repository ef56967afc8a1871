"""
Piecewise polynomial functions on a fan and equivariant characteristic classes.

A PiecewisePolynomial keeps one polynomial per maximal cone in the ring
lattice_ring(n). For a piecewise linear map Φ and a symmetric polynomial
q in r variables, chern_weil(Φ, q) is q(A_σ·coords(v)) on every cone σ;
the frame of the chart never enters.
"""

import logging
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from sympy.polys.rings import PolyElement

from src.building.weyl import parabolic_type
from src.errors import NonIntegralOrbit, NotSymmetric, PointOutsideSupport
from src.fan import coordinate_matrix, locate, maximal_containing
from src.models import DominantWeight, Fan, ParabolicType, PiecewisePolynomial, PLMap, PsiData
from src.utils import polynomials
from src.utils.exactlin import matmul

logger = logging.getLogger(__name__)


def elementary_symmetric(r: int, k: int) -> PolyElement:
    return polynomials.elementary_symmetric(polynomials.weight_ring(r), k)


def power_sum(r: int, k: int) -> PolyElement:
    return polynomials.power_sum(polynomials.weight_ring(r), k)


# =========================================
# Chern-Weil composition
# =========================================

def linear_forms(phi: PLMap, cone_rays) -> list[PolyElement]:
    """The r weight coordinates of A_σ·C_σ·v as linear forms in t0..t{n-1}."""
    fan = phi.fan
    ring = polynomials.lattice_ring(fan.lattice_rank)
    chart = phi.chart_for(cone_rays)
    combined = matmul(chart.weights_matrix, coordinate_matrix(fan.cone(cone_rays)))
    if not combined:
        return [ring.zero] * phi.rank
    return [polynomials.linear_form(ring, row) for row in combined]


def chern_weil(phi: PLMap, q: PolyElement) -> PiecewisePolynomial:
    if q.ring.ngens != phi.rank:
        raise ValueError(f"q must be a polynomial in {phi.rank} variables")
    if not polynomials.is_symmetric(q):
        raise NotSymmetric(f"{q} is not invariant under permutations of the variables")
    ring = polynomials.lattice_ring(phi.fan.lattice_rank)
    pieces = tuple(
        polynomials.substitute(q, ring, linear_forms(phi, rays))
        for rays in phi.fan.maximal_cones
    )
    return PiecewisePolynomial(fan=phi.fan, pieces=pieces)


def psi_from_plmap(phi: PLMap) -> PsiData:
    """Ψ(e_k) = chern_weil(Φ, e_k) for k = 1..r."""
    classes = tuple(chern_weil(phi, elementary_symmetric(phi.rank, k)) for k in range(1, phi.rank + 1))
    return PsiData(rank=phi.rank, classes=classes)


# =========================================
# The ring PP*(Σ)
# =========================================

def constant(fan: Fan, value) -> PiecewisePolynomial:
    ring = polynomials.lattice_ring(fan.lattice_rank)
    c = ring.one * polynomials.to_qq(value)
    return PiecewisePolynomial(fan=fan, pieces=tuple(c for _ in fan.maximal_cones))


def _same_fan(p1: PiecewisePolynomial, p2: PiecewisePolynomial) -> None:
    if p1.fan != p2.fan:
        raise ValueError("piecewise polynomials live on different fans")


def pp_add(p1: PiecewisePolynomial, p2: PiecewisePolynomial) -> PiecewisePolynomial:
    _same_fan(p1, p2)
    return PiecewisePolynomial(fan=p1.fan, pieces=tuple(a + b for a, b in zip(p1.pieces, p2.pieces)))


def pp_mul(p1: PiecewisePolynomial, p2: PiecewisePolynomial) -> PiecewisePolynomial:
    _same_fan(p1, p2)
    return PiecewisePolynomial(fan=p1.fan, pieces=tuple(a * b for a, b in zip(p1.pieces, p2.pieces)))


def pp_equal(p1: PiecewisePolynomial, p2: PiecewisePolynomial) -> bool:
    _same_fan(p1, p2)
    return all(
        polynomials.to_terms(a) == polynomials.to_terms(b)
        for a, b in zip(p1.pieces, p2.pieces)
    )


def evaluate_pp(p: PiecewisePolynomial, v: Sequence) -> Fraction:
    cone = locate(p.fan, v)
    if cone is None:
        raise PointOutsideSupport(v)
    maximal = maximal_containing(p.fan, cone)[0]
    return polynomials.evaluate(p.pieces[p.fan.maximal_cones.index(maximal.rays)], v)


def face_disagreements(p: PiecewisePolynomial) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """
    Pairs of maximal cones whose polynomials differ on the span of their
    common face, found by substituting a parametrization of that span.
    """
    fan = p.fan
    n = fan.lattice_rank
    bad = []
    for a, b in combinations(range(len(fan.maximal_cones)), 2):
        common = tuple(i for i in fan.maximal_cones[a] if i in fan.maximal_cones[b])
        face = fan.cone(common)
        difference = p.pieces[a] - p.pieces[b]
        if not face.lattice_basis:
            agree = polynomials.evaluate(difference, [0] * n) == 0
        else:
            params = polynomials.lattice_ring(len(face.lattice_basis))
            images = [
                polynomials.linear_form(params, [b_vec[i] for b_vec in face.lattice_basis])
                for i in range(n)
            ]
            agree = polynomials.substitute(difference, params, images) == params.zero
        if not agree:
            bad.append((fan.maximal_cones[a], fan.maximal_cones[b]))
    return bad


# =========================================
# Ray data of Ψ
# =========================================

def check_psi(psi: PsiData) -> list[str]:
    """Problems with Ψ as a list of messages; a degree above k for Ψ(e_k) only logs a warning."""
    problems = []
    for k, cls in enumerate(psi.classes, start=1):
        for first, second in face_disagreements(cls):
            problems.append(f"class {k} disagrees on the common face of {first} and {second}")
        degree = max((polynomials.total_degree(piece) for piece in cls.pieces), default=0)
        if degree > k:
            logger.warning(f"[PSI] class {k} has degree {degree}, expected at most {k}")
    return problems


def ray_coefficients(psi: PsiData, ray: int) -> tuple[Fraction, ...]:
    """c_k = Ψ(e_k)(v_ρ) for k = 1..r."""
    v = psi.fan.rays[ray]
    return tuple(evaluate_pp(cls, v) for cls in psi.classes)


def psi_ray_weights(psi: PsiData, ray: int) -> DominantWeight:
    """
    The dominant weight whose elementary symmetric values are the c_k at
    v_ρ: the integer roots of t^r - c_1 t^(r-1) + c_2 t^(r-2) - ... ± c_r.
    """
    c = ray_coefficients(psi, ray)
    roots = polynomials.integer_roots_of_monic([(-1) ** k * ck for k, ck in enumerate(c, start=1)])
    if roots is None:
        raise NonIntegralOrbit(ray, c)
    return DominantWeight(weights=tuple(roots))


def psi_ray_parabolic(psi: PsiData, ray: int) -> ParabolicType:
    return parabolic_type(psi_ray_weights(psi, ray))

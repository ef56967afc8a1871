"""
Test piecewise polynomials, the Chern-Weil composition and ray data of Ψ.
"""

import random
from fractions import Fraction

import pytest

from src.bundles.charclass import (
    check_psi,
    chern_weil,
    constant,
    elementary_symmetric,
    evaluate_pp,
    face_disagreements,
    pp_add,
    pp_equal,
    pp_mul,
    power_sum,
    psi_from_plmap,
    psi_ray_parabolic,
    psi_ray_weights,
)
from src.errors import NonIntegralOrbit, NotSymmetric
from src.models import PiecewisePolynomial, PLMap, PsiData
from src.utils import corpus, polynomials
from src.utils.exactlin import det, matmul
from src.utils.polynomials import integer_roots_of_monic


def t_ring():
    ring = polynomials.lattice_ring(1)
    return ring, ring.gens[0]


def test_chern_weil_on_p1():
    phi = corpus.p1_plmap()
    ring, t = t_ring()
    assert chern_weil(phi, elementary_symmetric(2, 1)).pieces == (3 * t, ring.zero)
    assert chern_weil(phi, elementary_symmetric(2, 2)).pieces == (2 * t ** 2, ring.zero)
    assert chern_weil(phi, power_sum(2, 2)).pieces == (5 * t ** 2, ring.zero)
    unit = polynomials.weight_ring(2).one
    assert pp_equal(chern_weil(phi, unit), constant(phi.fan, 1))


def test_chern_weil_rejects_bad_generators():
    phi = corpus.p1_plmap()
    x0 = polynomials.weight_ring(2).gens[0]
    with pytest.raises(NotSymmetric):
        chern_weil(phi, x0)
    with pytest.raises(ValueError):
        chern_weil(phi, elementary_symmetric(3, 1))


def test_chern_weil_is_a_ring_homomorphism():
    for phi in corpus.plmaps().values():
        e1 = elementary_symmetric(phi.rank, 1)
        e2 = elementary_symmetric(phi.rank, 2)
        assert pp_equal(chern_weil(phi, e1 * e2), pp_mul(chern_weil(phi, e1), chern_weil(phi, e2)))
        assert pp_equal(chern_weil(phi, e1 + e2), pp_add(chern_weil(phi, e1), chern_weil(phi, e2)))


def test_chern_weil_classes_glue_across_faces():
    for phi in corpus.plmaps().values():
        psi = psi_from_plmap(phi)
        assert check_psi(psi) == []
        assert all(face_disagreements(cls) == [] for cls in psi.classes)


def test_pp_equal():
    fan = corpus.p1_fan()
    ring, t = t_ring()
    a = PiecewisePolynomial(fan=fan, pieces=(3 * t, ring.zero))
    b = PiecewisePolynomial(fan=fan, pieces=(3 * t + t ** 2, ring.zero))
    assert pp_equal(a, a)
    assert not pp_equal(a, b)
    shuffled = polynomials.from_terms(ring, [(1, (2,)), (3, (1,))])
    ordered = polynomials.from_terms(ring, [(3, (1,)), (1, (2,))])
    assert pp_equal(
        PiecewisePolynomial(fan=fan, pieces=(shuffled, ring.zero)),
        PiecewisePolynomial(fan=fan, pieces=(ordered, ring.zero)),
    )


def test_evaluate_pp():
    cls = chern_weil(corpus.p1_plmap(), elementary_symmetric(2, 1))
    assert evaluate_pp(cls, (2,)) == 6
    assert evaluate_pp(cls, (-3,)) == 0


def test_face_disagreement_detected():
    fan = corpus.p2_fan()
    ring = polynomials.lattice_ring(2)
    t0, t1 = ring.gens
    # t0 on cone {0,1} and 0 elsewhere: disagrees along ray 0 shared with cone {0,2}
    cls = PiecewisePolynomial(fan=fan, pieces=(t0, ring.zero, ring.zero))
    assert face_disagreements(cls) == [((0, 1), (0, 2))]
    problems = check_psi(PsiData(rank=1, classes=(cls,)))
    assert len(problems) == 1


def test_ray_weights():
    psi = psi_from_plmap(corpus.p1_plmap())
    assert psi_ray_weights(psi, 0).weights == (2, 1)
    assert psi_ray_weights(psi, 1).weights == (0, 0)
    assert psi_ray_parabolic(psi, 0).blocks == (1, 1)
    assert psi_ray_parabolic(psi, 1).blocks == (2,)

    cube = psi_from_plmap(corpus.cube_plmap())
    # (1,1,1) maps to (1, 2)
    assert psi_ray_weights(cube, 0).weights == (2, 1)


def test_non_split_ray_data():
    with pytest.raises(NonIntegralOrbit) as excinfo:
        psi_ray_weights(corpus.non_split_psi(), 0)
    assert excinfo.value.ray == 0
    assert "NonIntegralOrbit at ray 0" in str(excinfo.value)


def test_integer_roots_of_monic():
    assert integer_roots_of_monic([-3, 2]) == [2, 1]
    assert integer_roots_of_monic([0, 0]) == [0, 0]
    assert integer_roots_of_monic([-1, 1]) is None
    assert integer_roots_of_monic([Fraction(1, 2)]) is None
    # (t - 3)(t + 1)(t - 0)
    assert integer_roots_of_monic([-2, -3, 0]) == [3, 0, -1]


def random_symmetric(rng: random.Random, r: int):
    """An integer combination of the symmetric monomials of degree at most 3."""
    e = [elementary_symmetric(r, k) if k <= r else None for k in range(4)]
    basis = [e[0], e[1], e[1] ** 2, e[1] ** 3, e[2], e[1] * e[2], power_sum(r, 2), power_sum(r, 3)]
    if e[3] is not None:
        basis.append(e[3])
    return sum((rng.randint(-3, 3) * b for b in basis), e[0].ring.zero)


def random_frame(rng: random.Random, r: int):
    while True:
        g = tuple(tuple(rng.randint(-3, 3) for _ in range(r)) for _ in range(r))
        if det(g) != 0:
            return g


@pytest.mark.parametrize("name", sorted(corpus.plmaps()))
def test_chern_weil_is_a_ring_homomorphism_on_random_pairs(name):
    phi = corpus.plmaps()[name]
    rng = random.Random(23)
    for _ in range(50):
        p = random_symmetric(rng, phi.rank)
        q = random_symmetric(rng, phi.rank)
        cp, cq = chern_weil(phi, p), chern_weil(phi, q)
        assert pp_equal(chern_weil(phi, p * q), pp_mul(cp, cq))
        assert pp_equal(chern_weil(phi, p + q), pp_add(cp, cq))


@pytest.mark.parametrize("name", sorted(corpus.plmaps()))
def test_chern_weil_ignores_frames_cone_by_cone(name):
    phi = corpus.plmaps()[name]
    rng = random.Random(29)
    q = elementary_symmetric(phi.rank, 1) ** 2 + power_sum(phi.rank, 2)
    expected = [chern_weil(phi, elementary_symmetric(phi.rank, k)) for k in range(1, phi.rank + 1)]
    expected.append(chern_weil(phi, q))
    for position in range(len(phi.charts)):
        charts = list(phi.charts)
        charts[position] = charts[position].model_copy(
            update={"frame": matmul(random_frame(rng, phi.rank), charts[position].frame)}
        )
        moved = PLMap(fan=phi.fan, rank=phi.rank, charts=tuple(charts))
        found = [chern_weil(moved, elementary_symmetric(phi.rank, k)) for k in range(1, phi.rank + 1)]
        found.append(chern_weil(moved, q))
        assert all(pp_equal(a, b) for a, b in zip(found, expected))

"""
Test piecewise linear maps: charts, evaluation, face agreement and integrality.
"""

import random
from fractions import Fraction
from itertools import product

import pytest

from src.building.flags import act_weighted, wf_equal
from src.bundles import moduli
from src.bundles.charclass import pp_equal, psi_from_plmap
from src.bundles.plmap import (
    chart_weights,
    evaluate,
    from_ray_weights,
    klyachko_filtrations,
    ray_flags,
    transform,
    validate,
)
from src.errors import NonLinearChart, PointOutsideSupport
from src.fan import build_fan, locate, maximal_containing
from src.models import PLMap, Subspace
from src.utils import corpus
from src.utils.exactlin import identity

Q2 = Subspace.whole(2)
SWAP = ((0, 1), (1, 0))


def random_invertible(rng: random.Random):
    while True:
        g = tuple(tuple(rng.randint(-3, 3) for _ in range(2)) for _ in range(2))
        if g[0][0] * g[1][1] - g[0][1] * g[1][0] != 0:
            return g


def test_evaluate_on_p1():
    phi = corpus.p1_plmap()
    at_one = evaluate(phi, (1,))
    assert at_one.flag.steps == (Subspace.spanned_by(2, [(1, 0)]), Q2)
    assert at_one.weights == (2, 1)
    for v in [(0,), (-2,)]:
        value = evaluate(phi, v)
        assert value.flag.steps == (Q2,)
        assert value.weights == (0,)


def test_evaluate_outside_support():
    fan = corpus.quadrant_fan()
    phi = PLMap(fan=fan, rank=1, charts=(from_ray_weights(fan, 1, (0, 1), identity(1), [(1,), (2,)]),))
    with pytest.raises(PointOutsideSupport):
        evaluate(phi, (-1, -1))


def test_corpus_maps_are_valid():
    for name, phi in corpus.plmaps().items():
        assert validate(phi) == [], name


def test_face_agreement_only_depends_on_shared_faces():
    fan = corpus.p1_fan()
    phi = PLMap(fan=fan, rank=2, charts=(
        from_ray_weights(fan, 2, (0,), identity(2), [(2, 1)]),
        from_ray_weights(fan, 2, (1,), SWAP, [(2, 1)]),
    ))
    assert validate(phi) == []


def test_face_disagreement():
    """Two charts that put different lines at a shared ray."""
    fan = corpus.p2_fan()
    e2_e12 = ((0, 1), (1, 1))
    good = corpus.p2_lines_plmap()
    bad_chart = from_ray_weights(fan, 2, (0, 2), e2_e12, [(1, 0), (0, 1)])
    charts = tuple(bad_chart if c.cone == (0, 2) else c for c in good.charts)
    violations = validate(PLMap(fan=fan, rank=2, charts=charts))
    kinds = {(v.kind, v.cone) for v in violations}
    assert ("FaceDisagreement", (0,)) in kinds
    assert all(v.kind == "FaceDisagreement" for v in violations)


def test_integrality_violation():
    fan = build_fan(2, [[1, 0], [1, 2]], [[0, 1]])
    chart = from_ray_weights(fan, 2, (0, 1), identity(2), [(1, 0), (0, 1)])
    assert chart.weights_matrix[0][1] == Fraction(-1, 2)
    violations = validate(PLMap(fan=fan, rank=2, charts=(chart,)))
    assert [v.kind for v in violations] == ["IntegralityViolation"]


def test_missing_and_malformed_charts():
    good = corpus.p2_lines_plmap()
    violations = validate(PLMap(fan=good.fan, rank=2, charts=good.charts[:2]))
    assert [v.kind for v in violations] == ["ChartMissing"]

    singular = good.charts[0].model_copy(update={"frame": ((1, 1), (1, 1))})
    violations = validate(PLMap(fan=good.fan, rank=2, charts=(singular,) + good.charts[1:]))
    assert any(v.kind == "ChartShape" for v in violations)


def test_non_linear_ray_data():
    cube = corpus.cube_fan()
    cone = cube.maximal_cones[0]
    with pytest.raises(NonLinearChart):
        from_ray_weights(cube, 1, cone, identity(1), [(1,), (0,), (0,), (0,)])


def test_validate_is_independent_of_parallelism():
    fan = corpus.p2_fan()
    charts = tuple(
        from_ray_weights(fan, 2, c.cone, ((0, 1), (1, 1)), [(1, 0), (0, 1)]) if c.cone == (0, 2) else c
        for c in corpus.p2_lines_plmap().charts
    )
    phi = PLMap(fan=fan, rank=2, charts=charts)
    assert validate(phi, parallel=1) == validate(phi, parallel=4)


def test_ray_flags_and_klyachko():
    phi = corpus.p2_lines_plmap()
    lines = [(1, 0), (0, 1), (1, 1)]
    for wf, v in zip(ray_flags(phi), lines):
        assert wf.flag.steps[0] == Subspace.spanned_by(2, [v])
        assert wf.weights == (1, 0)
    filtrations = klyachko_filtrations(phi)
    assert [f.pieces[-1] for f in filtrations] == [(1, Subspace.spanned_by(2, [v])) for v in lines]


def test_transform_moves_candidate_and_keeps_classes():
    rng = random.Random(29)
    phi = corpus.p2_lines_plmap()
    base = moduli.candidate_from_plmap(phi)
    psi = psi_from_plmap(phi)
    for _ in range(10):
        g = random_invertible(rng)
        moved = transform(phi, g)
        assert moduli.candidate_from_plmap(moved) == moduli.act(g, base)
        for mine, theirs in zip(psi_from_plmap(moved).classes, psi.classes):
            assert pp_equal(mine, theirs)
        v = (rng.randint(-4, 4), rng.randint(-4, 4))
        assert wf_equal(evaluate(moved, v), act_weighted(g, evaluate(phi, v)))


def lattice_box(n: int, bound: int):
    return product(range(-bound, bound + 1), repeat=n)


@pytest.mark.parametrize("name", sorted(corpus.plmaps()))
def test_evaluate_is_positively_homogeneous(name):
    phi = corpus.plmaps()[name]
    for v in lattice_box(phi.fan.lattice_rank, 2):
        base = evaluate(phi, v)
        for c in (2, 3):
            scaled = evaluate(phi, tuple(c * x for x in v))
            assert scaled.flag == base.flag
            assert scaled.weights == tuple(c * w for w in base.weights)


@pytest.mark.parametrize("name", sorted(corpus.plmaps()))
def test_lattice_points_get_integral_weights(name):
    phi = corpus.plmaps()[name]
    for v in lattice_box(phi.fan.lattice_rank, 3 if phi.fan.lattice_rank < 3 else 2):
        cone = locate(phi.fan, v)
        assert cone is not None
        for maximal in maximal_containing(phi.fan, cone):
            weights = chart_weights(phi.fan, phi.chart_for(maximal.rays), v)
            assert all(Fraction(w).denominator == 1 for w in weights)
        assert all(Fraction(w).denominator == 1 for w in evaluate(phi, v).weights)

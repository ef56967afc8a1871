"""
Piecewise linear maps from the support of a fan to the extended building.

Each maximal cone σ carries a chart: a frame g_σ (an apartment) and an
integer matrix A_σ acting on lattice coordinates of N ∩ span(σ). The
value at v ∈ σ is the weighted flag of (g_σ, A_σ·coords(v)).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from src.building.flags import klyachko_from_flag, weighted_flag_from_frame
from src.errors import NonLinearChart, PointOutsideSupport
from src.fan import cone_coordinates, locate, maximal_containing
from src.models import (
    Chart,
    Cone,
    Fan,
    KlyachkoFiltration,
    PLMap,
    Subspace,
    Violation,
    WeightedFlag,
    as_matrix,
    as_vector,
)
from src.utils.exactlin import columns, det, fm_feasible, matmul, matvec, solve

logger = logging.getLogger(__name__)


# =========================================
# Charts
# =========================================

def from_ray_weights(fan: Fan, rank: int, cone_rays: Sequence[int], frame, ray_weights: Sequence[Sequence]) -> Chart:
    """
    Chart whose weight vector at each ray generator of the cone is given
    (same order as the sorted ray indices). The weights matrix on the
    saturated basis is solved exactly; data that is not the restriction of
    a linear map raises NonLinearChart.
    """
    cone = fan.cone(cone_rays)
    if len(ray_weights) != len(cone.rays):
        raise NonLinearChart(cone.rays, f"expected {len(cone.rays)} ray weight vectors, got {len(ray_weights)}")
    coords = [cone_coordinates(cone, fan.rays[i]) for i in cone.rays]
    targets = [as_vector(w) for w in ray_weights]
    if any(len(w) != rank for w in targets):
        raise NonLinearChart(cone.rays, f"ray weight vectors must have {rank} entries")
    rows = []
    for i in range(rank):
        solution = solve(coords, [w[i] for w in targets])
        if solution is None:
            raise NonLinearChart(cone.rays, f"weight coordinate {i} is not linear in the ray generators")
        rows.append(solution)
    return Chart(cone=cone.rays, frame=as_matrix(frame), weights_matrix=tuple(rows))


def chart_weights(fan: Fan, chart: Chart, v: Sequence) -> tuple[Fraction, ...]:
    """A_σ·coords(v) for a point of span(σ)."""
    return matvec(chart.weights_matrix, cone_coordinates(fan.cone(chart.cone), v))


# =========================================
# Evaluation
# =========================================

def evaluate(phi: PLMap, v: Sequence) -> WeightedFlag:
    cone = locate(phi.fan, v)
    if cone is None:
        raise PointOutsideSupport(v)
    maximal = maximal_containing(phi.fan, cone)[0]
    chart = phi.chart_for(maximal.rays)
    return weighted_flag_from_frame(chart.frame, chart_weights(phi.fan, chart, v))


def ray_flags(phi: PLMap) -> tuple[WeightedFlag, ...]:
    """Φ(v_ρ) for every ray, in fan ray order."""
    return tuple(evaluate(phi, ray) for ray in phi.fan.rays)


def klyachko_filtrations(phi: PLMap) -> tuple[KlyachkoFiltration, ...]:
    return tuple(klyachko_from_flag(wf) for wf in ray_flags(phi))


def transform(phi: PLMap, g) -> PLMap:
    """Change of framing: every chart frame g_σ becomes g·g_σ."""
    g = as_matrix(g)
    charts = tuple(
        Chart(cone=c.cone, frame=matmul(g, c.frame), weights_matrix=c.weights_matrix)
        for c in phi.charts
    )
    return PLMap(fan=phi.fan, rank=phi.rank, charts=charts)


# =========================================
# Validation
# =========================================

def _shape_problems(chart: Chart, cone: Cone, rank: int) -> Optional[str]:
    frame = chart.frame
    if len(frame) != rank or any(len(row) != rank for row in frame):
        return f"frame must be {rank}x{rank}"
    if det(frame) == 0:
        return "frame is singular"
    a = chart.weights_matrix
    if len(a) != rank or any(len(row) != cone.dim for row in a):
        return f"weights matrix must be {rank}x{cone.dim}"
    return None


def _normalized(vector: Sequence[Fraction]) -> tuple[Optional[tuple], int]:
    lead = next((x for x in vector if x != 0), None)
    if lead is None:
        return None, 0
    return tuple(x / lead for x in vector), (1 if lead > 0 else -1)


def _arrangement_cells(k: int, hyperplanes: list[tuple]) -> list[tuple[int, ...]]:
    """
    Sign vectors realized on {c ∈ Q^k : c >= 0} by the given linear forms,
    built one form at a time and pruned by exact feasibility.
    """
    nonneg = [([int(i == j) for j in range(k)], 0) for i in range(k)]
    cells: list[tuple[int, ...]] = [()]
    for depth in range(len(hyperplanes)):
        forms = hyperplanes[:depth + 1]
        refined = []
        for cell in cells:
            for sign in (1, 0, -1):
                signs = cell + (sign,)
                equalities = [(f, 0) for f, s in zip(forms, signs) if s == 0]
                inequalities = nonneg + [
                    (f if s > 0 else tuple(-x for x in f), 1)
                    for f, s in zip(forms, signs) if s != 0
                ]
                if fm_feasible(k, equalities, inequalities):
                    refined.append(signs)
        cells = refined
    return cells


class _FaceComparison:
    """Exact comparison of two charts over a common face τ, cell by cell."""

    def __init__(self, fan: Fan, tau: Cone, first: Chart, second: Chart, rank: int):
        self.tau = tau
        self.first = first
        self.second = second
        self.rank = rank
        rays = [fan.rays[i] for i in tau.rays]
        self.w1 = [chart_weights(fan, first, v) for v in rays]
        self.w2 = [chart_weights(fan, second, v) for v in rays]
        self.cols1 = columns(first.frame)
        self.cols2 = columns(second.frame)

        # (kind, i, j) -> coefficients over the cone parameters c_ρ
        self.forms: dict[tuple[str, int, int], tuple[Fraction, ...]] = {}
        for i, j in combinations(range(rank), 2):
            self.forms[("first", i, j)] = tuple(w[i] - w[j] for w in self.w1)
            self.forms[("second", i, j)] = tuple(w[i] - w[j] for w in self.w2)
        for i in range(rank):
            for j in range(rank):
                self.forms[("cross", i, j)] = tuple(a[i] - b[j] for a, b in zip(self.w1, self.w2))

        self.hyperplanes: list[tuple] = []
        self.lookup: dict[tuple[str, int, int], tuple[Optional[int], int]] = {}
        for key, form in self.forms.items():
            normal, orientation = _normalized(form)
            if normal is None:
                self.lookup[key] = (None, 0)
                continue
            if normal not in self.hyperplanes:
                self.hyperplanes.append(normal)
            self.lookup[key] = (self.hyperplanes.index(normal), orientation)

    def _sign(self, cell, kind: str, i: int, j: int) -> int:
        if kind != "cross":
            if i == j:
                return 0
            if i > j:
                return -self._sign(cell, kind, j, i)
        position, orientation = self.lookup[(kind, i, j)]
        return 0 if position is None else orientation * cell[position]

    def _level(self, cell, which: str, index: int) -> Subspace:
        cols = self.cols1 if which == "first" else self.cols2
        members = [cols[a] for a in range(self.rank) if self._sign(cell, which, a, index) >= 0]
        return Subspace.spanned_by(self.rank, members)

    def disagreement(self, cell) -> Optional[str]:
        r = self.rank
        for i in range(r):
            partners = [j for j in range(r) if self._sign(cell, "cross", i, j) == 0]
            if not partners:
                return f"weight {i} of the first chart has no equal weight in the second"
            if self._level(cell, "first", i) != self._level(cell, "second", partners[0]):
                return f"flag steps at the level of weight {i} differ"
        for j in range(r):
            if not any(self._sign(cell, "cross", i, j) == 0 for i in range(r)):
                return f"weight {j} of the second chart has no equal weight in the first"
        return None

    def run(self) -> Optional[tuple[tuple[int, ...], str]]:
        for cell in _arrangement_cells(len(self.tau.rays), self.hyperplanes):
            problem = self.disagreement(cell)
            if problem is not None:
                return cell, problem
        return None


def _check_face(fan: Fan, tau: Cone, first: Chart, second: Chart, rank: int) -> Optional[Violation]:
    failure = _FaceComparison(fan, tau, first, second, rank).run()
    if failure is None:
        return None
    cell, problem = failure
    return Violation(
        kind="FaceDisagreement",
        cone=tau.rays,
        detail=f"charts on {first.cone} and {second.cone}: {problem}",
        cell=cell,
    )


def validate(phi: PLMap, parallel: int = 1) -> list[Violation]:
    """
    All violations of the chart data: missing or malformed charts,
    non-integral weights matrices, and faces where two charts give
    different building points. Empty iff Φ is a valid piecewise linear map.
    """
    fan = phi.fan
    violations: list[Violation] = []
    by_cone: dict[tuple[int, ...], Chart] = {}
    for chart in phi.charts:
        if chart.cone not in fan.maximal_cones:
            violations.append(Violation(kind="ChartShape", cone=chart.cone, detail="chart on a cone that is not maximal"))
        elif chart.cone in by_cone:
            violations.append(Violation(kind="ChartShape", cone=chart.cone, detail="two charts on one cone"))
        else:
            by_cone[chart.cone] = chart
    for rays in fan.maximal_cones:
        if rays not in by_cone:
            violations.append(Violation(kind="ChartMissing", cone=rays, detail="maximal cone without a chart"))

    usable: dict[tuple[int, ...], Chart] = {}
    for rays, chart in by_cone.items():
        problem = _shape_problems(chart, fan.cone(rays), phi.rank)
        if problem:
            violations.append(Violation(kind="ChartShape", cone=rays, detail=problem))
            continue
        if any(x.denominator != 1 for row in chart.weights_matrix for x in row):
            violations.append(Violation(
                kind="IntegralityViolation",
                cone=rays,
                detail="weights matrix is not integral on the saturated lattice basis",
            ))
        usable[rays] = chart

    jobs = []
    for first, second in combinations(sorted(usable), 2):
        common = tuple(i for i in first if i in second)
        if common:
            jobs.append((fan.cone(common), usable[first], usable[second]))
    logger.debug(f"[PLMAP] checking {len(jobs)} shared faces")

    def run(job):
        return _check_face(fan, job[0], job[1], job[2], phi.rank)

    if parallel > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]
    violations.extend(v for v in results if v is not None)

    violations.sort(key=lambda v: (v.cone, v.kind, v.detail))
    if violations:
        logger.info(f"[PLMAP] {len(violations)} violation(s), first: {violations[0].kind} on {violations[0].cone}")
    return violations

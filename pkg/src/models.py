"""
Data models for the toric principal bundle toolkit.
All models are frozen Pydantic models; rationals are fractions.Fraction and
matrices are tuples of rows.
"""

from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from sympy.polys.rings import PolyElement

from src.utils.exactlin import det, row_space


Vector = tuple[Fraction, ...]
Matrix = tuple[tuple[Fraction, ...], ...]
IntVector = tuple[int, ...]
IntMatrix = tuple[tuple[int, ...], ...]


def as_fraction(value) -> Fraction:
    """Coerce an int, a Fraction or a "p/q" string to a Fraction."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rational numbers")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot read {value!r} as a rational number")


def as_matrix(rows) -> Matrix:
    return tuple(tuple(as_fraction(x) for x in row) for row in rows)


def as_vector(values) -> Vector:
    return tuple(as_fraction(x) for x in values)


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


# =========================================
# Linear-algebra carriers
# =========================================

class Subspace(FrozenModel):
    """
    A subspace of Q^ambient stored by its reduced row echelon basis.
    Two subspaces are equal exactly when their row tuples coincide.
    """
    ambient: int
    rows: Matrix = ()

    @model_validator(mode="before")
    @classmethod
    def _canonical_rows(cls, data):
        if isinstance(data, dict) and "ambient" in data:
            rows = as_matrix(data.get("rows", ()))
            if any(len(row) != data["ambient"] for row in rows):
                raise ValueError(f"subspace vectors must have {data['ambient']} entries")
            data = {**data, "rows": row_space(data["ambient"], rows)}
        return data

    @property
    def dim(self) -> int:
        return len(self.rows)

    @classmethod
    def spanned_by(cls, ambient: int, vectors) -> "Subspace":
        return cls(ambient=ambient, rows=vectors)

    @classmethod
    def whole(cls, ambient: int) -> "Subspace":
        return cls.spanned_by(ambient, [
            [1 if i == j else 0 for j in range(ambient)] for i in range(ambient)
        ])

    def contains(self, vector) -> bool:
        return len(row_space(self.ambient, list(self.rows) + [list(vector)])) == self.dim


class Flag(FrozenModel):
    """
    A flag 0 ⊊ F_1 ⊊ ... ⊊ F_k = Q^r (the zero space is not stored).
    """
    ambient: int
    steps: tuple[Subspace, ...]

    @model_validator(mode="after")
    def _check_chain(self):
        dims = [s.dim for s in self.steps]
        if not dims or dims[-1] != self.ambient:
            raise ValueError(f"flag must end with the whole space Q^{self.ambient}, got dims {dims}")
        if any(b <= a for a, b in zip(dims, dims[1:])) or dims[0] == 0:
            raise ValueError(f"flag steps must strictly increase, got dims {dims}")
        if any(s.ambient != self.ambient for s in self.steps):
            raise ValueError("flag steps live in different ambient spaces")
        for smaller, larger in zip(self.steps, self.steps[1:]):
            if not all(larger.contains(v) for v in smaller.rows):
                raise ValueError("flag steps must be nested")
        return self

    @property
    def dims(self) -> IntVector:
        return tuple(s.dim for s in self.steps)

    @property
    def composition(self) -> IntVector:
        previous = 0
        blocks = []
        for d in self.dims:
            blocks.append(d - previous)
            previous = d
        return tuple(blocks)


class WeightedFlag(FrozenModel):
    """
    Point of the extended Tits building of GL(r): a flag with strictly
    decreasing rational weights, weight t_j attached to step F_j.
    """
    flag: Flag
    weights: Vector

    @field_validator("weights", mode="before")
    @classmethod
    def _coerce_weights(cls, v):
        return as_vector(v)

    @model_validator(mode="after")
    def _check_weights(self):
        if len(self.weights) != len(self.flag.steps):
            raise ValueError("one weight per flag step is required")
        if any(b >= a for a, b in zip(self.weights, self.weights[1:])):
            raise ValueError(f"weights must strictly decrease, got {self.weights}")
        return self

    @property
    def rank(self) -> int:
        return self.flag.ambient


class KlyachkoFiltration(FrozenModel):
    """
    Decreasing Z-indexed filtration E(i) of Q^r.
    `pieces` lists (index, E(index)) with ascending indices. For an
    unlisted i, E(i) is the piece at the smallest listed index >= i, and
    E(i) = 0 above the largest listed index.
    """
    ambient: int
    pieces: tuple[tuple[int, Subspace], ...]

    @model_validator(mode="after")
    def _check_pieces(self):
        if not self.pieces:
            raise ValueError("a filtration needs at least one piece")
        indices = [i for i, _ in self.pieces]
        if indices != sorted(set(indices)):
            raise ValueError("filtration indices must be strictly ascending")
        if self.pieces[0][1].dim != self.ambient:
            raise ValueError("the lowest listed piece must be the whole space")
        for (_, larger), (_, smaller) in zip(self.pieces, self.pieces[1:]):
            if not all(larger.contains(v) for v in smaller.rows):
                raise ValueError("filtration must be decreasing")
        return self


# =========================================
# One-parameter subgroups and Weyl data
# =========================================

class OneParamSubgroup(FrozenModel):
    """λ(s) = g · diag(s^a_1, ..., s^a_r) · g^-1."""
    frame: Matrix
    weights: IntVector

    @field_validator("frame", mode="before")
    @classmethod
    def _coerce_frame(cls, v):
        return as_matrix(v)

    @model_validator(mode="after")
    def _check_frame(self):
        r = len(self.weights)
        if len(self.frame) != r or any(len(row) != r for row in self.frame):
            raise ValueError(f"frame must be {r}x{r}")
        if det(self.frame) == 0:
            raise ValueError("frame must be invertible")
        return self

    @property
    def rank(self) -> int:
        return len(self.weights)


class LaurentMatrix(FrozenModel):
    """
    Square matrix of Laurent polynomials in s. Each entry is a tuple of
    (exponent, coefficient) pairs, exponents ascending, no zero coefficients.
    """
    size: int
    entries: tuple[tuple[tuple[tuple[int, Fraction], ...], ...], ...]

    @classmethod
    def from_dicts(cls, rows: list[list[dict[int, Fraction]]]) -> "LaurentMatrix":
        canon = tuple(
            tuple(
                tuple(sorted((int(e), as_fraction(c)) for e, c in entry.items() if c != 0))
                for entry in row
            )
            for row in rows
        )
        return cls(size=len(rows), entries=canon)


class DominantWeight(FrozenModel):
    weights: IntVector

    @model_validator(mode="after")
    def _check_sorted(self):
        if list(self.weights) != sorted(self.weights, reverse=True):
            raise ValueError(f"dominant weights must be weakly decreasing, got {self.weights}")
        return self

    @property
    def rank(self) -> int:
        return len(self.weights)


class ParabolicType(FrozenModel):
    """Composition (m_1, ..., m_k) of r; (1,...,1) is the Borel, (r,) is G."""
    blocks: IntVector

    @model_validator(mode="after")
    def _check_blocks(self):
        if not self.blocks or any(m < 1 for m in self.blocks):
            raise ValueError(f"block sizes must be positive, got {self.blocks}")
        return self

    @property
    def rank(self) -> int:
        return sum(self.blocks)


# =========================================
# Fans
# =========================================

class Cone(FrozenModel):
    rays: IntVector
    dim: int
    lattice_basis: IntMatrix = ()

    @property
    def is_zero(self) -> bool:
        return not self.rays


class Fan(FrozenModel):
    """
    Validated rational polyhedral fan. `cones` is the full face lattice,
    sorted by (dim, rays); `maximal_cones` keeps input order.
    """
    lattice_rank: int
    rays: IntMatrix
    maximal_cones: tuple[IntVector, ...]
    cones: tuple[Cone, ...] = ()

    def cone(self, rays) -> Cone:
        key = tuple(sorted(rays))
        for c in self.cones:
            if c.rays == key:
                return c
        raise KeyError(f"{key} is not a cone of the fan")

    def maximal(self) -> list[Cone]:
        return [self.cone(m) for m in self.maximal_cones]

    def ray_vector(self, index: int) -> IntVector:
        return self.rays[index]


# =========================================
# Piecewise linear maps and classes
# =========================================

class Chart(FrozenModel):
    """
    Chart of Φ on one maximal cone: an apartment frame (columns are the
    basis) and a weights matrix acting on coordinates in the saturated
    lattice basis of N ∩ span(cone).
    """
    cone: IntVector
    frame: Matrix
    weights_matrix: Matrix

    @field_validator("frame", "weights_matrix", mode="before")
    @classmethod
    def _coerce(cls, v):
        return as_matrix(v)


class PLMap(FrozenModel):
    fan: Fan
    rank: int
    charts: tuple[Chart, ...]

    def chart_for(self, cone_rays) -> Chart:
        key = tuple(sorted(cone_rays))
        for chart in self.charts:
            if chart.cone == key:
                return chart
        raise KeyError(f"no chart for cone {key}")


class PiecewisePolynomial(FrozenModel):
    """One polynomial per maximal cone (order of fan.maximal_cones)."""
    fan: Fan
    pieces: tuple[PolyElement, ...]


class PsiData(FrozenModel):
    """Images Ψ(e_1), ..., Ψ(e_r) of the elementary symmetric generators."""
    rank: int
    classes: tuple[PiecewisePolynomial, ...]

    @model_validator(mode="after")
    def _check_count(self):
        if len(self.classes) != self.rank:
            raise ValueError(f"expected {self.rank} classes, got {len(self.classes)}")
        return self

    @property
    def fan(self) -> Fan:
        return self.classes[0].fan


class Violation(FrozenModel):
    kind: str  # IntegralityViolation, LinearityViolation, FaceDisagreement, ChartMissing, ChartShape
    cone: IntVector
    detail: str
    cell: Optional[tuple[int, ...]] = None


# =========================================
# Moduli
# =========================================

class VerdictStatus(str, Enum):
    ACCEPTED = "ACCEPTED"
    REJECTED = "REJECTED"
    INDETERMINATE = "INDETERMINATE"


class ModuliCandidate(FrozenModel):
    """One flag x_ρ Q_ρ per ray of the fan (fan ray order)."""
    fan: Fan
    rank: int
    flags: tuple[Flag, ...]

    @model_validator(mode="after")
    def _check_flags(self):
        if len(self.flags) != len(self.fan.rays):
            raise ValueError(f"expected {len(self.fan.rays)} flags, got {len(self.flags)}")
        if any(f.ambient != self.rank for f in self.flags):
            raise ValueError(f"every flag must live in Q^{self.rank}")
        return self


class ConeWitness(FrozenModel):
    cone: IntVector
    status: VerdictStatus
    basis: Optional[Matrix] = None           # columns span H_σ
    cocharacters: tuple[IntVector, ...] = ()  # γ_ρ in basis coordinates, cone ray order
    reason: Optional[str] = None
    kernel: tuple[Vector, ...] = ()
    residuals: tuple[Vector, ...] = ()


class Verdict(FrozenModel):
    status: VerdictStatus
    witnesses: tuple[ConeWitness, ...]

    @model_validator(mode="after")
    def _check_witnesses(self):
        if self.status == VerdictStatus.ACCEPTED:
            if any(w.status != VerdictStatus.ACCEPTED or w.basis is None for w in self.witnesses):
                raise ValueError("accepted verdicts need a witness for every cone")
        if self.status == VerdictStatus.REJECTED:
            if not any(w.status == VerdictStatus.REJECTED for w in self.witnesses):
                raise ValueError("rejected verdicts need a certified failure")
        return self


# =========================================
# Configuration
# =========================================

class ToolSettings(BaseModel):
    """
    Loaded from config/settings.yaml.
    """
    runtime: dict = Field(default_factory=dict)
    output: dict = Field(default_factory=dict)
    logging: dict = Field(default_factory=dict)


class RunConfig(BaseModel):
    """Merged command-line and settings view handed to a subcommand."""
    subcommand: str
    inputs: dict[str, Path] = Field(default_factory=dict)
    output: Optional[Path] = None
    witnesses: bool = True
    parallel: int = 1
    census_limit: int = 20000
    indent: int = 2
    options: dict = Field(default_factory=dict)

    @field_validator("inputs")
    @classmethod
    def _inputs_exist(cls, v):
        for name, path in v.items():
            if not Path(path).exists():
                raise ValueError(f"input '{name}' not found: {path}")
        return v

    @field_validator("parallel", "census_limit")
    @classmethod
    def _positive(cls, v):
        if v < 1:
            raise ValueError("limits must be positive")
        return v

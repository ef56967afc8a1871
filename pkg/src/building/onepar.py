"""
One-parameter subgroups of GL(r) and the limit relation between them.

λ(s) = g·diag(s^a_1, ..., s^a_r)·g^-1 is stored as (frame g, weights a).
λ1 ~ λ2 when lim_{s→0} λ1(s)·λ2(s)^-1 exists in GL(r), which is decided
on the exact Laurent expansion of the product.
"""

from collections import defaultdict
from fractions import Fraction
from typing import Optional

from src.building.flags import weighted_flag_from_frame
from src.models import LaurentMatrix, Matrix, OneParamSubgroup, WeightedFlag, as_matrix
from src.utils.exactlin import det, inverse, matmul


def product_laurent(lam1: OneParamSubgroup, lam2: OneParamSubgroup) -> LaurentMatrix:
    """
    λ1(s)·λ2(s)^-1 = g1·D1(s)·(g1^-1 g2)·D2(s)^-1·g2^-1, expanded entrywise:
    entry (i, j) = Σ_{k,l} g1[i,k]·M[k,l]·g2^-1[l,j]·s^(a_k - b_l).
    """
    if lam1.rank != lam2.rank:
        raise ValueError(f"rank mismatch: {lam1.rank} vs {lam2.rank}")
    r = lam1.rank
    g1, g2 = lam1.frame, lam2.frame
    g2inv = inverse(g2)
    middle = matmul(inverse(g1), g2)
    rows = []
    for i in range(r):
        row = []
        for j in range(r):
            entry: dict[int, Fraction] = defaultdict(Fraction)
            for k in range(r):
                if g1[i][k] == 0:
                    continue
                for l in range(r):
                    c = g1[i][k] * middle[k][l] * g2inv[l][j]
                    if c:
                        entry[lam1.weights[k] - lam2.weights[l]] += c
            row.append(dict(entry))
        rows.append(row)
    return LaurentMatrix.from_dicts(rows)


def laurent_limit(m: LaurentMatrix) -> Optional[Matrix]:
    """The limit at s = 0 if it exists in GL(r): no negative powers and an invertible constant term."""
    constant = []
    for row in m.entries:
        out = []
        for entry in row:
            if any(e < 0 for e, _ in entry):
                return None
            out.append(next((c for e, c in entry if e == 0), Fraction(0)))
        constant.append(out)
    limit = as_matrix(constant)
    if det(limit) == 0:
        return None
    return limit


def equivalent(lam1: OneParamSubgroup, lam2: OneParamSubgroup) -> bool:
    return laurent_limit(product_laurent(lam1, lam2)) is not None


def conjugate(x: Matrix, lam: OneParamSubgroup) -> OneParamSubgroup:
    """x·λ·x^-1, which has frame x·g and the same weights."""
    return OneParamSubgroup(frame=matmul(as_matrix(x), lam.frame), weights=lam.weights)


def in_parabolic(x: Matrix, lam: OneParamSubgroup) -> bool:
    """Membership of x in P_λ through the limit definition."""
    return equivalent(conjugate(x, lam), lam)


def parabolic_flag(lam: OneParamSubgroup) -> WeightedFlag:
    """The weighted flag whose stabilizer is P_λ."""
    return weighted_flag_from_frame(lam.frame, lam.weights)

"""
Exact rational and integer linear algebra.

Rationals are fractions.Fraction, matrices are sequences of rows. Dense
rational work (echelon forms, kernels, inverses, solving) goes through
sympy.Matrix; integer Hermite reduction and Fourier-Motzkin elimination
are done here directly on Python integers and Fractions.
"""

import logging
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Optional, Sequence

import sympy

logger = logging.getLogger(__name__)


# =========================================
# Conversions
# =========================================

def to_sympy(rows: Sequence[Sequence], ncols: Optional[int] = None) -> sympy.Matrix:
    rows = [list(r) for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    flat = [sympy.Rational(Fraction(x).numerator, Fraction(x).denominator) for row in rows for x in row]
    return sympy.Matrix(len(rows), ncols, flat)


def from_sympy(m: sympy.Matrix) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(
        tuple(Fraction(int(m[i, j].p), int(m[i, j].q)) for j in range(m.cols))
        for i in range(m.rows)
    )


def identity(n: int) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def transpose(rows: Sequence[Sequence]) -> tuple[tuple, ...]:
    return tuple(zip(*rows)) if rows else ()


def columns(rows: Sequence[Sequence]) -> list[tuple]:
    return list(transpose(rows))


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    bt = transpose(b)
    return tuple(tuple(sum((Fraction(x) * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a)


def matvec(a: Sequence[Sequence], v: Sequence) -> tuple[Fraction, ...]:
    return tuple(sum((Fraction(x) * y for x, y in zip(row, v)), Fraction(0)) for row in a)


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((Fraction(x) * y for x, y in zip(u, v)), Fraction(0))


# =========================================
# Rational echelon work
# =========================================

def rref(rows: Sequence[Sequence], ncols: int) -> tuple[tuple[tuple[Fraction, ...], ...], tuple[int, ...]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    if not rows:
        return (), ()
    reduced, pivots = to_sympy(rows, ncols).rref()
    out = from_sympy(reduced)
    return out[:len(pivots)], tuple(pivots)


def row_space(ncols: int, vectors: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    """Canonical basis (reduced echelon rows) of the span of the vectors."""
    return rref(vectors, ncols)[0]


def rank(rows: Sequence[Sequence], ncols: Optional[int] = None) -> int:
    if not rows:
        return 0
    return to_sympy(rows, ncols).rank()


def det(rows: Sequence[Sequence]) -> Fraction:
    m = to_sympy(rows)
    d = m.det()
    return Fraction(int(d.p), int(d.q))


def inverse(rows: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    return from_sympy(to_sympy(rows).inv())


def solve(a: Sequence[Sequence], b: Sequence) -> Optional[tuple[Fraction, ...]]:
    """
    The unique x with a·x = b, or None when there is no solution.
    Raises ValueError when the solution is not unique.
    """
    ncols = len(a[0])
    m = to_sympy(a, ncols)
    rhs = to_sympy([[x] for x in b], 1)
    try:
        sol, params = m.gauss_jordan_solve(rhs)
    except ValueError:
        return None
    if params.rows:
        raise ValueError("linear system has more than one solution")
    return tuple(row[0] for row in from_sympy(sol))


def kernel_basis(rows: Sequence[Sequence], ncols: Optional[int] = None) -> list[tuple[Fraction, ...]]:
    """Basis of {c : m·c = 0}; empty when the kernel is trivial."""
    if not rows:
        if ncols is None:
            raise ValueError("kernel of an empty matrix needs ncols")
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    return [tuple(v[0] for v in from_sympy(col)) for col in to_sympy(rows, ncols).nullspace()]


def clear_denominators(v: Sequence) -> tuple[int, ...]:
    """Smallest positive multiple of v with integer entries."""
    fracs = [Fraction(x) for x in v]
    lcm = reduce(lambda a, b: a * b // gcd(a, b), (f.denominator for f in fracs), 1)
    return tuple(int(f * lcm) for f in fracs)


# =========================================
# Integer lattices
# =========================================

def hermite_normal_form(m: Sequence[Sequence[int]]) -> tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]]:
    """
    Row-style Hermite normal form: returns (h, u) with h = u·m, u unimodular,
    pivots positive and entries above each pivot reduced into [0, pivot).
    """
    h = [[int(x) for x in row] for row in m]
    nrows = len(h)
    ncols = len(h[0]) if h else 0
    u = [[int(i == j) for j in range(nrows)] for i in range(nrows)]

    def swap(i, j):
        h[i], h[j] = h[j], h[i]
        u[i], u[j] = u[j], u[i]

    def add_multiple(target, source, q):
        # row_target -= q * row_source
        h[target] = [a - q * b for a, b in zip(h[target], h[source])]
        u[target] = [a - q * b for a, b in zip(u[target], u[source])]

    pivot_row = 0
    for col in range(ncols):
        if pivot_row >= nrows:
            break
        while True:
            nonzero = [i for i in range(pivot_row, nrows) if h[i][col] != 0]
            if not nonzero:
                break
            smallest = min(nonzero, key=lambda i: (abs(h[i][col]), i))
            swap(pivot_row, smallest)
            clean = True
            for i in range(pivot_row + 1, nrows):
                if h[i][col]:
                    add_multiple(i, pivot_row, h[i][col] // h[pivot_row][col])
                    if h[i][col]:
                        clean = False
            if clean:
                break
        if h[pivot_row][col] == 0:
            continue
        if h[pivot_row][col] < 0:
            h[pivot_row] = [-x for x in h[pivot_row]]
            u[pivot_row] = [-x for x in u[pivot_row]]
        for i in range(pivot_row):
            q = h[i][col] // h[pivot_row][col]
            if q:
                add_multiple(i, pivot_row, q)
        pivot_row += 1

    return tuple(map(tuple, h)), tuple(map(tuple, u))


def primitive_vector(v: Sequence[int]) -> tuple[int, ...]:
    """v divided by the gcd of its entries (sign preserved)."""
    g = reduce(gcd, (abs(int(x)) for x in v), 0)
    if g == 0:
        raise ValueError("the zero vector has no primitive generator")
    return tuple(int(x) // g for x in v)


def integer_kernel(m: Sequence[Sequence[int]], ncols: int) -> list[tuple[int, ...]]:
    """Z-basis of {x in Z^ncols : m·x = 0}."""
    if not m:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    h, u = hermite_normal_form(transpose(m))
    return [u[i] for i in range(len(h)) if not any(h[i])]


def saturated_lattice_basis(generators: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """
    Z-basis of the saturation N ∩ span_Q(generators), in Hermite normal form.
    """
    n = len(generators[0])
    orthogonal = [clear_denominators(v) for v in kernel_basis(generators, n)]
    lattice = integer_kernel(orthogonal, n)
    if not lattice:
        return ()
    h, _ = hermite_normal_form(lattice)
    return tuple(row for row in h if any(row))


# =========================================
# Fourier-Motzkin
# =========================================

def _normalize(row: list[Fraction], rhs: Fraction) -> tuple[tuple[Fraction, ...], Fraction]:
    scale = next((abs(c) for c in row if c != 0), None)
    if scale is None:
        return tuple(row), rhs
    return tuple(c / scale for c in row), rhs / scale


def fm_feasible(nvars: int, equalities: Sequence, inequalities: Sequence) -> bool:
    """
    Decide exactly whether {x in Q^nvars : a·x = b for (a, b) in equalities,
    a·x >= b for (a, b) in inequalities} is nonempty.
    """
    eqs = [([Fraction(c) for c in a], Fraction(b)) for a, b in equalities]
    ineqs = [([Fraction(c) for c in a], Fraction(b)) for a, b in inequalities]

    # Substitute equalities away first.
    while eqs:
        a, b = eqs.pop()
        k = next((i for i, c in enumerate(a) if c != 0), None)
        if k is None:
            if b != 0:
                return False
            continue

        def substitute(row, rhs, a=a, b=b, k=k):
            factor = row[k] / a[k]
            if factor == 0:
                return row, rhs
            new = [x - factor * y for x, y in zip(row, a)]
            new[k] = Fraction(0)
            return new, rhs - factor * b

        eqs = [substitute(*e) for e in eqs]
        ineqs = [substitute(*e) for e in ineqs]

    system = set()
    for a, b in ineqs:
        row, rhs = _normalize(a, b)
        if not any(row):
            if rhs > 0:
                return False
            continue
        system.add((row, rhs))

    for k in range(nvars):
        pos, neg, rest = [], [], []
        for row, rhs in system:
            if row[k] > 0:
                pos.append((row, rhs))
            elif row[k] < 0:
                neg.append((row, rhs))
            else:
                rest.append((row, rhs))
        combined = set(rest)
        for prow, prhs in pos:
            for nrow, nrhs in neg:
                lp, ln = -nrow[k], prow[k]
                row = [lp * x + ln * y for x, y in zip(prow, nrow)]
                row[k] = Fraction(0)
                rhs = lp * prhs + ln * nrhs
                row, rhs = _normalize(row, rhs)
                if not any(row):
                    if rhs > 0:
                        return False
                    continue
                combined.add((row, rhs))
        system = combined

    return all(rhs <= 0 for _, rhs in system)


def cone_member(v: Sequence, rays: Sequence[Sequence]) -> bool:
    """True iff v = Σ c_ρ v_ρ for some c >= 0."""
    if not rays:
        return all(Fraction(x) == 0 for x in v)
    k = len(rays)
    equalities = [([ray[i] for ray in rays], v[i]) for i in range(len(v))]
    nonneg = [([int(i == j) for j in range(k)], 0) for i in range(k)]
    return fm_feasible(k, equalities, nonneg)

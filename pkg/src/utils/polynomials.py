"""
Sparse polynomial plumbing over sympy's PolyRing with QQ coefficients.

Polynomials on N_Q use generators t0..t{n-1}; polynomials on the
cocharacter space of the diagonal torus use x0..x{r-1}. Rings are cached
by sympy, so two calls with the same arguments give the same ring.
"""

from fractions import Fraction
from itertools import combinations
from typing import Sequence

from sympy import divisors
from sympy.polys.domains import QQ
from sympy.polys.rings import PolyElement, PolyRing, ring


def lattice_ring(n: int) -> PolyRing:
    """Polynomial ring in the coordinates t0..t{n-1} of N_Q."""
    return ring(",".join(f"t{i}" for i in range(n)), QQ)[0]


def weight_ring(r: int) -> PolyRing:
    """Polynomial ring in the coordinates x0..x{r-1} of the standard apartment."""
    return ring(",".join(f"x{i}" for i in range(r)), QQ)[0]


def to_qq(value):
    f = Fraction(value)
    return QQ(f.numerator, f.denominator)


def from_qq(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


def from_terms(R: PolyRing, terms) -> PolyElement:
    """Build a polynomial from (coefficient, exponents) pairs; repeated monomials add up."""
    p = R.zero
    for coeff, exps in terms:
        if len(exps) != R.ngens:
            raise ValueError(f"monomial {tuple(exps)} does not have {R.ngens} exponents")
        p += R({tuple(int(e) for e in exps): to_qq(coeff)})
    return p


def to_terms(p: PolyElement) -> list[tuple[Fraction, tuple[int, ...]]]:
    """Canonical term list: sorted by exponent tuple, zero coefficients dropped."""
    return [(from_qq(c), tuple(m)) for m, c in sorted(p.items()) if c]


def linear_form(R: PolyRing, coefficients: Sequence) -> PolyElement:
    """Σ c_i t_i in R."""
    p = R.zero
    for c, g in zip(coefficients, R.gens):
        if Fraction(c) != 0:
            p += g * to_qq(c)
    return p


def substitute(p: PolyElement, target: PolyRing, images: Sequence[PolyElement]) -> PolyElement:
    """p(images[0], ..., images[k-1]) as an element of the target ring."""
    result = target.zero
    for monom, coeff in p.items():
        term = target.one * coeff
        for image, e in zip(images, monom):
            if e:
                term *= image ** e
        result += term
    return result


def evaluate(p: PolyElement, point: Sequence) -> Fraction:
    total = Fraction(0)
    values = [Fraction(x) for x in point]
    for monom, coeff in p.items():
        term = from_qq(coeff)
        for v, e in zip(values, monom):
            if e:
                term *= v ** e
        total += term
    return total


def total_degree(p: PolyElement) -> int:
    return max((sum(m) for m, c in p.items() if c), default=0)


def is_symmetric(p: PolyElement) -> bool:
    """Invariance under all coordinate permutations, read off the exponent patterns."""
    for monom, coeff in p.items():
        for i in range(len(monom) - 1):
            swapped = list(monom)
            swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
            if p.get(tuple(swapped), p.ring.domain.zero) != coeff:
                return False
    return True


def elementary_symmetric(R: PolyRing, k: int) -> PolyElement:
    if k == 0:
        return R.one
    p = R.zero
    for subset in combinations(R.gens, k):
        term = R.one
        for g in subset:
            term *= g
        p += term
    return p


def power_sum(R: PolyRing, k: int) -> PolyElement:
    return sum((g ** k for g in R.gens), R.zero)


def integer_roots_of_monic(coefficients: Sequence[Fraction]) -> list[int] | None:
    """
    Integer roots with multiplicity of t^r + a_1 t^{r-1} + ... + a_r, given
    (a_1, ..., a_r), or None when the polynomial does not split over Z.
    Roots are found among divisors of the lowest nonzero coefficient and
    removed one at a time by exact synthetic division.
    """
    poly = [Fraction(1)] + [Fraction(a) for a in coefficients]
    if any(c.denominator != 1 for c in poly):
        return None
    poly = [int(c) for c in poly]
    roots: list[int] = []
    while len(poly) > 1 and poly[-1] == 0:
        roots.append(0)
        poly.pop()
    while len(poly) > 1:
        constant = poly[-1]
        found = None
        for d in divisors(abs(constant)):
            for candidate in (d, -d):
                if _horner(poly, candidate) == 0:
                    found = candidate
                    break
            if found is not None:
                break
        if found is None:
            return None
        roots.append(found)
        poly = _deflate(poly, found)
    return sorted(roots, reverse=True)


def _horner(poly: list[int], x: int) -> int:
    acc = 0
    for c in poly:
        acc = acc * x + c
    return acc


def _deflate(poly: list[int], root: int) -> list[int]:
    out = []
    acc = 0
    for c in poly[:-1]:
        acc = acc * root + c
        out.append(acc)
    return out

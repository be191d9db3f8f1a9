"""Hypothesis strategies for small polynomials, ideals and modules."""

from fractions import Fraction
from itertools import product

from hypothesis import strategies as st

from wprkit.arith import PolyRing, PrimeField


def all_monomials(nvars: int, max_degree: int) -> list:
    return sorted(e for e in product(range(max_degree + 1), repeat=nvars) if sum(e) <= max_degree)


def monomials(nvars: int, max_degree: int):
    return st.sampled_from(all_monomials(nvars, max_degree))


def rationals(small: bool = True):
    bound = 5 if small else 50
    return st.builds(Fraction, st.integers(-bound, bound), st.integers(1, 3 if small else 12))


def poly_terms(nvars: int, max_degree: int = 3, max_terms: int = 4, coeffs=None):
    coeffs = coeffs if coeffs is not None else rationals()
    return st.dictionaries(monomials(nvars, max_degree), coeffs, max_size=max_terms)


def build(ring: PolyRing, terms: dict):
    f = ring.zero
    for m, c in terms.items():
        f = f + ring.monomial(m, c)
    return f


def polys(ring: PolyRing, max_degree: int = 3, max_terms: int = 4):
    coeffs = rationals() if not isinstance(ring.field, PrimeField) else st.integers(0, ring.field.characteristic - 1)
    return poly_terms(len(ring.names), max_degree, max_terms, coeffs).map(lambda t: build(ring, t))


def nonzero_polys(ring: PolyRing, max_degree: int = 3, max_terms: int = 4):
    coeffs = rationals() if not isinstance(ring.field, PrimeField) else st.integers(0, ring.field.characteristic - 1)
    nz = coeffs.filter(lambda c: c % ring.field.characteristic if isinstance(ring.field, PrimeField) else c != 0)
    terms = st.dictionaries(monomials(len(ring.names), max_degree), nz, min_size=1, max_size=max_terms)
    return terms.map(lambda t: build(ring, t))

"""Hypothesis strategies shared by the property tests."""
from fractions import Fraction

from hypothesis import strategies as st

from avmod.rings import elliptic, laurent, poly

coeffs = st.fractions(min_value=-4, max_value=4, max_denominator=3)


def ring_elements(ring, max_exp=3, min_exp=0, max_terms=4):
    exps = st.tuples(*[st.integers(min_exp, max_exp)] * ring.n)
    return st.dictionaries(exps, coeffs, max_size=max_terms).map(
        lambda d: sum((ring.monomial(e) * c for e, c in d.items()), ring.zero()))


QX = poly("x")
QXY = poly("x", "y")
LT = laurent("t")
ELL = elliptic()

polys_x = ring_elements(QX)
polys_xy = ring_elements(QXY, max_exp=2)
laurents = ring_elements(LT, max_exp=3, min_exp=-3)
elliptics = ring_elements(ELL, max_exp=3)
small_q = st.fractions(min_value=-3, max_value=3, max_denominator=4).map(Fraction)

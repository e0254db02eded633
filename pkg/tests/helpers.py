from fractions import Fraction

from hypothesis import strategies as st

from torsion_series.fourier import FourierField, ThetaField
from torsion_series.radial import RadialExpr

G_COS4 = ThetaField.from_coeffs(0, {4: Fraction(1, 20)})

rationals = st.builds(Fraction, st.integers(-50, 50), st.integers(1, 12))
small_rationals = st.builds(Fraction, st.integers(-5, 5), st.integers(1, 6))


@st.composite
def radial_exprs(draw, m_min=-3, m_max=6, p_max=2, max_terms=4):
    keys = draw(st.lists(st.tuples(st.integers(m_min, m_max), st.integers(0, p_max)),
                         max_size=max_terms, unique=True))
    return RadialExpr({k: draw(rationals) for k in keys})


bounded_exprs = radial_exprs(m_min=0)


@st.composite
def fourier_fields(draw, n_max=6, max_modes=3, exprs=radial_exprs(max_terms=2)):
    cos = {n: draw(exprs) for n in draw(st.lists(st.integers(1, n_max), max_size=max_modes, unique=True))}
    sin = {n: draw(exprs) for n in draw(st.lists(st.integers(1, n_max), max_size=max_modes, unique=True))}
    return FourierField(draw(exprs), cos, sin)


@st.composite
def theta_fields(draw, n_max=6, max_modes=3):
    cos = {n: draw(small_rationals) for n in draw(st.lists(st.integers(1, n_max), max_size=max_modes, unique=True))}
    sin = {n: draw(small_rationals) for n in draw(st.lists(st.integers(1, n_max), max_size=max_modes, unique=True))}
    return ThetaField.from_coeffs(draw(small_rationals), cos, sin)


def r4log():
    return RadialExpr({(4, 1): 1})


def u1_radial():
    # (r^2/40)(9 r^2 log r - 5 r^2 + 6)
    return RadialExpr({(2, 0): Fraction(3, 20), (4, 0): Fraction(-1, 8), (4, 1): Fraction(9, 40)})


def xi_2():
    # (-9/100) r^2 (9 r^2 log r - 5 r^2 + 6)
    return RadialExpr({(2, 0): Fraction(-54, 100), (4, 0): Fraction(45, 100), (4, 1): Fraction(-81, 100)})

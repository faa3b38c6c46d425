"""The compiled kernels agree with the pure-Python ones on random inputs."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kronspin import _pykernels as py
from kronspin import kernels

cy = pytest.importorskip("kronspin._ckernels")

comp = st.one_of(
    st.integers(-5, 5),
    st.integers(-(2 ** 70), 2 ** 70),
    st.fractions(min_value=-3, max_value=3, max_denominator=6),
)
scalar = st.tuples(comp, comp, comp, comp)
exp = st.tuples(st.integers(-2, 2), st.integers(-2, 2))
poly = st.dictionaries(exp, scalar.filter(lambda c: any(c)), max_size=4)
matrix = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.dictionaries(st.integers(0, n - 1), poly.filter(bool), max_size=n), min_size=n, max_size=n)
)


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


@given(scalar, scalar)
def test_scalar_ops(x, y):
    assert cy.s_mul(x, y) == py.s_mul(x, y)
    assert cy.s_add(x, y) == py.s_add(x, y)
    assert cy.s_neg(x) == py.s_neg(x)


@given(scalar, scalar)
def test_integral_fractions_normalize(x, y):
    for out in (cy.s_mul(x, y), cy.s_add(x, y)):
        for v in out:
            assert not (isinstance(v, Fraction) and v.denominator == 1)


@given(poly, poly)
def test_poly_ops(p, q):
    assert cy.p_add(p, q) == py.p_add(p, q)
    assert cy.p_sub(p, q) == py.p_sub(p, q)
    assert cy.p_mul(p, q) == py.p_mul(p, q)
    assert cy.p_neg(p) == py.p_neg(p)


@given(matrix, st.data())
def test_matrix_product(a, data):
    b = data.draw(st.lists(st.dictionaries(st.integers(0, len(a) - 1), poly.filter(bool), max_size=len(a)),
                           min_size=len(a), max_size=len(a)))
    assert cy.m_mul(a, b) == py.m_mul(a, b)

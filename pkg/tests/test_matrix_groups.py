import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kronspin.errors import DomainError
from kronspin.exact_arithmetic import CycloScalar, ParamContext
from kronspin.matrix_groups import (
    TEMPLATES,
    CommutatorFactor,
    ExactMatrix,
    MatrixGroup,
    check_template_instance,
    conjugator_p,
    determinant_at,
    extract_commutator_constant,
    galois_twist_matrix,
    kronecker,
    membership,
    mutate_template,
    omega,
    psi,
    rho_so,
    rho_sp,
    so_generator,
    sp_generator,
    template_instances,
    trivial_pairs,
)
from kronspin.root_systems import enumerate_roots
from kronspin.steinberg_engine import TorusElement, char_eval

CTX = ParamContext(("t", "u"))
T, U = CTX.var("t"), CTX.var("u")
ONE = CTX.one()
GROUPS = [MatrixGroup("Sp", d) for d in (2, 4, 6, 8)] + [MatrixGroup("SO", d) for d in range(3, 10)]


def E(d, i, j, c=1):
    """Elementary matrix with ``c`` at 1-based position (i, j)."""
    rows = [[0] * d for _ in range(d)]
    rows[i - 1][j - 1] = c
    return rows


def I_plus(d, *terms):
    rows = [[CTX.const(int(i == j)) for j in range(d)] for i in range(d)]
    for i, j, val in terms:
        rows[i - 1][j - 1] = rows[i - 1][j - 1] + val
    return ExactMatrix.from_dense(CTX, rows)


def test_generator_examples():
    assert sp_generator(1, (2,), T) == I_plus(2, (1, 2, T))
    assert sp_generator(2, (1, -1), CTX.zero()) == ExactMatrix.identity(CTX, 4)
    assert so_generator(4, (1, 1), T) == I_plus(4, (1, 3, T), (2, 4, -T))
    assert so_generator(5, (1, 0), T).substitute({"t": CTX.zero()}) == ExactMatrix.identity(CTX, 5)


def test_domain_errors():
    with pytest.raises(DomainError):
        sp_generator(2, (1, 0), T)
    with pytest.raises(DomainError):
        so_generator(4, (1, 0), T)


def test_involutions_as_printed():
    om = omega(CTX, 3).to_dense()
    assert [[x.constant_value() for x in row] for row in om] == [
        [0, 0, 1], [0, 1, 0], [1, 0, 0]]
    ps = psi(CTX, 4).to_dense()
    assert [[int(x.constant_value().a) for x in row] for row in ps] == [
        [0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]]


def test_membership_examples():
    assert membership(MatrixGroup("Sp", 2), ExactMatrix.identity(CTX, 2))
    d = ExactMatrix.from_dense(CTX, [[CTX.const(2), CTX.zero()], [CTX.zero(), CTX.const(Fraction(1, 2))]])
    assert membership(MatrixGroup("Sp", 2), d)
    bad = I_plus(3, (1, 2, ONE))
    assert not membership(MatrixGroup("SO", 3), bad)


@pytest.mark.parametrize("group", GROUPS, ids=str)
def test_generators_are_members_and_additive(group):
    for r in enumerate_roots(group.root_system):
        x = group.generator(r, T)
        assert membership(group, x)
        assert group.generator(r, T) * group.generator(r, U) == group.generator(r, T + U)
        for vals in ({"t": CycloScalar(3), "u": CycloScalar(1)}, {"t": CycloScalar(0, 1), "u": CycloScalar(2)}):
            assert determinant_at(x, vals) == CycloScalar(1)


@pytest.mark.parametrize("group", [g for g in GROUPS if g.dim <= 7], ids=str)
def test_h_is_diagonal_and_matches_characters(group):
    spec = group.root_system
    tinv = T.as_unit().inverse().to_poly()
    for r in enumerate_roots(spec):
        neg = tuple(-x for x in r)

        def w(s, s_inv):
            return group.generator(r, s) * group.generator(neg, -s_inv) * group.generator(r, s)

        h = w(T, tinv) * w(-ONE, -ONE)
        assert h.is_diagonal()
        s = TorusElement.from_h(spec, r, T.as_unit())
        for p in range(spec.rank):
            e_p = tuple(int(k == p) for k in range(spec.rank))
            assert h.entry(p, p) == char_eval(spec, e_p, s).to_poly()


def test_commutator_examples():
    so6 = MatrixGroup("SO", 6)
    assert extract_commutator_constant(so6, (1, -1, 0), (0, 1, -1)) == (CommutatorFactor((1, 0, -1), 1, 1, 1),)
    sp4 = MatrixGroup("Sp", 4)
    assert extract_commutator_constant(sp4, (1, 1), (1, -1)) == (CommutatorFactor((2, 0), -2, 1, 1),)
    for a, b in trivial_pairs(MatrixGroup("SO", 7))[:40]:
        assert extract_commutator_constant(MatrixGroup("SO", 7), a, b) == ()


def _random_word(group, rng, length):
    roots = enumerate_roots(group.root_system)
    out = ExactMatrix.identity(CTX, group.dim)
    for _ in range(length):
        out = out * group.generator(rng.choice(roots), rng.choice((T, U, -T, T * U)))
    return out


@pytest.mark.parametrize("dims", [(1, 1), (1, 2), (2, 1)])
def test_rho_sp_multiplicative(dims):
    n, m = dims
    rng = random.Random(7)
    ga, gb = MatrixGroup("Sp", 2 * n), MatrixGroup("Sp", 2 * m)
    for _ in range(3):
        a1, a2 = _random_word(ga, rng, rng.randint(1, 4)), _random_word(ga, rng, rng.randint(1, 4))
        b1, b2 = _random_word(gb, rng, rng.randint(1, 4)), _random_word(gb, rng, rng.randint(1, 4))
        lhs = rho_sp(n, m, a1 * a2, b1 * b2)
        assert lhs == rho_sp(n, m, a1, b1) * rho_sp(n, m, a2, b2)
        assert membership(MatrixGroup("SO", 4 * n * m), lhs)


@pytest.mark.parametrize("dims", [(4, 3), (3, 3), (4, 4)])
def test_rho_so_multiplicative(dims):
    d1, d2 = dims
    rng = random.Random(11)
    ga, gb = MatrixGroup("SO", d1), MatrixGroup("SO", d2)
    for _ in range(3):
        a1, a2 = _random_word(ga, rng, rng.randint(1, 4)), _random_word(ga, rng, rng.randint(1, 4))
        b1, b2 = _random_word(gb, rng, rng.randint(1, 4)), _random_word(gb, rng, rng.randint(1, 4))
        lhs = rho_so(d1, d2, a1 * a2, b1 * b2)
        assert lhs == rho_so(d1, d2, a1, b1) * rho_so(d1, d2, a2, b2)
        assert membership(MatrixGroup("SO", d1 * d2), lhs)


def test_rho_identities():
    n, m = 2, 1
    i4, i2 = ExactMatrix.identity(CTX, 4), ExactMatrix.identity(CTX, 2)
    assert rho_sp(n, m, i4, i2) == ExactMatrix.identity(CTX, 8)
    minus = ExactMatrix.from_dense(CTX, [[-x for x in row] for row in i4.to_dense()])
    assert rho_sp(n, m, minus, i2).scalar_value() == CycloScalar(-1)
    with pytest.raises(DomainError):
        rho_sp(n, m, i2, i2)


def test_rho_so_first_table_row():
    # (x_{e1-e2}(t), I) for (4,4) is the product over k = 1..2m of x_{e_k - e_{2m+k}}(t)
    g4, g16 = MatrixGroup("SO", 4), MatrixGroup("SO", 16)
    lhs = rho_so(4, 4, g4.generator((1, -1), T), ExactMatrix.identity(CTX, 4))
    rhs = ExactMatrix.identity(CTX, 16)
    for k in range(1, 5):
        root = [0] * 8
        root[k - 1], root[4 + k - 1] = 1, -1
        rhs = rhs * g16.generator(tuple(root), T)
    assert lhs == rhs


def test_conjugator_p_invertible():
    p = conjugator_p(CTX, 1, 2)
    assert determinant_at(p, {"t": CycloScalar(1), "u": CycloScalar(1)}) != CycloScalar(0)


def test_kronecker_dimensions():
    a = ExactMatrix.identity(CTX, 2)
    b = ExactMatrix.identity(CTX, 3)
    assert kronecker(a, b) == ExactMatrix.identity(CTX, 6)


def test_galois_twists():
    x = so_generator(5, (1, 0), T)
    assert galois_twist_matrix(x, "sqrt2") == so_generator(5, (1, 0), -T)
    ident = ExactMatrix.identity(CTX, 5)
    assert galois_twist_matrix(ident, "i") == ident
    for which in ("i", "sqrt2"):
        assert galois_twist_matrix(galois_twist_matrix(x, which), which) == x


@pytest.mark.parametrize("group", GROUPS, ids=str)
def test_templates_match_oracle(group):
    recs = [check_template_instance(group, i) for i in template_instances(group)]
    assert [r for r in recs if r["status"] != "pass"] == []


def test_mutated_template_detected():
    g = MatrixGroup("Sp", 6)
    mutated = mutate_template(TEMPLATES, 0)
    recs = [check_template_instance(g, i) for i in template_instances(g, mutated)]
    assert any(r["status"] == "fail" for r in recs)

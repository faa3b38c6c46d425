from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kronspin.errors import ConfigurationError, DomainError
from kronspin.root_systems import (
    RootSystemSpec,
    cartan_matrix,
    coroot,
    coroot_coordinates,
    enumerate_roots,
    height,
    is_long,
    pairing,
    parse_root,
    positive_roots,
    reflect,
    root_coordinates,
    root_str,
    simple_reflection_matrix,
    simple_roots,
)

SPECS = [RootSystemSpec(f, n) for f in "BC" for n in range(1, 6)] + [RootSystemSpec("D", n) for n in range(2, 7)]
spec_st = st.sampled_from([s for s in SPECS if s.rank >= 2])


def _mat_vec(m, v):
    return tuple(sum(a * b for a, b in zip(row, v)) for row in m)


def test_root_counts():
    # |Phi| = 2n^2 for B, C and 2n(n-1) for D
    for s in SPECS:
        expected = 2 * s.rank ** 2 if s.family in "BC" else 2 * s.rank * (s.rank - 1)
        assert len(enumerate_roots(s)) == expected
        assert len(positive_roots(s)) * 2 == expected


def test_reflection_matrix_examples():
    d4 = RootSystemSpec("D", 4)
    r = simple_reflection_matrix(d4, 1)
    assert [list(map(int, row)) for row in r] == [
        [0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    b2 = RootSystemSpec("B", 2)
    assert [list(map(int, row)) for row in simple_reflection_matrix(b2, 2)] == [[1, 0], [0, -1]]


@pytest.mark.parametrize("spec", [s for s in SPECS if s.rank >= 2], ids=str)
def test_reflection_squares_to_identity(spec):
    n = spec.rank
    for i in range(1, n + 1):
        r = simple_reflection_matrix(spec, i)
        sq = [[sum(r[a][k] * r[k][b] for k in range(n)) for b in range(n)] for a in range(n)]
        assert sq == [[int(a == b) for b in range(n)] for a in range(n)]


@given(spec_st, st.data())
def test_reflection_is_involutive(spec, data):
    roots = enumerate_roots(spec)
    a = data.draw(st.sampled_from(roots))
    b = data.draw(st.sampled_from(roots))
    assert reflect(a, reflect(a, b)) == b


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_roots_stable_under_simple_reflections(spec):
    roots = set(enumerate_roots(spec))
    for i in range(1, spec.rank + 1):
        r = simple_reflection_matrix(spec, i)
        assert {_mat_vec(r, b) for b in roots} == roots


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_pairings_bounded(spec):
    # <beta, alpha^vee> = 2 with beta != alpha happens only for a long beta and a
    # short alpha (B, C); in D it forces beta = alpha
    roots = enumerate_roots(spec)
    for a, b in product(roots, roots):
        p = pairing(b, a)
        if b == a:
            assert p == 2
            continue
        assert p in (0, 1, -1, 2, -2)
        if p == 2:
            assert spec.family in "BC"
            assert is_long(spec, b) and not is_long(spec, a)


def test_cartan_matrix_convention():
    # C_ij = <alpha_j, alpha_i^vee>
    b2 = RootSystemSpec("B", 2)
    assert [list(r) for r in cartan_matrix(b2)] == [[2, -1], [-2, 2]]
    c2 = RootSystemSpec("C", 2)
    assert [list(r) for r in cartan_matrix(c2)] == [[2, -2], [-1, 2]]


@given(spec_st, st.data())
def test_coroot_coordinates_reconstruct(spec, data):
    beta = data.draw(st.sampled_from(enumerate_roots(spec)))
    coeffs = coroot_coordinates(spec, beta)
    total = [0] * spec.rank
    for c, a in zip(coeffs, simple_roots(spec)):
        total = [t + c * x for t, x in zip(total, coroot(a))]
    assert tuple(total) == tuple(coroot(beta))
    rc = root_coordinates(spec, beta)
    assert len({x >= 0 for x in rc if x}) == 1
    assert height(spec, beta) == sum(rc)


def test_positive_roots_sorted_by_height():
    for s in SPECS:
        hs = [height(s, r) for r in positive_roots(s)]
        assert hs == sorted(hs)


def test_long_and_short():
    b3 = RootSystemSpec("B", 3)
    assert is_long(b3, (1, 1, 0)) and not is_long(b3, (1, 0, 0))
    c3 = RootSystemSpec("C", 3)
    assert is_long(c3, (2, 0, 0)) and not is_long(c3, (1, -1, 0))


def test_parse_and_render_round_trip():
    for s in SPECS:
        for r in enumerate_roots(s):
            assert parse_root(root_str(r), s.rank) == r
    assert parse_root("e1-e2", 4) == (1, -1, 0, 0)


def test_addition_closure_matches_commutator_cases():
    # for every ordered pair with alpha + beta a root exactly one template case applies
    from kronspin.matrix_groups import MatrixGroup, template_instances, uncovered_pairs

    for g in (MatrixGroup("Sp", 6), MatrixGroup("SO", 7), MatrixGroup("SO", 8)):
        spec = g.root_system
        rs = set(enumerate_roots(spec))
        summing = {(a, b) for a in rs for b in rs if tuple(x + y for x, y in zip(a, b)) in rs}
        inst = [(i.alpha, i.beta) for i in template_instances(g)]
        assert len(inst) == len(set(inst))
        covered = set(inst) | set(uncovered_pairs(g))
        assert summing <= covered


def test_bad_specs():
    with pytest.raises((ConfigurationError, DomainError)):
        RootSystemSpec("A", 3)
    with pytest.raises((ConfigurationError, DomainError)):
        RootSystemSpec("B", 0)

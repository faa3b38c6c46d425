from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kronspin.errors import ConfigurationError, DomainError, VerificationFailure
from kronspin.root_systems import RootSystemSpec, enumerate_roots, simple_roots
from kronspin.rost_lattices import (
    GroupType,
    QuadraticForm,
    adjointness_records,
    character_lattice,
    check_lattice_map,
    cocharacter_map,
    group_type,
    killing_form,
    odd_factor_multiplier,
    projection_multiplier,
    pullback,
    restriction_multiplier,
    root_sum_form,
    rost_multiplier,
    theorem_cell,
)
from kronspin.tensor_lifts import sp_lift, spin_lift

ALL_TYPES = [
    GroupType(iso, RootSystemSpec(f, n))
    for iso, fams in (("Spin", "BD"), ("SO", "BD"), ("PSO", "BD"), ("HSpin", "D"), ("Sp", "C"), ("PSp", "C"))
    for f in fams
    for n in range(1 if f == "B" else 2, 9)
    if not (f == "D" and n < 3) and not (iso == "HSpin" and n % 2)
]


def _key(g):
    return f"{g.isogeny}:{g.spec}"


def test_lattice_examples():
    lat = character_lattice(group_type("Spin", 10))
    half = tuple(Fraction(1, 2) for _ in range(5))
    assert lat.contains(half)
    assert all(lat.contains(tuple(int(i == j) for j in range(5))) for i in range(4))
    assert not lat.contains((Fraction(1, 2), 0, 0, 0, 0))
    psp = character_lattice(group_type("PSp", 8))
    zn = character_lattice(group_type("Sp", 8))
    assert psp.index_in(zn) == 2
    so7 = character_lattice(group_type("SO", 7))
    assert so7.index_in(so7) == 1


@pytest.mark.parametrize("g", ALL_TYPES, ids=_key)
def test_lattice_contains_roots(g):
    lat = character_lattice(g)
    assert all(lat.contains(r) for r in enumerate_roots(g.spec))


def test_hspin_needs_even_rank():
    with pytest.raises((DomainError, ConfigurationError)):
        character_lattice(group_type("HSpin", 10))


@pytest.mark.parametrize("g", ALL_TYPES, ids=_key)
def test_killing_form_matches_oracle(frozen, g):
    q = killing_form(g)
    assert q.scalar() == Fraction(frozen["killing"][_key(g)])


@pytest.mark.parametrize("g", ALL_TYPES, ids=_key)
def test_killing_form_invariant_and_minimal(g):
    lat = character_lattice(g)
    q = killing_form(g)
    assert q.is_w_invariant(g.spec)
    assert q.in_sym2(lat)
    # q is a multiple of the root sum form, and no proper divisor of it is integral
    base = root_sum_form(g.spec)
    ratio = q.scalar() / base.scalar()
    assert ratio > 0
    for p in (2, 3, 5, 7):
        assert not (q * Fraction(1, p)).in_sym2(lat)


def test_killing_examples():
    assert killing_form(group_type("Spin", 10)).scalar() == Fraction(1, 2)
    assert killing_form(group_type("PSp", 12)).scalar() == 2
    assert killing_form(group_type("HSpin", 32)).scalar() == Fraction(1, 2)
    assert killing_form(group_type("Spin", 11)).render() == "1/2*sum_{i=1}^{5} e_i^2"


SWEEP = [sp_lift(1, 2), sp_lift(2, 1), sp_lift(2, 2), sp_lift(1, 4), spin_lift(4, 4), spin_lift(6, 4),
         spin_lift(4, 3), spin_lift(4, 5), spin_lift(5, 3), spin_lift(3, 3), spin_lift(6, 3)]


@pytest.mark.parametrize("lm", SWEEP, ids=lambda lm: lm.name())
def test_multipliers_match_dynkin_index(frozen, lm):
    want = tuple(Fraction(x) for x in frozen["dynkin"][f"{lm.kind}:{lm.dims[0]},{lm.dims[1]}"])
    assert tuple(rost_multiplier(lm).multipliers) == want


@pytest.mark.parametrize("lm", SWEEP[:6], ids=lambda lm: lm.name())
def test_pullback_is_invariant_and_routes_agree(lm):
    tg = GroupType("Spin", lm.target)
    for side, src in zip("LR", lm.source):
        phi_e = cocharacter_map(lm, side, "engine")
        phi_m = cocharacter_map(lm, side, "matrix")
        assert phi_e == phi_m
        assert pullback(killing_form(tg), phi_e).is_w_invariant(src)
    assert all(r["status"] == "pass" for side in "LR" for r in adjointness_records(lm, side))


def test_prop_formula_for_sp():
    for n, m in ((1, 2), (2, 3), (3, 2)):
        assert rost_multiplier(sp_lift(n, m)).as_tuple() == (m, n)


def test_quotient_examples():
    assert theorem_cell(2, 2, "psp").as_tuple() == (1, 1)
    # n/2 = 2 (mod 4): (2m+1, 2n)
    assert odd_factor_multiplier(4, 1).as_tuple() == (3, 8)
    assert restriction_multiplier(sp_lift(1, 4), "R") == 1


def test_projection_examples():
    assert projection_multiplier(group_type("HSpin", 8), group_type("PSO", 8)) == 1
    assert projection_multiplier(group_type("HSpin", 16), group_type("PSO", 16)) == 2
    # Spin -> SO: q_SO = sum e_i^2 = 2 q_Spin
    assert projection_multiplier(group_type("Spin", 8), group_type("SO", 8)) == 2
    with pytest.raises(ConfigurationError):
        projection_multiplier(group_type("Spin", 8), group_type("SO", 10))


def test_isogeny_mismatch_is_reported():
    # SO -> HSpin has no map on characters: Spin characters do not pull back into SO's lattice
    ident = [[Fraction(int(i == j)) for j in range(4)] for i in range(4)]
    with pytest.raises(VerificationFailure):
        check_lattice_map(ident, character_lattice(group_type("Spin", 8)), character_lattice(group_type("SO", 8)))


@given(st.sampled_from([g for g in ALL_TYPES if g.spec.rank >= 2]), st.fractions(min_value=-3, max_value=3, max_denominator=3))
def test_scaling_preserves_invariance(g, c):
    q = killing_form(g) * c
    assert q.is_w_invariant(g.spec)


def test_non_invariant_form():
    q = QuadraticForm.from_rows([[1, 0], [0, 2]])
    assert not q.is_w_invariant(RootSystemSpec("B", 2))

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kronspin.errors import DomainError, UnsupportedWordError
from kronspin.exact_arithmetic import CycloScalar
from kronspin.root_systems import RootSystemSpec, enumerate_roots, positive_roots, reflect, simple_roots
from kronspin.steinberg_engine import (
    ENGINE_CTX,
    GenWord,
    TorusElement,
    center,
    char_eval,
    collect_unipotent,
    conjugate_by_w,
    galois_twist_word,
    h_of,
    reduce_word,
    torus_normal_form,
    verify_lemma_identities,
    w_of,
    words_equal,
    x_of,
)

C = ENGINE_CTX
T, U = C.var("t"), C.var("u")
TU, UU = T.as_unit(), U.as_unit()
MINUS = C.unit(-1)
SPIN_SPECS = [RootSystemSpec("D", n) for n in range(2, 7)] + [RootSystemSpec("B", n) for n in range(2, 7)]


def _as_word(cf, spec):
    return cf.torus.to_word() * GenWord(spec, C, tuple(cf.unipotent))


def test_w_and_h_expansions():
    b2 = RootSystemSpec("B", 2)
    w = w_of(b2, (1, 0), TU)
    assert [arg for _, arg in w.factors] == [T, -TU.inverse().to_poly(), T]
    assert len(h_of(b2, (1, 0), TU).factors) == 6
    assert reduce_word(h_of(b2, (1, 0), C.unit(1))).is_identity()
    assert reduce_word(w * w).torus == TorusElement.from_h(b2, (1, 0), MINUS)
    with pytest.raises(DomainError):
        w_of(b2, (1, 0), T + U)


def test_torus_normal_form_examples():
    b3 = RootSystemSpec("B", 3)
    a = (1, -1, 0)
    assert torus_normal_form(b3, [(a, TU), (a, UU)]) == TorusElement.from_h(b3, a, TU * UU)
    assert torus_normal_form(b3, [((0, 1, 0), TU), ((0, 0, 1), TU)]) == TorusElement.from_h(b3, (0, 1, 1), TU ** 2)
    assert torus_normal_form(b3, [(a, TU), ((-1, 1, 0), TU)]).is_one()
    # long-short: h_alpha(t) h_beta(t) = h_{alpha + 2 beta}(t)
    assert torus_normal_form(b3, [(a, TU), ((0, 1, 0), TU)]) == TorusElement.from_h(b3, (1, 1, 0), TU)


@given(st.sampled_from(SPIN_SPECS), st.randoms(use_true_random=False))
def test_torus_normal_form_order_independent(spec, rnd):
    roots = enumerate_roots(spec)
    facs = [(rnd.choice(roots), rnd.choice((TU, UU, MINUS, TU * UU))) for _ in range(5)]
    ref = torus_normal_form(spec, facs)
    rnd.shuffle(facs)
    assert torus_normal_form(spec, facs) == ref


def test_character_examples():
    n = 5
    d5 = RootSystemSpec("D", n)
    ts = [C.unit(1, t=1), C.unit(1, u=1), C.unit(1, t=2), C.unit(1, u=-1), C.unit(1, t=1, u=1)]
    s = TorusElement(d5, tuple(ts))
    e = lambda i: tuple(int(k == i - 1) for k in range(n))  # noqa: E731
    # e_{n-1} = t_{n-2}^{-1} t_{n-1} t_n (the printed exponent -2 is a misprint, see decisions log)
    assert char_eval(d5, e(n - 1), s) == ts[n - 3].inverse() * ts[n - 2] * ts[n - 1]
    b4 = RootSystemSpec("B", 4)
    s = TorusElement(b4, tuple(ts[:4]))
    assert char_eval(b4, e(4), s) == ts[2].inverse() * ts[3] ** 2
    assert char_eval(b4, e(2), TorusElement.one(b4)).is_one()


@given(st.sampled_from(SPIN_SPECS), st.data())
def test_characters_multiplicative_and_pairing(spec, data):
    roots = enumerate_roots(spec)
    beta = data.draw(st.sampled_from(roots))
    alpha = data.draw(st.sampled_from(roots))
    s1 = TorusElement.from_h(spec, beta, TU)
    s2 = TorusElement.from_h(spec, data.draw(st.sampled_from(roots)), UU)
    assert char_eval(spec, alpha, s1 * s2) == char_eval(spec, alpha, s1) * char_eval(spec, alpha, s2)
    from kronspin.root_systems import pairing

    assert char_eval(spec, alpha, s1) == TU ** pairing(alpha, beta)


def test_character_outside_lattice():
    with pytest.raises(DomainError):
        char_eval(RootSystemSpec("D", 4), (Fraction(1, 4), 0, 0, 0), TorusElement.one(RootSystemSpec("D", 4)))


@pytest.mark.parametrize("d", range(4, 13), ids=lambda d: f"Spin{d}")
def test_center_structure_and_projection(d):
    n = d // 2
    spec = RootSystemSpec("B" if d % 2 else "D", n)
    res = center(spec)
    if d % 2:
        assert res.structure == "μ₂"
    else:
        assert res.structure == ("μ₂×μ₂" if n % 2 == 0 else "μ₄")
    kernel = []
    for e in res.elements:
        for a in simple_roots(spec):
            assert char_eval(spec, a, e.torus).is_one()
        mat = e.torus.to_word().project()
        val = mat.scalar_value()
        assert val is not None and val in (1, -1)
        if val == 1:
            kernel.append(e.torus)
    if d % 2 == 0:
        h = torus_normal_form(spec, [(simple_roots(spec)[-2], MINUS), (simple_roots(spec)[-1], MINUS)])
        assert sorted(map(repr, kernel)) == sorted(map(repr, [TorusElement.one(spec), h]))
        if n % 2:
            z = res.by_name("zeta").torus
            assert z * z == h
    else:
        # SO_{2n+1} has trivial center: the whole center of Spin_{2n+1} maps to I
        assert len(kernel) == len(res.elements) == 2


def test_center_examples():
    d4 = RootSystemSpec("D", 4)
    names = {e.name for e in center(d4).elements}
    assert names == {"1", "xi1", "xi2", "h_{a_{n-1}}(-1)h_{a_n}(-1)"}
    c3 = RootSystemSpec("C", 3)
    res = center(c3)
    assert res.structure == "μ₂"
    odd = torus_normal_form(c3, [(simple_roots(c3)[0], MINUS), (simple_roots(c3)[2], MINUS)])
    assert odd in [e.torus for e in res.elements]


def test_collection_examples():
    d3 = RootSystemSpec("D", 3)
    w1 = x_of(d3, (1, -1, 0), T) * x_of(d3, (1, 1, 0), U)
    w2 = x_of(d3, (1, 1, 0), U) * x_of(d3, (1, -1, 0), T)
    assert reduce_word(w1) == reduce_word(w2)
    w = x_of(d3, (0, 1, -1), U) * x_of(d3, (1, -1, 0), T)
    alt = x_of(d3, (1, -1, 0), T) * x_of(d3, (0, 1, -1), U) * x_of(d3, (1, 0, -1), -T * U)
    assert words_equal(w, alt)
    assert w.project() == alt.project()
    b2 = RootSystemSpec("B", 2)
    cf = reduce_word(x_of(b2, (1, 0), T) * x_of(b2, (0, 1), U))
    assert ((1, 1), -2 * T * U) in cf.unipotent


def test_unsupported_word():
    b2 = RootSystemSpec("B", 2)
    with pytest.raises(UnsupportedWordError):
        collect_unipotent(x_of(b2, (1, 0), T) * x_of(b2, (-1, 0), U))


@pytest.mark.parametrize("spec", [RootSystemSpec("D", 4), RootSystemSpec("B", 3), RootSystemSpec("C", 3)], ids=str)
def test_projection_consistency_random_words(spec):
    rng = random.Random(3)
    pos = positive_roots(spec)
    for _ in range(15):
        w = GenWord.identity(spec, C)
        for _ in range(rng.randint(1, 5)):
            if rng.random() < 0.3:
                w = w * h_of(spec, rng.choice(enumerate_roots(spec)), rng.choice((TU, UU, MINUS)))
            else:
                w = w * x_of(spec, rng.choice(pos), rng.choice((T, U, -T, T * U, T + U)))
        cf = reduce_word(w)
        assert _as_word(cf, spec).project() == w.project()


def test_conjugation_examples():
    d4 = RootSystemSpec("D", 4)
    a, b = (1, -1, 0, 0), (0, 1, -1, 0)
    conj = conjugate_by_w(h_of(d4, b, UU), a, TU)
    assert reduce_word(conj).torus == TorusElement.from_h(d4, reflect(a, b), UU)
    conj = conjugate_by_w(x_of(d4, a, U), a, TU)
    (root, arg), = conj.factors
    assert root == tuple(-x for x in a)
    direct = w_of(d4, a, TU) * x_of(d4, a, U) * w_of(d4, a, -TU)
    assert conj.project() == direct.project()


def test_galois_twist_word():
    b2 = RootSystemSpec("B", 2)
    w = x_of(b2, (1, 0), T)
    assert galois_twist_word(w, "sqrt2").factors == x_of(b2, (1, 0), -T).factors
    long_ = x_of(b2, (1, 1), T)
    assert galois_twist_word(long_, "sqrt2").factors == long_.factors
    # the i-twist of h(i) is h(-i)
    h = h_of(b2, (0, 1), C.unit(CycloScalar(0, 1)))
    tw = galois_twist_word(h, "i")
    assert reduce_word(tw).torus == TorusElement.from_h(b2, (0, 1), C.unit(CycloScalar(0, -1)))


@pytest.mark.parametrize("name", ["C2", "B2", "D4"])
def test_lemma_identities_small(name):
    spec = RootSystemSpec(name[0], int(name[1:]))
    recs = verify_lemma_identities(spec)
    assert recs and all(r["status"] == "pass" for r in recs)
    assert {r["identity"] for r in recs} >= {1, 2, 3, 4, 5, 6, 7}

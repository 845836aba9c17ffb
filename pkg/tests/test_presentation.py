import random
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from oracles import count_homs, stack_reduce
from plsembed.abelian import abelianization
from plsembed.groups import FiniteGroup
from plsembed.pipeline import bundled
from plsembed.presentation import (Presentation, cyclic_reduce, free_collision_test, free_reduce,
                                   inverse, label_words, mul, parse_presentation, parse_word,
                                   presentation_of, rotations, substitute, tietze_reduce,
                                   word_str)

words = st.lists(st.integers(-3, 3).filter(bool), max_size=30).map(tuple)


@given(words)
def test_free_reduce_matches_stack(w):
    assert free_reduce(w) == stack_reduce(w)


@given(words, words, words)
def test_word_group_laws(u, v, w):
    assert mul(mul(u, v), w) == mul(u, mul(v, w))
    assert mul(u, inverse(u)) == ()
    assert inverse(inverse(free_reduce(u))) == free_reduce(u)


@given(words)
def test_cyclic_reduce_is_conjugate(w):
    c = cyclic_reduce(w)
    assert len(c) <= len(free_reduce(w))
    if len(c) > 1:
        assert c[0] != -c[-1]
    # c is a rotation of w's reduced core, so some conjugate of w equals c
    r = free_reduce(w)
    k = (len(r) - len(c)) // 2
    assert free_reduce(r[k:len(r) - k]) == c


@given(words)
def test_word_string_roundtrip(w):
    names = ["x", "y", "z"]
    w = free_reduce(w)
    assert parse_word(word_str(w, names), names) == w


def test_presentation_text_roundtrip():
    p = Presentation(["a", "b"], [(1, 1, 1), (2, 2), (1, 2, 1, 2)])
    assert str(p) == "a b | a^3, b^2, a b a b"
    q = parse_presentation(str(p))
    assert q.generators == p.generators and q.relators == p.relators


def test_presentation_of_shape():
    P = bundled("baumslag_b")
    pres = presentation_of(P)
    assert pres.ngens == (P.nrows - 1) + (P.ncols - 1) + P.nsyms
    assert len(pres.relators) == P.size


def _s3():
    perms = [(1, 0, 2), (1, 2, 0)]
    return FiniteGroup.from_permutations(perms)


def _small_pls(species6):
    for cat in species6[:5]:
        for P in cat.reps.values():
            if P.nrows + P.ncols + P.nsyms - 2 <= 6:
                yield P


def test_tietze_preserves_abelian_invariants(species6):
    for cat in species6:
        for P in cat.reps.values():
            pres = presentation_of(P)
            red = tietze_reduce(pres).presentation
            A, B = abelianization(pres), abelianization(red)
            assert (A.torsion, A.rank) == (B.torsion, B.rank)


def test_tietze_preserves_homs_to_s3(species6):
    G = _s3()
    for P in _small_pls(species6):
        pres = presentation_of(P)
        red = tietze_reduce(pres).presentation
        assert count_homs(pres, G.mul, G.inv, G.identity) == \
            count_homs(red, G.mul, G.inv, G.identity)


def test_tietze_images_respect_original_relators(species6):
    # original relators rewritten through the images hold in every map to S3
    G = _s3()
    from itertools import product
    for P in _small_pls(species6):
        pres = presentation_of(P)
        res = tietze_reduce(pres)
        red = res.presentation
        imgs = {g: res.images[g - 1] for g in range(1, pres.ngens + 1)}
        rewritten = [substitute(r, imgs) for r in pres.relators]
        for vals in product(range(G.order), repeat=red.ngens):
            def ev(w):
                x = G.identity
                for g in w:
                    y = vals[abs(g) - 1]
                    x = G.mul[x][y if g > 0 else G.inv[y]]
                return x
            if all(ev(r) == G.identity for r in red.relators):
                assert all(ev(r) == G.identity for r in rewritten)


def test_free_collision_square_reduces_to_cyclic():
    P = bundled("free_collision")
    res = tietze_reduce(presentation_of(P))
    assert res.presentation.ngens == 1 and res.presentation.relators == []
    col = free_collision_test(label_words(P, res.images))
    assert col is not None and col.family == "sym"
    assert {P.symbol_name(col.i), P.symbol_name(col.j)} == {"c", "d"}


def test_kb_collision_square_relator_is_two_squares():
    P = bundled("kb_collision")
    red = tietze_reduce(presentation_of(P)).presentation
    assert red.ngens == 2 and len(red.relators) == 1
    target = (1, 1, -2, -2)     # u^2 v^-2
    r = red.relators[0]
    forms = set()
    for ga, gb in ((1, 2), (2, 1)):
        for sa in (1, -1):
            for sb in (1, -1):
                img = {ga: (sa,), gb: (2 * sb,)}
                w = substitute(r, img)
                forms |= set(rotations(w)) | set(rotations(inverse(w)))
    assert target in forms
    assert free_collision_test(label_words(P, tietze_reduce(presentation_of(P)).images)) is None


def test_collision_describe_uses_symbol_names():
    P = bundled("free_collision")
    res = tietze_reduce(presentation_of(P))
    col = free_collision_test(label_words(P, res.images))
    assert "sym" in col.describe(P)

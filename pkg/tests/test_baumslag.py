import random
from math import comb

import pytest

from oracles import stack_reduce
from plsembed.baumslag import (FAMILIES, FamilyMatch, a_exponent_after_collapse,
                               certify_inf_not_fin, check_pair_proof, collapse_collisions,
                               family_presentation, finite_collapse_certificate, match_family,
                               parse_family_word, to_family_words, verify_family_facts)
from plsembed.pipeline import bundled
from plsembed.presentation import (Presentation, inverse, label_words, presentation_of,
                                   rotations, substitute, tietze_reduce, word_str)

FAMILY_PLS = {"baumslag_b": "B", "baumslag_b1": "B1", "baumslag_b2": "B2"}


def reduced(name):
    P = bundled(name)
    res = tietze_reduce(presentation_of(P))
    return P, res.presentation, label_words(P, res.images)


def _comm(x, y):
    return inverse(x) + inverse(y) + x + y


@pytest.mark.parametrize("name, y", [
    ("B", "a^-1 b a"), ("B1", "a^-1 b^-2 a"), ("B2", "a^-1 b^2 a")])
def test_family_relators(name, y):
    # b = [b, y]  <=>  b^-1 [b, y] = 1
    b = parse_family_word("b")
    want = stack_reduce(inverse(b) + _comm(b, parse_family_word(y)))
    assert FAMILIES[name] == want


def test_family_relator_strings():
    assert word_str(FAMILIES["B"], ["a", "b"]) == "b^-2 a^-1 b^-1 a b a^-1 b a"


@pytest.mark.parametrize("name, fam", FAMILY_PLS.items())
def test_bundled_pls_match(name, fam):
    _, pres, _ = reduced(name)
    assert pres.ngens == 2 and len(pres.relators) == 1
    m = match_family(pres)
    assert m is not None and m.family == fam


def test_match_survives_renaming_inversion_rotation():
    rng = random.Random(4)
    for fam, rel in FAMILIES.items():
        for _ in range(30):
            sa, sb = rng.choice((1, -1)), rng.choice((1, -1))
            swap = rng.random() < 0.5
            ga, gb = (2, 1) if swap else (1, 2)
            w = substitute(rel, {1: (sa * ga,), 2: (sb * gb,)})
            if rng.random() < 0.5:
                w = inverse(w)
            w = rng.choice(list(rotations(w)))
            m = match_family(Presentation(["x", "y"], [w]))
            # B1 and B2 differ only by b -> b^-1
            ok = {"B1", "B2"} if fam != "B" else {"B"}
            assert m is not None and m.family in ok


def test_b1_is_b2_with_b_inverted():
    w = substitute(FAMILIES["B1"], {1: (1,), 2: (-2,)})
    m = match_family(Presentation(["a", "b"], [w]))
    assert m.family == "B2" and m.b == (2, 1)


def test_non_family_relators():
    assert match_family(Presentation(["u", "v"], [(2, 2, -1, -1)])) is None
    assert match_family(Presentation(["a"], [(1, 1)])) is None
    assert match_family(Presentation(["a", "b"], [FAMILIES["B"], (1, 1)])) is None


def test_collapse_exponent():
    assert a_exponent_after_collapse(parse_family_word("a b a^-1 b a a")) == 2


def test_b_square_collapse_is_row1_row4():
    P, pres, fams = reduced("baumslag_b")
    col = finite_collapse_certificate(fams, match_family(pres))
    assert (col.family, col.i, col.j) == ("row", 1, 4)


@pytest.mark.parametrize("name", FAMILY_PLS)
def test_collapse_collision_exists(name):
    _, pres, fams = reduced(name)
    cols = collapse_collisions(fams, match_family(pres))
    assert cols and all(c.i < c.j for c in cols)


@pytest.mark.parametrize("name", FAMILY_PLS)
def test_full_certificate(name):
    P, pres, fams = reduced(name)
    m = match_family(pres)
    cert = certify_inf_not_fin(fams, m)
    assert cert is not None
    assert len(cert.pairs) == comb(P.nrows, 2) + comb(P.ncols, 2) + comb(P.nsyms, 2)
    assert all(check_pair_proof(p, m.family) for p in cert.pairs)
    text = cert.to_text(pres.generators)
    assert text.startswith(f"family {m.family}\n") and "Baumslag" in text


def test_b_square_has_31_pairs():
    _, pres, fams = reduced("baumslag_b")
    assert len(certify_inf_not_fin(fams, match_family(pres)).pairs) == 31


def test_family_facts():
    assert verify_family_facts() == {"B": 1, "B1": 1, "B2": 1}


def test_b_dies_in_small_finite_groups(groups24):
    # the imported axiom, checked on every group of order <= 24
    for fam, rel in FAMILIES.items():
        for G in groups24:
            e = G.identity
            for x in range(G.order):
                for y in range(G.order):
                    v = e
                    for g in rel:
                        z = x if abs(g) == 1 else y
                        v = G.mul[v][z if g > 0 else G.inv[z]]
                    if v == e:
                        assert y == e, (fam, G.name)


def test_pair_proof_replay_rejects_tampering():
    _, pres, fams = reduced("baumslag_b")
    m = match_family(pres)
    cert = certify_inf_not_fin(fams, m)
    rejected = 0
    for p in cert.pairs:
        if p.proof.method != "kb" or not p.proof.t:
            continue
        p.proof.exponents = [e + 1 for e in p.proof.exponents]
        rejected += not check_pair_proof(p, m.family)
    # pairs whose quotient is trivial accept any exponents; the rest must not
    assert rejected > 0

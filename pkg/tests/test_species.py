import random

from oracles import all_dense_pls, random_pls, random_transform
from plsembed.pls import canonical_form, is_connected, parse_pls
from plsembed.species import (build_catalogs, candidate_flags, candidates, catalog_path,
                              count_row, extensions, read_catalog, write_catalog)

# (size, all, connected, candidates) for sizes 1..6
SMALL_COUNTS = [(1, 1, 1, 0), (2, 2, 1, 0), (3, 5, 3, 0), (4, 18, 11, 2),
                (5, 59, 36, 0), (6, 306, 213, 11)]


def test_counts_up_to_size_6(species6):
    assert [count_row(c) for c in species6] == SMALL_COUNTS


def test_counts_size_7(species7):
    assert count_row(species7[-1]) == (7, 1861, 1405, 50)


def test_catalog_complete_against_exhaustive_enumeration(species6):
    # every labelled PLS of size <= 4 lands on a stored representative
    for size in range(1, 5):
        found = {canonical_form(P) for P in all_dense_pls(size)}
        assert found == set(species6[size - 1].reps)


def test_extensions_are_valid_and_one_larger():
    P = parse_pls("a b\nb .")
    exts = list(extensions(P))
    assert exts and all(Q.size == 4 for Q in exts)
    assert any(Q.nrows == 3 for Q in exts) and any(Q.nsyms == 3 for Q in exts)


def test_size_4_candidates():
    cats = build_catalogs(4)
    got = {canonical_form(P) for _, P in candidates(cats[3])}
    want = {canonical_form(parse_pls("a b\nb a")), canonical_form(parse_pls("a b\nb c"))}
    assert got == want


def test_candidate_flags_species_invariant(species6):
    rng = random.Random(5)
    for cat in species6:
        for P in cat.reps.values():
            Q = random_transform(P, rng)
            assert candidate_flags(P).candidate == candidate_flags(Q).candidate


def test_disconnected_never_candidate():
    rng = random.Random(2)
    for _ in range(300):
        P = random_pls(rng, rng.randint(2, 7))
        if not is_connected(P):
            assert not candidate_flags(P).candidate


def test_small_pls_are_pruned():
    # a single row is pruned: its unique row can be dropped
    assert not candidate_flags(parse_pls("a b c")).candidate
    assert candidate_flags(parse_pls("a b\nb a")).candidate


def test_catalog_file_roundtrip(tmp_path, species6):
    cat = species6[4]
    path = catalog_path(tmp_path, cat.size)
    write_catalog(cat, path)
    back = read_catalog(path)
    assert back.size == cat.size and set(back.reps) == set(cat.reps)
    for cf, P in back.reps.items():
        assert canonical_form(P) == cf

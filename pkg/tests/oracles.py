"""Slow but obviously-correct reference implementations used by the tests."""

from __future__ import annotations

from itertools import combinations, permutations, product
import random

import networkx as nx

from plsembed.pls import CONJUGATES, PLS, conjugate, from_triples, relabel


# -- species ----------------------------------------------------------------

def brute_canonical(P: PLS) -> tuple:
    """Least sorted triple list over all conjugates and all relabelings."""
    best = None
    for perm in CONJUGATES:
        Q = conjugate(P, perm)
        for rp in permutations(range(1, Q.nrows + 1)):
            for cp in permutations(range(1, Q.ncols + 1)):
                partial = [(rp[r - 1], cp[c - 1], s) for r, c, s in Q.triples]
                for sp in permutations(range(1, Q.nsyms + 1)):
                    key = tuple(sorted((r, c, sp[s - 1]) for r, c, s in partial))
                    if best is None or key < best:
                        best = key
    return best


def species_graph(P: PLS) -> nx.Graph:
    """Coloured graph whose isomorphisms are exactly the species maps of P.

    One node per row, column, symbol and cell, plus one hub per coordinate
    joined to that coordinate's values; hubs may be permuted, which is
    conjugation.
    """
    g = nx.Graph()
    for k in range(3):
        g.add_node(("hub", k), kind="hub")
    for k, count in enumerate((P.nrows, P.ncols, P.nsyms)):
        for v in range(1, count + 1):
            g.add_node((k, v), kind="value")
            g.add_edge(("hub", k), (k, v))
    for t in P.triples:
        g.add_node(("cell", t), kind="cell")
        for k in range(3):
            g.add_edge(("cell", t), (k, t[k]))
    return g


def same_species(P: PLS, Q: PLS) -> bool:
    if P.size != Q.size or sorted((P.nrows, P.ncols, P.nsyms)) != sorted((Q.nrows, Q.ncols, Q.nsyms)):
        return False
    return nx.is_isomorphic(species_graph(P), species_graph(Q),
                            node_match=lambda a, b: a["kind"] == b["kind"])


def random_transform(P: PLS, rng: random.Random) -> PLS:
    Q = conjugate(P, rng.choice(CONJUGATES))

    def shuffled(n):
        p = list(range(1, n + 1))
        rng.shuffle(p)
        return p

    return relabel(Q, shuffled(Q.nrows), shuffled(Q.ncols), shuffled(Q.nsyms))


def all_dense_pls(size: int):
    """Every PLS of the given size on rows/cols/symbols 1..k with no gaps.

    Symbols are named by first appearance in row-major order, so each
    labelled PLS appears once up to symbol renaming.
    """
    cells = [(r, c) for r in range(1, size + 1) for c in range(1, size + 1)]
    for chosen in combinations(cells, size):
        rows = {r for r, _ in chosen}
        cols = {c for _, c in chosen}
        if rows != set(range(1, len(rows) + 1)) or cols != set(range(1, len(cols) + 1)):
            continue
        yield from _fill_symbols(list(chosen), 0, [], 0)


def _fill_symbols(cells, k, syms, used):
    if k == len(cells):
        yield from_triples([(r, c, s) for (r, c), s in zip(cells, syms)])
        return
    r, c = cells[k]
    for s in range(1, used + 2):
        if any(s == s2 and (r == r2 or c == c2) for (r2, c2), s2 in zip(cells, syms)):
            continue
        syms.append(s)
        yield from _fill_symbols(cells, k + 1, syms, max(used, s))
        syms.pop()


def random_pls(rng: random.Random, size: int, box: int = 6) -> PLS:
    """Random dense PLS with ``size`` cells (rows/cols/symbols relabelled densely)."""
    while True:
        triples = []
        cells = set()
        tries = 0
        while len(triples) < size and tries < 200:
            tries += 1
            r, c, s = rng.randint(1, box), rng.randint(1, box), rng.randint(1, box)
            if (r, c) in cells or any((r == a and s == x) or (c == b and s == x)
                                      for a, b, x in triples):
                continue
            cells.add((r, c))
            triples.append((r, c, s))
        if len(triples) == size:
            maps = [{v: i for i, v in enumerate(sorted({t[k] for t in triples}), 1)}
                    for k in range(3)]
            return from_triples([(maps[0][r], maps[1][c], maps[2][s]) for r, c, s in triples])


def union_find_connected(P: PLS) -> bool:
    """Cells linked when they share a row, column or symbol."""
    ts = list(P.triples)
    parent = list(range(len(ts)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in combinations(range(len(ts)), 2):
        if any(ts[i][k] == ts[j][k] for k in range(3)):
            parent[find(i)] = find(j)
    return len({find(i) for i in range(len(ts))}) <= 1


# -- words ----------------------------------------------------------------

def stack_reduce(w) -> tuple:
    out = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


# -- groups ---------------------------------------------------------------

def cayley_tables(n: int):
    """All group tables on 0..n-1 with identity 0, by backtracking.

    Cells are filled one by one under Latin constraints; each new product
    is checked against every associativity triple it takes part in.
    """
    T = [[-1] * n for _ in range(n)]
    for x in range(n):
        T[0][x] = x
        T[x][0] = x
    cells = [(x, y) for x in range(1, n) for y in range(1, n)]
    where: list[list[tuple[int, int]]] = [[] for _ in range(n)]   # value -> cells
    for x in range(n):
        where[x].append((0, x))
        if x:
            where[x].append((x, 0))

    def assoc_ok(a, b):
        # every associativity triple that uses the new product a*b
        v = T[a][b]
        for z in range(n):                      # (a b) z = a (b z)
            bz = T[b][z]
            if bz >= 0 and T[v][z] >= 0 and T[a][bz] >= 0 and T[v][z] != T[a][bz]:
                return False
        for w in range(n):                      # (w a) b = w (a b)
            wa = T[w][a]
            if wa >= 0 and T[wa][b] >= 0 and T[w][v] >= 0 and T[wa][b] != T[w][v]:
                return False
        for x, y in where[a]:                   # (x y) b = x (y b)
            yb = T[y][b]
            if yb >= 0 and T[x][yb] >= 0 and T[x][yb] != v:
                return False
        for x, y in where[b]:                   # a (x y) = (a x) y
            ax = T[a][x]
            if ax >= 0 and T[ax][y] >= 0 and T[ax][y] != v:
                return False
        return True

    def rec(k):
        if k == len(cells):
            yield [row[:] for row in T]
            return
        x, y = cells[k]
        for z in range(n):
            if z in T[x] or any(T[i][y] == z for i in range(n)):
                continue
            T[x][y] = z
            where[z].append((x, y))
            if assoc_ok(x, y):
                yield from rec(k + 1)
            where[z].pop()
            T[x][y] = -1

    yield from rec(0)


def table_invariant(T) -> tuple:
    """Abelian flag and element order statistics; separates all groups of order <= 8."""
    n = len(T)

    def order(x):
        k, y = 1, x
        while y != 0:
            y = T[y][x]
            k += 1
        return k

    abelian = all(T[x][y] == T[y][x] for x in range(n) for y in range(n))
    return abelian, tuple(sorted(order(x) for x in range(n)))


def naive_embeds(P: PLS, mul) -> bool:
    """Embedding search without the r1 = c1 = identity normalisation."""
    n = len(mul)
    m, k = P.nrows, P.ncols
    if max(P.nrows, P.ncols, P.nsyms) > n:
        return False
    by_pair = {(r, c): s for r, c, s in P.triples}
    rows: list[int] = []
    cols: list[int] = []

    def consistent():
        syms: dict[int, int] = {}
        for (r, c), s in by_pair.items():
            if r <= len(rows) and c <= len(cols):
                v = mul[rows[r - 1]][cols[c - 1]]
                if syms.setdefault(s, v) != v:
                    return False
        vals = list(syms.values())
        return len(set(vals)) == len(vals)

    def rec_cols():
        if len(cols) == k:
            return True
        for g in range(n):
            if g in cols:
                continue
            cols.append(g)
            if consistent() and rec_cols():
                return True
            cols.pop()
        return False

    def rec_rows():
        if len(rows) == m:
            return rec_cols()
        for g in range(n):
            if g in rows:
                continue
            rows.append(g)
            if rec_rows():
                return True
            rows.pop()
        return False

    return rec_rows()


def count_homs(pres, G_mul, G_inv, identity) -> int:
    """Number of homomorphisms from a presented group to a finite group."""
    n = len(G_mul)
    count = 0
    for imgs in product(range(n), repeat=pres.ngens):
        ok = True
        for r in pres.relators:
            x = identity
            for g in r:
                y = imgs[abs(g) - 1]
                x = G_mul[x][y if g > 0 else G_inv[y]]
            if x != identity:
                ok = False
                break
        count += ok
    return count

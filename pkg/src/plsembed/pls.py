"""Partial Latin squares as triple sets.

A PLS is stored as a sorted tuple of ``(row, col, sym)`` triples with dense
1-based indices.  Rows, columns and symbols are all nonempty/used, so the
dimensions are just the maxima of each coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
import string

Triple = tuple[int, int, int]

# all six coordinate permutations; index 0 is the identity
CONJUGATES: tuple[tuple[int, int, int], ...] = tuple(permutations(range(3)))
# identity and the two cyclic shifts (r,c,s) -> (c,s,r) -> (s,r,c)
CYCLIC_CONJUGATES: tuple[tuple[int, int, int], ...] = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


class PLSError(ValueError):
    pass


def default_symbol_name(i: int) -> str:
    if i <= 26:
        return string.ascii_lowercase[i - 1]
    return f"s{i}"


@dataclass(frozen=True)
class PLS:
    triples: tuple[Triple, ...]
    nrows: int
    ncols: int
    nsyms: int
    names: tuple[str, ...] | None = field(default=None, compare=False)

    @property
    def size(self) -> int:
        return len(self.triples)

    def shape(self) -> frozenset[tuple[int, int]]:
        return frozenset((r, c) for r, c, _ in self.triples)

    def symbol_name(self, s: int) -> str:
        if self.names is not None:
            return self.names[s - 1]
        return default_symbol_name(s)

    def cell(self, r: int, c: int) -> int | None:
        for t in self.triples:
            if t[0] == r and t[1] == c:
                return t[2]
        return None

    def __str__(self) -> str:
        return render_pls(self)


def projection(triples, *coords: int) -> set:
    """Projection of a triple set onto the given 0-based coordinates."""
    if len(coords) == 1:
        (i,) = coords
        return {t[i] for t in triples}
    return {tuple(t[i] for i in coords) for t in triples}


def check_latin(triples) -> None:
    seen = [{}, {}, {}]
    for t in triples:
        for k, (i, j) in enumerate(((0, 1), (0, 2), (1, 2))):
            key = (t[i], t[j])
            if key in seen[k]:
                what = ("cell filled twice", "symbol repeated in row",
                        "symbol repeated in column")[k]
                raise PLSError(f"{what}: {seen[k][key]} and {t}")
            seen[k][key] = t


def from_triples(triples, names=None) -> PLS:
    """Build a PLS from triples whose coordinates are already dense from 1."""
    raw = [tuple(t) for t in triples]
    ts = tuple(sorted(set(raw)))
    if not ts:
        raise PLSError("empty PLS")
    if len(ts) != len(raw):
        raise PLSError("duplicate triple")
    check_latin(ts)
    dims = []
    for i in range(3):
        vals = {t[i] for t in ts}
        k = max(vals)
        if min(vals) < 1 or len(vals) != k:
            raise PLSError(f"coordinate {i + 1} values are not 1..{k}: {sorted(vals)}")
        dims.append(k)
    if names is not None:
        names = tuple(names)
        if len(names) != dims[2]:
            raise PLSError("symbol name count does not match symbols")
    return PLS(ts, dims[0], dims[1], dims[2], names)


def relabel_dense(triples) -> PLS:
    """Renumber each coordinate to 1..k preserving the value order."""
    ts = list(triples)
    maps = []
    for i in range(3):
        vals = sorted({t[i] for t in ts})
        maps.append({v: k + 1 for k, v in enumerate(vals)})
    return from_triples([(maps[0][r], maps[1][c], maps[2][s]) for r, c, s in ts])


def parse_pls(text: str) -> PLS:
    """Parse a whitespace separated grid; ``.`` marks an empty cell.

    Symbol names are numbered in order of first appearance (row major).
    """
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise PLSError("empty grid")
    width = len(lines[0])
    ids: dict[str, int] = {}
    triples = []
    for i, toks in enumerate(lines, 1):
        if len(toks) != width:
            raise PLSError(f"ragged grid: row {i} has {len(toks)} cells, expected {width}")
        for j, tok in enumerate(toks, 1):
            if tok == ".":
                continue
            s = ids.setdefault(tok, len(ids) + 1)
            triples.append((i, j, s))
    filled_rows = {t[0] for t in triples}
    filled_cols = {t[1] for t in triples}
    for i in range(1, len(lines) + 1):
        if i not in filled_rows:
            raise PLSError(f"row {i} is empty")
    for j in range(1, width + 1):
        if j not in filled_cols:
            raise PLSError(f"column {j} is empty")
    try:
        check_latin(triples)
    except PLSError as e:
        raise PLSError(f"{e} (cells given as (row, col, symbol id))") from None
    names = sorted(ids, key=ids.get)
    return from_triples(triples, names)


def render_pls(P: PLS) -> str:
    grid = [["."] * P.ncols for _ in range(P.nrows)]
    for r, c, s in P.triples:
        grid[r - 1][c - 1] = P.symbol_name(s)
    w = max(len(x) for row in grid for x in row)
    return "\n".join(" ".join(x.ljust(w) for x in row).rstrip() for row in grid)


def conjugate(P: PLS, perm) -> PLS:
    """Permute triple coordinates: new coordinate i is old coordinate perm[i]."""
    perm = tuple(perm)
    if sorted(perm) != [0, 1, 2]:
        raise ValueError(f"not a permutation of (0, 1, 2): {perm}")
    names = P.names if perm[2] == 2 else None
    return from_triples([(t[perm[0]], t[perm[1]], t[perm[2]]) for t in P.triples], names)


def relabel(P: PLS, rowperm, colperm, symperm) -> PLS:
    """Apply relabelings given as sequences mapping old index-1 to new index."""
    return from_triples([(rowperm[r - 1], colperm[c - 1], symperm[s - 1])
                         for r, c, s in P.triples])


def canonical_form(P: PLS) -> bytes:
    """Species invariant: equal for two PLS iff they are in the same species.

    Every ordering of the triples, combined with every coordinate
    permutation, determines a labelling in which rows, columns and symbols
    are numbered by first appearance.  The canonical form is the
    lexicographically least resulting triple sequence.  Since all sequences
    have the same length, the minimum is found greedily, keeping every
    partial ordering that ties for the least next triple.
    """
    n = len(P.triples)
    tables = [[(t[p[0]], t[p[1]], t[p[2]]) for t in P.triples] for p in CONJUGATES]
    full = (1 << n) - 1
    # state: (conjugate index, used mask, row map, col map, sym map)
    states = {(k, 0, (), (), ()) for k in range(6)}
    out = bytearray()
    while True:
        best = None
        nxt = []
        for st in states:
            k, mask, rm, cm, sm = st
            if mask == full:
                return bytes(out)
            tab = tables[k]
            for i in range(n):
                if mask >> i & 1:
                    continue
                x, y, z = tab[i]
                # values in maps are stored as pairs (old, new); maps are small
                ex = _lookup(rm, x)
                ey = _lookup(cm, y)
                ez = _lookup(sm, z)
                enc = (ex or len(rm) // 2 + 1, ey or len(cm) // 2 + 1, ez or len(sm) // 2 + 1)
                if best is None or enc < best:
                    best = enc
                    nxt = [(st, i, ex, ey, ez)]
                elif enc == best:
                    nxt.append((st, i, ex, ey, ez))
        new_states = set()
        for (k, mask, rm, cm, sm), i, ex, ey, ez in nxt:
            x, y, z = tables[k][i]
            new_states.add((
                k,
                mask | (1 << i),
                rm if ex else rm + (x, best[0]),
                cm if ey else cm + (y, best[1]),
                sm if ez else sm + (z, best[2]),
            ))
        out.extend(best)
        states = new_states


def _lookup(m: tuple, v: int) -> int:
    for j in range(0, len(m), 2):
        if m[j] == v:
            return m[j + 1]
    return 0


def from_canonical(cf: bytes) -> PLS:
    return from_triples([tuple(cf[i:i + 3]) for i in range(0, len(cf), 3)])


def is_connected(P: PLS) -> bool:
    """Connectivity of the graph on triples joined when any coordinate agrees."""
    ts = P.triples
    seen = {0}
    stack = [0]
    while stack:
        a = ts[stack.pop()]
        for j, b in enumerate(ts):
            if j not in seen and (a[0] == b[0] or a[1] == b[1] or a[2] == b[2]):
                seen.add(j)
                stack.append(j)
    return len(seen) == len(ts)

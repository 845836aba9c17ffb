"""Small finite groups and the complete embedding search for PLS.

Groups are Cayley tables over elements ``0..n-1``.  The catalog is built
by cyclic extensions: every group of order at most 24 is solvable, so it
has a normal subgroup H of prime index p and is generated by H and one
element t with t^p in H.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
import logging
import os
from pathlib import Path
import struct

from .pls import PLS

log = logging.getLogger(__name__)

MAX_SUPPORTED_ORDER = 24
CATALOG_MAGIC = b"PLSGRPS"
CATALOG_VERSION = 1

# number of groups of each order, used only to report incomplete catalogs
KNOWN_COUNTS = {1: 1, 2: 1, 3: 1, 4: 2, 5: 1, 6: 2, 7: 1, 8: 5, 9: 2, 10: 2, 11: 1,
                12: 5, 13: 1, 14: 2, 15: 1, 16: 14, 17: 1, 18: 5, 19: 1, 20: 5,
                21: 2, 22: 2, 23: 1, 24: 15}


class FiniteGroup:
    def __init__(self, table, name: str = "", gen_elements=None):
        self.mul = [list(row) for row in table]
        self.order = len(self.mul)
        self.identity = next(e for e in range(self.order)
                             if all(self.mul[e][x] == x for x in range(self.order)))
        self.inv = [0] * self.order
        for x in range(self.order):
            for y in range(self.order):
                if self.mul[x][y] == self.identity:
                    self.inv[x] = y
                    break
        self.abelian = all(self.mul[x][y] == self.mul[y][x]
                           for x in range(self.order) for y in range(x))
        self.name = name
        self.gen_elements = gen_elements

    def __repr__(self):
        return f"FiniteGroup({self.name or self.order})"

    @classmethod
    def from_permutations(cls, perms, name: str = "") -> "FiniteGroup":
        """The group generated by permutations (tuples of 0-based images)."""
        n = len(perms[0]) if perms else 1
        ident = tuple(range(n))
        elems = [ident]
        index = {ident: 0}
        i = 0
        while i < len(elems):
            x = elems[i]
            for p in perms:
                y = tuple(p[k] for k in x)   # x then p
                if y not in index:
                    index[y] = len(elems)
                    elems.append(y)
            i += 1
        table = [[index[tuple(b[k] for k in a)] for b in elems] for a in elems]
        gens = [index[tuple(p)] for p in perms]
        return cls(table, name, gens)

    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != self.identity:
            y = self.mul[y][x]
            k += 1
        return k

    def power(self, x: int, n: int) -> int:
        if n < 0:
            x, n = self.inv[x], -n
        y = self.identity
        for _ in range(n):
            y = self.mul[y][x]
        return y

    def is_associative(self) -> bool:
        M = self.mul
        r = range(self.order)
        return all(M[M[a][b]][c] == M[a][M[b][c]] for a in r for b in r for c in r)

    def subgroup_closure(self, gens) -> set[int]:
        S = {self.identity}
        frontier = [self.identity]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.mul[x][g]
                if y not in S:
                    S.add(y)
                    frontier.append(y)
        return S

    def derived_order(self) -> int:
        comms = {self.mul[self.mul[self.inv[x]][self.inv[y]]][self.mul[x][y]]
                 for x in range(self.order) for y in range(self.order)}
        return len(self.subgroup_closure(comms))

    def centralizer_size(self, x: int) -> int:
        return sum(self.mul[x][y] == self.mul[y][x] for y in range(self.order))

    def element_classes(self) -> list[tuple[int, int, int]]:
        """Per element: (order, centralizer size, number of square roots)."""
        sq = Counter(self.mul[x][x] for x in range(self.order))
        return [(self.element_order(x), self.centralizer_size(x), sq[x])
                for x in range(self.order)]

    def invariants(self) -> tuple:
        return (self.order, self.abelian, self.derived_order(),
                tuple(sorted(Counter(self.element_classes()).items())))

    def generating_set(self) -> list[int]:
        """A small generating set, greedily by largest resulting subgroup."""
        gens: list[int] = []
        S = {self.identity}
        order_by = sorted(range(self.order), key=lambda x: -self.element_order(x))
        while len(S) < self.order:
            best = max((x for x in order_by if x not in S),
                       key=lambda x: len(self.subgroup_closure(gens + [x])))
            gens.append(best)
            S = self.subgroup_closure(gens)
        return gens

    def to_bytes(self) -> bytes:
        return bytes(x for row in self.mul for x in row)


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup([[(i + j) % n for j in range(n)] for i in range(n)], f"C{n}")


def direct_product(*groups: FiniteGroup) -> FiniteGroup:
    elems = list(product(*[range(G.order) for G in groups]))
    index = {e: i for i, e in enumerate(elems)}
    table = [[index[tuple(G.mul[a][b] for G, a, b in zip(groups, x, y))] for y in elems]
             for x in elems]
    return FiniteGroup(table, " x ".join(G.name for G in groups))


def find_isomorphism(G: FiniteGroup, H: FiniteGroup) -> list[int] | None:
    """An isomorphism G -> H as a list of images, or None."""
    if G.order != H.order or G.abelian != H.abelian:
        return None
    cg, ch = G.element_classes(), H.element_classes()
    if sorted(cg) != sorted(ch):
        return None
    gens = G.generating_set()
    # express every element of G as a word in gens (BFS tree)
    parent: dict[int, tuple[int, int]] = {G.identity: (-1, -1)}
    order = [G.identity]
    for x in order:
        for k, g in enumerate(gens):
            y = G.mul[x][g]
            if y not in parent:
                parent[y] = (x, k)
                order.append(y)
    choices = [[h for h in range(H.order) if ch[h] == cg[g]] for g in gens]

    def extend(imgs):
        f = [0] * G.order
        f[G.identity] = H.identity
        for y in order[1:]:
            x, k = parent[y]
            f[y] = H.mul[f[x]][imgs[k]]
        if len(set(f)) != G.order:
            return None
        for a in range(G.order):
            for b in range(G.order):
                if f[G.mul[a][b]] != H.mul[f[a]][f[b]]:
                    return None
        return f

    def rec(k, imgs):
        if k == len(gens):
            return extend(imgs)
        for h in choices[k]:
            if h in imgs:
                continue
            r = rec(k + 1, imgs + [h])
            if r is not None:
                return r
        return None

    return rec(0, [])


def automorphisms(H: FiniteGroup) -> list[list[int]]:
    gens = H.generating_set()
    parent: dict[int, tuple[int, int]] = {H.identity: (-1, -1)}
    order = [H.identity]
    for x in order:
        for k, g in enumerate(gens):
            y = H.mul[x][g]
            if y not in parent:
                parent[y] = (x, k)
                order.append(y)
    cls = H.element_classes()
    out = []
    for imgs in product(*[[h for h in range(H.order) if cls[h] == cls[g]] for g in gens]):
        f = [0] * H.order
        f[H.identity] = H.identity
        for y in order[1:]:
            x, k = parent[y]
            f[y] = H.mul[f[x]][imgs[k]]
        if len(set(f)) != H.order:
            continue
        if all(f[H.mul[a][b]] == H.mul[f[a]][f[b]]
               for a in range(H.order) for b in range(H.order)):
            out.append(f)
    return out


def cyclic_extension(H: FiniteGroup, p: int, alpha, h0: int) -> FiniteGroup:
    """Group of pairs (h, e) meaning h t^e, with t x t^-1 = alpha(x) and t^p = h0."""
    n = H.order
    M = H.mul
    # alpha^e
    apow = [list(range(n))]
    for _ in range(1, p):
        prev = apow[-1]
        apow.append([alpha[prev[x]] for x in range(n)])
    table = []
    for e1 in range(p):
        for h1 in range(n):
            row = []
            for e2 in range(p):
                for h2 in range(n):
                    h = M[h1][apow[e1][h2]]
                    e = e1 + e2
                    if e >= p:
                        h = M[h][h0]
                        e -= p
                    row.append(e * n + h)
            table.append(row)
    return FiniteGroup(table)


def _primes(n: int) -> list[int]:
    return [p for p in range(2, n + 1) if n % p == 0 and all(p % q for q in range(2, p))]


def _conj(H: FiniteGroup, h0: int) -> list[int]:
    return [H.mul[H.mul[h0][x]][H.inv[h0]] for x in range(H.order)]


def _add_if_new(found: list[FiniteGroup], G: FiniteGroup) -> bool:
    inv = G.invariants()
    for K in found:
        if K._inv == inv and find_isomorphism(G, K) is not None:
            return False
    G._inv = inv
    found.append(G)
    return True


@lru_cache(maxsize=None)
def groups_of_order(n: int) -> tuple[FiniteGroup, ...]:
    """One group per isomorphism class of order n (n <= 24)."""
    if n == 1:
        G = FiniteGroup([[0]], "C1")
        return (G,)
    found: list[FiniteGroup] = []
    cyc = cyclic_group(n)
    _add_if_new(found, cyc)
    for p in _primes(n):
        for H in groups_of_order(n // p):
            auts = automorphisms(H)
            for alpha in auts:
                ap = list(range(H.order))
                for _ in range(p):
                    ap = [alpha[x] for x in ap]
                for h0 in range(H.order):
                    if alpha[h0] != h0 or _conj(H, h0) != ap:
                        continue
                    _add_if_new(found, cyclic_extension(H, p, alpha, h0))
    for k, G in enumerate(found):
        if not G.name:
            G.name = f"G{n}_{k + 1}"
    return tuple(found)


@dataclass
class Catalog:
    groups: list[FiniteGroup] = field(default_factory=list)
    max_order: int = 0

    def __iter__(self):
        return iter(self.groups)

    def __len__(self):
        return len(self.groups)

    def of_order(self, n: int) -> list[FiniteGroup]:
        return [G for G in self.groups if G.order == n]


def build_catalog(max_order: int = MAX_SUPPORTED_ORDER) -> Catalog:
    if not 1 <= max_order <= MAX_SUPPORTED_ORDER:
        raise ValueError(f"catalog supports orders 1..{MAX_SUPPORTED_ORDER}, got {max_order}")
    groups = []
    for n in range(1, max_order + 1):
        gs = sorted(groups_of_order(n), key=lambda G: not G.abelian)
        if len(gs) != KNOWN_COUNTS[n]:
            log.warning("order %d: built %d classes, expected %d", n, len(gs), KNOWN_COUNTS[n])
        groups.extend(gs)
    return Catalog(groups, max_order)


def save_catalog(cat: Catalog, path) -> None:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as f:
        f.write(CATALOG_MAGIC + struct.pack("<HHI", CATALOG_VERSION, cat.max_order, len(cat)))
        for G in cat.groups:
            name = G.name.encode()
            f.write(struct.pack("<HH", G.order, len(name)) + name + G.to_bytes())
    os.replace(tmp, path)


def load_catalog(path) -> Catalog:
    data = Path(path).read_bytes()
    if not data.startswith(CATALOG_MAGIC):
        raise ValueError(f"{path}: not a group catalog")
    pos = len(CATALOG_MAGIC)
    version, max_order, count = struct.unpack_from("<HHI", data, pos)
    if version != CATALOG_VERSION:
        raise ValueError(f"{path}: catalog format version {version}, expected {CATALOG_VERSION}")
    pos += 8
    groups = []
    for _ in range(count):
        n, ln = struct.unpack_from("<HH", data, pos)
        pos += 4
        name = data[pos:pos + ln].decode()
        pos += ln
        flat = data[pos:pos + n * n]
        pos += n * n
        groups.append(FiniteGroup([list(flat[i * n:(i + 1) * n]) for i in range(n)], name))
    return Catalog(groups, max_order)


def default_cache_dir() -> Path:
    return Path(os.environ.get("PLSEMBED_CACHE", Path.home() / ".cache" / "plsembed"))


def get_catalog(max_order: int = MAX_SUPPORTED_ORDER, cache_dir=None) -> Catalog:
    """Load the catalog from the cache directory, building and saving it if absent."""
    cache_dir = Path(cache_dir) if cache_dir else default_cache_dir()
    path = cache_dir / f"groups_{max_order}.bin"
    if path.exists():
        try:
            return load_catalog(path)
        except ValueError:
            log.warning("ignoring unreadable catalog %s", path)
    cat = build_catalog(max_order)
    try:
        cache_dir.mkdir(parents=True, exist_ok=True)
        save_catalog(cat, path)
    except OSError:
        log.warning("could not write catalog cache %s", path)
    return cat


# -- embeddings ----------------------------------------------------------------

@dataclass
class EmbeddingWitness:
    group: FiniteGroup
    rows: list[int]
    cols: list[int]
    syms: list[int]

    def check(self, P: PLS) -> bool:
        return check_witness(P, self.group.mul, self.group.identity,
                             self.rows, self.cols, self.syms)


def check_witness(P: PLS, mul, identity, rows, cols, syms) -> bool:
    """Independent check: normalization, injectivity and r_i c_j = s on every cell."""
    if len(rows) != P.nrows or len(cols) != P.ncols or len(syms) != P.nsyms:
        return False
    if rows[0] != identity or cols[0] != identity:
        return False
    for fam in (rows, cols, syms):
        if len(set(fam)) != len(fam):
            return False
    return all(mul[rows[r - 1]][cols[c - 1]] == syms[s - 1] for r, c, s in P.triples)


def embed_into_group(P: PLS, G: FiniteGroup) -> EmbeddingWitness | None:
    """Complete search for labels with r_1 = c_1 = 1.

    Unknown rows/columns are branched on (highest degree first, rows before
    columns on ties); every cell with two known labels forces the third.
    """
    if max(P.nrows, P.ncols, P.nsyms) > G.order:
        return None
    M, inv, e = G.mul, G.inv, G.identity
    m, n, k = P.nrows, P.ncols, P.nsyms
    # variables: rows 0..m-1, cols m..m+n-1, syms m+n..m+n+k-1
    nv = m + n + k
    fam = [0] * m + [1] * n + [2] * k
    cells = [(r - 1, m + c - 1, m + n + s - 1) for r, c, s in P.triples]
    touching: list[list[tuple[int, int, int]]] = [[] for _ in range(nv)]
    for cell in cells:
        for v in cell:
            touching[v].append(cell)
    degree = [len(t) for t in touching]
    branch_order = sorted(range(m + n), key=lambda v: (-degree[v], v >= m, v))

    def assign(vals, used, v, x, queue):
        if vals[v] is not None:
            return vals[v] == x
        if x in used[fam[v]]:
            return False
        vals[v] = x
        used[fam[v]].add(x)
        queue.append(v)
        return True

    def propagate(vals, used, queue):
        while queue:
            v = queue.pop()
            for r, c, s in touching[v]:
                a, b, z = vals[r], vals[c], vals[s]
                if a is not None and b is not None:
                    if not assign(vals, used, s, M[a][b], queue):
                        return False
                elif a is not None and z is not None:
                    if not assign(vals, used, c, M[inv[a]][z], queue):
                        return False
                elif b is not None and z is not None:
                    if not assign(vals, used, r, M[z][inv[b]], queue):
                        return False
        return True

    vals0: list = [None] * nv
    used0 = [set(), set(), set()]
    q: list[int] = []
    assign(vals0, used0, 0, e, q)
    assign(vals0, used0, m, e, q)
    if not propagate(vals0, used0, q):
        return None

    def rec(vals, used):
        v = next((u for u in branch_order if vals[u] is None), None)
        if v is None:
            return vals
        for x in range(G.order):
            if x in used[fam[v]]:
                continue
            vals2 = list(vals)
            used2 = [set(s) for s in used]
            q2: list[int] = []
            assign(vals2, used2, v, x, q2)
            if propagate(vals2, used2, q2):
                r = rec(vals2, used2)
                if r is not None:
                    return r
        return None

    sol = rec(vals0, used0)
    if sol is None:
        return None
    w = EmbeddingWitness(G, sol[:m], sol[m:m + n], sol[m + n:])
    assert w.check(P)
    return w


def find_finite_embedding(P: PLS, catalog: Catalog, max_order: int | None = None,
                          nonabelian_only: bool = False) -> EmbeddingWitness | None:
    """First embedding over the catalog in increasing order, abelian groups first."""
    groups = sorted(catalog.groups, key=lambda G: (G.order, not G.abelian))
    for G in groups:
        if max_order is not None and G.order > max_order:
            break
        if nonabelian_only and G.abelian:
            continue
        w = embed_into_group(P, G)
        if w is not None:
            return w
    return None


def product_embed(P: PLS, T1, T2, w1: EmbeddingWitness, w2: EmbeddingWitness,
                  P1: PLS, P2: PLS, maps1, maps2) -> EmbeddingWitness:
    """Embedding of P = T1 u T2 into G x H x C3 from embeddings of its two parts.

    ``P1``/``P2`` are the parts relabelled densely, and ``maps1``/``maps2``
    give, per coordinate, the dict from P's indices to the part's indices.
    Part one's labels go to (g, 1, 1); part two's rows and columns to
    (1, h, t) and its symbols to (1, h, t^2).
    """
    for i in range(3):
        if {t[i] for t in T1} & {t[i] for t in T2}:
            raise ValueError(f"parts share coordinate {i + 1} values")
    C3 = cyclic_group(3)
    G, H = w1.group, w2.group
    GHC = direct_product(G, H, C3)
    idx = {(a, b, c): i for i, (a, b, c) in
           enumerate(product(range(G.order), range(H.order), range(3)))}
    part1 = [{t[i] for t in T1} for i in range(3)]
    labels1 = (w1.rows, w1.cols, w1.syms)
    labels2 = (w2.rows, w2.cols, w2.syms)
    out = []
    for coord, count in enumerate((P.nrows, P.ncols, P.nsyms)):
        fam = []
        for x in range(1, count + 1):
            if x in part1[coord]:
                g = labels1[coord][maps1[coord][x] - 1]
                fam.append(idx[(g, H.identity, 0)])
            else:
                h = labels2[coord][maps2[coord][x] - 1]
                fam.append(idx[(G.identity, h, 2 if coord == 2 else 1)])
        out.append(fam)
    # normalize so that row 1 and column 1 are the identity
    r1inv, c1inv = GHC.inv[out[0][0]], GHC.inv[out[1][0]]
    M = GHC.mul
    rows = [M[r1inv][x] for x in out[0]]
    cols = [M[x][c1inv] for x in out[1]]
    syms = [M[M[r1inv][x]][c1inv] for x in out[2]]
    w = EmbeddingWitness(GHC, rows, cols, syms)
    if not w.check(P):
        raise AssertionError("product embedding failed verification")
    return w


def split_components(P: PLS):
    """Connected components of the triple graph, as triple lists."""
    ts = list(P.triples)
    comp = [-1] * len(ts)
    k = 0
    for s in range(len(ts)):
        if comp[s] >= 0:
            continue
        comp[s] = k
        stack = [s]
        while stack:
            a = ts[stack.pop()]
            for j, b in enumerate(ts):
                if comp[j] < 0 and (a[0] == b[0] or a[1] == b[1] or a[2] == b[2]):
                    comp[j] = k
                    stack.append(j)
        k += 1
    return [[t for t, c in zip(ts, comp) if c == i] for i in range(k)]


def dense_part(triples):
    """Relabel a triple subset densely; returns (PLS, per-coordinate maps)."""
    from .pls import from_triples
    maps = []
    for i in range(3):
        vals = sorted({t[i] for t in triples})
        maps.append({v: j + 1 for j, v in enumerate(vals)})
    Q = from_triples([(maps[0][r], maps[1][c], maps[2][s]) for r, c, s in triples])
    return Q, maps

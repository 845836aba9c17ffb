"""Todd-Coxeter coset enumeration and the random finite-quotient search."""

from __future__ import annotations

from dataclasses import dataclass
import random

from .presentation import Presentation, Word, free_reduce, inverse, word_str

DEFAULT_MAX_COSETS = 100_000


class Overflow(Exception):
    pass


def _col(x: int) -> int:
    return 2 * (x - 1) if x > 0 else 2 * (-x - 1) + 1


class CosetTable:
    """Coset table over the doubled alphabet; column ``c ^ 1`` is the inverse of ``c``.

    Cosets are numbered from 1 and coset 1 is the subgroup itself.  Entry 0
    means undefined.  Dead cosets point at a smaller live coset via
    ``parent``.
    """

    def __init__(self, pres: Presentation, subgens=(), max_cosets=DEFAULT_MAX_COSETS):
        self.pres = pres
        self.ncols = 2 * pres.ngens
        self.max_cosets = max_cosets
        self.table: list[list[int]] = [[0] * self.ncols, [0] * self.ncols]
        self.parent = [0, 1]
        self.live = 1
        self.deductions: list[tuple[int, int]] = []
        self.closed = False
        self.relators = [[_col(x) for x in r] for r in pres.relators if r]
        self.subgens = [[_col(x) for x in free_reduce(w)] for w in subgens]
        # relator rotations (and their inverses) indexed by first letter
        self.by_letter: list[list[list[int]]] = [[] for _ in range(self.ncols)]
        seen = set()
        for r in self.relators:
            for w in (r, [c ^ 1 for c in reversed(r)]):
                for i in range(len(w)):
                    rot = tuple(w[i:] + w[:i])
                    if rot not in seen:
                        seen.add(rot)
                        self.by_letter[rot[0]].append(list(rot))

    # -- basic operations ---------------------------------------------------

    def is_live(self, a: int) -> bool:
        return self.parent[a] == a

    def rep(self, a: int) -> int:
        p = self.parent
        root = a
        while p[root] != root:
            root = p[root]
        while p[a] != root:
            p[a], a = root, p[a]
        return root

    def define(self, a: int, c: int) -> int:
        if self.live >= self.max_cosets:
            raise Overflow
        b = len(self.table)
        self.table.append([0] * self.ncols)
        self.parent.append(b)
        self.live += 1
        self.table[a][c] = b
        self.table[b][c ^ 1] = a
        self.deductions.append((a, c))
        return b

    def _merge(self, k: int, l: int, queue: list[int]) -> None:
        k, l = self.rep(k), self.rep(l)
        if k == l:
            return
        lo, hi = min(k, l), max(k, l)
        self.parent[hi] = lo
        self.live -= 1
        queue.append(hi)

    def coincidence(self, a: int, b: int) -> None:
        T = self.table
        queue: list[int] = []
        self._merge(a, b, queue)
        i = 0
        while i < len(queue):
            g = queue[i]
            i += 1
            row = T[g]
            for c in range(self.ncols):
                d = row[c]
                if not d:
                    continue
                ci = c ^ 1
                if T[d][ci] == g:
                    T[d][ci] = 0
                mu, nu = self.rep(g), self.rep(d)
                if T[mu][c]:
                    self._merge(nu, T[mu][c], queue)
                elif T[nu][ci]:
                    self._merge(mu, T[nu][ci], queue)
                else:
                    T[mu][c] = nu
                    T[nu][ci] = mu
                    self.deductions.append((mu, c))

    def scan(self, a: int, w, fill: bool = False) -> None:
        """Trace ``w`` from ``a`` forwards and backwards; deduce or define."""
        T = self.table
        f, i = a, 0
        b, j = a, len(w) - 1
        while True:
            while i <= j and T[f][w[i]]:
                f = T[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and T[b][w[j] ^ 1]:
                b = T[b][w[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                T[f][w[i]] = b
                T[b][w[i] ^ 1] = f
                self.deductions.append((f, w[i]))
                return
            if not fill:
                return
            self.define(f, w[i])

    def process_deductions(self) -> None:
        T = self.table
        while self.deductions:
            a, c = self.deductions.pop()
            if self.is_live(a):
                for w in self.by_letter[c]:
                    self.scan(a, w)
                    if not self.is_live(a):
                        break
            if self.is_live(a):
                b = T[a][c]
                if b and self.is_live(b):
                    for w in self.by_letter[c ^ 1]:
                        self.scan(b, w)
                        if not self.is_live(b):
                            break

    # -- strategies -----------------------------------------------------------

    def run_felsch(self) -> None:
        for w in self.subgens:
            self.scan(1, w, fill=True)
            self.process_deductions()
        for r in self.relators:
            self.scan(1, r, fill=True)
            self.process_deductions()
        a = 1
        while a < len(self.table):
            for c in range(self.ncols):
                if self.is_live(a) and not self.table[a][c]:
                    self.define(a, c)
                    self.process_deductions()
            a += 1
        self.closed = True

    def run_hlt(self) -> None:
        for w in self.subgens:
            self.scan(1, w, fill=True)
        a = 1
        while a < len(self.table):
            for r in self.relators:
                if not self.is_live(a):
                    break
                self.scan(a, r, fill=True)
            if self.is_live(a):
                for c in range(self.ncols):
                    if not self.table[a][c]:
                        self.define(a, c)
            self.deductions.clear()
            a += 1
        self.closed = True

    def compact(self) -> None:
        """Renumber live cosets 1..n in order."""
        live = [a for a in range(1, len(self.table)) if self.is_live(a)]
        new = {a: k for k, a in enumerate(live, 1)}
        self.table = [[0] * self.ncols] + [[new[self.rep(x)] if x else 0 for x in self.table[a]]
                                           for a in live]
        self.parent = list(range(len(self.table)))
        self.live = len(live)

    @property
    def index(self) -> int:
        return self.live

    def permutations(self) -> list[tuple[int, ...]]:
        """Action of each generator on cosets, as 0-based images (after compaction)."""
        return [tuple(self.table[a][2 * g] - 1 for a in range(1, len(self.table)))
                for g in range(self.pres.ngens)]

    def check(self) -> bool:
        """Every relator traced from every coset, and every subgroup generator from 1, loops."""
        T = self.table
        for a in range(1, len(T)):
            for r in self.relators:
                b = a
                for c in r:
                    b = T[b][c]
                    if not b:
                        return False
                if b != a:
                    return False
        for w in self.subgens:
            b = 1
            for c in w:
                b = T[b][c]
            if b != 1:
                return False
        return True


def enumerate_cosets(pres: Presentation, subgens=(), max_cosets=DEFAULT_MAX_COSETS,
                     strategy: str = "felsch") -> CosetTable | None:
    """Closed and compacted table, or None on overflow."""
    ct = CosetTable(pres, subgens, max_cosets)
    try:
        if strategy == "felsch":
            ct.run_felsch()
        elif strategy == "hlt":
            ct.run_hlt()
        else:
            raise ValueError(f"unknown strategy {strategy!r}")
    except Overflow:
        return None
    ct.compact()
    return ct


def todd_coxeter(pres: Presentation, subgens=(), max_cosets=DEFAULT_MAX_COSETS,
                 strategy: str = "felsch") -> int | None:
    """Index of the subgroup generated by ``subgens``; None means overflow."""
    ct = enumerate_cosets(pres, subgens, max_cosets, strategy)
    return None if ct is None else ct.index


def group_order(pres: Presentation, max_cosets=DEFAULT_MAX_COSETS,
                strategy: str = "felsch") -> int | None:
    return todd_coxeter(pres, (), max_cosets, strategy)


def random_word(rng: random.Random, ngens: int, max_len: int = 8) -> Word:
    """Uniform length in 1..max_len, then a random freely reduced word of that length."""
    n = rng.randint(1, max_len)
    w: list[int] = []
    while len(w) < n:
        x = rng.randint(1, ngens) * rng.choice((1, -1))
        if w and w[-1] == -x:
            continue
        w.append(x)
    return tuple(w)


@dataclass
class QuotientResult:
    presentation: Presentation
    order: int | None
    witness: object | None        # EmbeddingWitness when found
    attempts: int
    added: list[Word]

    def describe(self) -> str:
        rels = ", ".join(word_str(w, self.presentation.generators) for w in self.added)
        return f"added [{rels}] order={self.order}"


def random_quotient_search(pres: Presentation, seed: int, budget: int, embed,
                           max_cosets: int = 20_000, max_len: int = 8,
                           max_order: int | None = None):
    """Add random relators until the quotient is finite and ``embed`` succeeds.

    ``embed(group)`` receives the finite quotient as a ``FiniteGroup`` whose
    generator elements are in ``group.gen_elements``, and returns a witness
    or None.  Returns a ``QuotientResult`` with ``witness`` set on success,
    or the last attempt otherwise (None if no finite quotient appeared).
    """
    from .groups import FiniteGroup

    rng = random.Random(seed)
    last = None
    for attempt in range(1, budget + 1):
        added = []
        extra = max(pres.ngens - len(pres.relators), 1)
        for _ in range(extra):
            added.append(random_word(rng, pres.ngens, max_len))
        q = pres.with_relators(*added)
        ct = enumerate_cosets(q, (), max_cosets)
        if ct is None:
            continue
        order = ct.index
        if max_order is not None and order > max_order:
            last = QuotientResult(q, order, None, attempt, added)
            continue
        G = FiniteGroup.from_permutations(ct.permutations())
        wit = embed(G)
        last = QuotientResult(q, order, wit, attempt, added)
        if wit is not None:
            return last
    return last

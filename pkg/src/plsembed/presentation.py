"""Free words, the presentation of the group defined by a PLS, and Tietze reduction.

Words are tuples of nonzero ints: generator ``i`` (1-based) is ``i`` and its
inverse is ``-i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import re

from .pls import PLS

Word = tuple[int, ...]


def free_reduce(w) -> Word:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def inverse(w) -> Word:
    return tuple(-x for x in reversed(w))


def mul(*ws) -> Word:
    return free_reduce([x for w in ws for x in w])


def power(w, n: int) -> Word:
    if n < 0:
        w, n = inverse(w), -n
    return free_reduce(tuple(w) * n)


def cyclic_reduce(w) -> Word:
    w = free_reduce(w)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return w[i:j]


def rotations(w):
    for i in range(len(w) or 1):
        yield w[i:] + w[:i]


def relator_key(w) -> Word:
    """Least cyclic rotation of the relator or its inverse (for deduplication)."""
    w = cyclic_reduce(w)
    if not w:
        return ()
    return min(min(rotations(w)), min(rotations(inverse(w))),
               key=lambda u: [(abs(x), x < 0) for x in u])


def substitute(w, images) -> Word:
    """Replace generator i by ``images[i]`` (a dict or sequence indexed from 1)."""
    out = []
    for x in w:
        img = images[abs(x)]
        out.extend(img if x > 0 else inverse(img))
    return free_reduce(out)


def exponent_sum(w, g: int) -> int:
    return sum(1 if x == g else -1 for x in w if abs(x) == g)


@dataclass
class Presentation:
    generators: list[str]
    relators: list[Word] = field(default_factory=list)

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def word_str(self, w) -> str:
        return word_str(w, self.generators)

    def __str__(self) -> str:
        rels = ", ".join(self.word_str(r) for r in self.relators)
        return f"{' '.join(self.generators)} | {rels}".rstrip()

    def with_relators(self, *extra) -> "Presentation":
        return Presentation(list(self.generators),
                            list(self.relators) + [free_reduce(w) for w in extra])

    def parse_word(self, text: str) -> Word:
        return parse_word(text, self.generators)

    def total_length(self) -> int:
        return sum(len(r) for r in self.relators)


def word_str(w, names) -> str:
    """Exponent notation, e.g. ``b^-2 a^-1 b``; the empty word is ``1``."""
    if not w:
        return "1"
    parts = []
    i = 0
    while i < len(w):
        j = i
        while j < len(w) and w[j] == w[i]:
            j += 1
        n = j - i
        e = n if w[i] > 0 else -n
        name = names[abs(w[i]) - 1]
        parts.append(name if e == 1 else f"{name}^{e}")
        i = j
    return " ".join(parts)


_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)(?:\s*\^\s*(-?\d+))?\s*\*?")


def parse_word(text: str, names) -> Word:
    text = text.strip()
    if text in ("", "1"):
        return ()
    index = {n: i + 1 for i, n in enumerate(names)}
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse word at {text[pos:]!r}")
        name, e = m.group(1), int(m.group(2) or 1)
        if name not in index:
            raise ValueError(f"unknown generator {name!r}")
        g = index[name]
        out.extend([g if e > 0 else -g] * abs(e))
        pos = m.end()
    return free_reduce(out)


def parse_presentation(text: str) -> Presentation:
    """Inverse of ``str(Presentation)``: ``a b | rel1, rel2``."""
    gens, _, rels = text.partition("|")
    names = gens.split()
    relators = [parse_word(r, names) for r in rels.split(",") if r.strip()]
    return Presentation(names, relators)


def presentation_of(P: PLS) -> Presentation:
    """Generators r2..rm, c2..cn and the symbols; one relator R_i C_j s^-1 per cell.

    R_1 and C_1 are taken to be the identity and do not appear.
    """
    names = [f"r{i}" for i in range(2, P.nrows + 1)]
    names += [f"c{j}" for j in range(2, P.ncols + 1)]
    off = len(names)
    names += [P.symbol_name(s) for s in range(1, P.nsyms + 1)]
    relators = []
    for r, c, s in P.triples:
        w = []
        if r > 1:
            w.append(r - 1)
        if c > 1:
            w.append(P.nrows - 1 + c - 1)
        w.append(-(off + s))
        relators.append(tuple(w))
    return Presentation(names, relators)


def row_gen(P: PLS, i: int) -> Word:
    return () if i == 1 else (i - 1,)


def col_gen(P: PLS, j: int) -> Word:
    return () if j == 1 else (P.nrows - 1 + j - 1,)


def sym_gen(P: PLS, s: int) -> Word:
    return (P.nrows - 1 + P.ncols - 1 + s,)


@dataclass
class TietzeResult:
    presentation: Presentation
    images: list[Word]          # images[i] is the image of original generator i+1
    budget_exhausted: bool = False


def _clean(rels) -> list[Word]:
    seen = set()
    out = []
    for r in rels:
        r = cyclic_reduce(r)
        if not r:
            continue
        k = relator_key(r)
        if k not in seen:
            seen.add(k)
            out.append(r)
    return out


def _elimination(rels):
    """(relator index, generator) for the shortest relator with a once-occurring generator."""
    choice = None
    for idx, r in enumerate(rels):
        counts: dict[int, int] = {}
        for x in r:
            counts[abs(x)] = counts.get(abs(x), 0) + 1
        for g, n in counts.items():
            if n == 1 and (choice is None or (len(r), g) < choice[0]):
                choice = ((len(r), g), idx, g)
    return None if choice is None else choice[1:]


def _nielsen_step(rels, alive):
    """Best substitution g -> h^e g or g -> g h^e, or None.

    Accepted only if it shortens the relators or makes some generator
    eliminable.  Returns the substitution dict.
    """
    total = sum(map(len, rels))
    best = None
    for g in alive:
        for h in alive:
            if h == g:
                continue
            for e in (1, -1):
                for left in (True, False):
                    img = (e * h, g) if left else (g, e * h)
                    sub = {x: (x,) for x in alive}
                    sub[g] = img
                    new = _clean(substitute(r, sub) for r in rels)
                    length = sum(map(len, new))
                    elim = _elimination(new) is not None
                    if not elim and length >= total:
                        continue
                    key = (not elim, length, g, h, -e, not left)
                    if best is None or key < best[0]:
                        best = (key, sub)
    return None if best is None else best[1]


def tietze_reduce(pres: Presentation, max_length: int = 10_000) -> TietzeResult:
    """Simplify a presentation, tracking images of the original generators.

    Repeats: cyclically reduce and deduplicate relators, then eliminate a
    generator using the shortest relator in which it occurs once (ties go
    to the lowest generator id).  When nothing is eliminable, a generator
    is replaced by its product with another one if that shortens the
    relators or exposes an elimination.
    """
    ngen = pres.ngens
    alive = list(range(1, ngen + 1))
    images: dict[int, Word] = {g: (g,) for g in alive}
    rels = [free_reduce(r) for r in pres.relators]
    exhausted = False

    while True:
        rels = _clean(rels)
        found = _elimination(rels)
        if found is None:
            sub = _nielsen_step(rels, alive)
            if sub is None:
                break
            rels = [substitute(u, sub) for u in rels]
            images = {h: substitute(w, sub) for h, w in images.items()}
            continue
        idx, g = found
        r = rels[idx]
        pos = next(i for i, x in enumerate(r) if abs(x) == g)
        rot = r[pos:] + r[:pos]
        # rot = g^e w  =>  g = w^-1 (e=1) or g = w (e=-1)
        rest = rot[1:]
        value = inverse(rest) if rot[0] > 0 else free_reduce(rest)
        sub = {h: (h,) for h in alive}
        sub[g] = value
        new_rels = [substitute(u, sub) for i, u in enumerate(rels) if i != idx]
        if sum(map(len, new_rels)) > max_length:
            exhausted = True
            break
        rels = new_rels
        images = {h: substitute(w, sub) for h, w in images.items()}
        alive.remove(g)

    # renumber survivors 1..k in their original order
    renum = {g: i + 1 for i, g in enumerate(alive)}

    def ren(w):
        return tuple(renum[x] if x > 0 else -renum[-x] for x in w)

    reduced = Presentation([pres.generators[g - 1] for g in alive], [ren(r) for r in rels])
    return TietzeResult(reduced, [ren(images[g]) for g in range(1, ngen + 1)], exhausted)


@dataclass
class LabelFamilies:
    rows: list[Word]
    cols: list[Word]
    syms: list[Word]

    def families(self):
        return (("row", self.rows), ("col", self.cols), ("sym", self.syms))

    def map(self, f) -> "LabelFamilies":
        return LabelFamilies([f(w) for w in self.rows], [f(w) for w in self.cols],
                             [f(w) for w in self.syms])


def label_words(P: PLS, images) -> LabelFamilies:
    """Row, column and symbol labels as words in the reduced generators."""
    rows = [()] + [free_reduce(images[i - 2]) for i in range(2, P.nrows + 1)]
    off = P.nrows - 1
    cols = [()] + [free_reduce(images[off + j - 2]) for j in range(2, P.ncols + 1)]
    off += P.ncols - 1
    syms = [free_reduce(images[off + s - 1]) for s in range(1, P.nsyms + 1)]
    return LabelFamilies(rows, cols, syms)


@dataclass(frozen=True)
class Collision:
    family: str
    i: int       # 1-based indices within the family
    j: int
    method: str = "free"

    def describe(self, P: PLS | None = None) -> str:
        if self.family == "sym" and P is not None:
            return f"sym {P.symbol_name(self.i)} = sym {P.symbol_name(self.j)}"
        return f"{self.family} {self.i} = {self.family} {self.j}"


def first_collision(fams: LabelFamilies, key=lambda w: w, method="free") -> Collision | None:
    """First pair of labels within one family that have equal ``key``."""
    for name, fam in fams.families():
        seen: dict = {}
        for i, w in enumerate(fam, 1):
            k = key(w)
            if k in seen:
                return Collision(name, seen[k], i, method)
            seen[k] = i
    return None


def free_collision_test(fams: LabelFamilies) -> Collision | None:
    return first_collision(fams, free_reduce, "free")

"""Certificates for PLS embedding in a Baumslag-type group but in no finite group.

Families (generators a, b; relator written as b^-1 [b, y] with
[x, y] = x^-1 y^-1 x y):

    B   b = [b, b^a]
    B1  b = [b, (b^-2)^a]
    B2  b = [b, (b^2)^a]

In each family b is trivial in every finite quotient: for B this is
Baumslag's theorem; B1 and B2 contain a copy of B generated by a and
b^-2 (resp. b^2), which forces b^2 = 1 and then b = [b, 1] = 1.  That the
three groups are infinite and non-cyclic is taken from the literature.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .coset import todd_coxeter
from .pls import PLS
from .presentation import (
    LabelFamilies,
    Presentation,
    Word,
    cyclic_reduce,
    free_reduce,
    inverse,
    mul,
    parse_word,
    rotations,
    substitute,
    word_str,
)
from .rewriting import CyclicProof, Limits, knuth_bendix, prove_cyclic

AXIOM = ("Baumslag (1969): <a,b | b=[b,b^a]> is infinite and non-cyclic, and b=1 in "
         "every finite quotient; B1 and B2 are isomorphic to it (b^-2, b^2 playing b)")


def _commutator(x: Word, y: Word) -> Word:
    return mul(inverse(x), inverse(y), x, y)


def _conj(x: Word, a: Word) -> Word:
    return mul(inverse(a), x, a)


A, B = (1,), (2,)
FAMILIES: dict[str, Word] = {
    "B": mul(inverse(B), _commutator(B, _conj(B, A))),
    "B1": mul(inverse(B), _commutator(B, _conj((-2, -2), A))),
    "B2": mul(inverse(B), _commutator(B, _conj((2, 2), A))),
}
# subgroups shown to be the whole group by coset enumeration
FAMILY_SUBGROUPS: dict[str, list[Word]] = {
    "B": [A, B],
    "B1": [(-2, -2), A],
    "B2": [(2, 2), A],
}


def family_presentation(name: str) -> Presentation:
    return Presentation(["a", "b"], [FAMILIES[name]])


@dataclass
class FamilyMatch:
    family: str
    # reduced generator (1-based) and sign playing a and b
    a: tuple[int, int]
    b: tuple[int, int]

    def to_family(self) -> dict[int, Word]:
        """Substitution from reduced generators to words in the family's a, b."""
        sub = {}
        for role, (g, sgn) in ((A, self.a), (B, self.b)):
            sub[g] = role if sgn > 0 else inverse(role)
        return sub

    def describe(self, names) -> str:
        def show(gs):
            g, s = gs
            return names[g - 1] + ("" if s > 0 else "^-1")
        return f"{self.family}: a = {show(self.a)}, b = {show(self.b)}"


def match_family(pres: Presentation) -> FamilyMatch | None:
    """Match a 2-generator 1-relator presentation against B, B1, B2.

    Tries both generator roles and all sign choices, comparing cyclic
    rotations of the relator and of its inverse.  B1 turns into B2 under
    b -> b^-1, so which of the two is reported depends on the search order:
    roles (1, 2) before (2, 1), and positive signs before negative ones.
    """
    if pres.ngens != 2 or len(pres.relators) != 1:
        return None
    rel = cyclic_reduce(pres.relators[0])
    for ga, gb in ((1, 2), (2, 1)):
        for sa in (1, -1):
            for sb in (1, -1):
                m = FamilyMatch("", (ga, sa), (gb, sb))
                w = cyclic_reduce(substitute(rel, m.to_family()))
                forms = set(rotations(w)) | set(rotations(inverse(w)))
                for name, fr in FAMILIES.items():
                    if fr in forms:
                        m.family = name
                        return m
    return None


def to_family_words(fams: LabelFamilies, match: FamilyMatch) -> LabelFamilies:
    sub = match.to_family()
    return fams.map(lambda w: substitute(w, sub))


def a_exponent_after_collapse(w: Word) -> int:
    """Exponent of a once b is sent to 1 (family words, a = 1, b = 2)."""
    return sum(1 if x == 1 else -1 for x in w if abs(x) == 1)


@dataclass
class CollapseCollision:
    family: str       # "row" | "col" | "sym"
    i: int
    j: int
    exponent: int

    def describe(self) -> str:
        return f"{self.family} {self.i} = {self.family} {self.j} = a^{self.exponent} after b -> 1"


def collapse_collisions(fams: LabelFamilies, match: FamilyMatch) -> list[CollapseCollision]:
    """All within-family pairs that coincide once b is sent to 1."""
    words = to_family_words(fams, match)
    out = []
    for name, fam in words.families():
        exps = [a_exponent_after_collapse(w) for w in fam]
        for i, j in combinations(range(len(fam)), 2):
            if exps[i] == exps[j]:
                out.append(CollapseCollision(name, i + 1, j + 1, exps[i]))
    return out


def finite_collapse_certificate(fams: LabelFamilies, match: FamilyMatch) -> CollapseCollision | None:
    """Least collision after b -> 1 (rows, then columns, then symbols).

    Any one of them rules out every finite group.
    """
    cols = collapse_collisions(fams, match)
    if not cols:
        return None
    return min(cols, key=lambda c: (("row", "col", "sym").index(c.family), c.i, c.j))


@dataclass
class PairProof:
    family: str
    i: int
    j: int
    relator: Word                 # x y^-1 over family generators
    proof: CyclicProof


@dataclass
class InfNotFinCertificate:
    match: FamilyMatch
    collapse: CollapseCollision
    pairs: list[PairProof]
    axiom: str = AXIOM
    kb_limits: Limits = field(default_factory=Limits)

    def to_text(self, names=None) -> str:
        lines = [f"family {self.match.family}",
                 f"match {self.match.describe(names) if names else self.match}",
                 f"collapse {self.collapse.describe()}",
                 f"pairs {len(self.pairs)}"]
        for p in self.pairs:
            t = "ab"[p.proof.t - 1] if p.proof.t else "-"
            lines.append(f"  {p.family} {p.i}~{p.j}: [{word_str(p.relator, ['a', 'b'])}] "
                         f"cyclic via {p.proof.method} t={t} exps={p.proof.exponents}")
        lines.append(f"axiom {self.axiom}")
        return "\n".join(lines)


def distinctness_certificate(fams: LabelFamilies, match: FamilyMatch,
                             limits: Limits | None = None,
                             max_cosets: int = 20_000) -> list[PairProof] | None:
    """For every pair within a family, prove that identifying them makes the group cyclic.

    Rewriting is tried first; if it does not show every generator to be a
    power of one generator, coset enumeration showing that <a> or <b> has
    index 1 is accepted instead.  Returns None if some pair stays open.
    """
    base = FAMILIES[match.family]
    words = to_family_words(fams, match)
    out = []
    for name, fam in words.families():
        for (i, x), (j, y) in combinations(enumerate(fam, 1), 2):
            rel = free_reduce(x + inverse(y))
            pres = Presentation(["a", "b"], [base, rel])
            proof = prove_cyclic(pres, limits)
            if proof is None:
                proof = _cyclic_by_cosets(pres, max_cosets)
            if proof is None:
                return None
            out.append(PairProof(name, i, j, rel, proof))
    return out


def _cyclic_by_cosets(pres: Presentation, max_cosets: int) -> CyclicProof | None:
    for t in (1, 2):
        if todd_coxeter(pres, [(t,)], max_cosets) == 1:
            return CyclicProof(t, [], method="cosets")
    return None


def check_pair_proof(p: PairProof, family: str, limits: Limits | None = None) -> bool:
    """Replay a pair proof: recheck the claimed normal-form equalities."""
    pres = Presentation(["a", "b"], [FAMILIES[family], p.relator])
    if p.proof.method == "cosets":
        return todd_coxeter(pres, [(p.proof.t,)]) == 1
    rws = knuth_bendix(pres, limits)
    return p.proof.check(rws)


def certify_inf_not_fin(fams: LabelFamilies, match: FamilyMatch,
                        limits: Limits | None = None) -> InfNotFinCertificate | None:
    col = finite_collapse_certificate(fams, match)
    if col is None:
        return None
    pairs = distinctness_certificate(fams, match, limits)
    if pairs is None:
        return None
    return InfNotFinCertificate(match, col, pairs, kb_limits=limits or Limits())


def verify_family_facts(max_cosets: int = 100_000) -> dict[str, int | None]:
    """Index of <b^-2, a> in B1, <b^2, a> in B2 and <a, b> in B (all should be 1)."""
    return {name: todd_coxeter(family_presentation(name), FAMILY_SUBGROUPS[name], max_cosets)
            for name in ("B", "B1", "B2")}


def parse_family_word(text: str) -> Word:
    return parse_word(text, ["a", "b"])

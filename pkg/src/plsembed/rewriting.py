"""Bounded Knuth-Bendix completion for group presentations (shortlex).

Group words are encoded as strings over a doubled alphabet: generator ``i``
is ``chr(BASE + 2*(i-1))`` and its inverse the next code point, so plain
string comparison orders each generator right before its inverse.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .presentation import LabelFamilies, Presentation, Word, first_collision, power

BASE = 0x100


def encode(w) -> str:
    return "".join(chr(BASE + 2 * (x - 1)) if x > 0 else chr(BASE + 2 * (-x - 1) + 1)
                   for x in w)


def decode(s: str) -> Word:
    out = []
    for ch in s:
        k = ord(ch) - BASE
        out.append(k // 2 + 1 if k % 2 == 0 else -(k // 2 + 1))
    return tuple(out)


def _inv_letter(ch: str) -> str:
    k = ord(ch) - BASE
    return chr(BASE + (k ^ 1))


def shortlex_gt(a: str, b: str) -> bool:
    return (len(a), a) > (len(b), b)


@dataclass
class Limits:
    max_rules: int = 2000
    max_length: int = 64
    max_pairs: int = 200_000


_END = ""    # trie key marking a complete left-hand side


@dataclass
class RewritingSystem:
    """Rules ``lhs -> rhs`` with a trie of reversed left-hand sides for matching."""

    ngens: int
    rules: dict[str, str] = field(default_factory=dict)
    confluent: bool = False
    limits: Limits = field(default_factory=Limits)
    names: list[str] | None = None

    def __post_init__(self):
        self._trie: dict = {}
        for l in self.rules:
            self._insert(l)

    def _insert(self, l: str) -> None:
        node = self._trie
        for ch in reversed(l):
            node = node.setdefault(ch, {})
        node[_END] = l

    def _delete(self, l: str) -> None:
        node = self._trie
        for ch in reversed(l):
            node = node[ch]
        del node[_END]

    def add_rule(self, l: str, r: str) -> None:
        self.rules[l] = r
        self._insert(l)

    def remove_rule(self, l: str) -> str:
        self._delete(l)
        return self.rules.pop(l)

    def _lengths(self):
        # kept for callers that pass precomputed lengths; matching uses the trie
        return None

    def reduce_str(self, s: str, lens=None) -> str:
        rules, trie = self.rules, self._trie
        out: list[str] = []
        todo = list(reversed(s))
        while todo:
            out.append(todo.pop())
            node = trie
            k = len(out) - 1
            while k >= 0:
                node = node.get(out[k])
                if node is None:
                    break
                l = node.get(_END)
                if l is not None:
                    del out[k:]
                    todo.extend(reversed(rules[l]))
                    break
                k -= 1
        return "".join(out)

    def reduce(self, w) -> Word:
        return decode(self.reduce_str(encode(w)))

    def rule_list(self) -> list[tuple[Word, Word]]:
        return sorted(((decode(l), decode(r)) for l, r in self.rules.items()),
                      key=lambda p: (len(p[0]), encode(p[0])))

    def dump(self) -> str:
        from .presentation import word_str
        names = self.names or [f"x{i}" for i in range(1, self.ngens + 1)]
        return "\n".join(f"{word_str(l, names)} -> {word_str(r, names)}"
                         for l, r in self.rule_list())


def knuth_bendix(pres: Presentation, limits: Limits | None = None) -> RewritingSystem:
    """Complete the relators of ``pres`` into a shortlex rewriting system.

    Stops with ``confluent=False`` when a limit trips; every rule is still a
    consequence of the relators, so equal reductions remain proofs.
    Right-hand sides are not kept fully reduced; that costs nothing in
    soundness and saves a pass over all rules per new rule.
    """
    limits = limits or Limits()
    rws = RewritingSystem(pres.ngens, {}, False, limits, list(pres.generators))
    rules = rws.rules
    queue: list[str] = []          # lhs in creation order, overlaps still to compute
    prefixes: dict[str, set[str]] = {}   # proper prefix -> lhs starting with it
    suffixes: dict[str, set[str]] = {}   # proper suffix -> lhs ending with it
    lost = False
    pairs = 0

    def index(l, add):
        for k in range(1, len(l)):
            for d, key in ((prefixes, l[:k]), (suffixes, l[-k:])):
                if add:
                    d.setdefault(key, set()).add(l)
                else:
                    d[key].discard(l)

    pending: list[tuple[str, str]] = []
    for i in range(pres.ngens):
        a = chr(BASE + 2 * i)
        A = chr(BASE + 2 * i + 1)
        pending.append((a + A, ""))
        pending.append((A + a, ""))
    for r in pres.relators:
        pending.append((encode(r), ""))
    pending.reverse()

    def add_equations():
        nonlocal lost
        while pending:
            u, v = pending.pop()
            u = rws.reduce_str(u)
            v = rws.reduce_str(v)
            if u == v:
                continue
            if shortlex_gt(v, u):
                u, v = v, u
            if len(u) > limits.max_length:
                lost = True
                continue
            # rules whose lhs contains u are now redundant: re-queue as equations
            for l in [l for l in rules if u in l]:
                index(l, False)
                pending.append((l, rws.remove_rule(l)))
            rws.add_rule(u, v)
            index(u, True)
            queue.append(u)

    add_equations()
    i = 0
    while i < len(queue):
        if len(rules) > limits.max_rules or pairs > limits.max_pairs:
            lost = True
            break
        a = queue[i]
        i += 1
        if a not in rules:
            continue
        found = []
        for k in range(1, len(a)):
            for b in prefixes.get(a[-k:], ()):    # suffix of a = prefix of b
                found.append((a, b, k))
            for b in suffixes.get(a[:k], ()):     # suffix of b = prefix of a
                if b != a:
                    found.append((b, a, k))
        for x, y, k in found:
            if len(rules) > limits.max_rules or pairs > limits.max_pairs:
                break
            if x not in rules or y not in rules:
                continue
            pairs += 1
            pending.append((rules[x] + y[k:], x[:-k] + rules[y]))
            add_equations()
    rws.confluent = not lost and i >= len(queue)
    return rws


def rw_reduce(rws: RewritingSystem, w) -> Word:
    return rws.reduce(w)


def kb_collision_test(fams: LabelFamilies, rws: RewritingSystem):
    """Equal reduced forms within a family prove equality in the group."""
    lens = rws._lengths()
    return first_collision(fams, lambda w: rws.reduce_str(encode(w), lens), "kb")


def normal_forms(rws: RewritingSystem, limit: int = 10_000) -> list[Word] | None:
    """All irreducible words, if there are at most ``limit`` of them."""
    letters = [chr(BASE + k) for k in range(2 * rws.ngens)]
    lens = rws._lengths()
    level = [""]
    out = [""]
    while level:
        nxt = []
        for w in level:
            for ch in letters:
                u = w + ch
                if rws.reduce_str(u, lens) == u:
                    nxt.append(u)
        out.extend(nxt)
        if len(out) > limit:
            return None
        level = nxt
    return [decode(s) for s in out]


@dataclass
class CyclicProof:
    """Every generator equals a power of generator ``t`` (1-based)."""

    t: int
    exponents: list[int]
    method: str = "kb"

    def check(self, rws: RewritingSystem) -> bool:
        return all(rws.reduce((g,)) == rws.reduce(power((self.t,), n))
                   for g, n in enumerate(self.exponents, 1))


def prove_cyclic(pres: Presentation, limits: Limits | None = None, bound: int = 16,
                 rws: RewritingSystem | None = None) -> CyclicProof | None:
    """Show the group is cyclic by exhibiting each generator as a power of one of them.

    Only equalities proved by rewriting are used, so confluence is not needed.
    """
    if pres.ngens == 0:
        return CyclicProof(0, [])
    if rws is None:
        rws = knuth_bendix(pres, limits)
    lens = rws._lengths()
    for t in range(1, pres.ngens + 1):
        powers = {}
        for n in sorted(range(-bound, bound + 1), key=lambda k: (abs(k), k < 0)):
            powers.setdefault(rws.reduce_str(encode(power((t,), n)), lens), n)
        exps = []
        for g in range(1, pres.ngens + 1):
            nf = rws.reduce_str(encode((g,)), lens)
            if nf not in powers:
                break
            exps.append(powers[nf])
        else:
            return CyclicProof(t, exps)
    return None

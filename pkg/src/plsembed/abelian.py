"""Abelianization via Smith normal form and the abelian embedding test."""

from __future__ import annotations

from dataclasses import dataclass

from .pls import PLS
from .presentation import LabelFamilies, Presentation, exponent_sum, first_collision


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A, B) -> list[list[int]]:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)]
            for i in range(len(A))]


def det(M) -> int:
    """Integer determinant by fraction-free (Bareiss) elimination."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(r) for r in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


@dataclass
class SmithForm:
    D: list[list[int]]
    U: list[list[int]]
    V: list[list[int]]

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.V)))]


def smith_normal_form(A, ncols: int | None = None) -> SmithForm:
    """U*A*V = D with U, V unimodular and d1 | d2 | ... on the diagonal.

    ``ncols`` is needed only when A has no rows.
    """
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    D = [list(map(int, row)) for row in A]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (D, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):  # row dst += q * row src
        for M in (D, U):
            M[dst] = [a + q * b for a, b in zip(M[dst], M[src])]

    def add_col(src, dst, q):  # col dst += q * col src
        for M in (D, V):
            for row in M:
                row[dst] += q * row[src]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero |entry| in the remaining block
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (piv is None or abs(D[i][j]) < abs(D[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        while True:
            p = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(t, i, -(D[i][t] // p))
                    if D[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(t, j, -(D[t][j] // p))
                    if D[t][j]:
                        dirty = True
            if dirty:
                # move the smallest remainder in row/col t onto the pivot
                best = (t, t)
                for i in range(t + 1, m):
                    if D[i][t] and abs(D[i][t]) < abs(D[best[0]][best[1]]):
                        best = (i, t)
                for j in range(t + 1, n):
                    if D[t][j] and abs(D[t][j]) < abs(D[best[0]][best[1]]):
                        best = (t, j)
                if best[0] != t:
                    swap_rows(t, best[0])
                if best[1] != t:
                    swap_cols(t, best[1])
                continue
            # divisibility: pivot must divide every remaining entry
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % p), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if D[t][t] < 0:
            U[t] = [-x for x in U[t]]
            D[t] = [-x for x in D[t]]
        t += 1
    return SmithForm(D, U, V)


def exponent_matrix(pres: Presentation) -> list[list[int]]:
    return [[exponent_sum(r, g) for g in range(1, pres.ngens + 1)] for r in pres.relators]


@dataclass
class AbelianGroup:
    """Z/t1 x ... x Z/tk x Z^rank, with integer coordinates for each generator."""

    torsion: list[int]
    rank: int
    gen_images: list[tuple[int, ...]]

    @property
    def moduli(self) -> list[int]:
        """Per coordinate modulus; 0 marks a free coordinate."""
        return list(self.torsion) + [0] * self.rank

    def reduce(self, v) -> tuple[int, ...]:
        return tuple(x % m if m else x for x, m in zip(v, self.moduli))

    def image(self, w) -> tuple[int, ...]:
        v = [0] * (len(self.torsion) + self.rank)
        for x in w:
            img = self.gen_images[abs(x) - 1]
            s = 1 if x > 0 else -1
            for k, y in enumerate(img):
                v[k] += s * y
        return self.reduce(v)

    def is_trivial(self) -> bool:
        return not self.torsion and self.rank == 0

    def __str__(self) -> str:
        parts = [f"Z/{t}" for t in self.torsion] + ["Z"] * self.rank
        return " x ".join(parts) or "1"


def abelianization(pres: Presentation) -> AbelianGroup:
    g = pres.ngens
    A = exponent_matrix(pres)
    snf = smith_normal_form(A, ncols=g)
    diag = snf.diagonal + [0] * (g - len(snf.diagonal))
    # rowspace(A) * V = rowspace(D), so generator j maps to row j of V
    keep = [k for k in range(g) if diag[k] != 1]
    torsion_idx = [k for k in keep if diag[k] != 0]
    free_idx = [k for k in keep if diag[k] == 0]
    order = torsion_idx + free_idx
    torsion = [diag[k] for k in torsion_idx]
    moduli = torsion + [0] * len(free_idx)
    images = []
    for j in range(g):
        v = [snf.V[j][k] for k in order]
        images.append(tuple(x % m if m else x for x, m in zip(v, moduli)))
    return AbelianGroup(torsion, len(free_idx), images)


@dataclass
class FiniteAbelianWitness:
    """Finite abelian group Z/n1 x ... x Z/nk together with label vectors."""

    moduli: list[int]
    rows: list[tuple[int, ...]]
    cols: list[tuple[int, ...]]
    syms: list[tuple[int, ...]]

    @property
    def order(self) -> int:
        out = 1
        for m in self.moduli:
            out *= m
        return out

    def add(self, u, v):
        return tuple((a + b) % m for a, b, m in zip(u, v, self.moduli))

    def check(self, P: PLS) -> bool:
        fams = (self.rows, self.cols, self.syms)
        if any(len(set(f)) != len(f) for f in fams):
            return False
        zero = tuple(0 for _ in self.moduli)
        if self.rows[0] != zero or self.cols[0] != zero:
            return False
        return all(self.add(self.rows[r - 1], self.cols[c - 1]) == self.syms[s - 1]
                   for r, c, s in P.triples)


def label_vectors(A: AbelianGroup, fams: LabelFamilies) -> LabelFamilies:
    return fams.map(A.image)


def finite_abelian_witness(A: AbelianGroup, vecs: LabelFamilies) -> FiniteAbelianWitness:
    """Replace each free coordinate by Z/m with m = 2*max|e| + 1 over the labels."""
    nt = len(A.torsion)
    moduli = list(A.torsion)
    allv = vecs.rows + vecs.cols + vecs.syms
    for k in range(nt, nt + A.rank):
        moduli.append(2 * max(abs(v[k]) for v in allv) + 1)

    def red(v):
        return tuple(x % m for x, m in zip(v, moduli))

    return FiniteAbelianWitness(moduli, [red(v) for v in vecs.rows],
                                [red(v) for v in vecs.cols], [red(v) for v in vecs.syms])


def abelian_embedding_test(A: AbelianGroup, fams: LabelFamilies):
    """Return ``(witness, None)`` if the labels embed in A, else ``(None, collision)``.

    Any abelian embedding factors through the abelianization, so a collision
    there rules out every abelian group.
    """
    vecs = label_vectors(A, fams)
    coll = first_collision(vecs, method="abelian")
    if coll is not None:
        return None, coll
    return finite_abelian_witness(A, vecs), None

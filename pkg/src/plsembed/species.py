"""Isomorph-free generation of PLS species and candidate filtering."""

from __future__ import annotations

from dataclasses import dataclass
import logging
import os
from pathlib import Path

from .pls import (
    CYCLIC_CONJUGATES,
    PLS,
    canonical_form,
    from_canonical,
    from_triples,
    is_connected,
    render_pls,
    parse_pls,
)

log = logging.getLogger(__name__)


@dataclass
class SpeciesCatalog:
    size: int
    reps: dict[bytes, PLS]

    def __len__(self):
        return len(self.reps)

    def sorted_reps(self) -> list[tuple[bytes, PLS]]:
        return sorted(self.reps.items())


@dataclass(frozen=True)
class CandidateFlags:
    connected: bool
    pruned_by_cond1: bool
    pruned_by_cond2: bool

    @property
    def candidate(self) -> bool:
        return self.connected and not self.pruned_by_cond1 and not self.pruned_by_cond2


def initial_catalog() -> SpeciesCatalog:
    P = from_triples([(1, 1, 1)])
    return SpeciesCatalog(1, {canonical_form(P): P})


def extensions(P: PLS):
    """All PLS obtained by adding one triple, possibly with a new row/col/symbol."""
    cells = {(r, c) for r, c, _ in P.triples}
    rs = {(r, s) for r, _, s in P.triples}
    cs = {(c, s) for _, c, s in P.triples}
    for r in range(1, P.nrows + 2):
        for c in range(1, P.ncols + 2):
            if (r, c) in cells:
                continue
            for s in range(1, P.nsyms + 2):
                if (r, s) in rs or (c, s) in cs:
                    continue
                yield PLS(tuple(sorted(P.triples + ((r, c, s),))),
                          max(P.nrows, r), max(P.ncols, c), max(P.nsyms, s))


def extend_species(catalog: SpeciesCatalog) -> SpeciesCatalog:
    reps: dict[bytes, PLS] = {}
    for _, P in catalog.sorted_reps():
        for Q in extensions(P):
            cf = canonical_form(Q)
            if cf not in reps:
                reps[cf] = from_canonical(cf)
    return SpeciesCatalog(catalog.size + 1, reps)


def _cond1(T) -> bool:
    for t in T:
        r, c, s = t
        rest = [u for u in T if u != t]
        if any(u[0] == r for u in rest):
            continue
        p12 = {(u[0], u[1]) for u in rest}
        p13 = {(u[0], u[2]) for u in rest}
        if all((u[0], c) in p12 or (u[0], s) in p13 for u in rest):
            return True
    return False


def _cond2(T) -> bool:
    for r in {t[0] for t in T}:
        removed = [t for t in T if t[0] == r]
        rest = [t for t in T if t[0] != r]
        cols = {t[1] for t in rest}
        syms = {t[2] for t in rest}
        if not any(t[1] in cols and t[2] in syms for t in removed):
            return True
    return False


def candidate_flags(P: PLS) -> CandidateFlags:
    """Connectivity plus one pass of the two pruning conditions.

    Both conditions are checked against each of the three cyclic conjugates.
    """
    c1 = c2 = False
    for p in CYCLIC_CONJUGATES:
        T = [(t[p[0]], t[p[1]], t[p[2]]) for t in P.triples]
        c1 = c1 or _cond1(T)
        c2 = c2 or _cond2(T)
    return CandidateFlags(is_connected(P), c1, c2)


def build_catalogs(max_size: int, progress=None) -> list[SpeciesCatalog]:
    cats = [initial_catalog()]
    while cats[-1].size < max_size:
        cats.append(extend_species(cats[-1]))
        log.info("size %d: %d species", cats[-1].size, len(cats[-1]))
        if progress:
            progress(cats[-1])
    return cats


def count_row(catalog: SpeciesCatalog) -> tuple[int, int, int, int]:
    n_conn = n_cand = 0
    for P in catalog.reps.values():
        f = candidate_flags(P)
        n_conn += f.connected
        n_cand += f.candidate
    return catalog.size, len(catalog), n_conn, n_cand


def count_report(max_size: int) -> list[tuple[int, int, int, int]]:
    return [count_row(cat) for cat in build_catalogs(max_size)]


def candidates(catalog: SpeciesCatalog) -> list[tuple[bytes, PLS]]:
    return [(cf, P) for cf, P in catalog.sorted_reps() if candidate_flags(P).candidate]


# catalog files: "<canonical id hex> <byte length>\n<rendered PLS>\n" per record

def write_catalog(catalog: SpeciesCatalog, path) -> None:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as f:
        f.write(f"# pls-species size={catalog.size} count={len(catalog)}\n")
        for cf, P in catalog.sorted_reps():
            body = render_pls(P)
            f.write(f"{cf.hex()} {len(body.encode())}\n{body}\n")
    os.replace(tmp, path)


def iter_catalog_file(path):
    """Yield ``(canonical form, PLS)`` records."""
    with open(path, "rb") as f:
        header = f.readline()
        if not header.startswith(b"# pls-species"):
            raise ValueError(f"{path}: not a species catalog")
        while True:
            line = f.readline()
            if not line:
                return
            if not line.strip():
                continue
            cid, n = line.split()
            body = f.read(int(n)).decode()
            f.readline()
            yield bytes.fromhex(cid.decode()), parse_pls(body)


def read_catalog(path) -> SpeciesCatalog:
    reps = {}
    size = None
    for cf, P in iter_catalog_file(path):
        size = P.size
        reps[cf] = P
    return SpeciesCatalog(size or 0, reps)


def catalog_path(directory, size: int) -> Path:
    return Path(directory) / f"species_{size:02d}.txt"

"""Staged classification of a PLS, the survey driver and the bundled checks."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
import hashlib
from importlib import resources
import json
import logging
from pathlib import Path
import time

from .abelian import abelian_embedding_test, abelianization
from .baumslag import (certify_inf_not_fin, finite_collapse_certificate, match_family,
                       verify_family_facts)
from .coset import random_quotient_search
from .groups import (
    Catalog,
    EmbeddingWitness,
    FiniteGroup,
    check_witness,
    cyclic_group,
    embed_into_group,
    find_finite_embedding,
    get_catalog,
    product_embed,
    split_components,
    dense_part,
)
from .pls import PLS, canonical_form, parse_pls, render_pls
from .presentation import (
    free_collision_test,
    label_words,
    presentation_of,
    tietze_reduce,
    word_str,
)
from .rewriting import Limits, kb_collision_test, knuth_bendix
from .species import candidates, catalog_path, build_catalogs, read_catalog, write_catalog

log = logging.getLogger(__name__)

VERDICTS = ("NE", "ABELIAN", "NONABELIAN", "INF_NOT_FIN", "UNRESOLVED")
CERT_TYPES = {
    "free-collision": "NE",
    "kb-collision": "NE",
    "abelian-witness": "ABELIAN",
    "finite-witness": "NONABELIAN",
    "free-residual": "NONABELIAN",
    "baumslag-certificate": "INF_NOT_FIN",
    "budget-trace": "UNRESOLVED",
}


@dataclass
class Config:
    max_order: int = 24
    kb_max_rules: int = 2000
    kb_max_length: int = 64
    kb_max_pairs: int = 200_000
    max_cosets: int = 20_000
    rq_budget: int = 200
    rq_seed: int = 1
    rq_max_len: int = 8
    workers: int = 1
    timings: bool = True
    cache_dir: str | None = None

    @property
    def kb_limits(self) -> Limits:
        return Limits(self.kb_max_rules, self.kb_max_length, self.kb_max_pairs)

    def hash(self) -> str:
        """Hash of the knobs that can change a verdict or certificate."""
        d = asdict(self)
        for k in ("workers", "timings", "cache_dir"):
            d.pop(k)
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]


# -- certificates -------------------------------------------------------------

@dataclass
class Certificate:
    """Tagged certificate; ``fields`` are rendered as ``key: value`` lines."""

    type: str
    fields: dict[str, str] = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [f"type: {self.type}"]
        for k, v in self.fields.items():
            v = str(v)
            if "\n" in v:
                lines.append(f"{k}:")
                lines.extend("  " + line for line in v.splitlines())
            else:
                lines.append(f"{k}: {v}")
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str) -> "Certificate":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("type: "):
            raise ValueError("certificate must start with a type line")
        cert = cls(lines[0][6:])
        key = None
        for line in lines[1:]:
            if line.startswith("  ") and key is not None:
                prev = cert.fields[key]
                cert.fields[key] = (prev + "\n" if prev else "") + line[2:]
            else:
                key, _, val = line.partition(":")
                cert.fields[key] = val.strip()
        return cert


def _ints(xs) -> str:
    return " ".join(str(x) for x in xs)


def _vecs(vs) -> str:
    return " ".join(",".join(str(x) for x in v) for v in vs)


def witness_fields(w: EmbeddingWitness) -> dict[str, str]:
    G = w.group
    return {
        "group": G.name or f"order {G.order}",
        "order": str(G.order),
        "table": bytes(x for row in G.mul for x in row).hex() if G.order <= 256
        else _ints(x for row in G.mul for x in row),
        "rows": _ints(w.rows),
        "cols": _ints(w.cols),
        "syms": _ints(w.syms),
    }


def check_certificate(P: PLS, cert: Certificate) -> bool:
    """Replay the checkable part of a witness certificate against P.

    Finite and abelian witnesses are checked cell by cell; other types
    return True (their proofs are replayed by their own modules).
    """
    f = cert.fields
    if cert.type in ("finite-witness", "free-residual") and "table" in f:
        n = int(f["order"])
        flat = bytes.fromhex(f["table"])
        mul = [list(flat[i * n:(i + 1) * n]) for i in range(n)]
        G = FiniteGroup(mul)
        if not G.is_associative():
            return False
        rows, cols, syms = ([int(x) for x in f[k].split()] for k in ("rows", "cols", "syms"))
        return check_witness(P, mul, G.identity, rows, cols, syms)
    if cert.type == "abelian-witness":
        moduli = [int(x) for x in f["moduli"].split()] if f["moduli"] else []
        zero = tuple(0 for _ in moduli)

        def parse(s):
            return [tuple(int(x) for x in v.split(",")) if moduli else zero
                    for v in s.split()] if s else []

        rows, cols, syms = parse(f["rows"]), parse(f["cols"]), parse(f["syms"])
        if not moduli:
            rows, cols, syms = [zero] * P.nrows, [zero] * P.ncols, [zero] * P.nsyms
        if (len(rows), len(cols), len(syms)) != (P.nrows, P.ncols, P.nsyms):
            return False
        if any(len(set(fam)) != len(fam) for fam in (rows, cols, syms)):
            return False
        if rows[0] != zero or cols[0] != zero:
            return False
        return all(tuple((a + b) % m for a, b, m in zip(rows[r - 1], cols[c - 1], moduli))
                   == syms[s - 1] for r, c, s in P.triples)
    return cert.type in CERT_TYPES


# -- classification -------------------------------------------------------------

@dataclass
class Verdict:
    canonical_id: str
    size: int
    m: int
    n: int
    nsyms: int
    pls: str
    verdict: str
    certificate: Certificate
    trace: list[str]
    stage_timings_ms: dict[str, float]
    config_hash: str

    def to_record(self) -> dict:
        return {
            "canonical_id": self.canonical_id,
            "size": self.size,
            "m": self.m,
            "n": self.n,
            "nsyms": self.nsyms,
            "pls": self.pls,
            "verdict": self.verdict,
            "certificate": self.certificate.to_text(),
            "trace": self.trace,
            "stage_timings_ms": self.stage_timings_ms,
            "config_hash": self.config_hash,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)

    @classmethod
    def from_record(cls, rec: dict) -> "Verdict":
        return cls(rec["canonical_id"], rec["size"], rec["m"], rec["n"], rec["nsyms"],
                   rec["pls"], rec["verdict"], Certificate.from_text(rec["certificate"]),
                   rec.get("trace", []), rec.get("stage_timings_ms", {}), rec["config_hash"])


_catalogs: dict[tuple, Catalog] = {}


def catalog_for(config: Config) -> Catalog:
    key = (config.max_order, config.cache_dir)
    if key not in _catalogs:
        _catalogs[key] = get_catalog(config.max_order, config.cache_dir)
    return _catalogs[key]


def _seed_for(config: Config, cid: str) -> int:
    h = hashlib.sha256(f"{config.rq_seed}:{cid}".encode()).digest()
    return int.from_bytes(h[:8], "little")


def _label_embedding(P: PLS, fams, G: FiniteGroup) -> EmbeddingWitness | None:
    """Labels evaluated in a quotient of <P>; a witness if they stay distinct."""
    e = G.identity

    def ev(w):
        x = e
        for g in w:
            y = G.gen_elements[abs(g) - 1]
            x = G.mul[x][y if g > 0 else G.inv[y]]
        return x

    v = fams.map(ev)
    w = EmbeddingWitness(G, v.rows, v.cols, v.syms)
    return w if w.check(P) else None


def classify(P: PLS, config: Config | None = None) -> Verdict:
    """Run the classification stages in order and stop at the first decisive one."""
    config = config or Config()
    timings: dict[str, float] = {}
    trace: list[str] = []
    clock = [time.perf_counter()]

    def lap(stage):
        now = time.perf_counter()
        timings[stage] = round((now - clock[0]) * 1000, 3)
        clock[0] = now

    cid = canonical_form(P).hex()

    def done(verdict, cert):
        assert CERT_TYPES[cert.type] == verdict
        return Verdict(cid, P.size, P.nrows, P.ncols, P.nsyms, render_pls(P), verdict, cert,
                       trace, timings if config.timings else {}, config.hash())

    # 1. presentation, reduction and label words
    pres = presentation_of(P)
    red = tietze_reduce(pres)
    rp = red.presentation
    fams = label_words(P, red.images)
    names = rp.generators
    trace.append(f"reduce: {pres.ngens} gens {len(pres.relators)} rels -> "
                 f"{rp.ngens} gens {len(rp.relators)} rels")
    lap("reduce")

    # 2. collision in the free group on the reduced generators
    col = free_collision_test(fams)
    lap("free")
    if col is not None:
        trace.append(f"free: collision {col.describe(P)}")
        fam = dict(fams.families())[col.family]
        return done("NE", Certificate("free-collision", {
            "presentation": str(rp),
            "collision": col.describe(P),
            "word": word_str(fam[col.i - 1], names),
        }))
    trace.append("free: distinct")

    # 3. abelianization
    A = abelianization(rp)
    wit, acol = abelian_embedding_test(A, fams)
    lap("abelian")
    if wit is not None:
        trace.append(f"abelian: witness in {' x '.join(f'Z/{m}' for m in wit.moduli) or '1'}")
        return done("ABELIAN", Certificate("abelian-witness", {
            "abelianization": str(A),
            "moduli": _ints(wit.moduli),
            "rows": _vecs(wit.rows),
            "cols": _vecs(wit.cols),
            "syms": _vecs(wit.syms),
        }))
    trace.append(f"abelian: collision {acol.describe(P)} in {A}")

    catalog = catalog_for(config)

    # 4. free group: residually finite, so some finite group works
    if not rp.relators:
        w = find_finite_embedding(P, catalog, config.max_order, nonabelian_only=True)
        lap("free-residual")
        trace.append("free-residual: reduced presentation has no relators")
        f = {"presentation": str(rp),
             "reason": "the group is free, hence residually finite, and the labels are "
                       "distinct in it, so they stay distinct in some finite quotient"}
        if w is not None:
            trace.append(f"free-residual: explicit witness in {w.group.name}")
            f.update(witness_fields(w))
        return done("NONABELIAN", Certificate("free-residual", f))

    # 5. catalog search
    w = find_finite_embedding(P, catalog, config.max_order, nonabelian_only=True)
    lap("catalog")
    if w is not None:
        trace.append(f"catalog: witness in {w.group.name}")
        return done("NONABELIAN", Certificate("finite-witness", witness_fields(w)))
    trace.append(f"catalog: no embedding up to order {config.max_order}")

    # 6. Knuth-Bendix
    rws = knuth_bendix(rp, config.kb_limits)
    kcol = kb_collision_test(fams, rws)
    lap("kb")
    if kcol is not None:
        fam = dict(fams.families())[kcol.family]
        x, y = fam[kcol.i - 1], fam[kcol.j - 1]
        trace.append(f"kb: collision {kcol.describe(P)}")
        return done("NE", Certificate("kb-collision", {
            "presentation": str(rp),
            "collision": kcol.describe(P),
            "words": f"{word_str(x, names)} ; {word_str(y, names)}",
            "normal_form": word_str(rws.reduce(x), names),
            "rules": str(len(rws.rules)),
            "confluent": str(rws.confluent).lower(),
        }))
    trace.append(f"kb: no collision ({len(rws.rules)} rules, "
                 f"{'confluent' if rws.confluent else 'incomplete'})")

    # 7. Baumslag families
    match = match_family(rp)
    cert = None
    if match is not None:
        cert = certify_inf_not_fin(fams, match, config.kb_limits)
    lap("baumslag")
    if cert is not None:
        trace.append(f"baumslag: family {match.family}")
        return done("INF_NOT_FIN", Certificate("baumslag-certificate", {
            "presentation": str(rp),
            "certificate": cert.to_text(names),
        }))
    collapsed = match is not None and finite_collapse_certificate(fams, match) is not None
    if collapsed:
        # no finite embedding exists, but without the distinctness proofs the
        # verdict stays open
        trace.append(f"baumslag: family {match.family} collapses, distinctness unproved")
    elif match is not None:
        trace.append(f"baumslag: family {match.family} matched, no collapse collision")
    else:
        trace.append("baumslag: no family match")

    # 8. random finite quotients
    if not collapsed:
        res = random_quotient_search(
            rp, _seed_for(config, cid), config.rq_budget,
            lambda G: _label_embedding(P, fams, G),
            max_cosets=config.max_cosets, max_len=config.rq_max_len)
        lap("random")
        if res is not None and res.witness is not None:
            trace.append(f"random: {res.describe()} after {res.attempts} attempts")
            res.witness.group.name = f"quotient of order {res.order}"
            f = witness_fields(res.witness)
            f["quotient"] = res.describe()
            return done("NONABELIAN", Certificate("finite-witness", f))
        trace.append(f"random: nothing in {config.rq_budget} attempts")

    # 9. open
    return done("UNRESOLVED", Certificate("budget-trace", {
        "presentation": str(rp),
        "trace": "\n".join(trace),
    }))


# -- survey -----------------------------------------------------------------

def ensure_catalogs(max_size: int, directory, progress=None, min_size: int = 1) -> None:
    """Write species catalogs for sizes min_size..max_size into ``directory`` if missing."""
    directory = Path(directory)
    if all(catalog_path(directory, k).exists() for k in range(min_size, max_size + 1)):
        return
    directory.mkdir(parents=True, exist_ok=True)
    for cat in build_catalogs(max_size, progress):
        path = catalog_path(directory, cat.size)
        if not path.exists():
            write_catalog(cat, path)


def _classify_text(args):
    text, config = args
    return classify(parse_pls(text), config).to_json()


def survey_candidates(directory, size: int) -> list[tuple[bytes, PLS]]:
    return candidates(read_catalog(catalog_path(directory, size)))


def run_survey(max_size: int, catalog_dir, out_path, config: Config | None = None,
               resume: bool = False, min_size: int = 1, progress=None) -> dict:
    """Classify every candidate species up to ``max_size``, appending JSONL records.

    Records are written in canonical-id order within each size.  With
    ``resume`` the ids already present in ``out_path`` are skipped.
    """
    config = config or Config()
    ensure_catalogs(max_size, catalog_dir, min_size=min_size)
    out_path = Path(out_path)
    done_ids = set()
    if resume and out_path.exists():
        for rec in read_results(out_path):
            done_ids.add(rec["canonical_id"])
    mode = "a" if resume else "w"
    pool = ProcessPoolExecutor(config.workers) if config.workers > 1 else None
    try:
        with open(out_path, mode) as out:
            for size in range(min_size, max_size + 1):
                todo = [(cf.hex(), P) for cf, P in survey_candidates(catalog_dir, size)
                        if cf.hex() not in done_ids]
                todo.sort()
                args = [(render_pls(P), config) for _, P in todo]
                results = pool.map(_classify_text, args, chunksize=4) if pool \
                    else map(_classify_text, args)
                for k, line in enumerate(results, 1):
                    out.write(line + "\n")
                    out.flush()
                    if progress:
                        progress(size, k, len(todo))
    finally:
        if pool:
            pool.shutdown()
    return aggregate(read_results(out_path))


def read_results(path) -> list[dict]:
    out = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def aggregate(records) -> dict[int, dict[str, int]]:
    """Verdict counts per size, deduplicated by canonical id."""
    seen = {}
    for rec in records:
        seen[rec["canonical_id"]] = rec
    table: dict[int, dict[str, int]] = {}
    for cid in sorted(seen):
        rec = seen[cid]
        row = table.setdefault(rec["size"], {v: 0 for v in VERDICTS})
        row[rec["verdict"]] += 1
    return dict(sorted(table.items()))


# -- bundled instances ----------------------------------------------------------

BUNDLED = ("baumslag_b", "baumslag_b1", "baumslag_b2", "free_collision", "kb_collision",
           "split_product")


def bundled(name: str) -> PLS:
    text = resources.files("plsembed").joinpath("data", f"{name}.txt").read_text()
    return parse_pls(text)


@dataclass
class Check:
    name: str
    ok: bool
    detail: str
    budget: bool = False      # failed because a search budget ran out


def split_product_witness(P: PLS) -> EmbeddingWitness:
    """Embed a two-block PLS via witnesses for its blocks (C2 and C3 here)."""
    comps = split_components(P)
    if len(comps) != 2:
        raise ValueError("expected exactly two components")
    comps.sort(key=len)
    T1, T2 = comps
    P1, maps1 = dense_part(T1)
    P2, maps2 = dense_part(T2)
    w1 = embed_into_group(P1, cyclic_group(2))
    w2 = embed_into_group(P2, cyclic_group(3))
    if w1 is None or w2 is None:
        raise ValueError("blocks do not embed in C2 and C3")
    return product_embed(P, T1, T2, w1, w2, P1, P2, maps1, maps2)


def verify_bundled(config: Config | None = None) -> list[Check]:
    config = config or Config()
    checks = []
    expect = {"baumslag_b": "B", "baumslag_b1": "B1", "baumslag_b2": "B2"}
    for name, fam in expect.items():
        P = bundled(name)
        v = classify(P, config)
        text = v.certificate.fields.get("certificate", "")
        ok = v.verdict == "INF_NOT_FIN" and text.startswith(f"family {fam}\n")
        detail = f"{v.verdict}; " + "; ".join(text.splitlines()[:4])
        if name == "baumslag_b":
            pairs = [l for l in text.splitlines() if l.startswith("pairs ")]
            ok = ok and "collapse row 1 = row 4" in text and pairs == ["pairs 31"]
        checks.append(Check(f"{name} -> INF_NOT_FIN family {fam}", ok, detail,
                            budget=v.verdict == "UNRESOLVED"))

    facts = verify_family_facts(config.max_cosets * 5)
    for fam, sub in (("B1", "<b^-2, a>"), ("B2", "<b^2, a>")):
        checks.append(Check(f"index of {sub} in {fam} is 1", facts[fam] == 1,
                            f"index {facts[fam]}", budget=facts[fam] is None))

    for name, verdict in (("free_collision", "NE"), ("kb_collision", "NE")):
        v = classify(bundled(name), config)
        checks.append(Check(f"{name} -> {verdict}", v.verdict == verdict,
                            f"{v.verdict} via {v.certificate.type}",
                            budget=v.verdict == "UNRESOLVED"))

    P = bundled("split_product")
    none6 = embed_into_group(P, cyclic_group(6)) is None
    checks.append(Check("split product square does not embed in Z6", none6,
                        "search exhausted" if none6 else "unexpected witness"))
    try:
        w = split_product_witness(P)
        ok = w.check(P) and w.group.order == 18 and w.group.abelian
        detail = f"witness in Z2 x Z3 x Z3 (order {w.group.order})"
    except ValueError as e:
        ok, detail = False, str(e)
    checks.append(Check("split product square witness in Z2 x Z3 x Z3", ok, detail))
    return checks


def bundled_path(name: str) -> str:
    return str(resources.files("plsembed").joinpath("data", f"{name}.txt"))


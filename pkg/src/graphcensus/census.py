"""Census pipeline: enumerate, filter, fingerprint, deduplicate and tabulate.

Records are grouped by fingerprint.  A class found at complexity ``n`` is
dropped when the same fingerprint already appeared at a smaller complexity
(or among the complexity-zero seeds).  Names and volumes that cannot be
computed here come from a shipped annotation file and always carry a
citation string.
"""

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

from .enumerate import (
    enumerate_gluings, enumerate_markings, enumerate_oriented_quad_graphs,
    enumerate_quad_graphs,
)
from .farey import layered_pair
from .invariants import (
    Fingerprint, GroupPresentation, abelianization, fingerprint, format_homology,
    hom_counts, peripheral_profile, spine_presentation, tietze_simplify,
)
from .spine import complement_complexity_bound, expand_and_test
from .triangulation import (
    MarkedTriangulation, check_efficient, format_fixture, iso_signature, parse_fixture,
)

SCHEMA_VERSION = 1
STAGES = ("graphs", "orientedGraphs", "gluings", "closedManifolds", "markings",
          "efficient", "survivors")
TABLE_TYPES = ("knot", "2t", "2h", "4a", "4b", "4c")
PARTIAL_FLAGS = ("tietze-budget", "length-cap")
DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


class CensusError(RuntimeError):
    pass


@dataclass
class RunConfig:
    max_complexity: int = 2
    allow_knot_components: bool = True
    stages: tuple = STAGES
    cache_dir: str = None
    jobs: int = 1
    output: str = "text"
    prune: bool = True
    expand: bool = True

    def validate(self):
        if not 1 <= self.max_complexity <= 5:
            raise ValueError("max complexity must lie in 1..5")
        if self.jobs < 1:
            raise ValueError("jobs must be positive")
        bad = [s for s in self.stages if s not in STAGES]
        if bad or not self.stages:
            raise ValueError(f"unknown stages {bad}; choose from {', '.join(STAGES)}")
        if self.output not in ("text", "csv", "json"):
            raise ValueError("output must be text, csv or json")
        return self

    @property
    def last_stage(self):
        return max(STAGES.index(s) for s in self.stages)


@dataclass
class CensusRecord:
    id: str
    complexity: int
    graph_type: str
    fingerprint: Fingerprint
    signature: str
    members: tuple
    fixture: str
    bound: int
    flags: tuple = ()
    hyperbolic_candidate: bool = True
    space: str = None
    annotation: dict = None
    provenance: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "schema": SCHEMA_VERSION,
            "id": self.id,
            "complexity": self.complexity,
            "graph_type": self.graph_type,
            "fingerprint": self.fingerprint.to_dict(),
            "signature": self.signature,
            "members": list(self.members),
            "fixture": self.fixture,
            "bound": self.bound,
            "flags": list(self.flags),
            "hyperbolic_candidate": self.hyperbolic_candidate,
            "space": self.space,
            "annotation": self.annotation,
            "provenance": dict(self.provenance),
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("schema") != SCHEMA_VERSION:
            raise CensusError(f"unsupported record schema {d.get('schema')!r}")
        return cls(
            id=d["id"], complexity=d["complexity"], graph_type=d["graph_type"],
            fingerprint=Fingerprint.from_dict(d["fingerprint"]),
            signature=d["signature"], members=tuple(d["members"]), fixture=d["fixture"],
            bound=d["bound"], flags=tuple(d["flags"]),
            hyperbolic_candidate=d["hyperbolic_candidate"], space=d.get("space"),
            annotation=d.get("annotation"), provenance=dict(d.get("provenance", {})),
        )

    @property
    def in_s3(self):
        fp = self.fingerprint
        # proxy: trivial homology and no nontrivial map to any of the test groups
        return fp.h1_m == (0, ()) and all(k == 1 for k in fp.homs_m)


def dump_records(records, fh):
    for r in records:
        fh.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")


def load_records(fh):
    out = []
    for line in fh:
        line = line.strip()
        if line:
            out.append(CensusRecord.from_dict(json.loads(line)))
    return out


@dataclass
class CensusReport:
    records: list
    stats: dict
    config: RunConfig
    messages: list = field(default_factory=list)
    partial: bool = False

    @property
    def exit_code(self):
        if self.partial or any(f in PARTIAL_FLAGS for r in self.records for f in r.flags):
            return 2
        return 0


# -- annotation data and reference fingerprints -------------------------------------

@lru_cache(maxsize=None)
def annotations():
    with open(os.path.join(DATA_DIR, "annotations.json")) as fh:
        data = json.load(fh)
    if data.get("schema") != SCHEMA_VERSION:
        raise CensusError("annotation file has an unsupported schema")
    return data


def _h1(pair):
    return (pair[0], tuple(pair[1]))


def _cyclic_homs(h1):
    rank, torsion = h1
    if rank:
        return None
    if len(torsion) > 1:
        return None
    order = torsion[0] if torsion else 1
    p = GroupPresentation(1, [(1,) * order] if order > 1 else [(1,)])
    return hom_counts(p)


def link_reference_fingerprint(ref):
    raw = GroupPresentation.parse("gens 2; " + "; ".join("rel " + r for r in ref["relators"]))
    px = tietze_simplify(raw)
    words = [tuple(_parse_word(w)) for w in ref["meridians"]]
    h1_m = _h1(ref["space_h1"])
    return Fingerprint(
        graph_type="link2", h1_m=h1_m, h1_x=abelianization(px), homs_x=hom_counts(px),
        homs_m=_cyclic_homs(h1_m), linking={"mutual": ref["mutual"], "self": tuple(ref["self"])},
        peripheral=peripheral_profile(raw, words),
    )


def torus_reference_fingerprint(l, m, p, q):
    mt, _ = layered_pair(l, m, p, q)
    return fingerprint(mt)


def trivial_graph_fingerprint(graph_type, free_rank, meridians):
    px = GroupPresentation(free_rank, [])
    words = [tuple(_parse_word(w)) for w in meridians]
    return Fingerprint(graph_type=graph_type, h1_m=(0, ()), h1_x=(free_rank, ()),
                       homs_x=hom_counts(px), homs_m=hom_counts(GroupPresentation(0, [])),
                       linking=None, peripheral=peripheral_profile(px, words))


def _parse_word(text):
    return GroupPresentation.parse("gens 26; rel " + text).relators[0]


def _row_fingerprint(row):
    if "torus" in row:
        return torus_reference_fingerprint(*row["torus"])
    if "link" in row:
        return link_reference_fingerprint(annotations()["links"][row["link"]])
    if "free_rank" in row:
        return trivial_graph_fingerprint(row["type"], row["free_rank"], row["meridians"])
    return None


@lru_cache(maxsize=None)
def seed_keys():
    """Fingerprint keys of the complexity-zero pairs."""
    return frozenset(_row_fingerprint(row).key_string() for row in annotations()["seeds"])


@lru_cache(maxsize=None)
def reference_rows():
    """Non-hyperbolic reference rows with their fingerprint keys (None if annotation only)."""
    out = []
    data = annotations()
    for source, rows in (("table", data["nonhyperbolic"]), ("extra", data["extra_references"])):
        for row in rows:
            fp = None if row.get("annotation_only") else _row_fingerprint(row)
            out.append((source, row, None if fp is None else fp.key_string()))
    return tuple(out)


@lru_cache(maxsize=None)
def knot_references():
    """Complement invariants of the shipped ideal knot fixtures."""
    from .hypsolve import FIXTURE_DIR, load_ideal, solve
    out = []
    for row in annotations()["knots"]:
        it = load_ideal(os.path.join(FIXTURE_DIR, row["fixture"]))
        px = tietze_simplify(spine_presentation(MarkedTriangulation(it.tri, ())))
        res = solve(it)
        out.append((row, abelianization(px), hom_counts(px), res.volume))
    return tuple(out)


SPACE_H1 = {"S3": (0, ()), "P3": (0, (2,)), "S2xS1": (1, ())}


def space_h1(name):
    if name in SPACE_H1:
        return SPACE_H1[name]
    if name.startswith("L("):
        p = int(name[2:].split(",")[0])
        return (0, (p,))
    return None


# -- enumeration worker --------------------------------------------------------------

def _process_graph(args):
    g, cfg = args
    stats = {}
    last = cfg["last_stage"]
    closed = enumerate_gluings(g, stats)
    closed_out = [(iso_signature(t), format_fixture(t)) for t in closed]
    candidates = []
    if last >= STAGES.index("markings"):
        for tri in closed:
            for mt in enumerate_markings(tri, prune=cfg["prune"], stats=stats):
                structure = check_efficient(mt)
                if structure.knots and not cfg["allow_knots"]:
                    continue
                if last < STAGES.index("survivors"):
                    candidates.append({"signature": mt.signature})
                    continue
                nonmin = cfg["expand"] and expand_and_test(mt)
                fp = fingerprint(mt, structure)
                candidates.append({
                    "signature": mt.signature,
                    "fixture": format_fixture(mt.tri, mt.marked),
                    "fingerprint": fp.to_dict(),
                    "nonminimal": bool(nonmin),
                    "bound": complement_complexity_bound(mt),
                })
    return stats, closed_out, candidates


def _cache_path(cfg, stage, n, ext):
    return os.path.join(cfg.cache_dir, f"{stage}_n{n}.{ext}")


def _cache_header(cfg, n):
    return {"schema": SCHEMA_VERSION, "n": n, "prune": cfg.prune, "expand": cfg.expand,
            "allow_knots": cfg.allow_knot_components, "last_stage": cfg.last_stage}


def _read_stage_cache(cfg, n):
    path = _cache_path(cfg, "survivors", n, "jsonl")
    try:
        with open(path) as fh:
            header = json.loads(fh.readline())
            if {k: header.get(k) for k in _cache_header(cfg, n)} != _cache_header(cfg, n):
                return None
            stats = header["stats"]
            cands = [json.loads(line) for line in fh if line.strip()]
        if len(cands) != stats.get("candidates"):
            return None
        return stats, cands
    except (OSError, ValueError, KeyError):
        return None


def _write_stage_cache(cfg, n, stats, closed, cands):
    os.makedirs(cfg.cache_dir, exist_ok=True)
    with open(_cache_path(cfg, "closedManifolds", n, "tri"), "w") as fh:
        fh.write("\n".join(text for _, text in closed))
    header = dict(_cache_header(cfg, n), stats=stats)
    tmp = _cache_path(cfg, "survivors", n, "jsonl.tmp")
    with open(tmp, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for c in cands:
            fh.write(json.dumps(c, sort_keys=True) + "\n")
    os.replace(tmp, _cache_path(cfg, "survivors", n, "jsonl"))


def enumerate_level(n, cfg, messages=None):
    """Run the enumeration for one complexity; returns ``(stats, candidates)``."""
    if cfg.cache_dir:
        cached = _read_stage_cache(cfg, n)
        if cached is not None:
            return cached
        if messages is not None and os.path.exists(_cache_path(cfg, "survivors", n, "jsonl")):
            messages.append(f"cache for n={n} unusable, stage re-run")
    graphs = enumerate_quad_graphs(n)
    oriented = enumerate_oriented_quad_graphs(n)
    stats = {"graphs": len(graphs), "orientedGraphs": len(oriented)}
    if cfg.last_stage < STAGES.index("gluings"):
        return stats, []
    wcfg = {"last_stage": cfg.last_stage, "prune": cfg.prune, "expand": cfg.expand,
            "allow_knots": cfg.allow_knot_components}
    jobs = [(g, wcfg) for g in oriented]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_process_graph, jobs))
    else:
        results = [_process_graph(j) for j in jobs]
    closed = {}
    cands = {}
    raw = tried = 0
    for wstats, wclosed, wcands in results:
        raw += wstats.get("raw", 0)
        tried += wstats.get("markings_tried", 0)
        closed.update(wclosed)
        for c in wcands:
            cands.setdefault(c["signature"], c)
    closed = sorted(closed.items())
    cands = [cands[k] for k in sorted(cands)]
    stats.update(gluings=raw, closedManifolds=len(closed), markings=tried,
                 efficient=len(cands), candidates=len(cands))
    if cfg.last_stage >= STAGES.index("survivors"):
        stats["survivors"] = sum(1 for c in cands if not c["nonminimal"])
    if cfg.cache_dir:
        _write_stage_cache(cfg, n, stats, closed, cands)
    return stats, cands


# -- classification ------------------------------------------------------------------

def _pattern_tag(pattern):
    tag, params = pattern
    return f"pattern:{tag}" + (f"({','.join(map(str, params))})" if params else "")


def classify(n, candidates, seen_keys):
    """Group surviving candidates of complexity ``n`` into records."""
    groups = {}
    for c in candidates:
        if c.get("nonminimal"):
            continue
        fp = Fingerprint.from_dict(c["fingerprint"])
        groups.setdefault(fp.key_string(), []).append((c, fp))
    records = []
    suppressed = 0
    for key in sorted(groups):
        if key in seen_keys:
            suppressed += 1
            continue
        members = sorted(groups[key], key=lambda x: x[0]["signature"])
        rep, fp = members[0]
        flags = set()
        for c, f in members:
            flags.update(f.flags)
        pattern = next((f.pattern for _, f in members if f.pattern is not None), None)
        if pattern is not None and fp.pattern is None:
            fp.pattern = pattern
        bound = min(c["bound"] for c, _ in members)
        if len(members) > 1:
            flags.add("fingerprint-collision")
        hyperbolic = True
        if fp.graph_type in ("knot", "link2"):
            if bound <= 1:
                flags.add("complement-bound<=1")
            if pattern is not None:
                flags.add(_pattern_tag(pattern))
            if bound <= 1 or pattern is not None:
                flags.add("non-hyperbolic")
                hyperbolic = False
        records.append(CensusRecord(
            id="", complexity=n, graph_type=fp.graph_type, fingerprint=fp,
            signature=rep["signature"], members=tuple(c["signature"] for c, _ in members),
            fixture=rep["fixture"], bound=bound, flags=tuple(sorted(flags)),
            hyperbolic_candidate=hyperbolic,
            provenance={"fingerprint": "computed", "flags": "computed"},
        ))
    return records, suppressed


def _assign_ids(records):
    counters = {}
    for r in records:
        k = (r.graph_type, r.complexity)
        counters[k] = counters.get(k, 0) + 1
        r.id = f"{r.graph_type}_{r.complexity}_p{counters[k]}"


def annotate(records):
    """Attach names, spaces and volumes from the annotation file and reference data."""
    data = annotations()
    graph_rows = {}
    for row in data["graphs"]:
        graph_rows.setdefault((row["complexity"], row["graph_type"], _h1(row["h1_m"])), []).append(row)
    hits = {}
    for r in records:
        if r.hyperbolic_candidate and r.complexity <= 2:
            k = (r.complexity, r.graph_type, r.fingerprint.h1_m)
            if k in graph_rows:
                hits.setdefault(k, []).append(r)
    for k, recs in hits.items():
        rows = graph_rows[k]
        if len(recs) == 1 and len(rows) == 1:
            r, row = recs[0], rows[0]
            r.id = row["name"]
            r.space = row["space"]
            r.annotation = {"name": row["name"], "volume": row["volume"], "citation": row["citation"]}
            r.provenance.update(id=f"annotated: {row['citation']}",
                                volume=f"annotated: {row['citation']}",
                                space=f"annotated: {row['citation']}")
    refs = reference_rows()
    for r in records:
        if r.hyperbolic_candidate:
            continue
        key = r.fingerprint.key_string()
        for source, row, rkey in refs:
            if rkey is not None and rkey == key:
                r.space = row["space"]
                r.annotation = {"description": row["description"], "citation": row["citation"],
                                "reference_complexity": row["complexity"]}
                r.provenance.update(space="computed: reference fingerprint match",
                                    description=f"annotated: {row['citation']}")
                break
    for r in records:
        if r.graph_type != "knot" or not r.hyperbolic_candidate:
            continue
        for row, h1x, homs, vol in knot_references():
            if (space_h1(row["space"]) == r.fingerprint.h1_m and h1x == r.fingerprint.h1_x
                    and homs == r.fingerprint.homs_x):
                r.id = row["name"] if row["complexity"] == r.complexity else r.id
                r.space = row["space"]
                r.annotation = {"name": row["name"], "volume": row["volume"],
                                "computed_volume": round(vol, 9), "census": row["census"],
                                "citation": row["citation"]}
                r.provenance.update(volume="computed: ideal fixture " + row["fixture"],
                                    space=f"annotated: {row['citation']}")
                break


def run_census(config):
    cfg = config.validate()
    records = []
    stats = {}
    messages = []
    seen = set(seed_keys())
    for n in range(1, cfg.max_complexity + 1):
        st, cands = enumerate_level(n, cfg, messages)
        if cfg.last_stage >= STAGES.index("survivors"):
            recs, suppressed = classify(n, cands, seen)
            st["suppressed"] = suppressed
            st["classes"] = len(recs)
            _assign_ids(recs)
            seen.update(r.fingerprint.key_string() for r in recs)
            records.extend(recs)
        stats[n] = st
    annotate(records)
    return CensusReport(records, stats, cfg, messages)


# -- tables ---------------------------------------------------------------------------

def count_matrix(records, max_complexity=None):
    """``{type: {c: (count, count in S3)}}`` over hyperbolic candidates."""
    cmax = max_complexity or max((r.complexity for r in records), default=0)
    types = list(TABLE_TYPES)
    for r in records:
        if r.hyperbolic_candidate and r.graph_type not in types:
            types.append(r.graph_type)
    out = {t: {c: [0, 0] for c in range(1, cmax + 1)} for t in types}
    for r in records:
        if r.hyperbolic_candidate:
            cell = out[r.graph_type][r.complexity]
            cell[0] += 1
            cell[1] += r.in_s3
    return {t: {c: tuple(v) for c, v in row.items()} for t, row in out.items()}


def annex_rows(records, max_complexity=None):
    """Rows ``(c, type, space, description, record ids, status)`` for non-hyperbolic pairs."""
    cmax = max_complexity or max((r.complexity for r in records), default=0)
    nonhyp = [r for r in records if not r.hyperbolic_candidate]
    used = set()
    rows = []
    for source, row, key in reference_rows():
        if row["complexity"] > cmax and source == "table":
            continue
        kind = "link2" if row["type"] == "link" else "knot"
        if key is None:
            ids = [r.id for r in records if r.graph_type == kind and r.complexity == row["complexity"]
                   and r.fingerprint.h1_m == _h1(row["h1_m"])]
            status = "annotation only"
        else:
            ids = [r.id for r in nonhyp if r.fingerprint.key_string() == key]
            status = "matched" if ids else "not found"
        if source == "extra" and not ids:
            continue
        used.update(ids)
        rows.append((row["complexity"], row["type"], row["space"], row["description"],
                     ",".join(ids), status if source == "table" else status + " (extra)"))
    for r in nonhyp:
        if r.id not in used:
            rows.append((r.complexity, r.graph_type, "H1=" + format_homology(r.fingerprint.h1_m),
                         "unidentified " + ",".join(f for f in r.flags if f.startswith("pattern")),
                         r.id, "computed"))
    rows.sort(key=lambda x: (x[0], x[5].startswith("computed")))
    return rows


def _render(headers, rows, style):
    if style == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(headers)
        w.writerows(rows)
        return buf.getvalue()
    rows = [[str(x) for x in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip(),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(x.ljust(w) for x, w in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(lines) + "\n"


def _volume_cell(r, annotated):
    ann = r.annotation or {}
    if "computed_volume" in ann:
        return f"{ann['computed_volume']:.9f}"
    if annotated and "volume" in ann:
        return f"{ann['volume']:.9f} [annotated: {ann['citation']}]"
    return ""


def emit_tables(records, style="text", annotated=False, max_complexity=None):
    cmax = max_complexity or max((r.complexity for r in records), default=0)
    matrix = count_matrix(records, cmax)
    out = []
    headers = ["type"] + [f"c={c}" for c in range(1, cmax + 1)]
    rows = []
    for t, row in matrix.items():
        if t not in TABLE_TYPES and not any(v[0] for v in row.values()):
            continue
        rows.append([f"{t} (in S3)"] + [f"{a} ({b})" for a, b in row.values()])
    out.append("Hyperbolic candidates per type and complexity\n")
    out.append(_render(headers, rows, style))

    if annotated:
        def order(r):
            vol = (r.annotation or {}).get("volume")
            return (r.complexity, vol is None, vol or 0.0, r.graph_type, r.fingerprint.key_string())
    else:
        def order(r):
            return (r.complexity, r.graph_type, r.fingerprint.key_string())
    hyp = sorted((r for r in records if r.hyperbolic_candidate), key=order)
    headers = ["id", "c", "type", "space", "H1(M)", "H1(X)", "volume", "flags"]
    rows = [[r.id, r.complexity, r.graph_type, r.space or "",
             format_homology(r.fingerprint.h1_m), format_homology(r.fingerprint.h1_x),
             _volume_cell(r, annotated), " ".join(r.flags)] for r in hyp]
    out.append("\nHyperbolic candidates\n")
    out.append(_render(headers, rows, style))

    out.append("\nNon-hyperbolic knots and links\n")
    out.append(_render(["c", "type", "space", "description", "records", "status"],
                       annex_rows(records, cmax), style))
    return "".join(out)


def stats_table(stats, style="text"):
    headers = ["n"] + [s for s in STAGES] + ["suppressed", "classes"]
    rows = [[n] + [st.get(s, "") for s in headers[1:]] for n, st in sorted(stats.items())]
    return _render(headers, rows, style)


# -- identification -----------------------------------------------------------------

@dataclass
class Match:
    kind: str             # "signature", "fingerprint" or "none"
    records: list
    signature: str
    fingerprint: Fingerprint


def identify(mt, records):
    """Look up a marked triangulation among census records."""
    structure = check_efficient(mt)
    if structure is None:
        raise ValueError("triangulation is not efficient for its marking")
    sig = mt.signature
    fp = fingerprint(mt, structure)
    exact = [r for r in records if sig in r.members]
    if exact:
        return Match("signature", exact, sig, fp)
    key = fp.key_string()
    by_fp = [r for r in records if r.fingerprint.key_string() == key]
    if by_fp:
        return Match("fingerprint", by_fp, sig, fp)
    return Match("none", [], sig, fp)


def identify_fixture(text, records):
    return identify(parse_fixture(text), records)

"""Line-oriented text formats for spaces, maps, tree maps and reports.

A file holds a sequence of documents, each opened by a header line
(space/map/treemap/series/cover/report) and continued by body lines.
Blank lines and '#' comments are ignored. The serializer emits a
canonical form: sorted le pairs, expanded shape tables, stable key
order and newline conventions, so parse and serialize invert each
other on canonical documents and outputs diff cleanly.

Space documents must spell out transitivity: a forced le pair that is
missing is an error carrying the witness triple, which catches typos;
closing the relation automatically is opt-in.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    DocumentSyntaxError,
    NotTransitive,
    PartialTable,
    UnknownSpaceRef,
    ValueOutOfRange,
)
from .finspace import FiniteSpace, PointSet, bits
from .mapcalc import CoverResult, FiniteMap, SeriesReport
from .treespace import ThresholdMap, all_shapes, render_shape


@dataclass
class Document:
    kind: str  # "space" | "map" | "treemap" | "series" | "cover" | "report"
    name: str
    payload: dict = field(default_factory=dict)


# -- parsing -------------------------------------------------------------------


def parse_documents(text: str, close: bool = False) -> list[Document]:
    docs: list[Document] = []
    current: Document | None = None
    body_lines: list[tuple[int, str]] = []

    def finish():
        nonlocal current
        if current is not None:
            _finish_document(current, body_lines, close)
            docs.append(current)
        current = None
        body_lines.clear()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split()[0]
        if head in ("space", "map", "treemap", "series", "cover", "report"):
            finish()
            current = _open_document(head, line, lineno)
        elif current is None:
            raise DocumentSyntaxError(f"unexpected line before any header: {line!r}", lineno)
        else:
            body_lines.append((lineno, line))
    finish()
    return docs


def parse(text: str, close: bool = False) -> Document:
    docs = parse_documents(text, close=close)
    if len(docs) != 1:
        raise DocumentSyntaxError(f"expected exactly one document, found {len(docs)}")
    return docs[0]


def _open_document(kind: str, line: str, lineno: int) -> Document:
    parts = line.split()
    if kind == "space":
        if len(parts) != 2:
            raise DocumentSyntaxError("expected: space <name>", lineno)
        return Document("space", parts[1], {"le": [], "points": None, "line": lineno})
    if kind == "map":
        # map <name> : <dom> -> <cod>
        if len(parts) != 6 or parts[2] != ":" or parts[4] != "->":
            raise DocumentSyntaxError("expected: map <name> : <dom> -> <cod>", lineno)
        return Document(
            "map", parts[1], {"dom": parts[3], "cod": parts[5], "vals": [], "line": lineno}
        )
    if kind == "treemap":
        # treemap <name> k=<k> N=<n> -> <cod>
        if len(parts) != 6 or parts[4] != "->":
            raise DocumentSyntaxError("expected: treemap <name> k=<k> N=<n> -> <cod>", lineno)
        opts = _keyvals(parts[2:4], lineno)
        if set(opts) != {"k", "N"}:
            raise DocumentSyntaxError("treemap header needs k= and N=", lineno)
        return Document(
            "treemap",
            parts[1],
            {
                "k": int(opts["k"]),
                "N": int(opts["N"]),
                "cod": parts[5],
                "patterns": [],
                "line": lineno,
            },
        )
    if kind == "series":
        opts = _keyvals(parts[2:], lineno)
        return Document(
            "series",
            parts[1],
            {
                "kind": opts.get("kind", "plain"),
                "verdict": opts.get("verdict", "holds"),
                "index": opts.get("index", "none"),
                "levels": [],
                "kernel": None,
                "line": lineno,
            },
        )
    if kind == "cover":
        opts = _keyvals(parts[2:], lineno)
        return Document(
            "cover",
            parts[1],
            {
                "mode": opts.get("mode", "arbitrary"),
                "cardinality": opts.get("cardinality", "none"),
                "greedy": opts.get("greedy"),
                "pieces": [],
                "witness": None,
                "line": lineno,
            },
        )
    if len(parts) != 2:
        raise DocumentSyntaxError("expected: report <campaign>", lineno)
    return Document(
        "report", parts[1], {"meta": {}, "counts": {}, "findings": [], "line": lineno}
    )


def _keyvals(tokens, lineno) -> dict:
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise DocumentSyntaxError(f"expected key=value, got {tok!r}", lineno)
        k, _, v = tok.partition("=")
        out[k] = v
    return out


def _int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise DocumentSyntaxError(f"expected an integer, got {token!r}", lineno)


def _members(token: str, lineno: int) -> tuple[int, ...]:
    if token == "-":
        return ()
    return tuple(_int(t, lineno) for t in token.split(","))


def _finish_document(doc: Document, body, close: bool):
    handler = {
        "space": _finish_space,
        "map": _finish_map,
        "treemap": _finish_treemap,
        "series": _finish_series,
        "cover": _finish_cover,
        "report": _finish_report,
    }[doc.kind]
    handler(doc, body, close)


def _finish_space(doc, body, close):
    for lineno, line in body:
        parts = line.split()
        if parts[0] == "points" and len(parts) == 2:
            doc.payload["points"] = _int(parts[1], lineno)
        elif parts[0] == "le" and len(parts) == 3:
            doc.payload["le"].append((_int(parts[1], lineno), _int(parts[2], lineno)))
        else:
            raise DocumentSyntaxError(f"unexpected space line: {line!r}", lineno)
    n = doc.payload["points"]
    if n is None:
        raise DocumentSyntaxError("space document needs a points line", doc.payload["line"])
    for i, j in doc.payload["le"]:
        if not (0 <= i < n and 0 <= j < n):
            raise ValueOutOfRange(f"le {i} {j} outside 0..{n - 1}", doc.payload["line"])
    if not close:
        pairs = {(i, j) for i, j in doc.payload["le"]} | {(i, i) for i in range(n)}
        for i, j in sorted(pairs):
            for j2, k in sorted(pairs):
                if j2 == j and (i, k) not in pairs:
                    raise NotTransitive(
                        f"le {i} {j} and le {j} {k} force le {i} {k}",
                        witness=(i, j, k),
                        line=doc.payload["line"],
                    )
    doc.payload["close"] = close


def _finish_map(doc, body, close):
    for lineno, line in body:
        parts = line.split()
        if parts[0] == "val" and len(parts) == 3:
            doc.payload["vals"].append((_int(parts[1], lineno), _int(parts[2], lineno)))
        else:
            raise DocumentSyntaxError(f"unexpected map line: {line!r}", lineno)


def _finish_treemap(doc, body, close):
    for lineno, line in body:
        parts = line.split()
        if parts[0] == "shape" and len(parts) == 3:
            doc.payload["patterns"].append((parts[1], _int(parts[2], lineno), lineno))
        else:
            raise DocumentSyntaxError(f"unexpected treemap line: {line!r}", lineno)


def _finish_series(doc, body, close):
    for lineno, line in body:
        parts = line.split()
        if parts[0] == "level" and len(parts) == 4 and parts[2] == "=":
            doc.payload["levels"].append(_members(parts[3], lineno))
        elif parts[0] == "kernel" and len(parts) == 3 and parts[1] == "=":
            doc.payload["kernel"] = _members(parts[2], lineno)
        else:
            raise DocumentSyntaxError(f"unexpected series line: {line!r}", lineno)


def _finish_cover(doc, body, close):
    for lineno, line in body:
        parts = line.split()
        if parts[0] == "piece" and len(parts) == 3 and parts[1] == "=":
            doc.payload["pieces"].append(_members(parts[2], lineno))
        elif parts[0] == "witness" and len(parts) == 3 and parts[1] == "=":
            doc.payload["witness"] = _members(parts[2], lineno)
        else:
            raise DocumentSyntaxError(f"unexpected cover line: {line!r}", lineno)


def _finish_report(doc, body, close):
    for lineno, line in body:
        parts = line.split()
        if parts[0] == "meta":
            doc.payload["meta"].update(_keyvals(parts[1:], lineno))
        elif parts[0] == "count" and len(parts) == 4 and parts[2] == "=":
            doc.payload["counts"][parts[1]] = _int(parts[3], lineno)
        elif parts[0] == "finding":
            doc.payload["findings"].append(_keyvals(parts[1:], lineno))
        else:
            raise DocumentSyntaxError(f"unexpected report line: {line!r}", lineno)


# -- instantiation -------------------------------------------------------------


@dataclass
class LoadedFile:
    spaces: dict
    maps: dict
    treemaps: dict
    documents: list


def instantiate(docs: list[Document]) -> LoadedFile:
    """Build domain objects from parsed documents, resolving space names."""
    spaces: dict[str, FiniteSpace] = {}
    maps: dict[str, FiniteMap] = {}
    treemaps: dict[str, ThresholdMap] = {}
    for doc in docs:
        if doc.kind == "space":
            if doc.name in spaces:
                raise DocumentSyntaxError(f"duplicate space {doc.name!r}", doc.payload["line"])
            spaces[doc.name] = FiniteSpace.from_le_pairs(
                doc.payload["points"], doc.payload["le"], close=doc.payload["close"]
            )
        elif doc.kind == "map":
            dom = _resolve(spaces, doc.payload["dom"], doc.payload["line"])
            cod = _resolve(spaces, doc.payload["cod"], doc.payload["line"])
            table = [None] * dom.n
            for i, j in doc.payload["vals"]:
                if not 0 <= i < dom.n:
                    raise ValueOutOfRange(f"val point {i} outside the domain", doc.payload["line"])
                if not 0 <= j < cod.n:
                    raise ValueOutOfRange(f"val image {j} outside the codomain", doc.payload["line"])
                table[i] = j
            missing = [i for i, v in enumerate(table) if v is None]
            if missing:
                raise PartialTable(
                    f"map {doc.name!r} missing values for points {missing}",
                    doc.payload["line"],
                )
            maps[doc.name] = FiniteMap(dom, cod, tuple(table))
        elif doc.kind == "treemap":
            cod = _resolve(spaces, doc.payload["cod"], doc.payload["line"])
            treemaps[doc.name] = _build_treemap(doc, cod)
    return LoadedFile(spaces=spaces, maps=maps, treemaps=treemaps, documents=docs)


def _resolve(spaces, name, line):
    if name not in spaces:
        raise UnknownSpaceRef(f"unknown space {name!r}", line)
    return spaces[name]


def _parse_pattern(token: str, k: int, threshold: int, lineno: int):
    if token == "()":
        return ()
    coords = []
    for t in token.split(","):
        if t == "*":
            coords.append(None)  # wildcard: any coordinate class
        else:
            c = _int(t, lineno)
            if not 0 <= c < threshold:
                raise ValueOutOfRange(
                    f"pattern coordinate {c} outside 0..{threshold - 1}", lineno
                )
            coords.append(c)
    if len(coords) > k:
        raise ValueOutOfRange(f"pattern {token!r} longer than the height {k}", lineno)
    return tuple(coords)


def _build_treemap(doc, cod) -> ThresholdMap:
    """Expand wildcard patterns into a total shape table.

    A digit matches that explicit coordinate, '*' matches any coordinate
    class including the star; the most specific pattern (most digits)
    wins and ties with different values are rejected.
    """
    k, n = doc.payload["k"], doc.payload["N"]
    rules = []
    for token, value, lineno in doc.payload["patterns"]:
        if not 0 <= value < cod.n:
            raise ValueOutOfRange(f"value {value} outside the codomain", lineno)
        rules.append((_parse_pattern(token, k, n, lineno), value, token, lineno))
    values = {}
    for shape in all_shapes(k, n):
        matches = []
        for pat, value, token, lineno in rules:
            if len(pat) != len(shape):
                continue
            if all(p is None or p == c for p, c in zip(pat, shape)):
                matches.append((sum(p is not None for p in pat), value, token, lineno))
        if not matches:
            raise PartialTable(
                f"treemap {doc.name!r} has no pattern for shape {render_shape(shape)}",
                doc.payload["line"],
            )
        best = max(m[0] for m in matches)
        chosen = {m[1] for m in matches if m[0] == best}
        if len(chosen) > 1:
            raise DocumentSyntaxError(
                f"ambiguous patterns for shape {render_shape(shape)}", doc.payload["line"]
            )
        values[shape] = chosen.pop()
    return ThresholdMap(k, n, cod, values)


# -- serialization --------------------------------------------------------------


def serialize_document(doc: Document) -> str:
    out = []
    if doc.kind == "space":
        n = doc.payload["points"]
        out.append(f"space {doc.name}")
        out.append(f"points {n}")
        pairs = sorted({(i, j) for i, j in doc.payload["le"] if i != j})
        out.extend(f"le {i} {j}" for i, j in pairs)
    elif doc.kind == "map":
        out.append(f"map {doc.name} : {doc.payload['dom']} -> {doc.payload['cod']}")
        out.extend(f"val {i} {j}" for i, j in sorted(doc.payload["vals"]))
    elif doc.kind == "treemap":
        p = doc.payload
        out.append(f"treemap {doc.name} k={p['k']} N={p['N']} -> {p['cod']}")
        rendered = sorted(
            (pat, value) for pat, value, *_ in p["patterns"]
        )
        out.extend(f"shape {pat} {value}" for pat, value in rendered)
    elif doc.kind == "series":
        p = doc.payload
        out.append(
            f"series {doc.name} kind={p['kind']} verdict={p['verdict']} index={p['index']}"
        )
        for a, level in enumerate(p["levels"]):
            out.append(f"level {a} = {_render_members(level)}")
        if p.get("kernel") is not None:
            out.append(f"kernel = {_render_members(p['kernel'])}")
    elif doc.kind == "cover":
        p = doc.payload
        head = f"cover {doc.name} mode={p['mode']} cardinality={p['cardinality']}"
        if p.get("greedy") is not None:
            head += f" greedy={p['greedy']}"
        out.append(head)
        out.extend(f"piece = {_render_members(piece)}" for piece in p["pieces"])
        if p.get("witness") is not None:
            out.append(f"witness = {_render_members(p['witness'])}")
    else:
        p = doc.payload
        out.append(f"report {doc.name}")
        body = [
            "meta " + " ".join(f"{k}={v}" for k, v in sorted(p["meta"].items()))
        ]
        body.extend(f"count {k} = {v}" for k, v in sorted(p["counts"].items()))
        body.extend(
            "finding " + " ".join(f"{k}={v}" for k, v in sorted(f.items()))
            for f in p["findings"]
        )
        out.extend(sorted(body))
    return "\n".join(out) + "\n"


def serialize_documents(docs: list[Document]) -> str:
    return "\n".join(serialize_document(d) for d in docs)


def _render_members(members) -> str:
    if not members:
        return "-"
    return ",".join(str(m) for m in members)


# -- documents from domain objects ----------------------------------------------


def space_document(name: str, space: FiniteSpace) -> Document:
    pairs = [
        (i, j) for i in range(space.n) for j in bits(space.up[i]) if i != j
    ]
    return Document("space", name, {"points": space.n, "le": pairs, "close": False, "line": 0})


def map_document(name: str, f: FiniteMap, dom_name: str, cod_name: str) -> Document:
    return Document(
        "map",
        name,
        {
            "dom": dom_name,
            "cod": cod_name,
            "vals": list(enumerate(f.table)),
            "line": 0,
        },
    )


def treemap_document(name: str, f: ThresholdMap, cod_name: str) -> Document:
    patterns = [
        (render_shape(s), v, 0) for s, v in sorted(f.values.items())
    ]
    return Document(
        "treemap",
        name,
        {"k": f.k, "N": f.threshold, "cod": cod_name, "patterns": patterns, "line": 0},
    )


def series_document(name: str, report: SeriesReport) -> Document:
    levels = [tuple(s.members()) for s in report.sets]
    return Document(
        "series",
        name,
        {
            "kind": report.kind,
            "verdict": report.verdict,
            "index": report.index if report.index is not None else "none",
            "levels": levels,
            "kernel": tuple(report.kernel.members()) if report.kernel is not None else None,
            "line": 0,
        },
    )


def cover_document(name: str, cover: CoverResult) -> Document:
    pieces = [
        tuple(p.members()) for p in cover.pieces if isinstance(p, PointSet)
    ]
    witness = None
    if cover.impossibility is not None:
        witness = (cover.impossibility.x, cover.impossibility.y)
    return Document(
        "cover",
        name,
        {
            "mode": cover.mode,
            "cardinality": str(cover.cardinality),
            "greedy": cover.greedy_size,
            "pieces": pieces,
            "witness": witness,
            "line": 0,
        },
    )


def report_document(report) -> Document:
    findings = [
        {
            "check": f.check,
            "kind": f.kind,
            "instance": f.instance,
            "certificate": f.certificate or "-",
        }
        for f in report.findings
    ]
    meta = {k: v for k, v in sorted(report.bounds.items())}
    meta["campaign"] = report.campaign
    meta["rng"] = report.rng
    meta["seed"] = report.seed if report.seed is not None else "-"
    return Document(
        "report",
        report.campaign,
        {"meta": meta, "counts": dict(report.counts), "findings": findings, "line": 0},
    )

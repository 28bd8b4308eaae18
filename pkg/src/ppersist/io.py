"""File formats: reading inputs and writing deterministic JSON and SVG.

Rationals are written as strings in lowest terms (``"3/4"``, ``"2"``,
``"inf"``).  On input, decimals such as ``"0.25"`` are converted exactly.
All JSON output uses sorted keys and a fixed layout so repeated runs are
byte-identical.
"""

from __future__ import annotations

import csv
import io as _io
import json
from fractions import Fraction
from pathlib import Path

from .diagrams import Diagram, DiagramRep, EndRing, build_spectral_page
from .filtration import GraphFamily, WeightedPointCloud, sqrt_approx
from .linalg import FieldSpec, Matrix
from .persistence import INF, Barcode
from .semigroup import FiniteSemigroup
from .simplicial import EMPTY, SimplicialComplex

__all__ = [
    "FormatError",
    "parse_rational",
    "fmt_rational",
    "read_point_cloud",
    "parse_point_cloud",
    "read_semigroup",
    "parse_semigroup",
    "parse_graph_family",
    "parse_complex",
    "parse_diagram",
    "parse_page",
    "barcode_to_json",
    "validate_barcode_json",
    "poset_to_json",
    "end_ring_to_json",
    "dumps",
    "barcode_svg",
]


class FormatError(ValueError):
    """Malformed input file."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


def _reraise(exc):
    return FormatError(str(exc), getattr(exc, "witness", None))


def parse_rational(s) -> Fraction:
    if isinstance(s, bool):
        raise FormatError(f"not a rational: {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, float):
        # JSON numbers: go through the shortest repr so 0.1 means 1/10
        return Fraction(repr(s))
    try:
        return Fraction(str(s).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"not a rational: {s!r}") from exc


def fmt_rational(x) -> str:
    if x == INF:
        return "inf"
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def _load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc


# -- CSV ------------------------------------------------------------------------


def parse_point_cloud(text: str) -> WeightedPointCloud:
    """Header ``x1,...,xd,p`` then one point per row."""
    rows = [r for r in csv.reader(_io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise FormatError("empty point cloud file")
    header = [c.strip() for c in rows[0]]
    d = len(header) - 1
    if d < 1 or header != [f"x{i}" for i in range(1, d + 1)] + ["p"]:
        raise FormatError(f"header must be x1,...,xd,p; got {','.join(header)}")
    pts, probs = [], []
    for ln, row in enumerate(rows[1:], start=2):
        if len(row) != d + 1:
            raise FormatError(f"line {ln}: expected {d + 1} fields, got {len(row)}")
        vals = [parse_rational(c) for c in row]
        pts.append(vals[:d])
        probs.append(vals[d])
    if not pts:
        raise FormatError("point cloud has no rows")
    try:
        return WeightedPointCloud(tuple(pts), tuple(probs))
    except ValueError as exc:
        raise _reraise(exc) from exc


def read_point_cloud(path) -> WeightedPointCloud:
    return parse_point_cloud(Path(path).read_text())


def parse_semigroup(text: str) -> FiniteSemigroup:
    """First line ``n``, then ``n`` rows of ``n`` zero-based indices."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty semigroup file")
    try:
        n = int(lines[0].split(",")[0])
        rows = [[int(c) for c in ln.split(",")] for ln in lines[1:]]
    except ValueError as exc:
        raise FormatError(f"non-integer entry: {exc}") from exc
    if n < 1 or len(rows) != n or any(len(r) != n for r in rows):
        raise FormatError(f"expected {n} rows of {n} entries")
    try:
        return FiniteSemigroup(rows)
    except ValueError as exc:
        raise _reraise(exc) from exc


def read_semigroup(path) -> FiniteSemigroup:
    return parse_semigroup(Path(path).read_text())


# -- JSON inputs ----------------------------------------------------------------


def _vertex(v):
    if isinstance(v, (int, str)) and not isinstance(v, bool):
        return v
    raise FormatError(f"vertex ids must be integers or strings, got {v!r}")


def parse_graph_family(text: str) -> GraphFamily:
    """``{"g": {"vertices", "edges"}, "h": {"vertices", "edges"}, "label": {g-vertex: h-vertex}}``.

    Label keys are matched against ``str(vertex)`` since JSON keys are strings.
    """
    obj = _load_json(text)
    try:
        g, h, label = obj["g"], obj["h"], obj["label"]
        gv = tuple(_vertex(v) for v in g["vertices"])
        hv = tuple(_vertex(v) for v in h["vertices"])
        by_str = {str(v): v for v in hv}
        lab = {}
        for w in gv:
            raw = label[str(w)]
            lab[w] = by_str.get(str(raw), raw)
        ge = tuple((_vertex(a), _vertex(b)) for a, b in g["edges"])
        he = tuple((_vertex(a), _vertex(b)) for a, b in h["edges"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad graph family: {exc!r}") from exc
    try:
        return GraphFamily(gv, ge, hv, he, lab)
    except ValueError as exc:
        raise _reraise(exc) from exc


def parse_complex(text: str):
    """``{"simplices": [[...]], "subcomplex": [[...]], "values": {vertex: rational}}``.

    Returns ``(X, Y, values)``; both complexes are closed under faces.
    """
    obj = _load_json(text)
    try:
        x = SimplicialComplex([tuple(s) for s in obj["simplices"]])
        y = SimplicialComplex([tuple(s) for s in obj.get("subcomplex", [])]) if obj.get("subcomplex") else EMPTY
        raw = obj["values"]
        values = {v: parse_rational(raw[str(v)]) for v in x.vertices}
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad complex: {exc!r}") from exc
    if not y <= x:
        raise FormatError("subcomplex is not contained in the complex")
    return x, y, values


def _matrix(rows, nrows: int, ncols: int, field: FieldSpec) -> Matrix:
    if nrows == 0 or ncols == 0:
        return Matrix.zeros(nrows, ncols, field)
    if len(rows) != nrows or any(len(r) != ncols for r in rows):
        raise FormatError(f"matrix must be {nrows}x{ncols}")
    return Matrix([[field.element(parse_rational(c)) for c in r] for r in rows], field, ncols=ncols)


def parse_diagram(text: str, field: FieldSpec | None = None) -> tuple[Diagram, DiagramRep]:
    """Diagram with representation.

    ``{"field": "q", "vertices": [{"id", "dim"}], "edges": [{"id", "source",
    "target", "matrix": [[...]]}]}``; matrices are row-major, ``dim(target)``
    rows.  Identity loops are attached to every vertex.
    """
    obj = _load_json(text)
    try:
        fld = field or FieldSpec.parse(obj.get("field", "q"))
        verts = [_vertex(v["id"]) for v in obj["vertices"]]
        dims = {_vertex(v["id"]): int(v["dim"]) for v in obj["vertices"]}
        edges, maps = {}, {}
        for e in obj.get("edges", []):
            eid = _vertex(e["id"])
            if eid in edges:
                raise FormatError(f"duplicate edge id {eid!r}")
            s, t = _vertex(e["source"]), _vertex(e["target"])
            if s not in dims or t not in dims:
                raise FormatError(f"edge {eid!r} has an unknown endpoint")
            edges[eid] = (s, t)
            maps[eid] = _matrix(e.get("matrix", []), dims[t], dims[s], fld)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad diagram: {exc!r}") from exc
    if any(d < 0 for d in dims.values()):
        raise FormatError("negative dimension")
    try:
        d = Diagram.with_identities(verts, edges)
        return d, DiagramRep(d, dims, maps, fld)
    except ValueError as exc:
        raise _reraise(exc) from exc


def parse_page(text: str, field: FieldSpec | None = None) -> tuple[Diagram, DiagramRep]:
    """Spectral page with representation.

    ``{"r", "p": [...], "q": [...], "field", "spaces": [{"p", "q", "dim"}],
    "maps": [{"p", "q", "matrix"}]}``.  Missing spaces are zero; a missing
    map is the zero matrix.  ``maps`` entries name the differential leaving
    ``(p, q)``.
    """
    obj = _load_json(text)
    try:
        fld = field or FieldSpec.parse(obj.get("field", "q"))
        r = int(obj["r"])
        d = build_spectral_page(r, [int(p) for p in obj["p"]], [int(q) for q in obj["q"]])
        dims = {v: 0 for v in d.vertices}
        for s in obj.get("spaces", []):
            v = (int(s["p"]), int(s["q"]), r)
            if v not in dims:
                raise FormatError(f"space at {v[:2]} is outside the page")
            dims[v] = int(s["dim"])
        given = {(int(m["p"]), int(m["q"])): m.get("matrix", []) for m in obj.get("maps", [])}
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad page: {exc!r}") from exc
    maps = {}
    for e in d.non_identity_edges():
        s, t = d.edges[e]
        rows = given.pop((s[0], s[1]), None)
        maps[e] = Matrix.zeros(dims[t], dims[s], fld) if rows is None else _matrix(rows, dims[t], dims[s], fld)
    if given:
        raise FormatError(f"maps given where no differential exists: {sorted(given)}")
    return d, DiagramRep(d, dims, maps, fld)


# -- JSON outputs ---------------------------------------------------------------


def barcode_to_json(bc: Barcode, field: FieldSpec, squared: bool = True) -> dict:
    """Barcode JSON; ``birth_sqrt_approx`` is present when bars are in squared units."""
    bars = []
    for b, d in bc.bars:
        item = {"birth": fmt_rational(b), "death": fmt_rational(d)}
        if squared:
            item["birth_sqrt_approx"] = float(sqrt_approx(b)) if b >= 0 else None
        bars.append(item)
    return {"degree": bc.degree, "field": str(field), "bars": bars}


def _lowest_terms(s: str) -> bool:
    if s == "inf":
        return True
    try:
        x = Fraction(s)
    except ValueError:
        return False
    return s == fmt_rational(x)


def validate_barcode_json(obj) -> list[str]:
    """Problems with a barcode JSON object (empty list when valid)."""
    errs = []
    for k in ("degree", "field", "bars"):
        if k not in obj:
            errs.append(f"missing key {k!r}")
    if errs:
        return errs
    keys = []
    for i, bar in enumerate(obj["bars"]):
        b, d = bar.get("birth"), bar.get("death")
        if not isinstance(b, str) or not _lowest_terms(b) or b == "inf":
            errs.append(f"bar {i}: birth {b!r} is not a rational in lowest terms")
            continue
        if not isinstance(d, str) or not _lowest_terms(d):
            errs.append(f"bar {i}: death {d!r} is not a rational in lowest terms")
            continue
        keys.append((Fraction(b), INF if d == "inf" else Fraction(d)))
    if keys != sorted(keys):
        errs.append("bars are not sorted by (birth, death)")
    return errs


def poset_to_json(p, kind: str | None = None) -> dict:
    """Strict relations ``[a, b]`` meaning ``a < b``, plus the cover relation."""
    from .poset import covers

    order = {e: i for i, e in enumerate(p.elements)}
    rel = sorted(([a, b] for a, b in p.leq if a != b), key=lambda ab: (order[ab[0]], order[ab[1]]))
    cov = sorted(([a, b] for a, b in covers(p)), key=lambda ab: (order[ab[0]], order[ab[1]]))
    out = {"elements": list(p.elements), "less": rel, "covers": cov}
    if kind:
        out["kind"] = kind
    return out


def _vertex_key(v) -> str:
    return v if isinstance(v, str) else json.dumps(v)


def end_ring_to_json(ring: EndRing, closed: bool) -> dict:
    basis = []
    for b in ring.basis:
        basis.append({_vertex_key(v): [[ring.field.to_str(x) for x in row] for row in b[v].rows]
                      for v in ring.vertices})
    return {"field": str(ring.field), "dimension": ring.dimension, "closed": closed,
            "contains_identity": ring.contains(ring.identity()) if ring.vertices else True,
            "basis": basis}


# -- SVG ------------------------------------------------------------------------


def _axis_value(x, squared: bool) -> float:
    if squared:
        return float(sqrt_approx(Fraction(x))) if x >= 0 else -float(sqrt_approx(-Fraction(x)))
    return float(Fraction(x))


def barcode_svg(bc: Barcode, squared: bool = True, width: int = 600) -> str:
    """One horizontal line per bar; exact endpoints kept in data attributes."""
    pad, row, top = 40, 16, 30
    vals = [_axis_value(b, squared) for b, _ in bc.bars]
    vals += [_axis_value(d, squared) for _, d in bc.bars if d != INF]
    lo = min(vals, default=0.0)
    hi = max(vals, default=1.0)
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    right = width - pad
    # leave room for bars that never die
    scale = (right - pad - 30) / span

    def px(v: float) -> str:
        return f"{pad + (v - lo) * scale:.2f}"

    height = top + row * max(len(bc.bars), 1) + 40
    unit = "sqrt(t2)" if squared else "t"
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<title>H{bc.degree} barcode</title>',
        f'<g class="axis"><line x1="{pad}" y1="{height - 30}" x2="{right}" y2="{height - 30}" stroke="black"/>',
        f'<text x="{pad}" y="{height - 12}" font-size="10">{lo:.6f}</text>',
        f'<text x="{right}" y="{height - 12}" font-size="10" text-anchor="end">{unit}</text>',
        f'<text x="{px(hi)}" y="{height - 12}" font-size="10" text-anchor="middle">{hi:.6f}</text></g>',
    ]
    for i, (b, d) in enumerate(bc.bars):
        y = top + i * row
        x1 = px(_axis_value(b, squared))
        x2 = f"{right:.2f}" if d == INF else px(_axis_value(d, squared))
        cls = "bar essential" if d == INF else "bar"
        out.append(
            f'<line class="{cls}" x1="{x1}" y1="{y}" x2="{x2}" y2="{y}" stroke="steelblue" stroke-width="6" '
            f'data-birth="{fmt_rational(b)}" data-death="{fmt_rational(d)}">'
            f'<title>[{fmt_rational(b)}, {fmt_rational(d)})</title></line>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"

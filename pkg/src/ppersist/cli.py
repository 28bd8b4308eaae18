"""Command-line entry point ``ppersist``.

Exit codes: 0 success, 1 invalid input, 2 internal consistency failure
(including a cutoff containment failure under ``--paper-mode-mlambda``).
Errors are reported as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import io as fmt
from .diagrams import end_ring, validate_spectral_rep
from .filtration import (
    DatasetMorphism,
    VRContainmentError,
    graph_sublevel_family,
    induced_vr_map,
    sublevel_filtration,
    vr_bifiltration,
    vr_complex,
    vr_filtration,
)
from .linalg import FieldSpec
from .persistence import barcode_1d, module_from_filtration, range_module, rank_invariant
from .poset import chain_poset, linear_extension
from .semigroup import (
    NotAPartialOrder,
    SublevelConsistencyError,
    idempotents,
    mitsch_order,
    nambooripad_order,
    semigroup_sublevel,
)
from .simplicial import Pair, check_simplicial

COMMANDS = ("vr-barcode", "bifiltration-rank", "sublevel-barcode", "graph-persist",
            "semigroup-order", "end-ring", "spectral-check")


class ConsistencyError(RuntimeError):
    """A cross-check between two computations failed."""


def threads_from_env() -> int:
    raw = os.environ.get("PPERSIST_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"PPERSIST_THREADS must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise ValueError("PPERSIST_THREADS must be a positive integer")
    return n


def _rational(s: str) -> Fraction:
    return fmt.parse_rational(s)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ppersist", description="Exact persistent homology tools.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, homology=True):
        sp.add_argument("input", help="input file")
        sp.add_argument("--field", default="q", help="q, f2 or fp:<prime> (default q)")
        sp.add_argument("--out", help="write JSON here instead of stdout")
        if homology:
            sp.add_argument("--degree", type=int, default=0)
            sp.add_argument("--max-dim", type=int, default=None,
                            help="largest simplex dimension (default degree + 1)")

    sp = sub.add_parser("vr-barcode", help="barcode of the Rips filtration of a weighted cloud")
    common(sp)
    sp.add_argument("--shift", type=_rational, default=Fraction(0),
                    help="persistent range shift in squared-scale units")
    sp.add_argument("--lam", type=_rational, default=Fraction(0), help="probability cutoff")
    sp.add_argument("--emit-svg", help="write an SVG barcode plot")
    sp.add_argument("--morphism", help="JSON dataset morphism to check naturality against")
    sp.add_argument("--paper-mode-mlambda", action="store_true",
                    help="use m*lam as the target cutoff when checking --morphism")

    sp = sub.add_parser("bifiltration-rank", help="rank invariant of the scale/probability bifiltration")
    common(sp)

    sp = sub.add_parser("sublevel-barcode", help="barcode of a vertex-function sublevel filtration")
    common(sp)
    sp.add_argument("--shift", type=_rational, default=Fraction(0))
    sp.add_argument("--emit-svg")

    sp = sub.add_parser("graph-persist", help="persistent H0/H1 ranks of a graph family")
    common(sp, homology=False)

    sp = sub.add_parser("semigroup-order", help="natural partial orders of a finite semigroup")
    common(sp, homology=False)

    sp = sub.add_parser("end-ring", help="commutant of a diagram representation")
    common(sp, homology=False)

    sp = sub.add_parser("spectral-check", help="check that a page's differentials square to zero")
    common(sp, homology=False)
    return p


def _check_dims(args):
    if args.degree < 0:
        raise ValueError("--degree must be non-negative")
    if args.max_dim is None:
        args.max_dim = args.degree + 1
    if args.max_dim < args.degree + 1:
        raise ValueError(f"--max-dim must be at least degree + 1 = {args.degree + 1}")


def _write(path, text: str):
    Path(path).write_text(text)


def _barcode_of(fp, k, shift, field, threads):
    if shift:
        m = range_module(fp, k, shift, field)
    else:
        m = module_from_filtration(fp, k, field, threads=threads)
    return barcode_1d(m, degree=k)


def _check_vr_morphism(args, cloud, field):
    spec = json.loads(Path(args.morphism).read_text())
    target_path = Path(args.morphism).parent / spec["target"]
    target = fmt.read_point_cloud(target_path)
    m = DatasetMorphism(tuple(spec["vertex_map"]), fmt.parse_rational(spec.get("lipschitz", 1)))
    grid = sorted({Fraction(0)} | {cloud.sqdist(i, j) for i in range(len(cloud)) for j in range(i)})
    checked = 0
    for t2 in grid:
        vm = induced_vr_map(m, cloud, target, t2, args.lam, paper_mode=args.paper_mode_mlambda)
        src = vr_complex(cloud, t2, args.lam, args.max_dim)
        tgt = vr_complex(target, vm.t2, vm.lam, args.max_dim)
        check_simplicial(vm.vertex_map, Pair(src), Pair(tgt))
        checked += 1
    return {"checked_levels": checked, "target_cutoff": fmt.fmt_rational(vm.lam)}


def cmd_vr_barcode(args, field, threads):
    _check_dims(args)
    cloud = fmt.read_point_cloud(args.input)
    fp = vr_filtration(cloud, args.max_dim, args.lam)
    bc = _barcode_of(fp, args.degree, args.shift, field, threads)
    out = fmt.barcode_to_json(bc, field, squared=True)
    if args.morphism:
        out["morphism"] = _check_vr_morphism(args, cloud, field)
    if args.emit_svg:
        _write(args.emit_svg, fmt.barcode_svg(bc, squared=True))
    return out


def cmd_sublevel_barcode(args, field, threads):
    _check_dims(args)
    x, y, values = fmt.parse_complex(Path(args.input).read_text())
    x = x.skeleton(args.max_dim)
    y = y.skeleton(args.max_dim)
    index = chain_poset(sorted(set(values.values())))
    fp = sublevel_filtration(x, values, index, y)
    bc = _barcode_of(fp, args.degree, args.shift, field, threads)
    if args.emit_svg:
        _write(args.emit_svg, fmt.barcode_svg(bc, squared=False))
    return fmt.barcode_to_json(bc, field, squared=False)


def _label_json(label):
    if isinstance(label, tuple):
        return [_label_json(x) for x in label]
    if isinstance(label, Fraction):
        return fmt.fmt_rational(label)
    return label


def _ranks_json(m):
    ri = rank_invariant(m)
    labels = m.index.labels
    out = []
    for s in m.order:
        for t in m.order:
            if (s, t) in ri.ranks:
                out.append({"s": _label_json(labels[s]), "t": _label_json(labels[t]), "rank": ri.ranks[(s, t)]})
    return out


def cmd_bifiltration_rank(args, field, threads):
    _check_dims(args)
    cloud = fmt.read_point_cloud(args.input)
    fp = vr_bifiltration(cloud, args.max_dim)
    m = module_from_filtration(fp, args.degree, field, threads=threads)
    order = linear_extension(fp.index)
    return {"degree": args.degree, "field": str(field),
            "index": [_label_json(fp.index.labels[e]) for e in order],
            "ranks": _ranks_json(m)}


def cmd_graph_persist(args, field, threads):
    fam = fmt.parse_graph_family(Path(args.input).read_text())
    fp = graph_sublevel_family(fam)
    order = linear_extension(fp.index)
    ranks = {}
    for k in (0, 1):
        ranks[str(k)] = _ranks_json(module_from_filtration(fp, k, field, threads=threads))
    return {"field": str(field), "index": [_label_json(fp.index.labels[e]) for e in order], "ranks": ranks}


def cmd_semigroup_order(args, field, threads):
    s = fmt.read_semigroup(args.input)
    mo = mitsch_order(s)
    out = {
        "n": s.n,
        "unit": s.unit,
        "idempotents": sorted(idempotents(s)),
        "mitsch": fmt.poset_to_json(mo, "mitsch"),
    }
    try:
        no = nambooripad_order(s)
    except NotAPartialOrder as exc:
        out["nambooripad"] = {"error": "NotAPartialOrder", "message": str(exc), "witness": list(exc.witness)}
    else:
        nj = fmt.poset_to_json(no, "nambooripad")
        nj["sublevels"] = {str(e): sorted(semigroup_sublevel(s, e, no)) for e in range(s.n)}
        out["nambooripad"] = nj
    return out


def cmd_end_ring(args, field, threads):
    fld = FieldSpec.parse(args.field) if args.field_given else None
    d, rep = fmt.parse_diagram(Path(args.input).read_text(), fld)
    ring = end_ring(d, rep)
    closed = ring.is_closed()
    if not closed or (ring.vertices and not ring.contains(ring.identity())):
        raise ConsistencyError("computed commutant is not a unital subring")
    return fmt.end_ring_to_json(ring, closed)


def cmd_spectral_check(args, field, threads):
    fld = FieldSpec.parse(args.field) if args.field_given else None
    d, rep = fmt.parse_page(Path(args.input).read_text(), fld)
    res = validate_spectral_rep(d, rep)
    return {"valid": res.valid, "witnesses": [list(w) for w in res.witnesses]}


HANDLERS = {
    "vr-barcode": cmd_vr_barcode,
    "bifiltration-rank": cmd_bifiltration_rank,
    "sublevel-barcode": cmd_sublevel_barcode,
    "graph-persist": cmd_graph_persist,
    "semigroup-order": cmd_semigroup_order,
    "end-ring": cmd_end_ring,
    "spectral-check": cmd_spectral_check,
}


def _error(kind: str, exc: BaseException, code: int) -> int:
    payload = {"error": kind, "message": str(exc)}
    w = getattr(exc, "witness", None)
    if w is not None:
        payload["witness"] = _label_json(w) if not isinstance(w, (list, tuple)) else [_label_json(x) for x in w]
    sys.stderr.write(json.dumps(payload, sort_keys=True, default=str) + "\n")
    return code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    args.field_given = any(a == "--field" or a.startswith("--field=") for a in argv)
    try:
        field = FieldSpec.parse(args.field)
        threads = threads_from_env()
        out = HANDLERS[args.command](args, field, threads)
    except (ConsistencyError, SublevelConsistencyError, VRContainmentError) as exc:
        return _error(type(exc).__name__, exc, 2)
    except (ValueError, KeyError, TypeError, OSError, ZeroDivisionError) as exc:
        return _error(type(exc).__name__, exc, 1)
    except RuntimeError as exc:
        return _error(type(exc).__name__, exc, 2)
    text = fmt.dumps(out)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command-line entry points for every library capability.

Exit codes: 0 success, 1 usage error, 2 data error. Output is
byte-deterministic for identical inputs; ``--json`` switches reports to
JSON. Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import drawing, ingest, metastore, picking, reports, sectioning, spatial, study
from .core import Ray, SectionBox, aabb, parse_plane_token
from .errors import SectionLabError
from .hatch import generate_poche

PLANE_FLAGS = ["x-pos", "x-neg", "y-pos", "y-neg", "z-pos", "z-neg"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="sectionlab",
                     description="Section-view engine and study analytics")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("ingest", help="validate inputs and emit metadata JSON")
    p.add_argument("--model", required=True, help="geometry file (OBJ subset)")
    p.add_argument("--meta", required=True, help="metadata CSV")
    p.add_argument("--layers", help="layer sidecar JSON")
    p.add_argument("--out", help="write metadata JSON here")
    p.add_argument("--json", action="store_true", help="JSON validation report")

    p = sub.add_parser("slice", help="section the model and export drawings/meshes")
    p.add_argument("--model", required=True)
    p.add_argument("--layers")
    for flag in PLANE_FLAGS:
        p.add_argument(f"--{flag}", type=float, default=None, metavar="M",
                       help=f"activate the {flag} plane at this offset")
    p.add_argument("--svg", help="write a section drawing here")
    p.add_argument("--view", help="plane for the SVG (default: first active)")
    p.add_argument("--obj", help="write clipped geometry here")
    p.add_argument("--side", default="kept", choices=["kept", "discarded", "caps"])
    p.add_argument("--json", action="store_true", help="print volumes as JSON")

    p = sub.add_parser("pick", help="cast a ray and resolve the pick")
    p.add_argument("--model", required=True)
    p.add_argument("--layers")
    p.add_argument("--meta", help="metadata JSON for the joined record")
    for flag in PLANE_FLAGS:
        p.add_argument(f"--{flag}", type=float, default=None, metavar="M")
    p.add_argument("--origin", required=True, help="x,y,z")
    p.add_argument("--dir", required=True, dest="direction", help="x,y,z")
    p.add_argument("--poche-plane", help="active poche toggle, e.g. x-pos")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("align", help="alignment-error report from an annotation")
    p.add_argument("annotation", help="annotation JSON file")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("analyze", help="study report from the study CSV")
    p.add_argument("csv", help="study CSV file")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("tlx", help="workload report from the TLX CSV")
    p.add_argument("csv", help="TLX CSV file")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=7077)
    p.add_argument("--model", required=True)
    p.add_argument("--meta", help="metadata JSON")
    p.add_argument("--layers", help="layer sidecar JSON")
    p.add_argument("--serve-ui", help="static viewer directory")

    return parser


def _vector(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise _UsageError(f"expected x,y,z, got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise _UsageError(f"non-numeric vector {text!r}") from None


def _load_model(args):
    specs = ingest.load_layer_sidecar(args.layers) if args.layers else None
    return ingest.load_geometry(args.model, layer_specs=specs)


def _box_from_flags(args, model) -> SectionBox:
    box = SectionBox.for_model(model)
    for flag in PLANE_FLAGS:
        value = getattr(args, flag.replace("-", "_"))
        if value is not None:
            axis, sign = parse_plane_token(flag)
            box = sectioning.set_plane(box, axis, sign, value, active=True)
    return box


def _cmd_ingest(args) -> int:
    model = _load_model(args)
    rows = ingest.parse_metadata_csv(args.meta)
    report = ingest.validate_model(model, rows)
    doc = ingest.csv_to_json(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(doc)
    if args.json:
        payload = {
            "clean": report.clean,
            "elements": report.element_count,
            "rows": report.row_count,
            "orphan_geometry_ids": report.orphan_geometry_ids,
            "orphan_metadata_ids": report.orphan_metadata_ids,
            "duplicate_rows": [list(d) for d in report.duplicate_rows],
        }
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(
            f"elements: {report.element_count}\nrows: {report.row_count}\n"
            f"orphan geometry ids: {', '.join(report.orphan_geometry_ids) or '-'}\n"
            f"orphan metadata ids: {', '.join(report.orphan_metadata_ids) or '-'}\n"
            f"duplicate rows: {len(report.duplicate_rows)}\n"
            f"clean: {'yes' if report.clean else 'no'}\n")
    return 0


def _cmd_slice(args) -> int:
    model = _load_model(args)
    box = _box_from_flags(args, model)
    result = sectioning.clip_model(model, box)
    result = generate_poche(result)
    if args.svg:
        if args.view:
            view = parse_plane_token(args.view)
        else:
            active = [p for p in box.planes if p.active]
            if not active:
                raise SectionLabError("no active plane; nothing to draw")
            view = (active[0].axis, active[0].sign)
        data = drawing.export_svg(result, view)
        with open(args.svg, "wb") as fh:
            fh.write(data)
    if args.obj:
        data = drawing.export_mesh(result, side=args.side)
        with open(args.obj, "wb") as fh:
            fh.write(data)
    payload = {
        "input_volume": sum(m.volume() for e in model.elements for _, m in e.meshes),
        "kept_volume": result.kept_volume(),
        "discarded_volume": result.discarded_volume(),
        "caps": len(result.caps),
    }
    if args.json:
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(
            f"kept volume: {payload['kept_volume']:.6f} m^3\n"
            f"discarded volume: {payload['discarded_volume']:.6f} m^3\n"
            f"caps: {payload['caps']}\n")
    return 0


def _cmd_pick(args) -> int:
    from .service import serialize_pick

    model = _load_model(args)
    box = _box_from_flags(args, model)
    result = sectioning.clip_model(model, box)
    origin = _vector(args.origin)
    direction = np.asarray(_vector(args.direction), dtype=float)
    norm = np.linalg.norm(direction)
    if norm == 0:
        raise _UsageError("--dir must be nonzero")
    ray = Ray(origin, direction / norm)
    active_plane = None
    if args.poche_plane:
        try:
            axis, sign = parse_plane_token(args.poche_plane)
        except ValueError as exc:
            raise _UsageError(str(exc)) from None
        active_plane = box.plane(axis, sign)
    mode = sectioning.SectionMode.SECTION if box.active_planes \
        else sectioning.SectionMode.INSPECT
    pick = picking.pick(result, ray, active_plane=active_plane, mode=mode)
    store = metastore.load_store(args.meta) if args.meta else metastore.MetaStore.empty()
    payload = serialize_pick(pick, store)
    if args.json:
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        if payload["hit"] is None:
            sys.stdout.write("miss\n")
        else:
            hit = payload["hit"]
            sys.stdout.write(
                f"hit: {hit['element']}#{hit['layer']} at {hit['distance']:.6f} m "
                f"({hit['source']}{', poche' if payload['is_poche'] else ''})\n")
            if payload["metadata"]:
                meta = payload["metadata"]
                sys.stdout.write(f"category: {meta['category']}\n"
                                 f"family: {meta['family']}\n")
                for k in sorted(meta["parameters"]):
                    sys.stdout.write(f"  {k}: {meta['parameters'][k]}\n")
    return 0


def _cmd_align(args) -> int:
    annotation = spatial.load_annotation(args.annotation)
    report = spatial.measure_alignment(annotation)
    if args.json:
        payload = {
            "errors_mm": list(report.errors_mm),
            "mean_mm": report.mean_mm,
            "max_mm": report.max_mm,
            "scale_mm_per_px": report.scale_mm_per_px,
        }
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(
            f"scale: {reports.fmt(report.scale_mm_per_px, 4)} mm/px\n"
            f"samples: {len(report.errors_mm)}\n"
            f"mean error: {reports.fmt(report.mean_mm)} mm\n"
            f"max error: {reports.fmt(report.max_mm)} mm\n")
    return 0


def _cmd_analyze(args) -> int:
    records = study.parse_study_csv(args.csv)
    report = study.cohort_summary(records)
    if args.json:
        sys.stdout.write(reports.study_report_json(report))
    else:
        sys.stdout.write(reports.render_study_report(report))
    return 0


def _cmd_tlx(args) -> int:
    responses = study.parse_tlx_csv(args.csv)
    cohort = reports.tlx_cohort(responses)
    if args.json:
        sys.stdout.write(reports.tlx_report_json(cohort))
    else:
        sys.stdout.write(reports.render_tlx_report(cohort))
    return 0


def _cmd_serve(args) -> int:
    from .service import run_server

    specs = ingest.load_layer_sidecar(args.layers) if args.layers else None
    model = ingest.load_geometry(args.model, layer_specs=specs)
    store = metastore.load_store(args.meta) if args.meta else metastore.MetaStore.empty()
    run_server(model, store, port=args.port, ui_dir=args.serve_ui)
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "slice": _cmd_slice,
    "pick": _cmd_pick,
    "align": _cmd_align,
    "analyze": _cmd_analyze,
    "tlx": _cmd_tlx,
    "serve": _cmd_serve,
}


def run(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _UsageError("a subcommand is required")
        command = _COMMANDS[args.command]
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        parser.print_usage(sys.stderr)
        return 1
    try:
        return command(args)
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    except (SectionLabError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

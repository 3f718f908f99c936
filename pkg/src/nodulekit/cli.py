"""Command-line interface: assess, penalty, metrics, mixture, ingest.

Reports are deterministic: identical inputs and flags produce byte-identical
output. Rows follow input order, warnings go to stderr only, and exit status
is 0 when at least one item succeeded, 2 on total failure or bad invocation.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .errors import NoduleKitError
from .ingest import CANONICAL_SIDE, parse_annotation_xml, rasterize_polygon, resize_to_canonical
from .knowledge_loss import ar_penalties
from .mask import BinaryMask, load_mask, write_mask
from .metrics import classification_metrics, confusion, iou_dice
from .mixture import EmbeddingSet, FeatureGrid, MixParams, exponential_mixture
from .reporting import dumps, rows_to_csv
from .shape_margin import DEFAULT_RADIAL_COUNT, assess


def _warn(args, message: str) -> None:
    if not args.quiet:
        print(f"warning: {message}", file=sys.stderr)


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _make_report(command: str, parameters: dict, rows: list, summary: dict) -> dict:
    return {
        "tool_version": __version__,
        "command": command,
        "parameters": parameters,
        "rows": rows,
        "summary": summary,
    }


def _emit(args, report: dict, csv_columns: list[str]) -> None:
    if getattr(args, "csv", False):
        text = rows_to_csv(report["rows"], csv_columns)
    else:
        text = dumps(report)
    if args.out:
        Path(args.out).write_text(text, encoding="ascii")
    else:
        sys.stdout.write(text)


def _load_pgm(path: str, scale_x: float = 1.0, scale_y: float = 1.0) -> BinaryMask:
    return load_mask(Path(path).read_bytes(), scale_x, scale_y)


# ---------------------------------------------------------------- assess

_ASSESS_COLUMNS = ["input", "ar", "bcsi", "ir", "n", "h", "w", "error"]


def _assess_inputs(args) -> list[tuple[str, float, float]]:
    """Expand mask paths and dataset indexes into (path, scale_x, scale_y)."""
    items: list[tuple[str, float, float]] = []
    for raw in args.inputs:
        if raw.endswith(".json"):
            entries = json.loads(Path(raw).read_text(encoding="utf-8"))
            base = os.path.dirname(raw)
            for entry in entries:
                sx = float(entry.get("scale_x", 1.0))
                sy = float(entry.get("scale_y", 1.0))
                for rel in entry["mask_paths"]:
                    items.append((os.path.join(base, rel), sx, sy))
        else:
            items.append((raw, 1.0, 1.0))
    return items


def cmd_assess(args) -> int:
    try:
        items = _assess_inputs(args)
    except (OSError, ValueError, KeyError) as exc:
        return _fail(f"cannot read inputs: {exc}")
    rows = []
    succeeded = 0
    for path, sx, sy in items:
        row = {"input": path, "ar": None, "bcsi": None, "ir": None, "n": None, "h": None, "w": None, "error": None}
        try:
            report = assess(_load_pgm(path, sx, sy), args.n)
            row.update(ar=report.ar, bcsi=report.bcsi, ir=report.ir, n=report.n, h=report.h, w=report.w)
            succeeded += 1
        except (NoduleKitError, OSError) as exc:
            row["error"] = type(exc).__name__ if isinstance(exc, NoduleKitError) else "UnreadableFile"
            _warn(args, f"{path}: {exc}")
        rows.append(row)
    summary = {"inputs": len(items), "succeeded": succeeded, "failed": len(items) - succeeded}
    _emit(args, _make_report("assess", {"n": args.n}, rows, summary), _ASSESS_COLUMNS)
    return 0 if succeeded > 0 else 2


# ---------------------------------------------------------------- penalty

_PENALTY_COLUMNS = ["line", "p", "ar", "ir", "p_ar", "n_ar", "term"]


def cmd_penalty(args) -> int:
    try:
        lines = Path(args.predictions).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        return _fail(f"cannot read predictions: {exc}")
    rows = []
    total = 0.0
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            p = float(record["p"])
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"p={p} outside [0, 1]")
            if "ar" in record and "ir" in record:
                ar, ir = float(record["ar"]), float(record["ir"])
            elif "mask_path" in record:
                mask = _load_pgm(
                    record["mask_path"],
                    float(record.get("scale_x", 1.0)),
                    float(record.get("scale_y", 1.0)),
                )
                report = assess(mask, args.n)
                ar, ir = report.ar, report.ir
            else:
                raise ValueError("need either 'ar' and 'ir' or 'mask_path'")
            p_ar, n_ar = ar_penalties(ar)
            if not 0.0 <= ir <= 1.0:
                raise ValueError(f"ir={ir} outside [0, 1]")
        except (KeyError, ValueError, OSError, NoduleKitError, json.JSONDecodeError) as exc:
            detail = f"missing field {exc}" if isinstance(exc, KeyError) else str(exc)
            return _fail(f"predictions line {number}: {detail}")
        term = p * (p_ar + 1.0 - ir) + (1.0 - p) * (n_ar + ir)
        rows.append({"line": number, "p": p, "ar": ar, "ir": ir, "p_ar": p_ar, "n_ar": n_ar, "term": term})
        total += term
    if not rows:
        return _fail("predictions file contains no samples")
    summary = {"count": len(rows), "phi_cons": total / len(rows)}
    _emit(args, _make_report("penalty", {"n": args.n}, rows, summary), _PENALTY_COLUMNS)
    return 0


# ---------------------------------------------------------------- metrics

_METRICS_COLUMNS = ["kind", "line", "y", "p", "predicted", "pred_mask", "gt_mask", "iou", "dice"]


def cmd_metrics(args) -> int:
    cls_samples: list[tuple[int, float]] = []
    mask_pairs: list[tuple[str, str]] = []
    rows: list[dict] = []

    if args.pairs:
        try:
            lines = Path(args.pairs).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            return _fail(f"cannot read pairs file: {exc}")
        for number, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                if "y" in record and "p" in record:
                    y, p = int(record["y"]), float(record["p"])
                    if y not in (0, 1) or not 0.0 <= p <= 1.0:
                        raise ValueError(f"bad label/probability y={y} p={p}")
                    cls_samples.append((y, p))
                    rows.append({
                        "kind": "classification", "line": number, "y": y, "p": p,
                        "predicted": int(p >= args.threshold),
                        "pred_mask": None, "gt_mask": None, "iou": None, "dice": None,
                    })
                if "pred_mask" in record and "gt_mask" in record:
                    mask_pairs.append((record["pred_mask"], record["gt_mask"]))
                if not ({"y", "p"} <= record.keys() or {"pred_mask", "gt_mask"} <= record.keys()):
                    raise ValueError("need 'y' and 'p', or 'pred_mask' and 'gt_mask'")
            except (ValueError, json.JSONDecodeError) as exc:
                return _fail(f"pairs line {number}: {exc}")
    for pred, gt in args.mask_pair or []:
        mask_pairs.append((pred, gt))

    if not cls_samples and not mask_pairs:
        return _fail("no classification samples and no mask pairs given")

    ious, dices = [], []
    for pred_path, gt_path in mask_pairs:
        try:
            scores = iou_dice(_load_pgm(pred_path), _load_pgm(gt_path))
        except (NoduleKitError, OSError) as exc:
            return _fail(f"mask pair ({pred_path}, {gt_path}): {exc}")
        ious.append(scores.iou)
        dices.append(scores.dice)
        rows.append({
            "kind": "overlap", "line": None, "y": None, "p": None, "predicted": None,
            "pred_mask": pred_path, "gt_mask": gt_path, "iou": scores.iou, "dice": scores.dice,
        })

    summary: dict = {"samples": len(cls_samples), "mask_pairs": len(mask_pairs)}
    if cls_samples:
        counts = confusion(cls_samples, args.threshold)
        quality = classification_metrics(counts)
        summary.update(tp=counts.tp, fp=counts.fp, tn=counts.tn, fn=counts.fn,
                       accuracy=quality.accuracy, specificity=quality.specificity,
                       sensitivity=quality.sensitivity, f1=quality.f1)
    else:
        summary.update(tp=None, fp=None, tn=None, fn=None, accuracy=None,
                       specificity=None, sensitivity=None, f1=None)
    summary["mean_iou"] = sum(ious) / len(ious) if ious else None
    summary["mean_dice"] = sum(dices) / len(dices) if dices else None
    _emit(args, _make_report("metrics", {"threshold": args.threshold}, rows, summary), _METRICS_COLUMNS)
    return 0


# ---------------------------------------------------------------- mixture

_MIXTURE_COLUMNS = ["row", "col", "channel", "value"]


def _grid_from_json(spec: dict) -> FeatureGrid:
    height, width, channels = int(spec["height"]), int(spec["width"]), int(spec["channels"])
    values = np.array(spec["values"], dtype=float)
    if values.size != height * width * channels:
        raise ValueError(f"expected {height * width * channels} values, got {values.size}")
    return FeatureGrid(values.reshape(height, width, channels))


def cmd_mixture(args) -> int:
    try:
        payload = json.loads(Path(args.grids).read_text(encoding="utf-8"))
        x_conv = _grid_from_json(payload["x_conv"])
        emb_spec = payload["embeddings"]
        emb = EmbeddingSet(
            patch_embeddings=np.array(emb_spec["patch_embeddings"], dtype=float),
            class_embeddings=np.array(emb_spec["class_embeddings"], dtype=float),
            grid_rows=int(emb_spec["grid_rows"]),
            grid_cols=int(emb_spec["grid_cols"]),
        )
        params_spec = payload["params"]
        params = MixParams(
            w1=np.array(params_spec["w1"], dtype=float),
            b1=float(params_spec["b1"]),
            w2=np.array(params_spec["w2"], dtype=float),
            b2=np.array(params_spec["b2"], dtype=float),
        )
        mixed = exponential_mixture(x_conv, emb, params)
    except (OSError, KeyError, ValueError, NoduleKitError, json.JSONDecodeError) as exc:
        return _fail(f"mixture input: {exc}")

    values = mixed.values
    rows = [
        {"row": r, "col": c, "channel": k, "value": float(values[r, c, k])}
        for r in range(mixed.height) for c in range(mixed.width) for k in range(mixed.channels)
    ]
    summary = {
        "height": mixed.height,
        "width": mixed.width,
        "channels": mixed.channels,
        "values": [float(v) for v in values.ravel()],
        "outputs_in_unit_interval": bool(np.all((values > 0.0) & (values < 1.0))),
    }
    _emit(args, _make_report("mixture", {}, rows, summary), _MIXTURE_COLUMNS)
    return 0


# ---------------------------------------------------------------- ingest

_INGEST_COLUMNS = ["image_id", "label", "scale_x", "scale_y", "rois", "error"]

_SAFE_ID = re.compile(r"[^A-Za-z0-9._-]")


def _parse_dims(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"(\d+)x(\d+)", text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def cmd_ingest(args) -> int:
    xml_dir = Path(args.xml_dir)
    if not xml_dir.is_dir():
        return _fail(f"{args.xml_dir} is not a directory")
    xml_files = sorted(xml_dir.glob("*.xml"))
    if not xml_files:
        return _fail(f"no .xml files in {args.xml_dir}")
    dims_index: dict = {}
    if args.dims_index:
        try:
            dims_index = json.loads(Path(args.dims_index).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            return _fail(f"cannot read dims index: {exc}")

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    index_entries = []
    parsed = failed = masks_written = 0
    for xml_path in xml_files:
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                records = parse_annotation_xml(xml_path.read_text(encoding="utf-8"))
            for item in caught:
                _warn(args, str(item.message))
        except (NoduleKitError, OSError) as exc:
            _warn(args, f"{xml_path}: {exc}")
            failed += 1
            continue
        for record in records:
            dims = dims_index.get(record.image_id, args.dims)
            row = {"image_id": record.image_id, "label": record.label,
                   "scale_x": None, "scale_y": None, "rois": len(record.rois), "error": None}
            if dims is None:
                row["error"] = "MissingDimensions"
                _warn(args, f"case {record.image_id!r}: no image dimensions known, skipped")
                rows.append(row)
                failed += 1
                continue
            width, height = int(dims[0]), int(dims[1])
            safe_id = _SAFE_ID.sub("_", record.image_id)
            mask_paths = []
            try:
                for k, roi in enumerate(record.rois):
                    canonical = resize_to_canonical(rasterize_polygon(roi, width, height), args.side)
                    name = f"{safe_id}_{k}.pgm"
                    (out_dir / name).write_bytes(write_mask(canonical))
                    mask_paths.append(name)
            except NoduleKitError as exc:
                row["error"] = type(exc).__name__
                _warn(args, f"case {record.image_id!r}: {exc}")
                rows.append(row)
                failed += 1
                continue
            scale_x = width / args.side
            scale_y = height / args.side
            row.update(scale_x=scale_x, scale_y=scale_y)
            rows.append(row)
            index_entries.append({
                "image_id": record.image_id,
                "label": record.label,
                "scale_x": scale_x,
                "scale_y": scale_y,
                "mask_paths": mask_paths,
            })
            parsed += 1
            masks_written += len(mask_paths)

    (out_dir / "index.json").write_text(dumps(index_entries), encoding="ascii")
    summary = {
        "xml_files": len(xml_files),
        "cases_parsed": parsed,
        "cases_failed": failed,
        "masks_written": masks_written,
        "index": str(out_dir / "index.json"),
    }
    parameters = {
        "dims": f"{args.dims[0]}x{args.dims[1]}" if args.dims else None,
        "side": args.side,
    }
    _emit(args, _make_report("ingest", parameters, rows, summary), _INGEST_COLUMNS)
    return 0 if parsed > 0 else 2


# ---------------------------------------------------------------- parser

def _add_output_flags(sub) -> None:
    fmt = sub.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="emit a JSON report (default)")
    fmt.add_argument("--csv", action="store_true", help="emit rows as CSV instead of JSON")
    sub.add_argument("--out", metavar="PATH", help="write the report to PATH instead of stdout")
    sub.add_argument("--quiet", action="store_true", help="suppress warnings on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nodulekit",
        description="Shape-margin assessment, penalty/loss evaluation, metrics and dataset ingestion for nodule masks.",
    )
    parser.add_argument("--version", action="version", version=f"nodulekit {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    p = subparsers.add_parser("assess", help="shape-margin reports for PGM masks or a dataset index")
    p.add_argument("inputs", nargs="+", metavar="MASK_OR_INDEX")
    p.add_argument("--n", type=int, default=DEFAULT_RADIAL_COUNT, help="radial count (default %(default)s)")
    _add_output_flags(p)
    p.set_defaults(func=cmd_assess)

    p = subparsers.add_parser("penalty", help="constraint penalty over a JSON-lines predictions file")
    p.add_argument("predictions", metavar="PREDICTIONS_JSONL")
    p.add_argument("--n", type=int, default=DEFAULT_RADIAL_COUNT, help="radial count for mask rows (default %(default)s)")
    _add_output_flags(p)
    p.set_defaults(func=cmd_penalty)

    p = subparsers.add_parser("metrics", help="diagnosis metrics and mask overlap scores")
    p.add_argument("--pairs", metavar="PAIRS_JSONL", help="JSON lines with {y, p} and/or {pred_mask, gt_mask}")
    p.add_argument("--mask-pair", nargs=2, action="append", metavar=("PRED", "GT"), help="PGM mask pair (repeatable)")
    p.add_argument("--threshold", type=float, default=0.5, help="malignancy threshold (default %(default)s)")
    _add_output_flags(p)
    p.set_defaults(func=cmd_metrics)

    p = subparsers.add_parser("mixture", help="run the exponential feature mixture on a JSON fixture")
    p.add_argument("grids", metavar="GRIDS_JSON")
    _add_output_flags(p)
    p.set_defaults(func=cmd_mixture)

    p = subparsers.add_parser("ingest", help="parse annotation XML into canonical PGM masks plus an index")
    p.add_argument("xml_dir", metavar="XML_DIR")
    p.add_argument("--dims", type=_parse_dims, metavar="WxH", help="fallback original image dimensions")
    p.add_argument("--dims-index", metavar="JSON", help="JSON map of image_id to [width, height]")
    p.add_argument("--out", dest="out_dir", required=True, metavar="DIR", help="output dataset directory")
    p.add_argument("--side", type=int, default=CANONICAL_SIDE, help="canonical square side (default %(default)s)")
    p.add_argument("--quiet", action="store_true", help="suppress warnings on stderr")
    p.add_argument("--csv", action="store_true", help="emit rows as CSV instead of JSON")
    p.set_defaults(func=cmd_ingest, out=None, json=False)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Deterministic experiment artifacts: CSV series, run manifests, minimal SVG plots.

CSV files open with a ``#``-prefixed metadata block (schema tag, code
version, seed, config hash) so that a single file carries everything needed
to regenerate or plot it.  All numeric formatting uses shortest round-trip
``repr``, which makes byte-identical reruns possible.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

CSV_SCHEMAS = {
    "fidelity_curve": ("step", "theta", "fidelity", "l2_distance"),
    "contractivity": ("step", "d_k"),
    "stability": ("step", "pairwise_distance"),
    "qrc_metrics": ("split", "nmse", "lambda", "n_reservoir"),
    "circuit_verify": ("n", "realized_theta", "phase", "max_error", "equivalent"),
}

_SVG_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (int,)):
        return str(value)
    if hasattr(value, "item"):  # numpy scalars
        return format_cell(value.item())
    return str(value)


def config_hash(experiment: str, parameters: dict) -> str:
    payload = json.dumps({"experiment": experiment, "parameters": parameters},
                         sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


def write_csv(path, schema: str, rows, *, meta: dict) -> Path:
    """Write one result series with its metadata block; returns the path."""
    header = CSV_SCHEMAS[schema]
    lines = [f"# schema={schema}.v1"]
    lines += [f"# {key}={format_cell(value)}" for key, value in meta.items()]
    lines.append(",".join(header))
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row width {len(row)} does not match schema {schema}")
        lines.append(",".join(format_cell(cell) for cell in row))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def write_table_csv(path, header, rows, *, meta: dict) -> Path:
    """Like ``write_csv`` but with a free-form header (feature matrices etc.)."""
    lines = [f"# schema=table.v1"]
    lines += [f"# {key}={format_cell(value)}" for key, value in meta.items()]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(format_cell(cell) for cell in row))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path):
    """Read back a metadata-block CSV as (meta dict, header, list of string rows)."""
    meta, header, rows = {}, None, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            meta[key] = value
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append(line.split(","))
    return meta, header, rows


def write_manifest(path, *, experiment: str, parameters: dict, files,
                   code_version: str) -> Path:
    doc = {
        "schema": "qhrc-manifest.v1",
        "experiment": experiment,
        "code_version": code_version,
        "config_sha256": config_hash(experiment, parameters),
        "parameters": parameters,
        "files": sorted(str(f) for f in files),
    }
    path = Path(path)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def read_manifest(path) -> dict:
    doc = json.loads(Path(path).read_text())
    if doc.get("schema") != "qhrc-manifest.v1":
        raise ValueError(f"unrecognized manifest schema {doc.get('schema')!r}")
    return doc


def write_svg(path, title: str, x, series: dict) -> Path:
    """Minimal line plot: polylines plus axes and corner tick labels.

    ``series`` maps a label to a y-array aligned with ``x``.  No plotting
    dependency; output is deterministic for identical inputs.
    """
    width, height, margin = 640, 400, 55
    xs = [float(v) for v in x]
    all_y = [float(v) for ys in series.values() for v in ys]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(all_y), max(all_y)
    if x_hi == x_lo:
        x_hi = x_lo + 1
    if y_hi == y_lo:
        y_hi = y_lo + 1

    def px(v):
        return margin + (v - x_lo) / (x_hi - x_lo) * (width - 2 * margin)

    def py(v):
        return height - margin - (v - y_lo) / (y_hi - y_lo) * (height - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{margin}" y="{height - margin + 18}" font-size="11">{x_lo:.6g}</text>',
        f'<text x="{width - margin}" y="{height - margin + 18}" text-anchor="end" '
        f'font-size="11">{x_hi:.6g}</text>',
        f'<text x="{margin - 6}" y="{height - margin}" text-anchor="end" font-size="11">{y_lo:.6g}</text>',
        f'<text x="{margin - 6}" y="{margin + 4}" text-anchor="end" font-size="11">{y_hi:.6g}</text>',
    ]
    for i, (label, ys) in enumerate(series.items()):
        color = _SVG_PALETTE[i % len(_SVG_PALETTE)]
        points = " ".join(f"{px(xv):.2f},{py(float(yv)):.2f}" for xv, yv in zip(xs, ys))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                     f'points="{points}"/>')
        parts.append(f'<text x="{width - margin - 4}" y="{margin + 16 + 14 * i}" '
                     f'text-anchor="end" font-size="11" fill="{color}">{label}</text>')
    parts.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(parts) + "\n")
    return path

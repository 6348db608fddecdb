"""Report artifacts: CSV tables, JSON exports, and minimal SVG figures.

Every file starts with (or embeds) the config hash so outputs can be
traced back to the run that produced them; nothing here writes wall-clock
time, keeping reruns byte-identical.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from . import __version__

PALETTE = ("#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee",
           "#aa3377", "#bbbbbb", "#000000")


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def file_checksum(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


class Stamp:
    """Provenance marker written into every output file."""

    def __init__(self, config_hash: str, seed: int):
        self.config_hash = config_hash
        self.seed = seed

    @property
    def comment(self) -> str:
        return f"config_hash={self.config_hash} seed={self.seed}"

    def fields(self) -> dict:
        return {"config_hash": self.config_hash, "seed": self.seed}


def write_csv(path, header: list[str], rows: list[list], stamp: Stamp) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {stamp.comment}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def write_json(path, payload: dict, stamp: Stamp) -> None:
    payload = {**stamp.fields(), **payload}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def stamp_csv(path, stamp: Stamp) -> None:
    """Prepend the provenance comment to a CSV written by a module."""
    original = Path(path).read_text(encoding="utf-8")
    Path(path).write_text(f"# {stamp.comment}\n{original}", encoding="utf-8")


def _svg_document(width: int, height: int, body: str, stamp: Stamp) -> str:
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        f"<!-- {stamp.comment} -->\n"
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
        f"{body}\n</svg>\n"
    )


def svg_grouped_bars(path, groups: list[str], series: dict[str, list[float]],
                     title: str, stamp: Stamp) -> None:
    """Grouped bar chart: one cluster per group, one bar per series key."""
    width, height = 760, 420
    margin_left, margin_bottom, margin_top = 60, 70, 40
    plot_w = width - margin_left - 20
    plot_h = height - margin_top - margin_bottom
    all_values = [v for vs in series.values() for v in vs if not np.isnan(v)]
    vmax = max(0.0, *(all_values or [0.0]))
    vmin = min(0.0, *(all_values or [0.0]))
    span = (vmax - vmin) or 1.0

    def y_of(value: float) -> float:
        return margin_top + (vmax - value) / span * plot_h

    parts = [f'<text x="{width / 2}" y="20" text-anchor="middle" '
             f'font-family="sans-serif" font-size="14">{title}</text>']
    zero_y = y_of(0.0)
    parts.append(f'<line x1="{margin_left}" y1="{_fmt(zero_y)}" x2="{width - 20}" '
                 f'y2="{_fmt(zero_y)}" stroke="#444" stroke-width="1"/>')
    n_groups = len(groups)
    n_series = max(1, len(series))
    group_w = plot_w / max(1, n_groups)
    bar_w = group_w * 0.8 / n_series
    for gi, group in enumerate(groups):
        x0 = margin_left + gi * group_w + group_w * 0.1
        for si, (name, values) in enumerate(series.items()):
            value = values[gi]
            if np.isnan(value):
                continue
            x = x0 + si * bar_w
            top = min(y_of(value), zero_y)
            h = abs(y_of(value) - zero_y)
            color = PALETTE[si % len(PALETTE)]
            parts.append(f'<rect x="{_fmt(x)}" y="{_fmt(top)}" width="{_fmt(bar_w * 0.9)}" '
                         f'height="{_fmt(h)}" fill="{color}"><title>{name}={_fmt(value)}'
                         f"</title></rect>")
        parts.append(f'<text x="{_fmt(x0 + group_w * 0.4)}" y="{height - margin_bottom + 16}" '
                     f'text-anchor="middle" font-family="sans-serif" font-size="11">{group}</text>')
    for si, name in enumerate(series):
        color = PALETTE[si % len(PALETTE)]
        x = margin_left + si * 130
        y = height - 24
        parts.append(f'<rect x="{x}" y="{y - 10}" width="12" height="12" fill="{color}"/>')
        parts.append(f'<text x="{x + 16}" y="{y}" font-family="sans-serif" '
                     f'font-size="11">{name}</text>')
    Path(path).write_text(_svg_document(width, height, "\n".join(parts), stamp),
                          encoding="utf-8")


def svg_scatter(path, points_by_group: dict[str, list[tuple[float, float]]],
                title: str, stamp: Stamp,
                centroids: dict[str, tuple[float, float]] | None = None) -> None:
    width, height = 620, 520
    margin = 50
    xs = [p[0] for pts in points_by_group.values() for p in pts]
    ys = [p[1] for pts in points_by_group.values() for p in pts]
    if not xs:
        xs, ys = [0.0], [0.0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    x_span = (x_hi - x_lo) or 1.0
    y_span = (y_hi - y_lo) or 1.0

    def sx(x: float) -> float:
        return margin + (x - x_lo) / x_span * (width - 2 * margin)

    def sy(y: float) -> float:
        return height - margin - (y - y_lo) / y_span * (height - 2 * margin)

    parts = [f'<text x="{width / 2}" y="20" text-anchor="middle" '
             f'font-family="sans-serif" font-size="14">{title}</text>']
    for gi, (group, pts) in enumerate(points_by_group.items()):
        color = PALETTE[gi % len(PALETTE)]
        for x, y in pts:
            parts.append(f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="4" '
                         f'fill="{color}" fill-opacity="0.7"/>')
        if centroids and group in centroids:
            cx, cy = centroids[group]
            parts.append(f'<circle cx="{_fmt(sx(cx))}" cy="{_fmt(sy(cy))}" r="8" '
                         f'fill="none" stroke="{color}" stroke-width="2"/>')
        x_legend = margin + gi * 95
        parts.append(f'<rect x="{x_legend}" y="{height - 24}" width="10" height="10" '
                     f'fill="{color}"/>')
        parts.append(f'<text x="{x_legend + 14}" y="{height - 15}" '
                     f'font-family="sans-serif" font-size="11">{group}</text>')
    Path(path).write_text(_svg_document(width, height, "\n".join(parts), stamp),
                          encoding="utf-8")


def svg_heatmap(path, labels: list[str], matrix: np.ndarray, title: str,
                stamp: Stamp) -> None:
    n = len(labels)
    cell = 64
    margin_left, margin_top = 110, 70
    width = margin_left + n * cell + 20
    height = margin_top + n * cell + 20
    finite = matrix[~np.isnan(matrix)]
    lo = float(finite.min()) if finite.size else 0.0
    hi = float(finite.max()) if finite.size else 1.0
    span = (hi - lo) or 1.0
    parts = [f'<text x="{width / 2}" y="20" text-anchor="middle" '
             f'font-family="sans-serif" font-size="14">{title}</text>']
    for i, row_label in enumerate(labels):
        parts.append(f'<text x="{margin_left - 6}" y="{margin_top + i * cell + cell / 2 + 4}" '
                     f'text-anchor="end" font-family="sans-serif" font-size="11">{row_label}</text>')
        parts.append(f'<text x="{margin_left + i * cell + cell / 2}" y="{margin_top - 8}" '
                     f'text-anchor="middle" font-family="sans-serif" font-size="11">{row_label}</text>')
        for j in range(n):
            value = matrix[i, j]
            x = margin_left + j * cell
            y = margin_top + i * cell
            if np.isnan(value):
                parts.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                             f'fill="#eeeeee" stroke="white"/>')
                continue
            t = (value - lo) / span
            r = int(255 * (1 - t))
            g = int(255 * (1 - 0.55 * t))
            b = 255
            parts.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                         f'fill="rgb({r},{g},{b})" stroke="white"/>')
            parts.append(f'<text x="{x + cell / 2}" y="{y + cell / 2 + 4}" text-anchor="middle" '
                         f'font-family="sans-serif" font-size="11">{_fmt(value)}</text>')
    Path(path).write_text(_svg_document(width, height, "\n".join(parts), stamp),
                          encoding="utf-8")


def write_manifest(path, config, written: list[str], coverage: dict,
                   notes: dict) -> None:
    inputs = {}
    for spec in config.documents:
        inputs[spec.path] = file_checksum(spec.path)
        if spec.pretagged:
            inputs[spec.pretagged] = file_checksum(spec.pretagged)
    for p in [config.vectors_path, config.norms_path, config.positive_labels_path,
              config.negative_labels_path, config.embeddings_path,
              config.abbreviations_path, config.lexicon_path, config.suffix_path,
              *config.emotion_labels_paths.values()]:
        if p is not None:
            inputs[p] = file_checksum(p)
    settings = config.to_dict()
    settings.pop("out_dir", None)
    manifest = {
        "version": __version__,
        "config_hash": config.config_hash(),
        "config": settings,
        "seed": config.seed,
        "inputs": inputs,
        "outputs": sorted(Path(w).name for w in written),
        "coverage": coverage,
        "notes": notes,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

"""SVG rendering and CSV output of optimised designs."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .honeymesh import HexMesh


@dataclass(frozen=True)
class RenderSpec:
    scale: float = 10.0  # pixels per edge length
    stroke: bool = False
    margin: float = 1.0  # in edge lengths


def _gray(v: float) -> str:
    g = int(round(255 * (1.0 - min(1.0, max(0.0, v)))))
    return f"#{g:02x}{g:02x}{g:02x}"


def svg_document(mesh: HexMesh, xphys, spec: RenderSpec = RenderSpec()) -> str:
    """Standalone SVG with one filled polygon per element (1 black, 0 white)."""
    xphys = np.asarray(xphys, dtype=float)
    if xphys.shape != (mesh.nelem,):
        raise ValueError(f"expected {mesh.nelem} densities, got {xphys.shape}")
    s = spec.scale
    lo = mesh.coords.min(axis=0) - spec.margin
    hi = mesh.coords.max(axis=0) + spec.margin
    w, h = (hi - lo) * s
    # flip y so the bottom row is drawn at the bottom
    px = (mesh.coords[:, 0] - lo[0]) * s
    py = (hi[1] - mesh.coords[:, 1]) * s
    stroke = 'stroke="#808080" stroke-width="0.5"' if spec.stroke else 'stroke="none"'
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.4f}" height="{h:.4f}" '
        f'viewBox="0 0 {w:.4f} {h:.4f}">',
        f'<rect width="{w:.4f}" height="{h:.4f}" fill="#ffffff"/>',
        f'<g {stroke}>',
    ]
    for e, nodes in enumerate(mesh.conn):
        pts = " ".join(f"{px[n]:.4f},{py[n]:.4f}" for n in nodes)
        lines.append(f'<polygon id="e{e + 1}" points="{pts}" fill="{_gray(xphys[e])}"/>')
    lines += ["</g>", "</svg>", ""]
    return "\n".join(lines)


def render_svg(mesh: HexMesh, xphys, path, spec: RenderSpec = RenderSpec()) -> Path:
    path = Path(path)
    path.write_text(svg_document(mesh, xphys, spec))
    return path


DENSITY_HEADER = ["element_id", "centroid_x", "centroid_y", "density"]
HISTORY_HEADER = ["iteration", "compliance", "volume_fraction", "change"]


def write_density_csv(mesh: HexMesh, xphys, path) -> Path:
    path = Path(path)
    xphys = np.asarray(xphys, dtype=float)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(DENSITY_HEADER)
        for e, ((cx, cy), v) in enumerate(zip(mesh.centroids, xphys), start=1):
            w.writerow([e, repr(float(cx)), repr(float(cy)), repr(float(v))])
    return path


def read_density_csv(path) -> np.ndarray:
    """Rows of the density file as an ``(nelem, 4)`` float array."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if rows[0] != DENSITY_HEADER:
        raise ValueError(f"unexpected header {rows[0]}")
    return np.array([[float(v) for v in r] for r in rows[1:]])


def write_history_csv(history, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HISTORY_HEADER)
        for rec in history:
            w.writerow([rec.iteration, repr(float(rec.compliance)),
                        repr(float(rec.volume_fraction)), repr(float(rec.change))])
    return path


def read_history_csv(path) -> np.ndarray:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if rows[0] != HISTORY_HEADER:
        raise ValueError(f"unexpected header {rows[0]}")
    return np.array([[float(v) for v in r] for r in rows[1:]])

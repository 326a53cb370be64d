"""Honeycomb tessellation of a rectangular design domain.

Hexagons are regular with unit edge length and two vertical edges. Element
rows are stacked bottom-up with a vertical center pitch of 3/2. Odd rows
(1, 3, ...) hold ``hnex`` hexagons starting at ``x = 0``; even rows are
shifted right by half a pitch (``sqrt(3)/2``) and hold ``hnex - 1`` hexagons,
so that every node row fits on a grid of ``2*hnex + 1`` columns.

Nodes live on that ``(2*hnex + 1) x (hney + 1)`` grid. Node row ``k`` is the
zig-zag line between element rows ``k`` and ``k + 1``; column ``c`` sits at
``x = c*sqrt(3)/2``. When ``hney`` is even the last element row is a short
row and the two outer nodes of the top node row belong to no element; these
hanging nodes are dropped and the numbering compacted.

Arrays are 0-based internally. CSV output reports 1-based ids.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SQRT3 = np.sqrt(3.0)
#: horizontal center pitch between neighbouring hexagons
PITCH_X = SQRT3
#: vertical center pitch between element rows
PITCH_Y = 1.5


@dataclass(frozen=True)
class MeshSpec:
    hnex: int
    hney: int

    def __post_init__(self):
        for name in ("hnex", "hney"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")


@dataclass(frozen=True, eq=False)
class HexMesh:
    """Element connectivity and geometry of a honeycomb mesh.

    Attributes
    ----------
    conn : (nelem, 6) int array
        Node indices (0-based), anticlockwise from the bottom-left vertex.
    dofs : (nelem, 12) int array
        DOF indices (0-based), ``2*n`` (x) and ``2*n + 1`` (y) per node.
    coords : (nnode, 2) float array
    node_row, node_col : (nnode,) int arrays
        Grid position of every node; rows count from the bottom.
    elem_row : (nelem,) int array
        Element row of every element, 0 at the bottom.
    """

    spec: MeshSpec
    conn: np.ndarray
    coords: np.ndarray
    node_row: np.ndarray
    node_col: np.ndarray
    elem_row: np.ndarray
    dofs: np.ndarray = field(init=False)
    centroids: np.ndarray = field(init=False)

    def __post_init__(self):
        dofs = np.empty((len(self.conn), 12), dtype=np.int64)
        dofs[:, 0::2] = 2 * self.conn
        dofs[:, 1::2] = 2 * self.conn + 1
        object.__setattr__(self, "dofs", dofs)
        object.__setattr__(self, "centroids", centroids(self))
        for a in (self.conn, self.coords, self.node_row, self.node_col,
                  self.elem_row, self.dofs, self.centroids):
            a.flags.writeable = False

    @property
    def nelem(self) -> int:
        return len(self.conn)

    @property
    def nnode(self) -> int:
        return len(self.coords)

    @property
    def ndof(self) -> int:
        return 2 * len(self.coords)

    def row_nodes(self, k: int) -> np.ndarray:
        """Nodes of node row ``k`` ordered left to right (negative ``k`` counts from the top)."""
        nrows = self.spec.hney + 1
        k = k % nrows
        idx = np.flatnonzero(self.node_row == k)
        return idx[np.argsort(self.node_col[idx], kind="stable")]

    def leftmost_nodes(self) -> np.ndarray:
        """Leftmost node of every non-empty node row, bottom to top."""
        out = []
        for k in range(self.spec.hney + 1):
            nodes = self.row_nodes(k)
            if len(nodes):
                out.append(nodes[0])
        return np.asarray(out, dtype=np.int64)


def _element_layout(hnex: int, hney: int):
    """Grid column of each element's center and its row, in element order."""
    rows, cols = [], []
    for r in range(hney):
        if r % 2 == 0:
            c = 2 * np.arange(hnex) + 1
        else:
            c = 2 * np.arange(hnex - 1) + 2
        rows.append(np.full(len(c), r))
        cols.append(c)
    return np.concatenate(rows), np.concatenate(cols)


def build_mesh(hnex: int, hney: int | None = None) -> HexMesh:
    """Build the honeycomb mesh of ``hnex`` by ``hney`` hexagons.

    Also accepts a single :class:`MeshSpec` argument.
    """
    spec = hnex if isinstance(hnex, MeshSpec) else MeshSpec(hnex, hney)
    nx, ny = spec.hnex, spec.hney
    ncol = 2 * nx + 1

    erow, ecol = _element_layout(nx, ny)
    # local order: LL, B, LR (node row r) then UR, T, UL (node row r + 1)
    dcol = np.array([-1, 0, 1, 1, 0, -1])
    drow = np.array([0, 0, 0, 1, 1, 1])
    grid_r = erow[:, None] + drow[None, :]
    grid_c = ecol[:, None] + dcol[None, :]
    grid_id = grid_r * ncol + grid_c

    # drop grid points no element touches (the hanging nodes), keep row-major order
    used = np.zeros((ny + 1) * ncol, dtype=bool)
    used[grid_id.ravel()] = True
    new_id = np.cumsum(used) - 1
    conn = new_id[grid_id].astype(np.int64)

    gid = np.flatnonzero(used)
    node_row = gid // ncol
    node_col = gid % ncol
    x = node_col * (SQRT3 / 2.0)
    y = PITCH_Y * node_row + 0.5 * ((node_row + node_col) % 2 == 0)
    coords = np.column_stack([x, y]).astype(float)
    return HexMesh(spec, conn, coords, node_row.astype(np.int64),
                   node_col.astype(np.int64), erow.astype(np.int64))


def centroids(mesh: HexMesh) -> np.ndarray:
    """Per-element mean of the six vertex coordinates, shape ``(nelem, 2)``."""
    return mesh.coords[mesh.conn].mean(axis=1)


def write_mesh_csv(mesh: HexMesh, path) -> Path:
    """Dump nodes and elements with 1-based ids.

    The file has a ``nodes`` section (``id,x,y``) followed by an
    ``elements`` section (``id,n1..n6``).
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["nodes"])
        w.writerow(["id", "x", "y"])
        for i, (x, y) in enumerate(mesh.coords, start=1):
            w.writerow([i, repr(float(x)), repr(float(y))])
        w.writerow(["elements"])
        w.writerow(["id", "n1", "n2", "n3", "n4", "n5", "n6"])
        for e, nodes in enumerate(mesh.conn, start=1):
            w.writerow([e, *(int(n) + 1 for n in nodes)])
    return path


def read_mesh_csv(path):
    """Read back a dump from :func:`write_mesh_csv` as ``(coords, conn)`` (0-based conn)."""
    coords, conn, section = [], [], None
    with Path(path).open(newline="") as fh:
        for row in csv.reader(fh):
            if row in (["nodes"], ["elements"]):
                section = row[0]
                continue
            if row[0] == "id":
                continue
            if section == "nodes":
                coords.append((float(row[1]), float(row[2])))
            else:
                conn.append([int(v) - 1 for v in row[1:]])
    return np.array(coords), np.array(conn, dtype=np.int64)

"""Boundary conditions, loads and passive regions for the benchmark problems.

Load and support points are picked by their position in the node grid
(node row, and order within the row), which is independent of how the nodes
happen to be numbered.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .fea import LoadSet
from .honeymesh import HexMesh

ACTIVE, SOLID, VOID = 0, 1, -1

PROBLEMS = ("mbb", "multiload2", "multiload4", "passive")


@dataclass(frozen=True, eq=False)
class Problem:
    """A load set plus a per-element passive tag (0 active, 1 solid, -1 void)."""

    name: str
    loads: LoadSet
    mask: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=np.int8)
        if not np.isin(mask, (ACTIVE, SOLID, VOID)).all():
            raise ValueError("passive mask entries must be 0, 1 or -1")
        mask.flags.writeable = False
        object.__setattr__(self, "mask", mask)

    @property
    def active(self) -> np.ndarray:
        return np.flatnonzero(self.mask == ACTIVE)

    @property
    def solid(self) -> np.ndarray:
        return np.flatnonzero(self.mask == SOLID)

    @property
    def void(self) -> np.ndarray:
        return np.flatnonzero(self.mask == VOID)


def _forces(mesh: HexMesh, entries) -> sp.csc_matrix:
    """``entries`` is a list of ``(dof, case, value)``."""
    dof, case, val = (np.array(v) for v in zip(*entries))
    ncases = int(case.max()) + 1
    return sp.csc_matrix((val.astype(float), (dof, case)), shape=(mesh.ndof, ncases))


def _ydof(node) -> int:
    return 2 * int(node) + 1


def left_edge_nodes(mesh: HexMesh) -> np.ndarray:
    """First node of every node row: the nodes on the left (symmetry/clamp) edge."""
    return mesh.leftmost_nodes()


def mbb(mesh: HexMesh) -> LoadSet:
    """Half MBB beam: unit downward load at the top-left node.

    Horizontal DOFs of the left edge are fixed (symmetry); the bottom-right
    node carries a roller support.
    """
    left = left_edge_nodes(mesh)
    top_left = mesh.row_nodes(-1)[0]
    bottom_right = mesh.row_nodes(0)[-1]
    forces = _forces(mesh, [(_ydof(top_left), 0, -1.0)])
    fixed = np.concatenate([2 * left, [_ydof(bottom_right)]])
    return LoadSet(forces, fixed)


MULTILOAD_VALUES = (-1.0, 1.0, 2.0, -2.0)


def multiload_points(mesh: HexMesh) -> list[int]:
    """Loaded nodes of the four-case cantilever, in load-case order.

    1. right end of the bottom node row
    2. right end of the top node row
    3. middle of the bottom node row
    4. ``hnex``-th node of the top node row (its middle for even ``hney``)
    """
    hnex = mesh.spec.hnex
    bottom, top = mesh.row_nodes(0), mesh.row_nodes(-1)
    return [int(bottom[-1]), int(top[-1]), int(bottom[hnex]), int(top[hnex - 1])]


def clamped_left(mesh: HexMesh) -> np.ndarray:
    left = left_edge_nodes(mesh)
    return np.sort(np.concatenate([2 * left, 2 * left + 1]))


def multiload(mesh: HexMesh, ncases: int = 4) -> LoadSet:
    """Cantilever clamped on the left with 2 or 4 independent load cases."""
    if ncases not in (2, 4):
        raise ValueError(f"ncases must be 2 or 4, got {ncases}")
    if mesh.spec.hnex < 2:
        raise ValueError("multi-load cantilever needs hnex >= 2")
    nodes = multiload_points(mesh)[:ncases]
    entries = [(_ydof(n), c, MULTILOAD_VALUES[c]) for c, n in enumerate(nodes)]
    return LoadSet(_forces(mesh, entries), clamped_left(mesh))


def passive_regions(mesh: HexMesh) -> np.ndarray:
    """Tag elements of the void circle (-1) and the solid box (+1) by centroid."""
    ct = mesh.centroids
    xm, ym = ct[:, 0].max(), ct[:, 1].max()
    mask = np.zeros(mesh.nelem, dtype=np.int8)
    in_circle = np.sqrt((ct[:, 0] - xm / 3) ** 2 + (ct[:, 1] - ym / 2) ** 2) < ym / 3
    in_box = ((ct[:, 0] > 0.7 * xm) & (ct[:, 0] < 0.9 * xm)
              & (ct[:, 1] > 0.1 * ym) & (ct[:, 1] < 0.3 * ym))
    mask[in_circle] = VOID
    mask[in_box & ~in_circle] = SOLID
    return mask


def passive_problem(mesh: HexMesh) -> tuple[LoadSet, np.ndarray]:
    """Clamped-left cantilever with a bottom-right tip load and passive regions."""
    tip = mesh.row_nodes(0)[-1]
    loads = LoadSet(_forces(mesh, [(_ydof(tip), 0, -1.0)]), clamped_left(mesh))
    return loads, passive_regions(mesh)


def make_problem(name: str, mesh: HexMesh) -> Problem:
    """Build one of the named benchmark problems."""
    if name == "mbb":
        return Problem(name, mbb(mesh), np.zeros(mesh.nelem))
    if name in ("multiload2", "multiload4"):
        return Problem(name, multiload(mesh, int(name[-1])), np.zeros(mesh.nelem))
    if name == "passive":
        loads, mask = passive_problem(mesh)
        return Problem(name, loads, mask)
    raise ValueError(f"unknown problem {name!r}; choose from {', '.join(PROBLEMS)}")


# -- user-defined problems -------------------------------------------------


def _nearest_node(mesh: HexMesh, rel) -> int:
    lo, hi = mesh.coords.min(axis=0), mesh.coords.max(axis=0)
    p = lo + np.asarray(rel, dtype=float) * (hi - lo)
    return int(np.argmin(np.linalg.norm(mesh.coords - p, axis=1)))


def _edge_nodes(mesh: HexMesh, edge: str) -> np.ndarray:
    if edge == "left":
        return left_edge_nodes(mesh)
    if edge == "right":
        return np.array([mesh.row_nodes(k)[-1] for k in range(mesh.spec.hney + 1)
                         if len(mesh.row_nodes(k))])
    if edge == "bottom":
        return mesh.row_nodes(0)
    if edge == "top":
        return mesh.row_nodes(-1)
    raise ValueError(f"unknown edge {edge!r}")


def _dof_list(nodes, which: str) -> list[int]:
    out = []
    for n in np.atleast_1d(nodes):
        if "x" in which:
            out.append(2 * int(n))
        if "y" in which:
            out.append(2 * int(n) + 1)
    return out


def problem_from_dict(spec: dict, mesh: HexMesh) -> Problem:
    """Build a problem from a plain description.

    Positions are relative to the node bounding box (``[0, 0]`` bottom-left,
    ``[1, 1]`` top-right) and snap to the nearest node::

        {"loads": [{"at": [1, 0], "fy": -1, "case": 0}],
         "supports": [{"edge": "left", "dofs": "xy"}, {"at": [1, 0], "dofs": "y"}],
         "passive": [{"shape": "circle", "center": [0.33, 0.5], "radius": 0.15,
                      "tag": "void"},
                     {"shape": "box", "lo": [0.7, 0.1], "hi": [0.9, 0.3],
                      "tag": "solid"}]}

    Passive shapes use the same relative frame on element centroids; a
    circle radius is relative to the domain height.
    """
    entries = []
    for load in spec.get("loads", []):
        node = _nearest_node(mesh, load["at"])
        case = int(load.get("case", 0))
        if load.get("fx"):
            entries.append((2 * node, case, float(load["fx"])))
        if load.get("fy"):
            entries.append((2 * node + 1, case, float(load["fy"])))
    if not entries:
        raise ValueError("problem needs at least one nonzero load")
    fixed = []
    for sup in spec.get("supports", []):
        which = sup.get("dofs", "xy")
        nodes = _edge_nodes(mesh, sup["edge"]) if "edge" in sup else _nearest_node(mesh, sup["at"])
        fixed += _dof_list(nodes, which)
    loads = LoadSet(_forces(mesh, entries), np.array(fixed, dtype=np.int64))

    ct = mesh.centroids
    lo, hi = ct.min(axis=0), ct.max(axis=0)
    rel = (ct - lo) / np.where(hi > lo, hi - lo, 1.0)
    mask = np.zeros(mesh.nelem, dtype=np.int8)
    for region in spec.get("passive", []):
        tag = {"solid": SOLID, "void": VOID}[region["tag"]]
        if region["shape"] == "circle":
            c = np.asarray(region["center"], dtype=float)
            d = np.hypot((rel[:, 0] - c[0]) * (hi[0] - lo[0]), (rel[:, 1] - c[1]) * (hi[1] - lo[1]))
            inside = d < region["radius"] * (hi[1] - lo[1])
        elif region["shape"] == "box":
            a, b = np.asarray(region["lo"]), np.asarray(region["hi"])
            inside = np.all((rel > a) & (rel < b), axis=1)
        else:
            raise ValueError(f"unknown passive shape {region['shape']!r}")
        mask[inside & (mask == ACTIVE)] = tag
    return Problem(spec.get("name", "custom"), loads, mask)


def load_problem_file(path, mesh: HexMesh) -> Problem:
    return problem_from_dict(json.loads(Path(path).read_text()), mesh)

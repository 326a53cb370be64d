"""Hexagonal element stiffness and SIMP material interpolation."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

# unit regular hexagon centred at the origin, anticlockwise from the bottom-left vertex
_ANGLES = np.deg2rad([210.0, 270.0, 330.0, 30.0, 90.0, 150.0])
HEX_VERTICES = np.column_stack([np.cos(_ANGLES), np.sin(_ANGLES)])
HEX_AREA = 1.5 * np.sqrt(3.0)

# x bound below 1 keeps 0**(penal - 1) out of the derivative at x = 0
_SLACK = 1e-12


@dataclass(frozen=True)
class MaterialModel:
    """Modified SIMP: ``E(x) = emin + x**penal * (e0 - emin)``."""

    e0: float = 1.0
    emin: float = 1e-9
    penal: float = 3.0

    def __post_init__(self):
        if not 0.0 < self.emin < self.e0:
            raise ValueError(f"need 0 < emin < e0, got emin={self.emin}, e0={self.e0}")
        if self.penal < 1.0:
            raise ValueError(f"penal must be >= 1, got {self.penal}")


def _check_density(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x < -_SLACK) or np.any(x > 1.0 + _SLACK) or not np.all(np.isfinite(x)):
        raise ValueError("densities must lie in [0, 1]")
    return np.clip(x, 0.0, 1.0)


def simp_modulus(x, m: MaterialModel = MaterialModel()):
    """Young's modulus of an element with density ``x`` (scalar or array)."""
    x = _check_density(x)
    out = m.emin + x**m.penal * (m.e0 - m.emin)
    return float(out) if out.ndim == 0 else out


def simp_dmodulus(x, m: MaterialModel = MaterialModel()):
    """Derivative of :func:`simp_modulus` with respect to ``x``."""
    x = _check_density(x)
    out = m.penal * (m.e0 - m.emin) * x ** (m.penal - 1.0)
    return float(out) if out.ndim == 0 else out


def plane_stress_matrix(nu: float, e: float = 1.0) -> np.ndarray:
    return e / (1.0 - nu**2) * np.array(
        [[1.0, nu, 0.0], [nu, 1.0, 0.0], [0.0, 0.0, 0.5 * (1.0 - nu)]]
    )


def wachspress(points, vertices=HEX_VERTICES):
    """Wachspress basis values and gradients on a convex polygon.

    Parameters
    ----------
    points : (npts, 2) array
        Evaluation points strictly inside the polygon.
    vertices : (n, 2) array
        Polygon vertices in anticlockwise order.

    Returns
    -------
    phi : (npts, n) array
    dphi : (npts, n, 2) array
        Gradients, from ``grad phi_i = phi_i (R_i - sum_j phi_j R_j)`` with
        ``R_i = p_{i-1} + p_i`` and ``p_i`` the outward edge normal scaled by
        the inverse distance to edge ``i``.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    v = np.asarray(vertices, dtype=float)
    edge = np.roll(v, -1, axis=0) - v
    normal = np.column_stack([edge[:, 1], -edge[:, 0]])
    normal /= np.linalg.norm(normal, axis=1)[:, None]

    # h[q, i]: distance from point q to the line through edge i
    h = np.einsum("qik,ik->qi", v[None, :, :] - pts[:, None, :], normal)
    p = normal[None, :, :] / h[:, :, None]
    p_prev = np.roll(p, 1, axis=1)
    w = p_prev[:, :, 0] * p[:, :, 1] - p_prev[:, :, 1] * p[:, :, 0]
    phi = w / w.sum(axis=1, keepdims=True)
    r = p_prev + p
    dphi = phi[:, :, None] * (r - np.einsum("qj,qjk->qk", phi, r)[:, None, :])
    return phi, dphi


def strain_displacement(dphi: np.ndarray) -> np.ndarray:
    """B matrices ``(npts, 3, 2n)`` with engineering shear strain."""
    npts, n, _ = dphi.shape
    b = np.zeros((npts, 3, 2 * n))
    b[:, 0, 0::2] = dphi[:, :, 0]
    b[:, 1, 1::2] = dphi[:, :, 1]
    b[:, 2, 0::2] = dphi[:, :, 1]
    b[:, 2, 1::2] = dphi[:, :, 0]
    return b


def hexagon_quadrature(order: int = 12, levels: int = 0):
    """Points and weights over the unit hexagon.

    The hexagon is split into six triangles from the centroid; each is split
    ``levels`` times into four, and integrated with a collapsed (Duffy)
    Gauss-Legendre rule of ``order`` points per direction.
    """
    g, w = np.polynomial.legendre.leggauss(order)
    g = 0.5 * (g + 1.0)
    w = 0.5 * w
    s, t = np.meshgrid(g, g, indexing="ij")
    ws = np.outer(w, w) * (1.0 - s)
    # reference triangle (0,0), (1,0), (0,1)
    ref = np.column_stack([s.ravel(), (t * (1.0 - s)).ravel()])
    ref_w = ws.ravel()

    tris = [np.array([[0.0, 0.0], HEX_VERTICES[i], HEX_VERTICES[(i + 1) % 6]])
            for i in range(6)]
    for _ in range(levels):
        finer = []
        for a, b, c in tris:
            ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
            finer += [np.array(t) for t in ((a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca))]
        tris = finer

    pts, wts = [], []
    for a, b, c in tris:
        jac = abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
        pts.append(a + ref[:, :1] * (b - a) + ref[:, 1:] * (c - a))
        wts.append(ref_w * jac)
    return np.concatenate(pts), np.concatenate(wts)


@lru_cache(maxsize=32)
def _k0_cached(nu: float, order: int, levels: int) -> np.ndarray:
    pts, wts = hexagon_quadrature(order, levels)
    _, dphi = wachspress(pts)
    b = strain_displacement(dphi)
    d = plane_stress_matrix(nu)
    k = np.einsum("q,qki,kl,qlj->ij", wts, b, d, b)
    k = 0.5 * (k + k.T)
    k.flags.writeable = False
    return k


def wachspress_k0(nu: float = 0.3, order: int = 12, levels: int = 0) -> np.ndarray:
    """12x12 stiffness of the unit-edge hexagon for ``E = 1``, unit thickness, plane stress.

    DOFs follow the local node order (x then y per node).
    """
    nu = float(nu)
    if not 0.0 <= nu < 0.5:
        raise ValueError(f"Poisson ratio must lie in [0, 0.5), got {nu}")
    return _k0_cached(nu, int(order), int(levels))


def write_k0_csv(k0: np.ndarray, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        csv.writer(fh).writerows([[repr(float(v)) for v in row] for row in k0])
    return path

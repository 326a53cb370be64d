"""Distance-weighted neighbourhood filters over element centroids."""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np
import scipy.sparse as sp

from . import kernels


class FilterMode(IntEnum):
    NULL = 0
    SENSITIVITY = 1
    DENSITY = 2


@dataclass(frozen=True, eq=False)
class FilterOperator:
    """``H[j, i] = max(0, rfill - |c_j - c_i|)`` with row sums ``hs``."""

    mode: FilterMode
    weights: sp.csr_matrix
    row_sums: np.ndarray
    rfill: float

    @property
    def nelem(self) -> int:
        return self.weights.shape[0]


def build_filter(centroids, rfill: float, mode=FilterMode.SENSITIVITY) -> FilterOperator:
    """Collect all centroid pairs closer than ``rfill`` by spatial binning."""
    rfill = float(rfill)
    if not rfill > 0.0:
        raise ValueError(f"filter radius must be positive, got {rfill}")
    mode = FilterMode(mode)
    ct = np.asarray(centroids, dtype=float)
    n = len(ct)
    rows, cols, w = kernels.filter_triplets(
        np.ascontiguousarray(ct[:, 0]), np.ascontiguousarray(ct[:, 1]), rfill
    )
    h = sp.csr_matrix((w, (rows, cols)), shape=(n, n))
    h.sort_indices()
    hs = np.asarray(h.sum(axis=1)).ravel()
    return FilterOperator(mode, h, hs, rfill)


def _expect(f: FilterOperator, mode: FilterMode):
    if f.mode != mode:
        raise ValueError(f"operation needs a {mode.name.lower()} filter, got {f.mode.name.lower()}")


def filter_sensitivities(f: FilterOperator, x, dc) -> np.ndarray:
    """Sensitivity filter: ``H (x * dc) / (hs * max(1e-3, x))``."""
    _expect(f, FilterMode.SENSITIVITY)
    x = np.asarray(x, dtype=float)
    return (f.weights @ (x * dc)) / f.row_sums / np.maximum(1e-3, x)


def filter_density(f: FilterOperator, x) -> np.ndarray:
    """Physical densities as the weighted neighbourhood mean of ``x``."""
    _expect(f, FilterMode.DENSITY)
    return (f.weights @ np.asarray(x, dtype=float)) / f.row_sums


def chainrule_density(f: FilterOperator, d) -> np.ndarray:
    """Map a derivative with respect to physical densities back to ``x``."""
    _expect(f, FilterMode.DENSITY)
    return f.weights.T @ (np.asarray(d, dtype=float) / f.row_sums)


def apply(f: FilterOperator, x) -> np.ndarray:
    """Physical densities for any mode (identity unless density filtering)."""
    if f.mode == FilterMode.DENSITY:
        return filter_density(f, x)
    return np.array(x, dtype=float)


def pairwise_weights(centroids, rfill: float) -> sp.csr_matrix:
    """Brute-force all-pairs construction of ``H``; quadratic in the element count."""
    ct = np.asarray(centroids, dtype=float)
    n = len(ct)
    rows, cols, vals = [], [], []
    for j in range(n):
        dx = ct[j, 0] - ct[:, 0]
        dy = ct[j, 1] - ct[:, 1]
        d = np.sqrt(dx * dx + dy * dy)
        i = np.flatnonzero(d < rfill)
        rows.append(np.full(len(i), j))
        cols.append(i)
        vals.append(rfill - d[i])
    h = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    h.sort_indices()
    return h

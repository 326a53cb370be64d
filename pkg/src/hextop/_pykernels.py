"""NumPy versions of the compiled kernels in ``_ckernels.pyx``."""
import numpy as np
from scipy.spatial import cKDTree


def filter_triplets(cx, cy, rfill):
    """Pairs (j, i) with centroid distance < rfill and weight rfill - dist."""
    cx = np.ascontiguousarray(cx, dtype=float)
    cy = np.ascontiguousarray(cy, dtype=float)
    if len(cx) == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0)
    tree = cKDTree(np.column_stack([cx, cy]))
    # candidate pairs from the tree, exact distances recomputed below
    pairs = tree.query_pairs(rfill * (1.0 + 1e-9), output_type="ndarray")
    j = np.concatenate([np.arange(len(cx)), pairs[:, 0], pairs[:, 1]])
    i = np.concatenate([np.arange(len(cx)), pairs[:, 1], pairs[:, 0]])
    dx = cx[j] - cx[i]
    dy = cy[j] - cy[i]
    d = np.sqrt(dx * dx + dy * dy)
    keep = d < rfill
    return j[keep].astype(np.int64), i[keep].astype(np.int64), rfill - d[keep]


def element_energies(u, dofs, k0):
    ue = u[dofs]
    return np.einsum("ea,ea->e", ue @ k0, ue)


def scatter_values(slot, moduli, kflat, nnz):
    vals = (moduli[:, None] * kflat[None, :]).ravel()
    keep = slot >= 0
    return np.bincount(slot[keep], weights=vals[keep], minlength=nnz)

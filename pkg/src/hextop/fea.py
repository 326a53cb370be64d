"""Global assembly and static solve."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as sla

from . import kernels
from .element import MaterialModel, simp_modulus
from .honeymesh import HexMesh

#: relative residual accepted from the linear solver
RESIDUAL_TOL = 1e-8
# smallest pivot relative to the largest; void elements (emin = 1e-9) stay far above it
PIVOT_TOL = 1e-14


class InsufficientConstraintsError(RuntimeError):
    """The reduced stiffness matrix is singular or indefinite."""


@dataclass(frozen=True, eq=False)
class LoadSet:
    """Force columns (one per load case) and constrained DOFs (0-based)."""

    forces: sp.csc_matrix
    fixed_dofs: np.ndarray
    free_dofs: np.ndarray = field(init=False)

    def __post_init__(self):
        f = sp.csc_matrix(self.forces, dtype=float)
        if f.ndim != 2:
            raise ValueError("forces must be 2-D (ndof x ncases)")
        fixed = np.unique(np.asarray(self.fixed_dofs, dtype=np.int64))
        ndof = f.shape[0]
        if len(fixed) and (fixed[0] < 0 or fixed[-1] >= ndof):
            raise ValueError("fixed DOF index out of range")
        if not np.all(np.isfinite(f.data)):
            raise ValueError("force entries must be finite")
        object.__setattr__(self, "forces", f)
        object.__setattr__(self, "fixed_dofs", fixed)
        object.__setattr__(self, "free_dofs", np.setdiff1d(np.arange(ndof), fixed))

    @property
    def ndof(self) -> int:
        return self.forces.shape[0]

    @property
    def ncases(self) -> int:
        return self.forces.shape[1]

    def dense_forces(self) -> np.ndarray:
        return self.forces.toarray()


@dataclass
class SolveResult:
    u: np.ndarray  # (ndof, ncases)
    element_energies: np.ndarray | None = None  # (nelem, ncases)


class Assembler:
    """Triplet-to-CSC assembly with a precomputed sparsity pattern.

    The pattern is built once per mesh; each call only rescales the element
    matrices and accumulates them into the stored slots. When ``free`` is
    given, only the free-free block is kept.
    """

    def __init__(self, mesh: HexMesh, k0: np.ndarray, free=None):
        self.mesh = mesh
        self.k0 = np.ascontiguousarray(k0, dtype=float)
        ndof = mesh.ndof
        nd = mesh.dofs.shape[1]
        ik = np.repeat(mesh.dofs, nd, axis=1).ravel()
        jk = np.tile(mesh.dofs, (1, nd)).ravel()
        if free is None:
            ren = np.arange(ndof)
            n = ndof
        else:
            ren = np.full(ndof, -1, dtype=np.int64)
            ren[free] = np.arange(len(free))
            n = len(free)
        ri, rj = ren[ik], ren[jk]
        keep = (ri >= 0) & (rj >= 0)
        # column-major keys sort straight into canonical CSC storage order
        key = rj[keep] * n + ri[keep]
        ukey, inv = np.unique(key, return_inverse=True)
        slot = np.full(len(ik), -1, dtype=np.int64)
        slot[keep] = inv
        self.slot = slot
        self.indices = (ukey % n).astype(np.int32)
        self.indptr = np.concatenate(
            [[0], np.cumsum(np.bincount(ukey // n, minlength=n))]
        ).astype(np.int32)
        self.n = n

    def matrix(self, moduli) -> sp.csc_matrix:
        moduli = np.ascontiguousarray(moduli, dtype=float)
        if moduli.shape != (self.mesh.nelem,):
            raise ValueError(f"expected {self.mesh.nelem} element moduli, got {moduli.shape}")
        data = kernels.scatter_values(self.slot, moduli, self.k0.ravel(), len(self.indices))
        return sp.csc_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))


def assemble(mesh: HexMesh, xphys, m: MaterialModel, k0: np.ndarray) -> sp.csc_matrix:
    """Global stiffness ``K = sum_j E(x_j) k0`` scattered onto each element's DOFs."""
    xphys = np.asarray(xphys, dtype=float)
    if xphys.shape != (mesh.nelem,):
        raise ValueError(f"xphys has shape {xphys.shape}, mesh has {mesh.nelem} elements")
    return Assembler(mesh, k0).matrix(simp_modulus(xphys, m))


def _factorize(kff):
    try:
        # symmetric minimum-degree ordering; much faster than COLAMD for SPD systems
        return sla.splu(kff, permc_spec="MMD_AT_PLUS_A")
    except RuntimeError as exc:
        raise InsufficientConstraintsError(
            f"fea: reduced stiffness matrix is singular ({exc}); insufficient constraints"
        ) from exc


def solve_reduced(kff: sp.csc_matrix, loads: LoadSet) -> np.ndarray:
    """Solve ``K_ff u_f = F_f`` for every load case and scatter into full vectors."""
    f = loads.dense_forces()
    ff = f[loads.free_dofs]
    u = np.zeros_like(f)
    if not np.any(ff):
        return u
    lu = _factorize(kff)
    piv = np.abs(lu.U.diagonal())
    if piv.min() <= PIVOT_TOL * piv.max():
        raise InsufficientConstraintsError(
            "fea: reduced stiffness matrix is numerically singular; insufficient constraints"
        )
    uf = lu.solve(ff)
    if not np.all(np.isfinite(uf)):
        raise InsufficientConstraintsError("fea: non-finite displacements; insufficient constraints")
    res = np.linalg.norm(kff @ uf - ff, axis=0)
    nrm = np.linalg.norm(ff, axis=0)
    bad = res > RESIDUAL_TOL * np.where(nrm > 0, nrm, 1.0)
    if np.any(bad):
        raise InsufficientConstraintsError(
            f"fea: relative residual {float((res / np.where(nrm > 0, nrm, 1.0)).max()):.3e} "
            "exceeds tolerance; reduced system is singular or ill-posed"
        )
    _check_definite(kff, uf, ff)
    u[loads.free_dofs] = uf
    return u


def _check_definite(kff, uf, ff):
    # compliance of a positive definite system is positive for nonzero loads
    work = np.einsum("ik,ik->k", ff, uf)
    if np.any(work[np.linalg.norm(ff, axis=0) > 0] <= 0.0):
        raise InsufficientConstraintsError("fea: reduced system is not positive definite")


def solve(k: sp.spmatrix, loads: LoadSet) -> SolveResult:
    """Static solve on the free DOFs; fixed DOFs stay exactly zero."""
    k = sp.csc_matrix(k)
    if k.shape != (loads.ndof, loads.ndof):
        raise ValueError(f"stiffness is {k.shape}, loads expect {loads.ndof} DOFs")
    free = loads.free_dofs
    kff = k[free][:, free].tocsc()
    return SolveResult(solve_reduced(kff, loads))


def element_energies(mesh: HexMesh, k0: np.ndarray, u) -> np.ndarray:
    """``u_e^T k0 u_e`` per element; one column per load case if ``u`` is 2-D."""
    u = np.asarray(u, dtype=float)
    k0 = np.ascontiguousarray(k0, dtype=float)
    if u.shape[0] != mesh.ndof:
        raise ValueError(f"displacement length {u.shape[0]} != {mesh.ndof}")
    if u.ndim == 1:
        return kernels.element_energies(np.ascontiguousarray(u), mesh.dofs, k0)
    return np.column_stack([
        kernels.element_energies(np.ascontiguousarray(u[:, c]), mesh.dofs, k0)
        for c in range(u.shape[1])
    ])

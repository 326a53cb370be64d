"""Compliance minimisation with the optimality-criteria update."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .element import MaterialModel, simp_dmodulus, simp_modulus, wachspress_k0
from .fea import Assembler, element_energies, solve_reduced
from .filters import (FilterMode, FilterOperator, build_filter, chainrule_density,
                      filter_density, filter_sensitivities)
from .honeymesh import HexMesh, build_mesh
from .problems import ACTIVE, SOLID, VOID, Problem, make_problem

log = logging.getLogger(__name__)

#: Lagrange multiplier bracket and relative stopping width of the bisection
LAMBDA_BRACKET = (0.0, 1e9)
BISECTION_TOL = 1e-3


class OptimizationError(RuntimeError):
    pass


class BracketError(OptimizationError):
    """The volume target cannot be reached within the move limits."""


@dataclass
class IterationRecord:
    iteration: int
    compliance: float
    volume_fraction: float
    change: float


@dataclass
class DesignState:
    x: np.ndarray
    xphys: np.ndarray
    c: float = np.nan
    dc: np.ndarray | None = None
    dv: np.ndarray | None = None
    loop: int = 0
    change: float = 1.0
    history: list[IterationRecord] = field(default_factory=list)
    #: (achieved, target) physical volume of every OC update
    oc_volumes: list[tuple[float, float]] = field(default_factory=list)
    u: np.ndarray | None = None


def objective_and_sensitivity(xphys, ce, m: MaterialModel):
    """Compliance summed over load cases and its derivative wrt ``xphys``.

    ``ce`` holds the unit-modulus element energies, shape ``(nelem,)`` or
    ``(nelem, ncases)``.
    """
    ce = np.asarray(ce, dtype=float)
    if ce.ndim == 1:
        ce = ce[:, None]
    ce_sum = ce.sum(axis=1)
    c = float(np.sum(simp_modulus(xphys, m) * ce_sum))
    dc = -simp_dmodulus(xphys, m) * ce_sum
    return c, dc


def oc_update(x, dc, dv, volfrac, move=0.2, mask=None, volume: Callable | None = None):
    """One optimality-criteria step with bisection on the volume multiplier.

    Active elements move to ``x * sqrt(-dc / (dv * lam))`` clamped to the move
    limit and ``[0, 1]``; passive ones are held at 1 (solid) or 0 (void).
    ``lam`` is bisected until ``volume(x_new)`` equals ``volfrac``; by default
    the volume is the mean of ``x_new`` over all elements.

    Returns
    -------
    x_new : ndarray
    achieved : float
        Volume fraction of ``x_new``.
    """
    x = np.asarray(x, dtype=float)
    dc = np.asarray(dc, dtype=float)
    dv = np.asarray(dv, dtype=float)
    if move <= 0:
        raise ValueError("move must be positive")
    mask = np.zeros(len(x), dtype=np.int8) if mask is None else np.asarray(mask)
    act = mask == ACTIVE
    if volume is None:
        volume = np.mean

    xa, dca, dva = x[act], np.minimum(dc[act], 0.0), dv[act]
    if np.any(dva <= 0):
        raise ValueError("volume sensitivities of active elements must be positive")
    lo_b = np.maximum(0.0, xa - move)
    hi_b = np.minimum(1.0, xa + move)
    base = x.copy()
    base[mask == SOLID] = 1.0
    base[mask == VOID] = 0.0
    ratio = -dca / dva

    def candidate(lam):
        out = base.copy()
        with np.errstate(divide="ignore", invalid="ignore"):
            step = xa * np.sqrt(ratio / lam) if lam > 0 else np.where(ratio > 0, np.inf, 0.0)
        out[act] = np.clip(np.clip(step, lo_b, hi_b), 0.0, 1.0)
        return out

    l1, l2 = LAMBDA_BRACKET
    v_max = volume(candidate(l1))
    v_min = volume(candidate(l2))
    if v_max < volfrac * (1 - BISECTION_TOL) or v_min > volfrac * (1 + BISECTION_TOL):
        raise BracketError(
            f"optimizer: volume target {volfrac:.4g} outside reachable range "
            f"[{v_min:.4g}, {v_max:.4g}] for multiplier bracket {LAMBDA_BRACKET}"
        )
    # target at an end of the reachable range (e.g. volfrac = 1): nothing to bisect
    if v_max <= volfrac:
        return candidate(l1), float(v_max)
    if v_min >= volfrac:
        return candidate(l2), float(v_min)
    while (l2 - l1) / (l1 + l2) > BISECTION_TOL:
        lmid = 0.5 * (l1 + l2)
        xnew = candidate(lmid)
        if volume(xnew) > volfrac:
            l1 = lmid
        else:
            l2 = lmid
    xnew = candidate(0.5 * (l1 + l2))
    return xnew, float(volume(xnew))


def initial_design(problem: Problem, volfrac: float) -> np.ndarray:
    """Uniform active density so that the total volume fraction is ``volfrac``."""
    mask = problem.mask
    n = len(mask)
    x = np.zeros(n)
    x[mask == SOLID] = 1.0
    nact = int(np.sum(mask == ACTIVE))
    if nact == 0:
        raise ValueError("problem has no active elements")
    xa = (volfrac * n - np.sum(mask == SOLID)) / nact
    if not 0.0 <= xa <= 1.0:
        raise ValueError(
            f"volume fraction {volfrac} is incompatible with the passive regions "
            f"(active density would be {xa:.4f})"
        )
    x[mask == ACTIVE] = xa
    return x


class _Physical:
    """x -> xphys: density filter (when active) followed by passive enforcement."""

    def __init__(self, flt: FilterOperator, mask):
        self.flt = flt
        self.mask = np.asarray(mask)
        self.solid = self.mask == SOLID
        self.void = self.mask == VOID

    def __call__(self, x):
        xp = filter_density(self.flt, x) if self.flt.mode == FilterMode.DENSITY else np.array(x)
        xp[self.solid] = 1.0
        xp[self.void] = 0.0
        return xp

    def volume(self, x) -> float:
        return float(np.mean(self(x)))


def optimize(mesh: HexMesh, problem: Problem, flt: FilterOperator, volfrac: float,
             material: MaterialModel = MaterialModel(), k0=None, move: float = 0.2,
             maxiter: int = 200, change_tol: float = 0.01,
             callback: Callable[[IterationRecord], None] | None = None) -> DesignState:
    """Run the OC loop until ``change < change_tol`` or ``maxiter`` iterations.

    The returned state holds the last analysed design, its compliance and
    sensitivities, and the full iteration history.
    """
    if not 0.0 < volfrac <= 1.0:
        raise ValueError(f"volfrac must lie in (0, 1], got {volfrac}")
    k0 = wachspress_k0() if k0 is None else k0
    mask = problem.mask
    act = mask == ACTIVE
    loads = problem.loads
    asm = Assembler(mesh, k0, free=loads.free_dofs)
    physical = _Physical(flt, mask)
    dv0 = np.full(mesh.nelem, 1.0 / (mesh.nelem * volfrac))

    x = initial_design(problem, volfrac)
    state = DesignState(x=x, xphys=physical(x))
    while state.change >= change_tol and state.loop < maxiter:
        state.loop += 1
        xphys = state.xphys
        kff = asm.matrix(simp_modulus(xphys, material))
        u = solve_reduced(kff, loads)
        ce = element_energies(mesh, k0, u)
        c, dc = objective_and_sensitivity(xphys, ce, material)
        if not np.isfinite(c):
            raise OptimizationError(f"optimizer: non-finite compliance at iteration {state.loop}")
        dv = dv0.copy()
        if flt.mode == FilterMode.SENSITIVITY:
            dc = filter_sensitivities(flt, state.x, dc)
        elif flt.mode == FilterMode.DENSITY:
            dc[~act] = 0.0
            dv[~act] = 0.0
            dc = chainrule_density(flt, dc)
            dv = chainrule_density(flt, dv)
        xnew, vol = oc_update(state.x, dc, dv, volfrac, move, mask, volume=physical.volume)
        state.oc_volumes.append((vol, volfrac))
        change = float(np.max(np.abs(xnew - state.x)))
        rec = IterationRecord(state.loop, c, float(np.mean(xphys)), change)
        state.history.append(rec)
        state.c, state.dc, state.dv, state.u = c, dc, dv, u
        state.change = change
        if callback is not None:
            callback(rec)
        if state.change >= change_tol and state.loop < maxiter:
            state.x = xnew
            state.xphys = physical(xnew)
    return state


def log_line(rec: IterationRecord) -> str:
    return (f"it={rec.iteration} obj={rec.compliance:.4f} "
            f"vol={rec.volume_fraction:.3f} change={rec.change:.3f}")


def run(config, callback=None):
    """Build mesh, problem and filter from a :class:`~hextop.config.RunConfig` and optimise.

    Returns ``(mesh, problem, state)``.
    """
    mesh = build_mesh(config.hnex, config.hney)
    if config.problem_file:
        from .problems import load_problem_file
        problem = load_problem_file(config.problem_file, mesh)
    else:
        problem = make_problem(config.problem, mesh)
    flt = build_filter(mesh.centroids, config.rfill, config.ft)
    material = MaterialModel(penal=config.penal)
    k0 = wachspress_k0(config.nu)
    state = optimize(mesh, problem, flt, config.volfrac, material, k0,
                     move=config.move, maxiter=config.maxiter,
                     change_tol=config.change_tol, callback=callback)
    return mesh, problem, state

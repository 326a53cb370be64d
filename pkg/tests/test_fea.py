import numpy as np
import pytest
import scipy.sparse as sp

from hextop.element import MaterialModel, simp_modulus, wachspress_k0
from hextop.fea import (Assembler, InsufficientConstraintsError, LoadSet, assemble,
                        element_energies, solve)
from hextop.honeymesh import build_mesh
from hextop.problems import mbb
from oracles import dense_assembly

M = MaterialModel()


@pytest.fixture(scope="module")
def k0():
    return wachspress_k0()


def test_single_element_identity(k0):
    m = build_mesh(1, 1)
    k = assemble(m, [1.0], M, k0).toarray()
    perm = m.dofs[0]
    np.testing.assert_array_equal(k[np.ix_(perm, perm)], k0)


def test_linear_in_modulus(k0):
    m = build_mesh(3, 3)
    k1 = assemble(m, np.ones(m.nelem), M, k0)
    kx = assemble(m, np.full(m.nelem, 0.4), M, k0)
    ratio = simp_modulus(0.4, M) / simp_modulus(1.0, M)
    np.testing.assert_allclose(kx.toarray(), ratio * k1.toarray(), rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("size", [(2, 2), (3, 2), (5, 5)])
def test_matches_dense_scatter(k0, rng, size):
    m = build_mesh(*size)
    x = rng.uniform(0, 1, m.nelem)
    k = assemble(m, x, M, k0)
    ref = dense_assembly(m.conn, simp_modulus(x, M), k0, m.nnode)
    assert np.abs(k.toarray() - ref).max() <= 1e-12
    assert abs(k - k.T).max() <= 1e-12


def test_free_block_matches_slice(k0, rng):
    m = build_mesh(4, 3)
    free = np.sort(rng.choice(m.ndof, m.ndof - 7, replace=False))
    mod = rng.uniform(0.1, 1, m.nelem)
    full = Assembler(m, k0).matrix(mod)
    red = Assembler(m, k0, free=free).matrix(mod)
    np.testing.assert_array_equal(red.toarray(), full[free][:, free].toarray())


def test_dimension_mismatch(k0):
    m = build_mesh(2, 2)
    with pytest.raises(ValueError):
        assemble(m, np.ones(m.nelem + 1), M, k0)


def _one_element(k0):
    m = build_mesh(1, 1)
    # pin node 0 in x and y, node 2 (same height) in y
    fixed = [0, 1, 5]
    f = np.zeros(12)
    f[2 * 4 + 1] = -1.0
    f[2 * 3] = 0.5
    return m, LoadSet(sp.csc_matrix(f[:, None]), fixed), f


def test_single_element_solve_vs_dense(k0):
    m, loads, f = _one_element(k0)
    res = solve(assemble(m, [1.0], M, k0), loads)
    free = loads.free_dofs
    ref = np.zeros(12)
    perm = m.dofs[0]
    kd = np.zeros((12, 12))
    kd[np.ix_(perm, perm)] = k0
    ref[free] = np.linalg.solve(kd[np.ix_(free, free)], f[free])
    np.testing.assert_allclose(res.u[:, 0], ref, rtol=1e-10, atol=1e-12)
    assert np.all(res.u[loads.fixed_dofs, 0] == 0.0)


def test_zero_force_gives_zero(k0):
    m = build_mesh(3, 3)
    ls = mbb(m)
    zero = LoadSet(sp.csc_matrix((m.ndof, 1)), ls.fixed_dofs)
    res = solve(assemble(m, np.ones(m.nelem), M, k0), zero)
    assert not np.any(res.u)


def test_linearity(k0, rng):
    m = build_mesh(4, 4)
    ls = mbb(m)
    k = assemble(m, rng.uniform(0.2, 1, m.nelem), M, k0)
    u1 = solve(k, ls).u
    u2 = solve(k, LoadSet(2 * ls.forces, ls.fixed_dofs)).u
    np.testing.assert_allclose(u2, 2 * u1, rtol=1e-12, atol=0)


def test_insufficient_constraints(k0):
    m = build_mesh(3, 3)
    f = np.zeros((m.ndof, 1))
    f[5, 0] = 1.0
    # only x of one node fixed: rigid modes remain
    with pytest.raises(InsufficientConstraintsError):
        solve(assemble(m, np.ones(m.nelem), M, k0), LoadSet(sp.csc_matrix(f), [0]))


def test_loadset_invariants():
    f = sp.csc_matrix(([1.0], ([3], [0])), shape=(10, 1))
    ls = LoadSet(f, [4, 2, 2])
    np.testing.assert_array_equal(ls.fixed_dofs, [2, 4])
    assert set(ls.fixed_dofs) | set(ls.free_dofs) == set(range(10))
    assert not set(ls.fixed_dofs) & set(ls.free_dofs)
    with pytest.raises(ValueError):
        LoadSet(f, [12])
    with pytest.raises(ValueError):
        LoadSet(sp.csc_matrix(([np.inf], ([3], [0])), shape=(10, 1)), [1])


def test_energies_zero_and_rigid(k0):
    m = build_mesh(3, 2)
    assert not np.any(element_energies(m, k0, np.zeros(m.ndof)))
    u = np.zeros(m.ndof)
    u[0::2] = 0.7
    u[1::2] = -0.2
    assert np.abs(element_energies(m, k0, u)).max() < 1e-12


def test_energies_match_dense(k0, rng):
    m = build_mesh(4, 3)
    u = rng.normal(size=m.ndof)
    ce = element_energies(m, k0, u)
    ref = [u[d] @ k0 @ u[d] for d in m.dofs]
    np.testing.assert_allclose(ce, ref, rtol=1e-12, atol=1e-12)
    two = element_energies(m, k0, np.column_stack([u, 2 * u]))
    np.testing.assert_allclose(two[:, 1], 4 * two[:, 0], rtol=1e-12)


def test_work_energy_balance(k0, rng):
    m = build_mesh(6, 4)
    ls = mbb(m)
    x = rng.uniform(0, 1, m.nelem)
    res = solve(assemble(m, x, M, k0), ls)
    ce = element_energies(m, k0, res.u[:, 0])
    c = np.sum(simp_modulus(x, M) * ce)
    fu = ls.dense_forces()[:, 0] @ res.u[:, 0]
    assert abs(c - fu) <= 1e-6 * abs(fu)
    assert ce.min() >= -1e-12


def test_stiffer_design_not_more_compliant(k0, rng):
    m = build_mesh(4, 4)
    ls = mbb(m)
    x = rng.uniform(0, 0.9, m.nelem)

    def comp(xx):
        u = solve(assemble(m, xx, M, k0), ls).u[:, 0]
        return ls.dense_forces()[:, 0] @ u

    assert comp(np.minimum(x + 0.1, 1.0)) <= comp(x)

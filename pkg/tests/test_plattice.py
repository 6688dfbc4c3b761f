import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from ncfit.errors import LiftObstruction, NotAComplex
from ncfit.group_algebra import GroupRingElement, random_matrix
from ncfit.group_data import builtin
from ncfit.linalg import det, matmul, rank
from ncfit.plattice import (EquivariantHom, FinPModule, PLattice, annihilation_witness_check,
                            cohomology, equivariant_hom_lift, lattice_membership,
                            left_kernel_lattice, realify_matrix, snf_plocal, solve_integral, vp)

F = Fraction


def diag(D):
    return [D[i][i] for i in range(min(len(D), len(D[0])))]


def check_snf(M, p):
    U, D, V = snf_plocal(M, p)
    assert matmul(matmul(U, M), V) == D
    for i, row in enumerate(D):
        for j, x in enumerate(row):
            assert i == j or x == 0
    assert vp(det(U), p) == 0 and vp(det(V), p) == 0
    return D


# -- normal forms ------------------------------------------------------------------

def test_snf_examples():
    assert diag(check_snf([[3, 0], [0, 1]], 3)) == [1, 3]
    assert diag(check_snf([[3, 3], [3, 6]], 3)) == [3, 3]
    assert diag(check_snf([[2]], 3)) == [2]


@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=1, max_size=4),
       st.sampled_from([3, 5]))
def test_snf_identity(M, p):
    D = check_snf(M, p)
    vals = [vp(x, p) for x in diag(D) if x]
    assert vals == sorted(vals)
    assert len(vals) == rank([[F(x) for x in r] for r in M])


# -- membership ---------------------------------------------------------------------

def test_membership_examples():
    L = PLattice([[1, 0], [0, 1]], 3)
    assert lattice_membership([0, 0], L)[0]
    assert not lattice_membership([F(1, 3), 0], L)[0]
    ok, w = lattice_membership([2, 4], PLattice([[1, 2]], 3))
    assert ok and w == [2]


COEFFS = sorted({F(a, b) for a in range(-3, 4) for b in (1, 2, 3)})


@given(st.integers(0, 10 ** 6))
def test_membership_matches_brute_force(seed):
    rng = random.Random(seed)
    p = 3
    while True:
        gens = [[rng.randint(-3, 3) for _ in range(3)] for _ in range(3)]
        if rank([[F(x) for x in g] for g in gens]) == 3:
            break
    c = [rng.choice(COEFFS) for _ in range(3)]
    x = [sum(ci * g[j] for ci, g in zip(c, gens)) for j in range(3)]
    found = None
    for cand in product(COEFFS, repeat=3):
        if all(sum(ci * g[j] for ci, g in zip(cand, gens)) == x[j] for j in range(3)):
            found = cand
            break
    assert found is not None
    oracle = all(vp(ci, p) >= 0 for ci in found if ci)
    assert PLattice(gens, p).contains(x) == oracle


# -- cohomology ----------------------------------------------------------------------

def test_cohomology_examples():
    H = cohomology([[[3]]], 3, 1)
    assert H[1].is_zero() and H[2].free_rank == 0 and H[2].torsion_exponents == [1]
    H = cohomology([[[0]]], 3, 1)
    assert H[1].free_rank == 1 and H[2].free_rank == 1
    A = builtin("C2")
    R = realify_matrix([[GroupRingElement.basis(A.G, 0, 2)]], A.G)
    H = cohomology([R], 3, 1)
    assert H[1].is_zero() and H[2].is_zero()


def test_non_complex_raises():
    with pytest.raises(NotAComplex):
        cohomology([[[1]], [[1]]], 3)


@given(st.sampled_from(["C1", "C2", "C3", "S3"]), st.integers(1, 3), st.integers(0, 10 ** 6))
def test_euler_characteristic(name, d, seed):
    A = builtin(name)
    rng = random.Random(seed)
    M = random_matrix(A, rng, d, rng.randint(1, 3))
    R = realify_matrix(M, A.G)
    H = cohomology([R], 3, 1)
    assert len(R) - len(R[0]) == H[1].free_rank - H[2].free_rank


# -- equivariant lifts -------------------------------------------------------------------

def test_lift_full_source():
    A = builtin("C2")
    cols = [GroupRingElement(A.G, [2, -1])]
    phi = EquivariantHom.from_columns(A.G, cols)
    basis = [[F(1), F(0)], [F(0), F(1)]]
    psi = equivariant_hom_lift(basis, phi, 1, A.G, 1, 3)
    assert psi.columns() == cols


def test_lift_through_scaled_sublattice():
    G = builtin("C1").G
    phi = EquivariantHom(G, [[3]], [1], 1)
    psi = equivariant_hom_lift([[F(3)]], phi, 3, G, 1, 3)
    assert psi.columns() == [GroupRingElement(G, [1])]
    with pytest.raises(LiftObstruction):
        equivariant_hom_lift([[F(3)]], phi, 1, G, 1, 3)


@given(st.sampled_from(["C2", "C3", "S3"]), st.integers(0, 10 ** 6))
def test_lift_restricts_to_z_phi(name, seed):
    A = builtin(name)
    rng = random.Random(seed)
    d = 2
    M = random_matrix(A, rng, d, 1)
    Z = left_kernel_lattice(realify_matrix(M, A.G), 3)
    if not Z:
        return
    cols = [GroupRingElement(A.G, [rng.randint(-2, 2) for _ in range(A.n)]) for _ in range(d)]
    full = EquivariantHom.from_columns(A.G, cols)
    phi = EquivariantHom(A.G, Z, [full.functional(b) for b in Z], d)
    z = GroupRingElement(A.G, [rng.randint(-2, 2) for _ in range(A.n)])
    psi = equivariant_hom_lift(Z, phi, z, A.G, d, 3)
    assert psi.is_equivariant()
    for b in Z:
        assert psi(b) == phi(b) * z


def test_solve_integral():
    assert solve_integral([[F(3)]], [F(6)], 3) == [2]
    assert solve_integral([[F(3)]], [F(1)], 3) is None


# -- torsion annihilation -----------------------------------------------------------------

def test_annihilation_examples():
    G = builtin("C2").G
    T = FinPModule(3, [1, 2])
    assert annihilation_witness_check(GroupRingElement.basis(G, 0, 9), T)
    assert not annihilation_witness_check(GroupRingElement.one(G), FinPModule(3, [1]))
    T = FinPModule(3, [1], {1: [[-1]]})
    assert T.check_action(G)
    assert annihilation_witness_check(GroupRingElement(G, [1, 1]), T)


@given(st.integers(0, 10 ** 6), st.sampled_from([3, 5]))
def test_echelon_basis_is_canonical(seed, p):
    rng = random.Random(seed)
    gens = [[F(rng.randint(-6, 6), rng.choice([1, 2, 7])) for _ in range(4)] for _ in range(3)]
    # recombine with a matrix invertible over Z_(p) and add a redundant row
    a, b = rng.randint(-2, 2), rng.randint(-2, 2)
    other = [[gens[0][j] + a * gens[1][j] + b * gens[2][j] for j in range(4)],
             gens[1], gens[2],
             [gens[1][j] * (p + 1) - gens[2][j] for j in range(4)]]
    assert PLattice(gens, p).basis() == PLattice(other, p).basis()

import random

import pytest
from hypothesis import given, strategies as st

from helpers import gr_one, gr_zero, leibniz_det
from ncfit.errors import ShapeError, SingularTransport
from ncfit.exterior import (WedgeFrame, pair_with_frame, transport_wedge, wedge_coordinates,
                            wedge_pairing, wedge_pairing_opposite)
from ncfit.group_algebra import GroupRingElement, random_element, random_matrix
from ncfit.group_data import builtin

ABELIAN = ["C2", "C3", "C4", "C2xC2"]
NONABELIAN = ["S3", "D4", "Q8"]


def standard_frame(A, r):
    G = A.G
    return WedgeFrame(A, [[gr_one(G) if i == j else gr_zero(G) for j in range(r)]
                          for i in range(r)])


def random_homs(A, rng, r, d):
    return [[random_element(A, rng, -2, 2) for _ in range(d)] for _ in range(r)]


def test_c2_norm_element():
    A = builtin("C2")
    m = [GroupRingElement(A.G, [1, 1])]
    val = wedge_pairing(A, [m], [[gr_one(A.G)]])
    triv = next(i for i, c in enumerate(A.chars) if all(v == 1 for v in c))
    assert val.components[triv] == 2 and val.components[1 - triv] == 0


def test_dual_basis_gives_one():
    A = builtin("S3")
    basis = standard_frame(A, 3).basis
    assert wedge_pairing(A, basis, basis) == A.central_one()


def test_length_mismatch():
    A = builtin("C2")
    with pytest.raises(ShapeError):
        wedge_pairing(A, [[gr_one(A.G)]], [])


def test_coordinate_examples():
    A = builtin("S3")
    F = standard_frame(A, 2)
    assert wedge_coordinates(F.basis, F).coords == A.central_one()
    assert wedge_coordinates([F.basis[0], F.basis[0]], F).coords.is_zero()
    B = builtin("C1")
    w = wedge_coordinates([[3]], standard_frame(B, 1))
    assert list(w.coords.components) == [3]


def test_frame_rejects_dependent_basis():
    A = builtin("C2")
    with pytest.raises(ShapeError):
        WedgeFrame(A, [[gr_one(A.G), gr_zero(A.G)], [gr_one(A.G), gr_zero(A.G)]])


def test_transport_examples():
    B = builtin("C1")
    w = wedge_coordinates([[2]], standard_frame(B, 1))
    assert list(transport_wedge(w, [[5]]).coords.components) == [10]
    assert transport_wedge(w, [[1]]) == w
    with pytest.raises(SingularTransport):
        transport_wedge(w, [[0]])


@given(st.sampled_from(ABELIAN), st.integers(1, 3), st.integers(0, 10 ** 6))
def test_abelian_matches_classical_exterior_algebra(name, r, seed):
    A = builtin(name)
    rng = random.Random(seed)
    M = random_matrix(A, rng, r, r, -2, 2)
    phis = random_homs(A, rng, r, r)
    gram = [[sum((x * c for x, c in zip(m, phi)), gr_zero(A.G)) for phi in phis] for m in M]
    assert wedge_pairing(A, M, phis) == A.from_group_ring(leibniz_det(gram, A.G))
    assert wedge_coordinates(M, standard_frame(A, r)).coords == \
        A.from_group_ring(leibniz_det(M, A.G))


@given(st.sampled_from(NONABELIAN + ABELIAN), st.integers(1, 3), st.integers(0, 10 ** 6))
def test_pairing_routes_agree(name, r, seed):
    A = builtin(name)
    rng = random.Random(seed)
    M = random_matrix(A, rng, r, r, -2, 2)
    phis = random_homs(A, rng, r, r)
    direct = wedge_pairing(A, M, phis)
    assert wedge_pairing_opposite(A, M, phis) == direct
    w = wedge_coordinates(M, standard_frame(A, r))
    assert pair_with_frame(A, w, phis) == direct


@given(st.sampled_from(NONABELIAN + ABELIAN), st.integers(2, 3), st.integers(0, 10 ** 6))
def test_swapping_entries(name, r, seed):
    # swapping two entries swaps chi(1)-row blocks, giving the sign (-1)^chi(1)
    A = builtin(name)
    rng = random.Random(seed)
    M = random_matrix(A, rng, r, r, -2, 2)
    phis = random_homs(A, rng, r, r)
    S = [M[1], M[0]] + M[2:]
    sign = A.central([(-1) ** deg for deg in A.degrees])
    assert wedge_pairing(A, S, phis) == wedge_pairing(A, M, phis) * sign
    F = standard_frame(A, r)
    assert wedge_coordinates(S, F).coords == wedge_coordinates(M, F).coords * sign


@given(st.sampled_from(NONABELIAN + ABELIAN), st.integers(1, 3), st.integers(0, 10 ** 6))
def test_central_scalar_action(name, r, seed):
    A = builtin(name)
    rng = random.Random(seed)
    M = random_matrix(A, rng, r, r, -2, 2)
    phis = random_homs(A, rng, r, r)
    cls = rng.choice(A.G.classes)
    c = sum((GroupRingElement.basis(A.G, g) for g in cls), gr_zero(A.G)) + rng.randint(-2, 2)
    cz = A.from_group_ring(c)
    factor = A.central([z ** deg for z, deg in zip(cz.components, A.degrees)])
    scaled = [[c * x for x in M[0]]] + M[1:]
    assert wedge_pairing(A, scaled, phis) == wedge_pairing(A, M, phis) * factor


@given(st.sampled_from(NONABELIAN + ABELIAN), st.integers(1, 2), st.integers(0, 10 ** 6))
def test_transport_round_trip(name, r, seed):
    A = builtin(name)
    rng = random.Random(seed)
    w = wedge_coordinates(random_matrix(A, rng, r, r, -2, 2), standard_frame(A, r))
    iso = random_matrix(A, rng, r, r, -2, 2)
    if any(z == 0 for z in A.reduced_norm(iso).components):
        return
    there = transport_wedge(w, iso)
    assert transport_wedge(there, iso, direction="inverse") == w

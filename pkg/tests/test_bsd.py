import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bsd_oracles import dihedral_oracle, euler_template, normal, random_dihedral_data
from ncfit.bsd import (ArithmeticData, DihedralStructure, dihedral_congruence_check,
                       dihedral_Q, euler_factor, fixed_space_matrix, h_F_psi, height_matrix_nr,
                       key_product, log_resolvent, u_psi)
from ncfit.errors import ClassificationError, IncompleteData, ShapeError
from ncfit.group_data import builtin
from ncfit.plattice import FinPModule


def c1():
    return builtin("C1")


# -- Euler factors ----------------------------------------------------------------------

def test_euler_factor_examples():
    val, io = euler_factor(c1(), 0, 1, 2)
    assert list(val.components) == [Fraction(1, 4)] and io == val
    A = builtin("C2")
    val, _ = euler_factor(A, 1, 0, 5)
    assert list(val.components) == [Fraction(26, 25)] * 2
    with pytest.raises(ValueError):
        euler_factor(A, 1, 0, 1)


def test_euler_factor_customary_flag():
    val, _ = euler_factor(c1(), 0, 3, 5, customary=True)
    assert list(val.components) == [Fraction(1) - Fraction(3, 5) + Fraction(1, 5)]


@given(st.integers(2, 50), st.sampled_from(["C1", "C2", "C3", "C4", "C2xC2"]),
       st.integers(0, 10 ** 6))
def test_euler_factor_formula_faithful(Nv, name, seed):
    A = builtin(name)
    frob = random.Random(seed).randrange(A.n)
    val, _ = euler_factor(A, frob, 1 + Nv, Nv)
    for chi in range(A.k):
        cv = normal(A.chars[chi][frob])
        if isinstance(cv, Fraction) or isinstance(cv, int):
            assert val.components[chi] == euler_template(cv, 1 + Nv, Nv)


# -- resolvents and heights ----------------------------------------------------------

def test_log_resolvent_examples():
    assert list(log_resolvent(c1(), [[7]]).components) == [7]
    A = builtin("C2")
    assert log_resolvent(A, [[[0, 0]]]).is_zero()
    triv = 0 if all(v == 1 for v in A.chars[0]) else 1
    comps = log_resolvent(A, [[[5, 2]]]).components
    assert comps[triv] == 7 and comps[1 - triv] == 3
    with pytest.raises(ShapeError):
        log_resolvent(A, [[[1, 0], [0, 1]]])


@given(st.sampled_from(["C2", "S3"]), st.integers(0, 10 ** 6))
def test_log_resolvent_order_independent(name, seed):
    A = builtin(name)
    rng = random.Random(seed)
    M = [[[rng.randint(-3, 3) for _ in range(A.n)] for _ in range(3)] for _ in range(3)]
    perm = rng.sample(range(3), 3)
    P = [[M[perm[i]][perm[j]] for j in range(3)] for i in range(3)]
    assert log_resolvent(A, M) == log_resolvent(A, P)


def test_height_matrix_examples():
    assert list(height_matrix_nr(c1(), [[[Fraction(5, 3)]]]).components) == [Fraction(5, 3)]
    table = [[[2, 0, 0], [0, 3, 0], [0, 0, 7]]]
    assert list(height_matrix_nr(c1(), table).components) == [42]
    assert height_matrix_nr(c1(), []) == c1().central_one()


# -- key product ----------------------------------------------------------------------------

def basic_data(**kw):
    vals = dict(L=1, Omega=1, w=1, d=1, euler=[(0, 2, 2)], log_table=[[1]], height=1)
    vals.update(kw)
    return ArithmeticData(**vals)


def test_key_product_trivial():
    A = c1()
    rep = key_product(A, basic_data(L=4, euler=[(0, 1, 2)]), 0, 3)
    assert rep["value"] == ["1"] and rep.passed
    rep = key_product(A, basic_data(L=Fraction(4, 3), euler=[(0, 1, 2)]), 0, 3)
    assert rep["verdict"] == "fail" and rep["coefficient_p_contents"] == [-1]


def test_key_product_annihilation():
    A = c1()
    sha = FinPModule(3, [2])
    rep = key_product(A, basic_data(L=4, euler=[(0, 1, 2)]), 0, 3, sha=sha)
    assert not rep["annihilation"]["annihilates"] and not rep.passed
    rep = key_product(A, basic_data(L=36, euler=[(0, 1, 2)]), 0, 3, sha=sha)
    assert rep["annihilation"]["annihilates"] and rep.passed


def test_key_product_missing_data():
    with pytest.raises(IncompleteData) as err:
        key_product(c1(), ArithmeticData(L=1), 0, 3)
    assert "Omega" in str(err.value)
    with pytest.raises(IncompleteData):
        key_product(c1(), basic_data(), 0, 3, mode="classical-selmer")


@given(st.integers(0, 10 ** 6))
def test_key_product_place_order(seed):
    A = builtin("C3")
    rng = random.Random(seed)
    places = [(rng.randrange(3), rng.randint(-4, 4), rng.randint(2, 9)) for _ in range(3)]
    r1 = key_product(A, basic_data(euler=places), 1, 3)
    r2 = key_product(A, basic_data(euler=list(reversed(places))), 1, 3)
    assert r1["value"] == r2["value"]


@given(st.integers(0, 10 ** 6))
def test_bridge_reconciles_classical_and_dihedral(seed):
    # the classical-selmer product times the supplied bridging constant equals Q_psi
    A = builtin("S3")
    rng = random.Random(seed)
    S = DihedralStructure(A, 3)
    L = [Fraction(rng.randint(1, 9), rng.randint(1, 4)) for _ in range(A.k)]
    Om = [Fraction(rng.randint(1, 9)) for _ in range(A.k)]
    h = [Fraction(rng.randint(1, 9)) for _ in range(A.k)]
    Q = [dihedral_Q(S.branch[c], L[c], Om[c], h[c], 2) for c in range(A.k)]
    data = ArithmeticData(L=L, Omega=Om, w=1, d=1, height=h, tau_star=1, varrho=[])
    plain = key_product(A, data, 0, 3, mode="classical-selmer")["_value"]
    bridge = [Q[c] / plain.components[c] for c in range(A.k)]
    bridged = key_product(A, data, 0, 3, mode="classical-selmer", bridge=bridge)["_value"]
    assert [normal(c) for c in bridged.components] == Q


# -- dihedral data ----------------------------------------------------------------------

def test_dihedral_structure():
    A = builtin("S3")
    S = DihedralStructure(A, 3)
    assert sorted(S.branch.values()) == ["1", "eps", "induced"]
    assert A.G.labels[S.tau] == "s"
    D = DihedralStructure(builtin("D5"), 5)
    assert sorted(D.branch.values()).count("induced") == 2
    with pytest.raises(ClassificationError):
        DihedralStructure(builtin("C6"), 3)
    with pytest.raises(ClassificationError):
        DihedralStructure(builtin("Q8"), 3)


def test_dihedral_Q_and_u():
    assert dihedral_Q("1", 1, 1, 1, 1) == 1
    assert dihedral_Q("eps", 3, 2, 1, 1, sign_count=1) == Fraction(-3, 2)
    assert dihedral_Q("induced", 3, 2, 1, 1, u=-1) == Fraction(-3, 2)
    with pytest.raises(ClassificationError):
        dihedral_Q("other", 1, 1, 1, 1)
    assert u_psi([]) == 1
    assert u_psi([[[2]]]) == Fraction(-1, 2)


def test_h_F_psi_branches():
    A = builtin("S3")
    S = DihedralStructure(A, 3)
    assert h_F_psi(A, S.triv, 1, None) == 1
    assert h_F_psi(A, S.eps, 0, None, eps=S.eps) == 1
    # trivial character with i_Q = 0: |G|^-1 |sum_g <gQ,Q>|... expanded pairwise
    pairing = [1] * A.n
    assert h_F_psi(A, S.triv, 0, pairing) == A.n


def test_fixed_space_matrix():
    A = builtin("S3")
    rho = A.labels.index("rho")
    s = A.G.labels.index("s")
    M = fixed_space_matrix(A, rho, [s], s)
    assert M == [[1]]
    assert fixed_space_matrix(A, rho, [], 0) == [[1, 0], [0, 1]]


def test_s3_dihedral_example():
    A = builtin("S3")
    idx = {lab: A.labels.index(lab) for lab in ("triv", "sign", "rho")}
    Q = [0] * 3
    Q[idx["triv"]] = Fraction(1, 2)
    Q[idx["rho"]] = Fraction(1, 2)
    delta = [1, 1, 1]
    out = dihedral_congruence_check(A, 3, Q, 1, delta, 0)
    assert out["all_integral"]
    assert out["per_g"][0]["value"] == "2"
    assert [r["value"] for r in out["per_g"]] == \
        [str(v) for v in dihedral_oracle(A, 3, Q, 1, delta, 0)]
    Q = [0] * 3
    Q[idx["triv"]] = Fraction(1, 3)
    out = dihedral_congruence_check(A, 3, Q, 1, delta, 0)
    assert out["failing"] == list(range(6))


@given(st.sampled_from([("S3", 3), ("D5", 5), ("C2", 3)]), st.booleans(),
       st.integers(0, 10 ** 6))
def test_dihedral_check_matches_group_ring_oracle(group, integral, seed):
    name, p = group
    A = builtin(name)
    Q, t, delta, i_Q = random_dihedral_data(A, p, random.Random(seed), integral)
    out = dihedral_congruence_check(A, p, Q, t, delta, i_Q)
    oracle = dihedral_oracle(A, p, Q, t, delta, i_Q)
    assert [r["value"] for r in out["per_g"]] == [str(v) for v in oracle]


@given(st.sampled_from([("S3", 3), ("D5", 5)]), st.integers(0, 10 ** 6))
def test_integral_inputs_pass_everywhere(group, seed):
    name, p = group
    A = builtin(name)
    rng = random.Random(seed)
    Q = [0] * A.k
    for orbit in A.galois_orbits():
        v = rng.randint(-9, 9)
        for c in orbit:
            Q[c] = v
    delta = [rng.randint(-3, 3) for _ in range(A.k)]
    assert dihedral_congruence_check(A, p, Q, rng.randint(1, 5), delta,
                                     rng.randint(0, 1))["all_integral"]

"""Admissible complexes, their idempotents, trivialisations and
characteristic elements.

A complex is a list of matrices over R[G] (rows = basis of the source, maps
x -> x M).  Two-term complexes F^1 -> F^2 sit in degrees 1, 2; three-term
complexes D^0 -> D^1 -> D^2 in degrees 0, 1, 2.

Rational questions are answered one irreducible character at a time.  For a
character chi of degree k the module R[G]^d becomes E^(k d) (the row space of
rho_chi applied to module elements) and a matrix M becomes rho_chi(M).  The
rank of a chi-component is (dimension)/k.
"""

import random
from fractions import Fraction

from .errors import (InvalidTrivialisation, NotAComplex, NotSurjective, ShapeError)
from .group_algebra import CentralElement, GroupRingElement
from .linalg import (complement_basis, det, identity, inverse, matmul, rank, row_basis,
                     solve_left, left_kernel)
from .plattice import (PLattice, action_matrices, cohomology, realify_matrix,
                       submodule_lattice)


def gr_matrix(A, M):
    return [[GroupRingElement.coerce(A.G, x) for x in row] for row in M]


def gr_matmul(A, X, Y):
    if not X:
        return []
    if len(X[0]) != len(Y):
        raise ShapeError("matrix sizes do not match")
    cols = len(Y[0]) if Y else 0
    out = []
    for row in X:
        r = []
        for j in range(cols):
            s = GroupRingElement.zero(A.G)
            for k, x in enumerate(row):
                if x and Y[k][j]:
                    s = s + x * Y[k][j]
            r.append(s)
        out.append(r)
    return out


def gr_is_zero(M):
    return all(x.is_zero() for row in M for x in row)


def zero_gr_matrix(A, r, c):
    return [[GroupRingElement.zero(A.G) for _ in range(c)] for _ in range(r)]


def identity_gr_matrix(A, n):
    return [[GroupRingElement.one(A.G) if i == j else GroupRingElement.zero(A.G)
             for j in range(n)] for i in range(n)]


def morita_rows(A, chi, elems):
    """Rows of rho_chi applied to the module element (tuple of group-ring elements)."""
    return A.rho_matrix(chi, [list(elems)])


class AdmissibleComplex:
    """Complex of finitely generated free R[G]-modules.

    ``support`` optionally restricts the complex to R[G]e for a central
    idempotent e: rational computations then only consider characters in
    the support of e and reduced norms vanish outside it.
    """

    def __init__(self, A, differentials, p, start_degree=None, support=None, dims=None):
        self.A = A
        self.p = p
        self.diffs = [gr_matrix(A, M) for M in differentials]
        if dims is None:
            if not self.diffs or not self.diffs[0]:
                raise ShapeError("term ranks required when a differential is empty")
            dims = [len(self.diffs[0])] + [len(M[0]) if M else 0 for M in self.diffs]
        self.dims = list(dims)
        for i, M in enumerate(self.diffs):
            if len(M) != self.dims[i] or any(len(r) != self.dims[i + 1] for r in M):
                raise ShapeError(f"differential {i} has the wrong shape")
        if start_degree is None:
            start_degree = 1 if len(self.diffs) == 1 else 0
        self.start = start_degree
        self.support = support
        self.support_chis = (list(range(A.k)) if support is None else support.support())
        for a, b in zip(self.diffs, self.diffs[1:]):
            if a and b and not gr_is_zero(gr_matmul(A, a, b)):
                raise NotAComplex("consecutive differentials do not compose to zero")
        self._morita = {}
        self._chi_dims = {}
        self._integral = None

    @property
    def degrees(self):
        return list(range(self.start, self.start + len(self.dims)))

    def term_index(self, degree):
        return degree - self.start

    def is_two_term(self):
        return len(self.diffs) == 1

    # -- rational, per character -------------------------------------------
    def morita(self, chi):
        if chi not in self._morita:
            self._morita[chi] = [self.A.rho_matrix(chi, M) if M else [] for M in self.diffs]
        return self._morita[chi]

    def chi_space_dims(self, chi):
        """Dimensions of H^i in the chi-Morita complex, by degree."""
        if chi not in self._chi_dims:
            k = self.A.degrees[chi]
            mats = self.morita(chi)
            ranks = [rank(M) if M else 0 for M in mats]
            out = {}
            for idx, deg in enumerate(self.degrees):
                dim = k * self.dims[idx]
                r_out = ranks[idx] if idx < len(mats) else 0
                r_in = ranks[idx - 1] if idx > 0 else 0
                out[deg] = dim - r_out - r_in
            self._chi_dims[chi] = out
        return self._chi_dims[chi]

    def chi_rank(self, degree, chi):
        return Fraction(self.chi_space_dims(chi).get(degree, 0), self.A.degrees[chi])

    # -- integral ----------------------------------------------------------
    def realified(self):
        return [realify_matrix(M, self.A.G) if M else [] for M in self.diffs]

    def integral_cohomology(self):
        if self._integral is None:
            G = self.A.G
            acts = {i: action_matrices(G, d) for i, d in enumerate(self.dims)}
            H = cohomology(self.realified(), self.p, self.start,
                           dims=[d * G.order for d in self.dims], action=acts)
            self._integral = H
        return self._integral


def check_admissible(C):
    """Report on the four admissibility conditions, each with a witness."""
    rep = {}
    rep["ad1"] = {"holds": True, "witness": {"term_ranks": C.dims, "degrees": C.degrees}}
    bad = []
    for chi in C.support_chis:
        r1, r2 = C.chi_rank(1, chi), C.chi_rank(2, chi)
        if r1 != r2:
            bad.append({"character": C.A.labels[chi], "rank_H1": str(r1), "rank_H2": str(r2)})
    rep["ad2"] = {"holds": not bad, "witness": bad}
    H = C.integral_cohomology()
    off = []
    for deg, Hd in H.items():
        if deg not in (1, 2) and not Hd.is_zero():
            off.append({"degree": deg, **Hd.describe()})
    rep["ad3"] = {"holds": not off, "witness": off}
    tors = []
    if 1 in H and H[1].torsion_exponents:
        tors = [{"generator": [str(x) for x in g], "order": f"{C.p}^{k}"}
                for g, k in zip(H[1].torsion_generators, H[1].torsion_exponents)]
    rep["ad4"] = {"holds": not tors, "witness": tors}
    rep["admissible"] = all(rep[k]["holds"] for k in ("ad1", "ad2", "ad3", "ad4"))
    rep["cohomology"] = {str(d): Hd.describe() for d, Hd in H.items()}
    return rep


def annihilation_idempotent(C):
    """e_0: characters on which H^1 vanishes rationally (within the support)."""
    comps = [1 if (chi in C.support_chis and C.chi_space_dims(chi).get(1, 0) == 0) else 0
             for chi in range(C.A.k)]
    return CentralElement(C.A, comps)


def rank_idempotents(C, a):
    """(e_a, e_(a)) from the chi-ranks of H^2."""
    ea, eab = [], []
    for chi in range(C.A.k):
        r = C.chi_rank(2, chi) if chi in C.support_chis else None
        ea.append(1 if r is not None and r == a else 0)
        eab.append(1 if r is not None and r.denominator == 1 and r >= a else 0)
    return CentralElement(C.A, ea), CentralElement(C.A, eab)


def rank_profile(C):
    return {C.A.labels[chi]: str(C.chi_rank(2, chi)) for chi in C.support_chis}


# ---------------------------------------------------------------------------
# surjections H^2(C) -> Y

class Surjection:
    """pi: H^2(C) -> Y = R[G]^s / im(relations), induced by x -> x P on F^last."""

    def __init__(self, A, P, relations):
        self.A = A
        self.P = gr_matrix(A, P)
        self.relations = gr_matrix(A, relations) if relations else []
        self.s = len(self.P[0]) if self.P else (len(relations[0]) if relations else 0)

    @classmethod
    def identity(cls, C):
        d = C.dims[-1]
        return cls(C.A, identity_gr_matrix(C.A, d), C.diffs[-1])

    def relation_lattice(self, p):
        G = self.A.G
        R = realify_matrix(self.relations, G) if self.relations else []
        return submodule_lattice(G, R, p, self.s) if R else PLattice([], p, self.s * G.order,
                                                                      check=False)

    def check(self, C):
        """Well-definedness on H^2 and surjectivity, over Z_(p)."""
        A, G, p = self.A, self.A.G, C.p
        if len(self.P) != C.dims[-1]:
            raise ShapeError("surjection matrix rows must match the last term")
        rel = self.relation_lattice(p)
        last = C.diffs[-1]
        if last:
            img = realify_matrix(gr_matmul(A, last, self.P), G)
            for r in img:
                if not rel.contains(r):
                    raise NotSurjective("map does not factor through H^2 (boundaries not sent"
                                        " into the relations)")
        gens = realify_matrix(self.P, G) + (realify_matrix(self.relations, G)
                                             if self.relations else [])
        full = submodule_lattice(G, gens, p, self.s)
        n = self.s * G.order
        for i in range(n):
            e = [Fraction(int(i == j)) for j in range(n)]
            if not full.contains(e):
                raise NotSurjective(f"basis vector {i} of the target is not hit")
        return True

    def torsion_module(self, p):
        """(Y_pi)_tor as a FinPModule, with free rank."""
        from .fitting import Presentation
        if not self.relations:
            from .plattice import FinPModule
            return FinPModule(p, []), self.s
        # pad relations so that rows >= columns for the presentation class
        rel = [list(r) for r in self.relations]
        while len(rel) < self.s:
            rel.append([GroupRingElement.zero(self.A.G)] * self.s)
        H = Presentation(self.A, rel, p).presented_module()
        return H.torsion, H.free_rank

    def y_dim(self, chi):
        k = self.A.degrees[chi]
        rel = self.A.rho_matrix(chi, self.relations) if self.relations else []
        return k * self.s - (rank(rel) if rel else 0)


def surjection_idempotent(C, pi):
    """e_pi: characters where ker(pi) vanishes rationally."""
    pi.check(C)
    comps = []
    for chi in range(C.A.k):
        if chi not in C.support_chis:
            comps.append(0)
            continue
        comps.append(1 if pi.y_dim(chi) == C.chi_space_dims(chi).get(2, 0) else 0)
    return CentralElement(C.A, comps)


# ---------------------------------------------------------------------------
# trivialisations and characteristic elements

class Trivialisation:
    """t: H^2 -> H^1 given by a group-ring matrix T: F^last -> F^1.

    T must satisfy T * delta^1 = 0 (image in the cocycles) and send the
    boundaries of the last term into the coboundaries of F^1.
    """

    def __init__(self, A, T):
        self.A = A
        self.T = gr_matrix(A, T)

    def chi_matrix(self, chi):
        return self.A.rho_matrix(chi, self.T)


def _last_and_mid(C):
    if C.is_two_term():
        return None, C.diffs[0]
    return C.diffs[0], C.diffs[1]


def _chi_data(C, chi):
    """Per-character matrices (d0 or None, d1) and term dims."""
    mats = C.morita(chi)
    k = C.A.degrees[chi]
    if C.is_two_term():
        return None, mats[0], 0, k * C.dims[0], k * C.dims[1]
    return mats[0], mats[1], k * C.dims[0], k * C.dims[1], k * C.dims[2]


def _std(n):
    return identity(n)


def _chi_lambda_det(C, chi, t):
    """det of lambda_t on the chi-Morita complex (see characteristic_element)."""
    d0, d1, a0, a1, a2 = _chi_data(C, chi)
    if a1 != a0 + a2:
        raise InvalidTrivialisation(f"Euler characteristic is nonzero on {C.A.labels[chi]}")
    d0rows = [list(r) for r in d0] if d0 else []
    if d0rows and rank(d0rows) < len(d0rows):
        raise InvalidTrivialisation(f"first differential not injective on {C.A.labels[chi]}")
    K = left_kernel(d1) if a2 else _std(a1)
    Hp = complement_basis(d0rows, K) if K else []
    W = complement_basis(K, _std(a1))
    d1rows = [list(r) for r in d1] if a2 else []
    C2 = complement_basis(d1rows, _std(a2)) if a2 else []
    if len(C2) != len(Hp):
        raise InvalidTrivialisation(f"H^1 and H^2 differ in dimension on {C.A.labels[chi]}")
    rows = []
    for i in range(len(d0rows)):
        rows.append([Fraction(int(i == j)) for j in range(a0)] + [Fraction(0)] * a2)
    if Hp:
        if t is None:
            raise InvalidTrivialisation("a trivialisation is needed where H^1 is nonzero")
        Tm = t.chi_matrix(chi)
        coeff = []
        for c in C2:
            img = matmul([c], Tm)[0]
            if d1rows and any(matmul([img], d1)[0]):
                raise InvalidTrivialisation("trivialisation does not land in the cocycles")
            sol = solve_left(Hp + d0rows, img)
            if sol is None:
                raise InvalidTrivialisation("trivialisation does not land in the cocycles")
            coeff.append(sol[:len(Hp)])
        try:
            Tinv = inverse(coeff)
        except ZeroDivisionError:
            raise InvalidTrivialisation(
                f"trivialisation is not an isomorphism on {C.A.labels[chi]}") from None
        for j in range(len(Hp)):
            v = [Fraction(0)] * a2
            for c_idx, c in enumerate(C2):
                f = Tinv[j][c_idx]
                if f:
                    v = [x + f * y for x, y in zip(v, c)]
            rows.append([Fraction(0)] * a0 + v)
    for w in W:
        rows.append([Fraction(0)] * a0 + matmul([w], d1)[0])
    B = d0rows + Hp + W
    return det(rows) / det(B)


def check_trivialisation(C, t):
    """Validate the cocycle conditions for T and invertibility per character."""
    A = C.A
    d0, d1 = _last_and_mid(C)
    T = t.T
    if len(T) != C.dims[-1] or any(len(r) != C.dims[-2] for r in T):
        raise InvalidTrivialisation("trivialisation matrix has the wrong shape")
    if not gr_is_zero(gr_matmul(A, T, d1)):
        raise InvalidTrivialisation("T * delta^1 is not zero")
    bt = gr_matmul(A, d1, T)
    if d0 is None:
        if not gr_is_zero(bt):
            raise InvalidTrivialisation("boundaries are not sent to zero")
    for chi in C.support_chis:
        _chi_lambda_det(C, chi, t)
        if d0 is not None:
            img0 = A.rho_matrix(chi, d0)
            for r in A.rho_matrix(chi, bt):
                if any(r) and solve_left(img0, r) is None:
                    raise InvalidTrivialisation("boundaries not sent into coboundaries")
    return True


def _equivariant_average(G, Pmat):
    """(1/|G|) sum_g P_g^{-1} Pmat P_g for a realified square matrix."""
    n = G.order
    dim = len(Pmat)
    d = dim // n
    acc = [[Fraction(0)] * dim for _ in range(dim)]
    for g in range(n):
        gi = G.inverses[g]
        # x -> g^{-1} (Pmat (g x)) ; rows index basis (i,h)
        for i in range(d):
            for h in range(n):
                src = i * n + G.table[g][h]
                row = Pmat[src]
                dst_row = acc[i * n + h]
                for idx, c in enumerate(row):
                    if c:
                        j, k = divmod(idx, n)
                        dst_row[j * n + G.table[gi][k]] += c
    return [[x / n for x in r] for r in acc]


def _gr_from_realified(G, R, rows_d, cols_d):
    """Group-ring matrix of an equivariant realified map (rows (i,e))."""
    n = G.order
    out = []
    for i in range(rows_d):
        row = R[i * n]
        out.append([GroupRingElement(G, row[j * n:(j + 1) * n]) for j in range(cols_d)])
    return out


def _projection_with_kernel(kernel_rows, dim):
    """Rational projection of Q^dim with the given kernel (a row space)."""
    Kb = row_basis(kernel_rows) if kernel_rows else []
    comp = complement_basis(Kb, identity(dim))
    basis = Kb + comp
    # x = sum c_i basis_i ; projection keeps the complement part
    Binv = inverse(basis)
    keep = [[Fraction(0)] * dim for _ in range(dim)]
    for i in range(len(Kb), dim):
        keep[i][i] = Fraction(1)
    return matmul(matmul(Binv, keep), basis)


def _projection_onto(sub_rows, dim):
    """Rational projection of Q^dim onto a subspace (identity on it)."""
    Sb = row_basis(sub_rows) if sub_rows else []
    comp = complement_basis(Sb, identity(dim))
    basis = Sb + comp
    Binv = inverse(basis)
    keep = [[Fraction(0)] * dim for _ in range(dim)]
    for i in range(len(Sb)):
        keep[i][i] = Fraction(1)
    return matmul(matmul(Binv, keep), basis)


def rational_trivialisation(C, seed=0, tries=20):
    """A random rational trivialisation T = P2 * T0 * Q1.

    P2 is an equivariant projection of the last term killing the boundaries,
    T0 a random integral group-ring matrix and Q1 an equivariant projection
    of F^1 onto the cocycles.  Retries with new randomness until the
    induced map is invertible on every character of the support.
    """
    A, G = C.A, C.A.G
    n = G.order
    d0, d1 = _last_and_mid(C)
    dmid = C.dims[-2]
    dlast = C.dims[-1]
    R1 = realify_matrix(d1, G)
    P2 = _equivariant_average(G, _projection_with_kernel(R1, dlast * n))
    Kmid = left_kernel(R1) if R1 else identity(dmid * n)
    Q1 = _equivariant_average(G, _projection_onto(Kmid, dmid * n))
    P2g = _gr_from_realified(G, P2, dlast, dlast)
    Q1g = _gr_from_realified(G, Q1, dmid, dmid)
    rng = random.Random(seed)
    last_err = None
    for _ in range(tries):
        T0 = [[GroupRingElement(G, [rng.randint(-2, 2) for _ in range(n)])
               for _ in range(dmid)] for _ in range(dlast)]
        T = gr_matmul(A, gr_matmul(A, P2g, T0), Q1g)
        t = Trivialisation(A, T)
        try:
            check_trivialisation(C, t)
            return t
        except InvalidTrivialisation as e:
            last_err = e
    raise InvalidTrivialisation(f"no invertible trivialisation found: {last_err}")


class CharElement:
    """Characteristic element with a record of how it was built."""

    def __init__(self, value, provenance):
        self.value = value
        self.provenance = provenance


def characteristic_element(C, t=None):
    """Characteristic element of (C, t) as a CentralElement.

    For each character chi in the support, lambda: V^1 -> V^0 + V^2 is the
    isomorphism that inverts delta^0 on its image, applies delta^1 on a
    complement of the cocycles and sends a complement of the coboundaries in
    the cocycles through t^{-1} followed by a section of V^2 -> H^2.  The
    determinant of lambda does not depend on the complements or the section;
    its value at chi is the chi-component.  Components outside the support
    are zero.
    """
    if t is not None:
        check_trivialisation(C, t)
    comps = []
    for chi in range(C.A.k):
        if chi not in C.support_chis:
            comps.append(0)
            continue
        comps.append(_chi_lambda_det(C, chi, t))
    L = CentralElement(C.A, comps)
    if any(not L.components[c] for c in C.support_chis):
        raise InvalidTrivialisation("characteristic element has a zero component")
    prov = {"construction": "det of lambda_t per character",
            "trivialisation": "none" if t is None else "supplied",
            "support": [C.A.labels[c] for c in C.support_chis]}
    return CharElement(L, prov)


def restrict_complex(C, e):
    """The same differentials regarded over R[G]e."""
    return AdmissibleComplex(C.A, C.diffs, C.p, C.start, support=e, dims=C.dims)


def char_component_compat(C, t=None, representative=None, lattice=None):
    """Compare e_0 * L(C, t) with the characteristic element of e_0 C.

    ``representative`` may give another complex (same shape) representing
    e_0 C, for example C with its differential multiplied by invertible
    matrices; by default C itself restricted to e_0 is used.  The ratio on
    e_0 components is tested with unit_reduced_norm_test.
    """
    A = C.A
    e0 = annihilation_idempotent(C)
    if e0.is_zero():
        return {"e0": [0] * A.k, "vacuous": True, "match": True, "unit_test": None}
    L = characteristic_element(C, t).value
    base = representative if representative is not None else C
    C0 = restrict_complex(base, e0)
    L0 = characteristic_element(C0, None).value
    ratio_comps = []
    for chi in range(A.k):
        if e0.components[chi]:
            ratio_comps.append(L.components[chi] / L0.components[chi])
        else:
            ratio_comps.append(1)
    ratio = CentralElement(A, ratio_comps)
    test = A.unit_reduced_norm_test(ratio, C.p, lattice)
    exact_match = all(r == 1 for r in ratio.components)
    return {"e0": [str(c) for c in e0.components], "vacuous": False,
            "match": test["verdict"] in ("exact-pass", "necessary-pass"),
            "exact_match": exact_match, "ratio": [str(c) for c in ratio.components],
            "unit_test": test,
            "L_e0": [str(c) for c in (L * e0).components],
            "L0": [str(c) for c in L0.components]}

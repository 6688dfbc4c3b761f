"""Instance generators and independent oracles shared by the tests."""

from fractions import Fraction
from itertools import combinations, permutations

from ncfit.complexes import AdmissibleComplex, gr_matmul
from ncfit.group_algebra import GroupRingElement, random_element, random_matrix
from ncfit.linalg import rank
from ncfit.plattice import left_kernel_lattice, realify_matrix, unrealify


def gr_one(G):
    return GroupRingElement.one(G)


def gr_zero(G):
    return GroupRingElement.zero(G)


def perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def leibniz_det(M, G):
    """Determinant over a commutative group ring by the Leibniz formula."""

    n = len(M)
    total = gr_zero(G)
    if n == 0:
        return gr_one(G)
    for perm in permutations(range(n)):
        term = gr_one(G)
        for i in range(n):
            term = term * M[i][perm[i]]
        total = total + term * perm_sign(perm)
    return total


def classical_fitting_generators(M, G):
    """All maximal minors of a d x d' matrix over a commutative group ring."""
    d, dp = len(M), len(M[0])
    out = []
    for rows in combinations(range(d), dp):
        out.append(leibniz_det([M[r] for r in rows], G))
    return out


def unimodular(A, rng, d):
    """Random product of elementary matrices over Z[G]."""
    G = A.G
    M = [[gr_one(G) if i == j else gr_zero(G) for j in range(d)] for i in range(d)]
    for _ in range(2 * d):
        if d < 2:
            break
        i, j = rng.sample(range(d), 2)
        c = random_element(A, rng, -1, 1)
        M = [[M[r][s] + (c * M[j][s] if r == i else gr_zero(G)) for s in range(d)]
             for r in range(d)]
    return M


def engineered_complex(A, p, rng, a, tors_exps, extra=1):
    """Two-term complex U diag(p^e.., 1+p.., 0 x a) V with known H^2.

    Returns (C, U, V, d).  H^2 has free rank a and torsion Z/p^e for each e.
    """
    G = A.G
    d = a + len(tors_exps) + extra
    diag = [GroupRingElement.basis(G, 0, p ** e) for e in tors_exps]
    diag += [gr_one(G) + GroupRingElement.basis(G, 0, p) for _ in range(extra)]
    diag += [gr_zero(G)] * a
    Dm = [[diag[i] if i == j else gr_zero(G) for j in range(d)] for i in range(d)]
    U, V = unimodular(A, rng, d), unimodular(A, rng, d)
    M = gr_matmul(A, gr_matmul(A, U, Dm), V)
    return AdmissibleComplex(A, [M], p), U, V, d


def random_three_term(A, p, rng, a, d, killer=None, tries=50):
    """Random complex of ranks (a, d, d - a) with injective first map."""
    G = A.G
    n = G.order
    d1 = random_matrix(A, rng, d, d - a)
    if killer is not None and d - a > 0:
        d1 = [[x * killer if j == 0 else x for j, x in enumerate(r)] for r in d1]
    if d - a:
        K = left_kernel_lattice(realify_matrix(d1, G), p)
    else:
        K = [[Fraction(int(i == j)) for j in range(d * n)] for i in range(d * n)]
    for _ in range(tries):
        rows = []
        for _ in range(a):
            v = [Fraction(0)] * (d * n)
            for kr in K:
                c = rng.randint(-2, 2)
                if c:
                    v = [x + c * y for x, y in zip(v, kr)]
            rows.append(unrealify(v, G))
        D = AdmissibleComplex(A, [rows if a else [], d1], p, 0, dims=[a, d, d - a])
        if all(rank(A.rho_matrix(chi, rows)) == A.degrees[chi] * a for chi in range(A.k)) \
                if a else True:
            return D
    return None


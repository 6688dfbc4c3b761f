"""Whitehead-order estimates and higher non-commutative Fitting invariants.

Lattices of central elements are kept in class-coefficient coordinates: a
Galois-stable central element is the vector of its group-ring coefficients
indexed by conjugacy classes.  Every lattice carries a flag saying how much
it can be trusted:

EXACT                    the lattice is the true object
APPROXIMATE-FROM-BELOW   generated by a finite part of an infinite set
LOWER-BOUND              a partial sum of lattices (total invariants)
"""

import random
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import combinations, product

from .errors import NotFiner, PresentationMismatch, RangeError, ShapeError
from .group_algebra import CentralElement, GroupRingElement
from .plattice import (PLattice, annihilation_witness_check, cohomology, realify_matrix,
                       submodule_lattice)

EXACT = "EXACT"
FROM_BELOW = "APPROXIMATE-FROM-BELOW"
LOWER_BOUND = "LOWER-BOUND"
INCONCLUSIVE = "INCONCLUSIVE"

_RANK = {EXACT: 0, FROM_BELOW: 1, LOWER_BOUND: 2}


def weaker(*flags):
    return max(flags, key=lambda f: _RANK.get(f, 3))


class CentralLattice:
    """Z_(p)-lattice of Galois-stable central elements."""

    def __init__(self, A, p, generators=(), flag=EXACT, note=None):
        self.A = A
        self.p = p
        self.flag = flag
        self.note = note
        gens = []
        for z in generators:
            if z.is_zero():
                continue
            if not z.is_galois_stable():
                raise ValueError("lattice generators must be Galois-stable")
            gens.append(z.class_vector())
        self._lat = PLattice(gens, p, len(A.G.classes), check=False)

    @classmethod
    def _from_vectors(cls, A, p, vecs, flag, note=None):
        L = cls(A, p, (), flag, note)
        L._lat = PLattice(vecs, p, len(A.G.classes), check=False)
        return L

    def basis_vectors(self):
        return self._lat.basis()

    def basis(self):
        return [self.A.central_from_class_vector(v) for v in self._lat.basis()]

    @property
    def rank(self):
        return self._lat.rank

    def contains(self, z):
        if z.is_zero():
            return True
        if not z.is_galois_stable():
            return False
        return self._lat.contains(z.class_vector())

    def __add__(self, other):
        return CentralLattice._from_vectors(
            self.A, self.p, self._lat.basis() + other._lat.basis(), weaker(self.flag, other.flag))

    def __mul__(self, other):
        if isinstance(other, CentralElement):
            gens = [b * other for b in self.basis()]
            return CentralLattice(self.A, self.p, gens, self.flag)
        gens = [x * y for x in self.basis() for y in other.basis()]
        return CentralLattice(self.A, self.p, gens, weaker(self.flag, other.flag))

    def project(self, e):
        return self * e

    def __eq__(self, other):
        return isinstance(other, CentralLattice) and self._lat == other._lat

    def is_zero(self):
        return self.rank == 0

    def to_dict(self):
        from .scalars import format_rational
        return {"flag": self.flag, "rank": self.rank,
                "basis_components": [[str(c) for c in b.components] for b in self.basis()],
                "basis_class_coefficients": [[format_rational(x) for x in v]
                                             for v in self._lat.basis()]}


# ---------------------------------------------------------------------------
# Whitehead order

_XI_CACHE = {}


def default_entry_pool(A):
    G = A.G
    pool = [GroupRingElement.zero(G)] + [GroupRingElement.basis(G, g) for g in range(A.n)]
    pool += [GroupRingElement.basis(G, g) + GroupRingElement.one(G) for g in range(1, A.n)]
    pool += [GroupRingElement.basis(G, g) - GroupRingElement.one(G) for g in range(1, A.n)]
    return pool


def _sort_key(x):
    return tuple((c.numerator, c.denominator) if isinstance(c, Fraction) else (str(c), 0)
                 for c in x.coeffs)


def _nr_batch(args):
    A, mats = args
    return [A.reduced_norm(M).class_vector() for M in mats]


def _sample_matrices(pool, size, count, seed):
    rng = random.Random(seed)
    return [[[rng.choice(pool) for _ in range(size)] for _ in range(size)] for _ in range(count)]


def whitehead_lattice_estimate(A, p, entry_pool=None, size_bound=3, stall_rounds=3,
                               samples=24, seed=0, jobs=1, max_rounds=40):
    """Lattice generated by reduced norms of matrices over Z_(p)[G].

    Abelian groups give the exact answer Z_(p)[G].  Otherwise the lattice
    grows in rounds: 1x1 norms of the pool, then seeded random square
    matrices of sizes 2..size_bound with entries from the (canonically
    sorted) pool, closed under products; enumeration stops after
    ``stall_rounds`` rounds without growth.  The result is flagged
    APPROXIMATE-FROM-BELOW and records the rounds used.
    """
    pool = sorted(entry_pool if entry_pool is not None else default_entry_pool(A), key=_sort_key)
    key = (A.name, A.n, p, tuple(_sort_key(x) for x in pool), size_bound, stall_rounds,
           samples, seed, max_rounds)
    if key in _XI_CACHE:
        return _XI_CACHE[key]
    ncls = len(A.G.classes)
    if A.is_abelian():
        vecs = [[Fraction(int(i == j)) for j in range(ncls)] for i in range(ncls)]
        L = CentralLattice._from_vectors(A, p, vecs, EXACT, note="abelian: equals Z_(p)[G]")
        _XI_CACHE[key] = L
        return L
    vecs = [A.reduced_norm([[x]]).class_vector() for x in pool]
    lat = PLattice(vecs, p, ncls, check=False)
    basis = lat.basis()
    history = [len(basis)]
    stall = 0
    rounds = 0
    while stall < stall_rounds and rounds < max_rounds:
        rounds += 1
        batches = []
        for size in range(2, size_bound + 1):
            batches.append(_sample_matrices(pool, size, samples, f"{seed}-{rounds}-{size}"))
        if jobs > 1:
            try:
                with ProcessPoolExecutor(max_workers=jobs) as ex:
                    results = list(ex.map(_nr_batch, [(A, b) for b in batches]))
            except Exception:
                results = [_nr_batch((A, b)) for b in batches]
        else:
            results = [_nr_batch((A, b)) for b in batches]
        new = [v for r in results for v in r]
        # product closure of the current basis
        cur = [A.central_from_class_vector(v) for v in basis]
        for x in cur:
            for y in cur:
                new.append((x * y).class_vector())
        lat = PLattice(basis + new, p, ncls, check=False)
        nb = lat.basis()
        if nb == basis:
            stall += 1
        else:
            stall = 0
        basis = nb
        history.append(len(basis))
    L = CentralLattice._from_vectors(
        A, p, basis, FROM_BELOW,
        note=f"{rounds} rounds, size bound {size_bound}, stall {stall_rounds}, seed {seed}")
    L.history = history
    _XI_CACHE[key] = L
    return L


def denominator_witnesses(A, p, delta=None):
    """Elements |G| * sum_chi chi(1)^{-1} delta_chi e_chi (plus 1 if abelian).

    Returns a list of (CentralElement, note) pairs.
    """
    if delta is None:
        delta = [1] * A.k
    comps = [Fraction(A.n, A.degrees[c]) * delta[c] for c in range(A.k)]
    out = [(CentralElement(A, comps), "group-order witness")]
    if A.is_abelian():
        out.append((A.central_one(), "abelian candidate 1 (checked against direct action)"))
    return out


# ---------------------------------------------------------------------------
# Fitting invariants of matrices

def _hom_columns(A, phi, d):
    """Column values phi(b_i), i < d, of a hom given as columns or EquivariantHom."""
    if hasattr(phi, "columns"):
        cols = phi.columns()
    else:
        cols = [GroupRingElement.coerce(A.G, c) for c in phi]
    if len(cols) != d:
        raise ShapeError(f"homomorphism has {len(cols)} values, expected {d}")
    return cols


def dual_basis(A, d):
    """The coordinate functionals b_k^* on R[G]^d as column lists."""
    G = A.G
    return [[GroupRingElement.one(G) if i == k else GroupRingElement.zero(G) for i in range(d)]
            for k in range(d)]


def column_tuples(dprime, t, allow_repeats=False):
    if allow_repeats:
        from itertools import combinations_with_replacement
        return combinations_with_replacement(range(dprime), t)
    return combinations(range(dprime), t)


def modified_matrix(M, J, cols):
    """M(J, phi): column J[a] replaced by the values of the a-th hom.

    With repeated indices a later hom overwrites an earlier one.
    """
    N = [list(r) for r in M]
    for a, j in enumerate(J):
        for i in range(len(M)):
            N[i][j] = cols[a][i]
    return N


def enumerate_minors(A, M, a, phi_pool=(), allow_repeats=False, budget=None, seed=0):
    """Yield (t, J, phi indices, rows, square matrix) over Min^{d'}_phi."""
    d = len(M)
    dprime = len(M[0]) if d else 0
    count = 0
    pool = [_hom_columns(A, phi, d) for phi in phi_pool]
    for t in range(0, a + 1):
        tuples = [()] if t == 0 else list(product(range(len(pool)), repeat=t))
        for J in column_tuples(dprime, t, allow_repeats):
            for idx in tuples:
                N = modified_matrix(M, J, [pool[i] for i in idx]) if t else M
                for rows in combinations(range(d), dprime):
                    count += 1
                    if budget is not None and count > budget:
                        return
                    yield t, J, idx, rows, [N[r] for r in rows]


def fitting_invariant_matrix(A, M, a, phi_pool=(), p=None, xi=None, allow_repeats=False,
                             idempotent=None, budget=None, extra=(), xi_kwargs=None):
    """Lattice Fit^a(M) = xi * <nr(N) : N in Min^{d'}_phi(M), t <= a>.

    ``idempotent`` (a Galois-stable central idempotent e) computes the
    invariant over R[G]e: norms are taken on the support of e only and xi is
    replaced by e*xi.  ``extra`` lists additional square matrices known to be
    minors (they are added to the generating set).  Returns a CentralLattice
    with attributes ``generators`` (the reduced norms found) and
    ``minor_count``.
    """
    d = len(M)
    dprime = len(M[0]) if d else 0
    if a < 0 or a > dprime:
        raise RangeError(f"a = {a} outside 0..{dprime}")
    if d < dprime:
        raise ShapeError("need at least as many rows as columns")
    if p is None:
        raise ValueError("prime p required")
    if xi is None:
        xi = whitehead_lattice_estimate(A, p, **(xi_kwargs or {}))
    only = None if idempotent is None else set(idempotent.support())
    gens = []
    n_minors = 0
    truncated = False
    for _, _, _, _, N in enumerate_minors(A, M, a, phi_pool, allow_repeats, budget):
        n_minors += 1
        gens.append(A.reduced_norm(N, only=only))
    if budget is not None and n_minors >= budget:
        truncated = True
    for N in extra:
        gens.append(A.reduced_norm(N, only=only))
    span = CentralLattice(A, p, gens, EXACT)
    xi_used = xi if idempotent is None else xi.project(idempotent)
    flag = EXACT if (a == 0 and xi.flag == EXACT and not truncated) else FROM_BELOW
    L = xi_used * span
    L.flag = flag
    L.generators = gens
    L.minor_count = n_minors
    L.truncated = truncated
    return L


class Presentation:
    """Free presentation F^1 --theta--> F^2 --> Z --> 0.

    ``matrix`` is d x d' over R[G] with x -> x M (rows index a basis of F^1).
    """

    def __init__(self, A, matrix, p, label=None):
        self.A = A
        self.matrix = [[GroupRingElement.coerce(A.G, x) for x in row] for row in matrix]
        self.p = p
        self.label = label
        self.d = len(matrix)
        self.dprime = len(matrix[0]) if matrix else 0
        if self.d < self.dprime:
            raise ShapeError("presentation must have rank F^1 >= rank F^2")
        self._module = None

    def image_lattice(self):
        R = realify_matrix(self.matrix, self.A.G)
        return submodule_lattice(self.A.G, R, self.p, self.dprime) if R else \
            PLattice([], self.p, self.dprime * self.A.n, check=False)

    def presented_module(self):
        """Cokernel as a CohomologyGroup (free rank and FinPModule torsion)."""
        if self._module is None:
            from .plattice import action_matrices
            R = realify_matrix(self.matrix, self.A.G)
            dims = [self.d * self.A.n, self.dprime * self.A.n]
            H = cohomology([R], self.p, 1, dims=dims,
                           action={1: action_matrices(self.A.G, self.dprime)})
            self._module = H[2]
        return self._module

    def is_quadratic(self):
        return self.d == self.dprime


def is_finer(candidate, base):
    """Whether ``candidate`` is finer than ``base`` via the identity on F^2."""
    if candidate.d != base.d or candidate.dprime != base.dprime:
        return False
    L = base.image_lattice()
    R = realify_matrix(candidate.matrix, candidate.A.G)
    return all(L.contains(r) for r in R)


def fitting_of_presentation(P, a, phi_pool=(), **kw):
    return fitting_invariant_matrix(P.A, P.matrix, a, phi_pool, p=P.p, **kw)


def total_fitting_lower_bound(P, finer=(), a=0, phi_pool=(), **kw):
    """Sum of Fit^a over P and the supplied finer presentations (LOWER-BOUND)."""
    L = fitting_of_presentation(P, a, phi_pool, **kw)
    for Q in finer:
        if not is_finer(Q, P):
            raise NotFiner(f"presentation {Q.label or ''} is not finer than {P.label or ''}")
        L = L + fitting_of_presentation(Q, a, phi_pool, **kw)
    L.flag = LOWER_BOUND
    return L


def annihilation_from_fitting(P, w, Z, fit=None, **kw):
    """Check that w*f kills Z for every basis element f of Fit^0(P).

    Z must have the same torsion exponents (and no free part) as the module
    presented by P.
    """
    H = P.presented_module()
    if H.free_rank or sorted(H.torsion_exponents) != sorted(Z.exponents):
        raise PresentationMismatch(
            f"presentation gives free rank {H.free_rank} and torsion {H.torsion_exponents},"
            f" module has {Z.exponents}")
    if fit is None:
        fit = fitting_of_presentation(P, 0, **kw)
    results = []
    for f in fit.basis():
        x = (w * f).to_group_ring()
        results.append({"generator": [str(c) for c in f.components],
                        "annihilates": annihilation_witness_check(x, Z)})
    return {"all_pass": all(r["annihilates"] for r in results), "results": results,
            "flag": fit.flag}

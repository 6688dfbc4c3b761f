"""Exact linear algebra over Z_(p) and Z_(p)[G].

Z_(p) is realised as the rationals whose denominators are prime to p.  All
normal forms pivot on minimal p-adic valuation, so no p-adic precision is
ever tracked.  Modules over Z_(p)[G] are handled through their underlying
Z_(p)-lattices together with explicit G-action matrices.

Realified free modules: R[G]^d is identified with R^(d*n), the basis
element g*b_i sitting at index i*n + g.  Vectors are rows and maps act on the
right, so a group-ring matrix M (x -> x M) becomes the realified matrix from
:func:`realify_matrix`.
"""

import math
from fractions import Fraction

from .errors import LiftObstruction, NotAComplex, ShapeError
from .group_algebra import GroupRingElement
from .linalg import identity, matmul, rank, row_basis, solve_left
from .scalars import p_content


def vp(x, p):
    return p_content(x, p)


def _unit_part(x, p):
    v = vp(x, p)
    return Fraction(x) / Fraction(p) ** v


def mod_pk(x, p, k):
    """Residue in [0, p^k) of a p-integral rational."""
    x = Fraction(x)
    q = p ** k
    if x.denominator % p == 0:
        raise ValueError(f"{x} is not {p}-integral")
    return x.numerator * pow(x.denominator, -1, q) % q


# ---------------------------------------------------------------------------
# normal forms

def snf_plocal(M, p):
    """Smith form over Z_(p): returns (U, D, V) with U M V = D.

    U and V are invertible over Z_(p) and D is diagonal; its nonzero entries
    are p-powers times p-units, sorted by valuation.  Entries of M may have
    denominators; valuations may then be negative.
    """
    r = len(M)
    c = len(M[0]) if r else 0
    A = [[Fraction(x) for x in row] for row in M]
    U = identity(r)
    V = identity(c)
    t = 0
    while t < min(r, c):
        best = None
        for i in range(t, r):
            for j in range(t, c):
                if A[i][j]:
                    v = vp(A[i][j], p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == -math.inf:
                            break
        if best is None:
            break
        _, i, j = best
        if i != t:
            A[t], A[i] = A[i], A[t]
            U[t], U[i] = U[i], U[t]
        if j != t:
            for row in A:
                row[t], row[j] = row[j], row[t]
            for row in V:
                row[t], row[j] = row[j], row[t]
        a = A[t][t]
        for i in range(t + 1, r):
            if A[i][t]:
                f = A[i][t] / a
                Ai, At = A[i], A[t]
                A[i] = [x - f * y for x, y in zip(Ai, At)]
                U[i] = [x - f * y for x, y in zip(U[i], U[t])]
        for j in range(t + 1, c):
            if A[t][j]:
                f = A[t][j] / a
                for row in A:
                    row[j] -= f * row[t]
                for row in V:
                    row[j] -= f * row[t]
        t += 1
    return U, A, V


def _canonical_rep(c, p, v):
    # representative of c modulo p^v Z_(p): r / p^t with 0 <= r < p^(v+t)
    c = Fraction(c)
    if c == 0 or vp(c, p) >= v:
        return Fraction(0)
    t = max(0, -vp(c, p))
    scaled = c * p ** t
    mod = p ** (v + t) if v + t > 0 else 1
    r = mod_pk(scaled, p, v + t) if v + t > 0 else 0
    return Fraction(r, p ** t) if mod > 1 else Fraction(0)


def _split(n, p):
    """(k, m) with n = p^k m and p not dividing m (n nonzero)."""
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k, n


def _int_row(row, p):
    """(v, e) with row = v / p^e up to a p-adic unit; v integral with p-free content 1."""
    den = 1
    for x in row:
        if x:
            den = den * x.denominator // math.gcd(den, x.denominator)
    e, _ = _split(den, p)
    return _normalise_int_row([int(x * den) for x in row], e, p)


def _normalise_int_row(v, e, p):
    g = 0
    for x in v:
        if x:
            g = math.gcd(g, x)
    if g == 0:
        return None
    k, m = _split(g, p)
    if m > 1 or k:
        q = m * p ** k
        v = [x // q for x in v]
    return v, e - k


def hnf_plocal(rows, p):
    """Canonical echelon basis of the Z_(p)-span of ``rows``.

    Pivots are powers of p; entries above a pivot p^v are reduced to the
    canonical representative modulo p^v Z_(p).  Two generating sets span the
    same lattice iff their canonical bases are equal.  Elimination runs on
    integer rows v / p^e; rescaling a row by a p-adic unit keeps its span.
    """
    A = [r for r in (_int_row([Fraction(x) for x in row], p) for row in rows if any(row))
         if r is not None]
    if not A:
        return []
    ncols = len(A[0][0])
    out = []
    pivcols = []
    for col in range(ncols):
        best = None
        for i, (v, e) in enumerate(A):
            if v[col]:
                val = _split(v[col], p)[0] - e
                if best is None or val < best[0]:
                    best = (val, i)
        if best is None:
            continue
        a, i = best
        pv, pe = A.pop(i)
        ka, u = _split(pv[col], p)
        newA = []
        for v, e in A:
            if v[col]:
                kb, w = _split(v[col], p)
                # u * row - w p^(b - a) * pivot, with b - a = (kb - e) - (ka - pe) >= 0
                E = max(e, pe)
                shift = (kb - e) - (ka - pe)
                lhs = u * p ** (E - e)
                rhs = w * p ** (shift + E - pe)
                r = _normalise_int_row([lhs * x - rhs * y for x, y in zip(v, pv)], E, p)
                if r is not None:
                    newA.append(r)
            else:
                newA.append((v, e))
        A = newA
        scale = Fraction(1, u) * Fraction(p) ** (-pe)
        out.append([x * scale for x in pv])
        pivcols.append(col)
    # reduce above pivots left to right: row k vanishes before its pivot
    # column, so later reductions never disturb earlier pivot columns
    for k in range(len(out)):
        col = pivcols[k]
        v = vp(out[k][col], p)
        for i in range(k):
            c = out[i][col]
            if c:
                target = _canonical_rep(c, p, v)
                f = (c - target) / out[k][col]
                if f:
                    out[i] = [x - f * y for x, y in zip(out[i], out[k])]
    return out


class PLattice:
    """A Z_(p)-lattice in Q^n given by generator rows.

    ``action`` optionally maps each group element g to a matrix P_g acting
    on row vectors from the right; the lattice must be stable under it.
    """

    def __init__(self, generators, p, dim=None, action=None, check=True):
        self.p = p
        gens = [[Fraction(x) for x in g] for g in generators]
        if dim is None:
            if not gens:
                raise ShapeError("dimension required for an empty lattice")
            dim = len(gens[0])
        if any(len(g) != dim for g in gens):
            raise ShapeError("generator length differs from ambient dimension")
        self.dim = dim
        self.generators = gens
        self.action = action
        self._basis = None
        self._snf = None
        if check and action is not None:
            for g, P in action.items():
                for b in self.basis():
                    if not self.contains(matmul([b], P)[0]):
                        raise ValueError(f"lattice is not stable under group element {g}")

    def basis(self):
        if self._basis is None:
            self._basis = hnf_plocal(self.generators, self.p)
        return self._basis

    @property
    def rank(self):
        return len(self.basis())

    def membership(self, x):
        """(bool, witness) with x = sum witness[i] * basis()[i].

        The canonical basis is in echelon form, so the coordinates are found
        by forward substitution and are unique.
        """
        x = [Fraction(v) for v in x]
        if len(x) != self.dim:
            raise ShapeError("vector length differs from ambient dimension")
        B = self.basis()
        if not any(x):
            return True, [Fraction(0)] * len(B)
        r = list(x)
        coeffs = []
        for row in B:
            pc = next(j for j, v in enumerate(row) if v)
            c = r[pc] / row[pc]
            coeffs.append(c)
            if c:
                r = [a - c * b for a, b in zip(r, row)]
        if any(r):
            return False, None
        if any(vp(c, self.p) < 0 for c in coeffs):
            return False, None
        return True, coeffs

    def contains(self, x):
        return self.membership(x)[0]

    def contains_lattice(self, other):
        return all(self.contains(b) for b in other.basis())

    def __eq__(self, other):
        return isinstance(other, PLattice) and self.p == other.p and self.basis() == other.basis()

    def __add__(self, other):
        return PLattice(self.generators + other.generators, self.p, self.dim, check=False)


def lattice_membership(x, L):
    return L.membership(x)


def _saturated_left_kernel(M, p):
    """Z_(p)-basis of {x in Z_(p)^r : x M = 0} (a saturated lattice)."""
    r = len(M)
    if r == 0:
        return []
    U, D, V = snf_plocal(M, p)
    rk = sum(1 for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i])
    return [list(U[i]) for i in range(rk, r)]


def left_kernel_lattice(M, p):
    return _saturated_left_kernel(M, p)


# ---------------------------------------------------------------------------
# finite modules

class FinPModule:
    """A finite Z_(p)[G]-module  Z/p^k1 + ... + Z/p^kr  with G-action.

    ``action[g]`` is an integer matrix whose row i gives the coordinates of
    g * t_i in the generators t_j (column j read modulo p^kj).  Generators
    may carry ambient vectors (lifts) for reporting.
    """

    def __init__(self, p, exponents, action=None, generators=None, labels=None):
        self.p = p
        order = sorted(range(len(exponents)), key=lambda i: exponents[i])
        self.exponents = [int(exponents[i]) for i in order]
        r = len(self.exponents)
        self.generators = [generators[i] for i in order] if generators else None
        self.labels = [labels[i] for i in order] if labels else [f"t{i}" for i in range(r)]
        self.action = {}
        if action:
            for g, A in action.items():
                B = [[Fraction(A[i][j]) for j in order] for i in order]
                self.action[int(g)] = [[mod_pk(B[i][j], p, self.exponents[j])
                                        for j in range(r)] for i in range(r)]
        if any(k <= 0 for k in self.exponents):
            raise ValueError("cyclic factors must have positive exponent")

    @property
    def order(self):
        return self.p ** sum(self.exponents)

    def is_zero(self):
        return not self.exponents

    def act(self, g, i):
        if g == 0 or g not in self.action:
            if g != 0 and self.action:
                raise KeyError(f"no action matrix for group element {g}")
            return [int(j == i) for j in range(len(self.exponents))]
        return self.action[g][i]

    def apply(self, x, i):
        """Coordinates (reduced) of x * t_i for a group-ring element x."""
        p = self.p
        r = len(self.exponents)
        out = [0] * r
        for g, c in enumerate(x.coeffs):
            if not c:
                continue
            row = self.act(g, i)
            for j in range(r):
                if row[j]:
                    out[j] = (out[j] + mod_pk(c, p, self.exponents[j]) * row[j]) % p ** self.exponents[j]
        return out

    def check_action(self, G):
        """Verify that the supplied matrices define a G-action."""
        r = len(self.exponents)
        for g in range(G.order):
            for h in range(G.order):
                for i in range(r):
                    # g(h t_i) versus (gh) t_i
                    hv = self.act(h, i)
                    lhs = [0] * r
                    for k in range(r):
                        if hv[k]:
                            row = self.act(g, k)
                            for j in range(r):
                                lhs[j] += hv[k] * row[j]
                    rhs = self.act(G.table[g][h], i)
                    for j in range(r):
                        if (lhs[j] - rhs[j]) % self.p ** self.exponents[j]:
                            return False
        return True


def annihilation_witness_check(x, T):
    """Whether x kills every generator of T; non-p-integral x never does."""
    if T.is_zero():
        return True
    if not x.is_p_integral(T.p):
        return False
    return all(not any(T.apply(x, i)) for i in range(len(T.exponents)))


def annihilation_detail(x, T):
    if T.is_zero():
        return {"annihilates": True, "failures": []}
    if not x.is_p_integral(T.p):
        return {"annihilates": False, "failures": ["element is not p-integral"]}
    fails = [T.labels[i] for i in range(len(T.exponents)) if any(T.apply(x, i))]
    return {"annihilates": not fails, "failures": fails}


# ---------------------------------------------------------------------------
# realification helpers

def realify_vector(elems):
    out = []
    for e in elems:
        out.extend(e.coeffs)
    return [Fraction(c) if not hasattr(c, "m") else c for c in out]


def unrealify(vec, G):
    n = G.order
    return [GroupRingElement(G, vec[i * n:(i + 1) * n]) for i in range(len(vec) // n)]


def realify_matrix(M, G):
    """Realified matrix of x -> x M for a matrix M over F[G]."""
    n = G.order
    rows = len(M)
    cols = len(M[0]) if rows else 0
    t = G.table
    out = [[Fraction(0)] * (cols * n) for _ in range(rows * n)]
    for i in range(rows):
        for j in range(cols):
            e = GroupRingElement.coerce(G, M[i][j])
            for k, c in enumerate(e.coeffs):
                if c:
                    # h * (c k) = c (h k)
                    for h in range(n):
                        out[i * n + h][j * n + t[h][k]] = c
    return out


def action_matrices(G, d):
    """P_g with (x P_g) = g * x on the realified R[G]^d."""
    n = G.order
    mats = {}
    for g in range(n):
        P = [[Fraction(0)] * (d * n) for _ in range(d * n)]
        for i in range(d):
            for h in range(n):
                P[i * n + h][i * n + G.table[g][h]] = Fraction(1)
        mats[g] = P
    return mats


def act_vector(G, g, vec):
    """g * vec for a realified vector (fast permutation)."""
    n = G.order
    out = [Fraction(0)] * len(vec)
    t = G.table[g]
    for idx, c in enumerate(vec):
        if c:
            i, h = divmod(idx, n)
            out[i * n + t[h]] = c
    return out


def submodule_lattice(G, gens, p, d=None):
    """Z_(p)-lattice of the R[G]-submodule generated by realified vectors."""
    n = G.order
    if d is None:
        d = len(gens[0]) // n if gens else 0
    rows = []
    for v in gens:
        for g in range(n):
            rows.append(act_vector(G, g, v))
    return PLattice(rows, p, d * n, check=False)


# ---------------------------------------------------------------------------
# cohomology of complexes of lattices

class CohomologyGroup:
    """H^j = ker / im with an adapted basis.

    ``adapted`` is a Z_(p)-basis of the kernel in which the image is spanned
    by multiples D_i * adapted[i].  ``free_generators`` and
    ``torsion_generators`` are the corresponding vectors in the term and
    ``torsion_exponents`` the orders p^k of the torsion generators.
    """

    def __init__(self, degree, kernel_basis, adapted, change, tors_idx, exps, free_idx,
                 image_rows, p):
        self.degree = degree
        self.kernel_basis = kernel_basis
        self.adapted = adapted
        self._change = change
        self.tors_idx = tors_idx
        self.torsion_exponents = exps
        self.free_idx = free_idx
        self.image_rows = image_rows
        self.p = p
        self.torsion_generators = [adapted[i] for i in tors_idx]
        self.free_generators = [adapted[i] for i in free_idx]
        self.torsion = None

    @property
    def free_rank(self):
        return len(self.free_idx)

    def is_zero(self):
        return not self.free_idx and not self.tors_idx

    def adapted_coordinates(self, x):
        """Unique coordinates of a kernel vector in the adapted basis."""
        if not self.kernel_basis:
            if any(x):
                raise ValueError("vector is not a cocycle")
            return []
        c = solve_left(self.kernel_basis, x)
        if c is None:
            raise ValueError("vector is not a cocycle")
        return matmul([c], self._change)[0] if self._change else c

    def torsion_coordinates(self, x):
        c = self.adapted_coordinates(x)
        return [c[i] for i in self.tors_idx]

    def free_coordinates(self, x):
        c = self.adapted_coordinates(x)
        return [c[i] for i in self.free_idx]

    def describe(self):
        return {"degree": self.degree, "free_rank": self.free_rank,
                "torsion": [f"Z/{self.p}^{k}" for k in self.torsion_exponents]}


def _check_complex(diffs):
    for a, b in zip(diffs, diffs[1:]):
        if not a or not b:
            continue
        prod = matmul(a, b)
        if any(x for row in prod for x in row):
            raise NotAComplex("consecutive differentials do not compose to zero")


def cohomology(diffs, p, start_degree=0, dims=None, action=None):
    """Cohomology of F^s -> F^(s+1) -> ... given by realified matrices.

    ``dims`` lists the term dimensions (needed when a matrix is empty).
    ``action`` maps term index -> {g: P_g} to induce G-actions on torsion.
    Returns a dict degree -> CohomologyGroup.
    """
    if dims is None:
        dims = [len(diffs[0])] + [len(M[0]) if M else 0 for M in diffs]
    _check_complex(diffs)
    out = {}
    for idx in range(len(dims)):
        deg = start_degree + idx
        n_here = dims[idx]
        if idx < len(diffs) and diffs[idx] and n_here:
            K = _saturated_left_kernel(diffs[idx], p)
        else:
            K = identity(n_here)
        img = [list(r) for r in diffs[idx - 1]] if idx > 0 and diffs[idx - 1] else []
        img = [r for r in img if any(r)]
        if not K:
            out[deg] = CohomologyGroup(deg, [], [], None, [], [], [], img, p)
            out[deg].torsion = FinPModule(p, [])
            continue
        if img:
            C = [solve_left(K, r) for r in img]
            if any(c is None for c in C):
                raise NotAComplex("image not contained in kernel")
            U, D, V = snf_plocal(C, p)
            rk = sum(1 for i in range(min(len(D), len(D[0]))) if D[i][i])
            adapted = matmul(_inverse_frac(V), K)
            tors_idx = [i for i in range(rk) if vp(D[i][i], p) > 0]
            exps = [vp(D[i][i], p) for i in tors_idx]
            free_idx = list(range(rk, len(K)))
            change = V
        else:
            adapted, change = [list(r) for r in K], None
            tors_idx, exps, free_idx = [], [], list(range(len(K)))
        H = CohomologyGroup(deg, K, adapted, change, tors_idx, exps, free_idx, img, p)
        if tors_idx:
            acts = {}
            if action is not None and idx in action:
                for g, P in action[idx].items():
                    acts[g] = [H.torsion_coordinates(matmul([t], P)[0])
                               for t in H.torsion_generators]
            H.torsion = FinPModule(p, exps, acts or None, generators=H.torsion_generators)
        else:
            H.torsion = FinPModule(p, [])
        out[deg] = H
    return out


def _inverse_frac(M):
    from .linalg import inverse
    return inverse(M)


def torsion_part(H):
    """FinPModule of the torsion of a CohomologyGroup."""
    return H.torsion


# ---------------------------------------------------------------------------
# equivariant homomorphisms

class EquivariantHom:
    """R[G]-linear map from a submodule of R[G]^d to R[G].

    Stored through the Z_(p)-linear functional phi = (identity coefficient of
    psi), given by its values on the basis rows of the source lattice; the
    R[G]-valued map is psi(x) = sum_g phi(g^{-1} x) g.
    """

    def __init__(self, G, source_basis, values, d):
        self.G = G
        self.source_basis = [list(b) for b in source_basis]
        self.values = [Fraction(v) if not hasattr(v, "m") else v for v in values]
        self.d = d
        if len(self.values) != len(self.source_basis):
            raise ShapeError("one functional value per source basis vector")

    @classmethod
    def from_columns(cls, G, cols):
        """Hom on the free module R[G]^d with psi(b_i) = cols[i]."""
        n = G.order
        d = len(cols)
        basis = identity(d * n)
        vals = []
        for i in range(d):
            c = GroupRingElement.coerce(G, cols[i])
            for h in range(n):
                vals.append(c.coeffs[G.inverses[h]])
        return cls(G, basis, vals, d)

    def functional(self, x):
        if not self.source_basis:
            if any(x):
                raise ValueError("vector outside the source")
            return Fraction(0)
        c = solve_left(self.source_basis, x)
        if c is None:
            raise ValueError("vector is not in the source module")
        s = Fraction(0)
        for a, b in zip(c, self.values):
            if a and b:
                s = s + a * b
        return s

    def __call__(self, x):
        """psi(x) for a realified vector x."""
        G = self.G
        coeffs = []
        for g in range(G.order):
            coeffs.append(self.functional(act_vector(G, G.inverses[g], x)))
        return GroupRingElement(G, coeffs)

    def columns(self):
        """psi(b_i) when the source spans the whole free module."""
        n = self.G.order
        out = []
        for i in range(self.d):
            e = [Fraction(0)] * (self.d * n)
            e[i * n] = Fraction(1)
            out.append(self(e))
        return out

    def is_equivariant(self):
        G = self.G
        for b in self.source_basis:
            base = self(b)
            for g in range(G.order):
                if self(act_vector(G, g, b)) != GroupRingElement.basis(G, g) * base:
                    return False
        return True


def equivariant_hom_lift(Z_basis, phi, z, G, d, p):
    """Extend x -> phi(x)*z from a submodule Z of R[G]^d to all of R[G]^d.

    ``Z_basis`` is a Z_(p)-basis of Z (realified rows, stable under G) and
    ``phi`` an EquivariantHom on Z.  Returns an EquivariantHom on the free
    module, or raises LiftObstruction with the order of the obstruction.
    """
    n = G.order
    z = GroupRingElement.coerce(G, z)
    B = [list(b) for b in Z_basis]
    t = [(phi(b) * z).identity_coefficient() for b in B]
    if not B:
        return EquivariantHom(G, identity(d * n), [0] * (d * n), d)
    U, D, V = snf_plocal(B, p)
    rk = sum(1 for i in range(min(len(D), len(D[0]))) if D[i][i])
    Ut = matmul(U, [[x] for x in t])
    Ut = [r[0] for r in Ut]
    if any(Ut[i] for i in range(rk, len(B))):
        raise LiftObstruction("no rational extension exists (phi*z is inconsistent on Z)")
    w = [Ut[i] / D[i][i] for i in range(rk)] + [Fraction(0)] * (d * n - rk)
    worst = min((vp(x, p) for x in w if x), default=0)
    if worst < 0:
        raise LiftObstruction(f"extension needs denominators p^{-worst}", order=p ** (-worst))
    f = [r[0] for r in matmul(V, [[x] for x in w])]
    psi = EquivariantHom(G, identity(d * n), f, d)
    for b in B:
        if psi(b) != phi(b) * z:
            raise LiftObstruction("restriction check failed")
    return psi


def solve_integral(M, b, p):
    """x over Z_(p) with x M = b, or None."""
    if not M:
        return None if any(b) else []
    U, D, V = snf_plocal(M, p)
    bV = matmul([list(b)], V)[0]
    r = len(M)
    y = [Fraction(0)] * r
    for j, c in enumerate(bV):
        dj = D[j][j] if j < r else 0
        if dj:
            y[j] = c / dj
            if vp(y[j], p) < 0:
                return None
        elif c:
            return None
    return matmul([y], U)[0]


def column_hom(G, cols):
    return EquivariantHom.from_columns(G, cols)


def is_rank_deficient(rows):
    return rank(rows) < len(rows)


__all__ = [
    "snf_plocal", "hnf_plocal", "PLattice", "lattice_membership", "FinPModule",
    "annihilation_witness_check", "annihilation_detail", "cohomology", "CohomologyGroup",
    "EquivariantHom", "equivariant_hom_lift", "torsion_part", "realify_matrix",
    "realify_vector", "unrealify", "action_matrices", "act_vector", "submodule_lattice",
    "mod_pk", "row_basis", "solve_integral",
]

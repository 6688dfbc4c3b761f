"""Finite groups, group rings, Wedderburn components and reduced norms.

A group is given by its multiplication table with element 0 the identity.
Irreducible representations are input data (matrices over Q(zeta_m) with m
the exponent of the group); once validated they fix the Wedderburn
decomposition used for every central computation.

Conventions: modules are left modules written as row vectors, so a matrix
over the group ring acts on the right of a row vector.  The realified form
of R[G]^d uses index ``i*n + g`` for the basis element g*b_i.
"""

import math
from fractions import Fraction

from .errors import DivisionByZero, InvalidRepresentation, NotAUnit, ShapeError
from .linalg import det, matmul
from .scalars import CycloElement, _units_mod, is_p_integral, p_content, to_cyclo


class GroupData:
    """A finite group given by a multiplication table.

    ``table[g][h]`` is the index of g*h.  Inverses, conjugacy classes and the
    exponent are derived when not supplied and checked when supplied.
    """

    def __init__(self, table, inverses=None, classes=None, exponent=None, name=None,
                 labels=None):
        self.table = [list(map(int, row)) for row in table]
        self.order = n = len(self.table)
        self.name = name or f"G{n}"
        self.labels = labels
        if n == 0 or any(len(r) != n for r in self.table):
            raise InvalidRepresentation("multiplication table must be square and non-empty")
        for g in range(n):
            if self.table[0][g] != g or self.table[g][0] != g:
                raise InvalidRepresentation("element 0 must be the identity")
            if sorted(self.table[g]) != list(range(n)):
                raise InvalidRepresentation(f"row {g} of the table is not a permutation")
            if sorted(r[g] for r in self.table) != list(range(n)):
                raise InvalidRepresentation(f"column {g} of the table is not a permutation")
        if n <= 24:
            t = self.table
            for a in range(n):
                for b in range(n):
                    ab = t[a][b]
                    for c in range(n):
                        if t[ab][c] != t[a][t[b][c]]:
                            raise InvalidRepresentation(f"associativity fails at {(a, b, c)}")
        inv = [self.table[g].index(0) for g in range(n)]
        if inverses is not None and list(inverses) != inv:
            raise InvalidRepresentation("supplied inverse table is wrong")
        self.inverses = inv
        cls = self._conjugacy_classes()
        if classes is not None:
            given = sorted(sorted(int(x) for x in c) for c in classes)
            if given != sorted(sorted(c) for c in cls):
                raise InvalidRepresentation("supplied conjugacy classes are wrong")
        self.classes = cls
        self.class_of = [0] * n
        for i, c in enumerate(cls):
            for g in c:
                self.class_of[g] = i
        self.orders = [self._elt_order(g) for g in range(n)]
        exp = 1
        for o in self.orders:
            exp = exp * o // math.gcd(exp, o)
        if exponent is not None and int(exponent) != exp:
            raise InvalidRepresentation(f"supplied exponent {exponent} differs from {exp}")
        self.exponent = exp

    def mul(self, g, h):
        return self.table[g][h]

    def inv(self, g):
        return self.inverses[g]

    def power(self, g, k):
        k %= self.orders[g] if hasattr(self, "orders") else self.order
        r = 0
        for _ in range(k):
            r = self.table[r][g]
        return r

    def _elt_order(self, g):
        k, x = 1, g
        while x != 0:
            x = self.table[x][g]
            k += 1
        return k

    def _conjugacy_classes(self):
        seen = set()
        out = []
        for g in range(self.order):
            if g in seen:
                continue
            c = sorted({self.table[self.table[h][g]][self.inverses[h]] for h in range(self.order)})
            seen.update(c)
            out.append(c)
        return out

    def is_abelian(self):
        t = self.table
        return all(t[a][b] == t[b][a] for a in range(self.order) for b in range(a))

    def to_dict(self):
        return {"order": self.order, "table": self.table, "inverses": self.inverses,
                "classes": self.classes, "exponent": self.exponent}


class IrrepData:
    """An irreducible representation: label, degree and one matrix per element."""

    def __init__(self, label, degree, matrices):
        self.label = str(label)
        self.degree = int(degree)
        self.matrices = matrices

    def character(self, g):
        M = self.matrices[g]
        s = M[0][0]
        for i in range(1, self.degree):
            s = s + M[i][i]
        return s


def _mat_eq(A, B):
    return all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def validate_irreps(G, irreps):
    """Check multiplicativity, degrees and character orthogonality exactly.

    Returns a small report dict; raises InvalidRepresentation on failure.
    """
    m = G.exponent
    n = G.order
    if len(irreps) != len(G.classes):
        raise InvalidRepresentation(
            f"expected {len(G.classes)} irreducible representations, got {len(irreps)}")
    for rep in irreps:
        d = rep.degree
        if len(rep.matrices) != n:
            raise InvalidRepresentation(f"{rep.label}: need one matrix per group element")
        rep.matrices = [[[to_cyclo(x, m) for x in row] for row in M] for M in rep.matrices]
        for g, M in enumerate(rep.matrices):
            if len(M) != d or any(len(r) != d for r in M):
                raise InvalidRepresentation(f"{rep.label}: matrix for {g} is not {d}x{d}")
        ident = [[int(i == j) for j in range(d)] for i in range(d)]
        if not _mat_eq(rep.matrices[0], ident):
            raise InvalidRepresentation(f"{rep.label}: identity is not sent to the identity")
        for g in range(n):
            for h in range(n):
                if not _mat_eq(matmul(rep.matrices[g], rep.matrices[h]),
                               rep.matrices[G.table[g][h]]):
                    raise InvalidRepresentation(
                        f"{rep.label}: multiplicativity fails at pair {(g, h)}", )
    if sum(r.degree ** 2 for r in irreps) != n:
        raise InvalidRepresentation("sum of squared degrees differs from the group order")
    chars = [[rep.character(g) for g in range(n)] for rep in irreps]
    for a in range(len(irreps)):
        for b in range(len(irreps)):
            s = sum((chars[a][g] * chars[b][G.inverses[g]] for g in range(n)),
                    CycloElement.rational(0, m))
            if s != (n if a == b else 0):
                raise InvalidRepresentation(
                    f"orthogonality fails for characters {(irreps[a].label, irreps[b].label)}")
    return {"valid": True, "degrees": [r.degree for r in irreps],
            "sum_of_squares": sum(r.degree ** 2 for r in irreps)}


def _scalar(x):
    if isinstance(x, CycloElement):
        return x.to_rational() if x.is_rational() else x
    return Fraction(x)


class GroupRingElement:
    """Element of F[G] as a coefficient vector indexed by group elements."""

    __slots__ = ("G", "coeffs")

    def __init__(self, G, coeffs):
        self.G = G
        coeffs = list(coeffs)
        if len(coeffs) != G.order:
            raise ShapeError("coefficient vector length differs from the group order")
        self.coeffs = tuple(_scalar(c) for c in coeffs)

    @classmethod
    def zero(cls, G):
        return cls(G, [0] * G.order)

    @classmethod
    def one(cls, G):
        return cls.basis(G, 0)

    @classmethod
    def basis(cls, G, g, c=1):
        v = [0] * G.order
        v[g] = c
        return cls(G, v)

    @classmethod
    def from_dict(cls, G, d):
        v = [0] * G.order
        for k, c in d.items():
            v[int(k)] = c
        return cls(G, v)

    @classmethod
    def coerce(cls, G, x):
        if isinstance(x, GroupRingElement):
            return x
        return cls.basis(G, 0, x)

    def __add__(self, other):
        other = GroupRingElement.coerce(self.G, other)
        return GroupRingElement(self.G, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return GroupRingElement(self.G, [-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-GroupRingElement.coerce(self.G, other))

    def __rsub__(self, other):
        return GroupRingElement.coerce(self.G, other) - self

    def __mul__(self, other):
        if not isinstance(other, GroupRingElement):
            if isinstance(other, CentralElement):
                return self * other.to_group_ring()
            return GroupRingElement(self.G, [a * other for a in self.coeffs])
        t = self.G.table
        out = [Fraction(0)] * self.G.order
        for g, a in enumerate(self.coeffs):
            if a:
                row = t[g]
                for h, b in enumerate(other.coeffs):
                    if b:
                        out[row[h]] = out[row[h]] + a * b
        return GroupRingElement(self.G, out)

    def __rmul__(self, other):
        if isinstance(other, CentralElement):
            return other.to_group_ring() * self
        return GroupRingElement(self.G, [other * a for a in self.coeffs])

    def __eq__(self, other):
        if isinstance(other, GroupRingElement):
            return self.coeffs == other.coeffs
        try:
            return self == GroupRingElement.coerce(self.G, other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return any(self.coeffs)

    def is_zero(self):
        return not any(self.coeffs)

    def iota(self):
        """The anti-involution g -> g^{-1}."""
        out = [0] * self.G.order
        for g, a in enumerate(self.coeffs):
            out[self.G.inverses[g]] = a
        return GroupRingElement(self.G, out)

    def identity_coefficient(self):
        return self.coeffs[0]

    def augmentation(self):
        return sum(self.coeffs, Fraction(0))

    def p_content(self, p):
        return min((p_content(a, p) for a in self.coeffs), default=math.inf)

    def is_p_integral(self, p):
        return all(is_p_integral(a, p) for a in self.coeffs)

    def is_rational(self):
        return all(not isinstance(a, CycloElement) or a.is_rational() for a in self.coeffs)

    def __repr__(self):
        terms = [f"{a}*g{g}" for g, a in enumerate(self.coeffs) if a]
        return "GroupRingElement(" + (" + ".join(terms) or "0") + ")"

    def __str__(self):
        labels = self.G.labels
        terms = []
        for g, a in enumerate(self.coeffs):
            if not a:
                continue
            if g == 0:
                terms.append(f"{a}")
            else:
                terms.append(f"{a}*{labels[g] if labels else f'g{g}'}")
        return " + ".join(terms) or "0"


class GroupAlgebra:
    """A group together with validated irreducible representations.

    Provides characters, the Galois and contragredient permutations of the
    irreducible characters, evaluation of group-ring elements and matrices
    under each representation, and reduced norms.
    """

    def __init__(self, G, irreps, validate=True):
        self.G = G
        self.n = G.order
        self.m = G.exponent
        self.irreps = list(irreps)
        if validate:
            self.report = validate_irreps(G, self.irreps)
        else:
            for rep in self.irreps:
                rep.matrices = [[[to_cyclo(x, self.m) for x in row] for row in M]
                                for M in rep.matrices]
        self.k = len(self.irreps)
        self.degrees = [r.degree for r in self.irreps]
        self.labels = [r.label for r in self.irreps]
        self.chars = [[r.character(g) for g in range(self.n)] for r in self.irreps]
        self._rational_rho = []
        for r in self.irreps:
            if all(x.is_rational() for M in r.matrices for row in M for x in row):
                self._rational_rho.append([[[x.to_rational() for x in row] for row in M]
                                           for M in r.matrices])
            else:
                self._rational_rho.append(None)
        self.contragredient = [self._find_char([c[G.inverses[g]] for g in range(self.n)])
                               for c in self.chars]
        self._galois = {}
        for k in _units_mod(self.m):
            self._galois[k % self.m] = [self._find_char([x.conj(k) for x in c])
                                        for c in self.chars]
        self._orbits = None

    @property
    def name(self):
        return self.G.name

    def _find_char(self, values):
        for i, c in enumerate(self.chars):
            if all(a == b for a, b in zip(c, values)):
                return i
        raise InvalidRepresentation("character set is not closed under Galois/duality")

    def is_abelian(self):
        return self.G.is_abelian()

    def galois_perm(self, k):
        """Index permutation chi -> chi^sigma_k."""
        return self._galois[k % self.m]

    def galois_units(self):
        return sorted(self._galois)

    def galois_orbits(self):
        if self._orbits is None:
            seen, orbits = set(), []
            for i in range(self.k):
                if i in seen:
                    continue
                orb = sorted({self._galois[k][i] for k in self._galois})
                seen.update(orb)
                orbits.append(orb)
            self._orbits = orbits
        return self._orbits

    def index(self, label):
        if isinstance(label, int):
            return label
        return self.labels.index(str(label))

    # -- evaluation -------------------------------------------------------
    def element(self, coeffs):
        if isinstance(coeffs, dict):
            return GroupRingElement.from_dict(self.G, coeffs)
        return GroupRingElement(self.G, coeffs)

    def one(self):
        return GroupRingElement.one(self.G)

    def g(self, g):
        return GroupRingElement.basis(self.G, g)

    def rho(self, chi, x):
        """Matrix of x under the chi-th representation."""
        x = GroupRingElement.coerce(self.G, x)
        d = self.degrees[chi]
        rat = self._rational_rho[chi]
        if rat is not None and x.is_rational():
            out = [[Fraction(0)] * d for _ in range(d)]
            for g, a in enumerate(x.coeffs):
                if a:
                    a = a.to_rational() if isinstance(a, CycloElement) else a
                    M = rat[g]
                    for i in range(d):
                        Mi, oi = M[i], out[i]
                        for j in range(d):
                            if Mi[j]:
                                oi[j] += a * Mi[j]
            return out
        mats = self.irreps[chi].matrices
        out = [[CycloElement.rational(0, self.m)] * d for _ in range(d)]
        for g, a in enumerate(x.coeffs):
            if a:
                M = mats[g]
                for i in range(d):
                    for j in range(d):
                        if M[i][j]:
                            out[i][j] = out[i][j] + M[i][j] * a
        return out

    def rho_matrix(self, chi, M):
        """Block matrix obtained by applying rho_chi entrywise to M."""
        d = self.degrees[chi]
        rows = len(M)
        cols = len(M[0]) if rows else 0
        out = [[None] * (cols * d) for _ in range(rows * d)]
        for i in range(rows):
            for j in range(cols):
                B = self.rho(chi, M[i][j])
                for a in range(d):
                    for b in range(d):
                        out[i * d + a][j * d + b] = B[a][b]
        return out

    def character_value(self, chi, x):
        x = GroupRingElement.coerce(self.G, x)
        s = CycloElement.rational(0, self.m)
        for g, a in enumerate(x.coeffs):
            if a:
                s = s + self.chars[chi][g] * a
        return s

    def reduced_norm(self, M, only=None):
        """Reduced norm of a square matrix over F[G] as a CentralElement.

        ``only`` restricts the computation to a set of character indices;
        the remaining components are returned as zero.
        """
        rows = len(M)
        if any(len(r) != rows for r in M):
            raise ShapeError("reduced norm of a non-square matrix")
        comps = []
        for chi in range(self.k):
            if only is not None and chi not in only:
                comps.append(0)
                continue
            comps.append(det(self.rho_matrix(chi, M)) if rows else 1)
        return CentralElement(self, comps)

    def nr(self, x):
        """Reduced norm of a single group-ring element."""
        return self.reduced_norm([[x]])

    def primitive_idempotents(self):
        return [self.idempotent([chi]) for chi in range(self.k)]

    def idempotent(self, chis):
        s = set(chis)
        return CentralElement(self, [1 if c in s else 0 for c in range(self.k)])

    def central(self, comps):
        return CentralElement(self, comps)

    def central_one(self):
        return CentralElement(self, [1] * self.k)

    def from_group_ring(self, x):
        """Component form of a central group-ring element."""
        x = GroupRingElement.coerce(self.G, x)
        comps = []
        for chi in range(self.k):
            comps.append(self.character_value(chi, x) / self.degrees[chi])
        z = CentralElement(self, comps)
        if z.to_group_ring() != x:
            raise ValueError("element is not central")
        return z

    def central_from_class_vector(self, vec):
        """Central element with coefficient vec[c] on every element of class c."""
        coeffs = [vec[self.G.class_of[g]] for g in range(self.n)]
        return self.from_group_ring(GroupRingElement(self.G, coeffs))

    def matrix_iota_transpose(self, M):
        rows = len(M)
        cols = len(M[0]) if rows else 0
        return [[GroupRingElement.coerce(self.G, M[i][j]).iota() for i in range(rows)]
                for j in range(cols)]

    def unit_reduced_norm_test(self, u, p, lattice=None):
        """Test whether a central unit can be a reduced norm of a p-local unit.

        For abelian groups the test is exact: u and its inverse must have
        p-integral coefficients.  For nonabelian groups only a necessary
        condition is checked: every component of u and u^{-1} has p-content 0
        (is integral) and, when a Whitehead lattice estimate is supplied, u and
        u^{-1} belong to it.  The estimate is built from below, so a lattice
        non-membership can be a false negative; it is reported as 'fail' with
        a note.
        """
        if any(c.is_zero() for c in u.components):
            raise NotAUnit("central element has a zero component")
        ui = u.inverse()
        if self.is_abelian():
            ok = u.is_p_integral(p) and ui.is_p_integral(p)
            return {"verdict": "exact-pass" if ok else "fail", "exact": True}
        for c in u.components + ui.components:
            if p_content(c, p) < 0:
                return {"verdict": "fail", "exact": False,
                        "reason": "component is not a p-local unit"}
        note = None
        if lattice is not None:
            if not (lattice.contains(u) and lattice.contains(ui)):
                return {"verdict": "fail", "exact": False,
                        "reason": "outside the current Whitehead lattice estimate",
                        "note": "estimate is from below; may be a false negative"}
            note = f"checked against lattice flagged {lattice.flag}"
        return {"verdict": "necessary-pass", "exact": False, "note": note}


class CentralElement:
    """Element of Z(F[G]) stored by its Wedderburn components.

    ``components[chi]`` is the scalar by which the element acts on the
    chi-isotypic block.  The coefficient form is derived on demand.
    """

    __slots__ = ("A", "components", "_coeffs")

    def __init__(self, A, components):
        if len(components) != A.k:
            raise ShapeError("one component per irreducible character required")
        self.A = A
        self.components = tuple(to_cyclo(c, A.m) for c in components)
        self._coeffs = None

    def _binop(self, other, op):
        if isinstance(other, CentralElement):
            return CentralElement(self.A, [op(a, b) for a, b in zip(self.components, other.components)])
        return CentralElement(self.A, [op(a, other) for a in self.components])

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return CentralElement(self.A, [-a for a in self.components])

    def __mul__(self, other):
        if isinstance(other, GroupRingElement):
            return self.to_group_ring() * other
        return self._binop(other, lambda a, b: a * b)

    def __rmul__(self, other):
        return self._binop(other, lambda a, b: b * a)

    def __truediv__(self, other):
        if isinstance(other, CentralElement):
            return self * other.inverse()
        return self._binop(other, lambda a, b: a / b)

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        return CentralElement(self.A, [a ** e for a in self.components])

    def inverse(self):
        if any(c.is_zero() for c in self.components):
            raise DivisionByZero("central element has a zero component")
        return CentralElement(self.A, [c.inverse() for c in self.components])

    def pseudo_inverse(self):
        """Invert nonzero components and leave zero components at zero."""
        return CentralElement(self.A, [c.inverse() if c else c for c in self.components])

    def __eq__(self, other):
        if isinstance(other, CentralElement):
            return self.components == other.components
        if isinstance(other, (int, Fraction)):
            return all(c == other for c in self.components)
        return NotImplemented

    def __hash__(self):
        return hash(self.components)

    def support(self):
        return [i for i, c in enumerate(self.components) if c]

    def is_zero(self):
        return not any(self.components)

    def iota(self):
        """Image under g -> g^{-1}; swaps chi with its contragredient."""
        cg = self.A.contragredient
        return CentralElement(self.A, [self.components[cg[i]] for i in range(self.A.k)])

    def galois_defect(self):
        """First (k, chi) with z_{chi^sigma_k} != sigma_k(z_chi), or None."""
        for k in self.A.galois_units():
            perm = self.A.galois_perm(k)
            for chi, z in enumerate(self.components):
                if self.components[perm[chi]] != z.conj(k):
                    return (k, chi)
        return None

    def is_galois_stable(self):
        return self.galois_defect() is None

    def coefficients(self):
        """Coefficient form a_g = (1/|G|) sum_chi chi(1) chi(g^{-1}) z_chi."""
        if self._coeffs is None:
            A = self.A
            inv = A.G.inverses
            out = []
            for g in range(A.n):
                s = CycloElement.rational(0, A.m)
                for chi, z in enumerate(self.components):
                    if z:
                        s = s + A.chars[chi][inv[g]] * z * A.degrees[chi]
                s = s / A.n
                out.append(s.to_rational() if s.is_rational() else s)
            self._coeffs = tuple(out)
        return self._coeffs

    def to_group_ring(self):
        return GroupRingElement(self.A.G, self.coefficients())

    def class_vector(self):
        """Coefficients indexed by conjugacy class (requires rational values)."""
        c = self.coefficients()
        vec = []
        for cl in self.A.G.classes:
            v = c[cl[0]]
            if isinstance(v, CycloElement):
                raise ValueError("element is not in Z(Q[G])")
            vec.append(v)
        return vec

    def is_p_integral(self, p):
        """Whether the coefficient form lies in Z_(p)[zeta_m][G]."""
        return all(is_p_integral(a, p) for a in self.coefficients())

    def coefficient_p_contents(self, p):
        return [p_content(a, p) for a in self.coefficients()]

    def component_p_contents(self, p):
        return [p_content(a, p) for a in self.components]

    def project(self, e):
        return self * e

    def __repr__(self):
        return "CentralElement(" + ", ".join(str(c) for c in self.components) + ")"


def central_convert(x, target):
    """Return the requested form of a central element.

    ``target`` is 'components' or 'coefficients'.  Coefficient requests
    report p-integrality separately through CentralElement.is_p_integral.
    """
    if target == "components":
        return list(x.components)
    if target == "coefficients":
        return list(x.coefficients())
    raise ValueError(f"unknown target {target!r}")


def reduced_norm(A, M):
    return A.reduced_norm(M)


def primitive_idempotents(A):
    return A.primitive_idempotents()


def unit_reduced_norm_test(A, u, p, lattice=None):
    return A.unit_reduced_norm_test(u, p, lattice)


def random_element(A, rng, lo=-3, hi=3, density=1.0):
    """Random element of Z[G] with small coefficients."""
    return GroupRingElement(A.G, [rng.randint(lo, hi) if rng.random() < density else 0
                                  for _ in range(A.n)])


def random_matrix(A, rng, rows, cols=None, lo=-2, hi=2, density=0.7):
    cols = rows if cols is None else cols
    return [[random_element(A, rng, lo, hi, density) for _ in range(cols)] for _ in range(rows)]

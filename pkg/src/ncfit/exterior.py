"""Reduced exterior powers of components that are free of a fixed rank.

Module elements are tuples of group-ring elements (row vectors in R[G]^d).
On the chi-component an element m contributes the rows of rho_chi(m), a
k x kd block.  A frame is an ordered r-tuple whose blocks form a basis of
the chi-component of the ambient module for every supported chi; the
coordinate of another r-tuple is then the determinant of the kr x kr
change-of-coordinates matrix, that is the reduced norm of the r x r matrix
expressing the tuple in the frame.
"""

from .errors import ShapeError, SingularTransport
from .group_algebra import CentralElement, GroupRingElement
from .linalg import det, rank, solve_left


def _elem(A, m):
    return [GroupRingElement.coerce(A.G, x) for x in m]


def element_rows(A, chi, elems):
    """Stacked Morita rows of an r-tuple of module elements."""
    rows = []
    for m in elems:
        rows.extend(A.rho_matrix(chi, [list(m)]))
    return rows


def hom_value(A, phi, m):
    """phi(m) for a hom given by its column values (or a callable)."""
    if callable(phi) and not isinstance(phi, (list, tuple)):
        if hasattr(phi, "columns"):
            phi = phi.columns()
        else:
            return GroupRingElement.coerce(A.G, phi(m))
    cols = [GroupRingElement.coerce(A.G, c) for c in phi]
    m = _elem(A, m)
    if len(cols) != len(m):
        raise ShapeError(f"homomorphism has {len(cols)} values, element has {len(m)} entries")
    s = GroupRingElement.zero(A.G)
    for x, c in zip(m, cols):
        if x and c:
            s = s + x * c
    return s


class WedgeFrame:
    """Reference r-tuple for the rank-r free components in ``support``.

    ``relations`` lists module elements spanning a submodule to quotient by
    (for frames of cokernels).  ``ambient`` optionally lists module elements
    spanning the module itself; when given, freeness of rank r on each
    supported component is verified.
    """

    def __init__(self, A, basis, support=None, relations=(), ambient=None):
        self.A = A
        self.basis = [_elem(A, m) for m in basis]
        self.r = len(self.basis)
        self.relations = [_elem(A, m) for m in relations]
        self.support = list(range(A.k)) if support is None else sorted(support)
        self._rel_rows = {}
        for chi in self.support:
            k = A.degrees[chi]
            rel = self.relation_rows(chi)
            rrel = rank(rel) if rel else 0
            rows = element_rows(A, chi, self.basis) + rel
            if rows and rank(rows) - rrel != k * self.r:
                raise ShapeError(f"frame is not independent on {A.labels[chi]}")
            if ambient is not None:
                amb = element_rows(A, chi, ambient) + rel
                if (rank(amb) if amb else 0) - rrel != k * self.r:
                    raise ShapeError(f"component {A.labels[chi]} is not free of rank {self.r}")

    def relation_rows(self, chi):
        if chi not in self._rel_rows:
            self._rel_rows[chi] = (element_rows(self.A, chi, self.relations)
                                   if self.relations else [])
        return self._rel_rows[chi]

    def change_matrix(self, chi, elems):
        """Coefficients expressing the Morita rows of elems in the frame rows.

        Returns None when some row is outside the span (modulo relations).
        """
        A = self.A
        frows = element_rows(A, chi, self.basis)
        rel = self.relation_rows(chi)
        out = []
        for row in element_rows(A, chi, elems):
            sol = solve_left(frows + rel, row)
            if sol is None:
                return None
            out.append(sol[:len(frows)])
        return out

    def to_dict(self):
        return {"rank": self.r, "support": [self.A.labels[c] for c in self.support],
                "basis": [[str(x) for x in m] for m in self.basis]}


class WedgeElement:
    """Coordinates of an element of the reduced exterior power, per character."""

    def __init__(self, frame, coords):
        self.frame = frame
        if not isinstance(coords, CentralElement):
            coords = CentralElement(frame.A, coords)
        self.coords = coords
        for chi in range(frame.A.k):
            if chi not in frame.support and coords.components[chi]:
                raise ShapeError("coordinates outside the frame support")

    def is_galois_stable(self):
        return self.coords.is_galois_stable()

    def __eq__(self, other):
        return isinstance(other, WedgeElement) and self.coords == other.coords

    def scale(self, c):
        return WedgeElement(self.frame, self.coords * c)


def wedge_coordinates(elems, frame):
    """Coordinates of the wedge of an r-tuple with respect to a frame."""
    A = frame.A
    if len(elems) != frame.r:
        raise ShapeError(f"tuple has {len(elems)} entries, frame has rank {frame.r}")
    comps = []
    for chi in range(A.k):
        if chi not in frame.support:
            comps.append(0)
            continue
        if frame.r == 0:
            comps.append(1)
            continue
        X = frame.change_matrix(chi, elems)
        comps.append(0 if X is None else det(X))
    return WedgeElement(frame, comps)


def transport_wedge(w, iso, direction="forward", target_frame=None):
    """Transport along an isomorphism given by its r x r matrix in the frames."""
    A = w.frame.A
    if len(iso) != w.frame.r:
        raise ShapeError("transport matrix has the wrong size")
    only = set(w.frame.support)
    n = A.reduced_norm(iso, only=only) if iso else A.central_one()
    comps = []
    for chi in range(A.k):
        z = w.coords.components[chi]
        if chi not in only:
            comps.append(z)
            continue
        f = n.components[chi]
        if not f:
            raise SingularTransport(f"transport is singular on {A.labels[chi]}")
        comps.append(z * f if direction == "forward" else z / f)
    return WedgeElement(target_frame or w.frame, comps)


def pairing_matrix(A, elems, phis):
    """N with N[i][j] = phi_j(m_i): rows indexed by elements."""
    return [[hom_value(A, phi, m) for phi in phis] for m in elems]


def wedge_pairing(A, elems, phis):
    """(wedge phi)(wedge m) as a central element."""
    if len(elems) != len(phis):
        raise ShapeError(f"{len(elems)} elements but {len(phis)} homomorphisms")
    if not elems:
        return A.central_one()
    return A.reduced_norm(pairing_matrix(A, elems, phis))


def wedge_pairing_opposite(A, elems, phis):
    """Same pairing through the opposite ring: iota(nr(iota(Gamma))).

    Gamma[i][j] = phi_i(m_j) is a matrix over the opposite ring; iota
    applied entrywise identifies it with a matrix over R[G].  Used as an
    independent check of wedge_pairing.
    """
    if len(elems) != len(phis):
        raise ShapeError(f"{len(elems)} elements but {len(phis)} homomorphisms")
    if not elems:
        return A.central_one()
    gamma = [[hom_value(A, phi, m) for m in elems] for phi in phis]
    return A.reduced_norm([[x.iota() for x in row] for row in gamma]).iota()


def pair_with_frame(A, w, phis):
    """(wedge phi)(w) = sum over characters of coordinate * pairing with the frame."""
    base = wedge_pairing(A, w.frame.basis, phis)
    return w.coords * base

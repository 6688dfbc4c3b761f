"""Organising matrices, canonical presentations, higher special elements and
the integrality pipeline.

Three-term complexes D^0 -> D^1 -> D^2 have ranks (a, d, d - a).  The
organising matrix Phi is d x d: row i is (psi_1(b_i), ..., psi_a(b_i) |
Delta^1_i) where psi_j extends z * phi_j from the cocycles to D^1 and
Delta^1 is the matrix of the second differential.
"""

import random
from fractions import Fraction

from .complexes import (AdmissibleComplex, Surjection, annihilation_idempotent,
                        characteristic_element, check_trivialisation, rank_idempotents,
                        restrict_complex, surjection_idempotent)
from .errors import NotFiner, RationalityFailure, ShapeError
from .exterior import WedgeElement, WedgeFrame, element_rows, hom_value, pair_with_frame
from .fitting import (EXACT, INCONCLUSIVE, Presentation, denominator_witnesses,
                      fitting_invariant_matrix, is_finer, total_fitting_lower_bound)
from .group_algebra import CentralElement, GroupRingElement
from .linalg import det, rank, solve_left
from .plattice import (EquivariantHom, annihilation_detail, equivariant_hom_lift,
                       realify_matrix, realify_vector, solve_integral, unrealify)

MEMBER = "MEMBER"
NON_MEMBER = "NON-MEMBER"
OUTSIDE_REDUCTION = "OUTSIDE-REDUCTION"
USER_WITNESS_FAIL = "USER-WITNESS-FAIL"


def _gr(A, x):
    return GroupRingElement.coerce(A.G, x)


def _hom_as_columns(A, phi, d):
    if isinstance(phi, (list, tuple)):
        cols = [_gr(A, c) for c in phi]
        if len(cols) != d:
            raise ShapeError(f"homomorphism has {len(cols)} values, expected {d}")
        return cols
    return None


class OrganisingMatrix:
    def __init__(self, D, Phi, Lam, psi_cols, phis, z):
        self.D = D
        self.Phi = Phi
        self.Lam = Lam
        self.psi_cols = psi_cols
        self.phis = phis
        self.z = z
        self.a = D.dims[0]

    def to_dict(self):
        return {"Phi": [[str(x) for x in r] for r in self.Phi],
                "Lambda": [[str(x) for x in r] for r in self.Lam],
                "psi_columns": [[str(x) for x in c] for c in self.psi_cols],
                "z": str(self.z)}


def organising_matrix(D, z=1, phis=()):
    """Organising matrix of a three-term complex for z and an a-tuple of homs.

    Each hom is either a list of d column values on D^1 (its restriction to
    the cocycles is used) or an EquivariantHom on the realified cocycle
    lattice.  Extensions are found over Z_(p); failure raises LiftObstruction.
    """
    A, G = D.A, D.A.G
    if D.is_two_term():
        raise ShapeError("organising matrices need a three-term complex")
    a, d = D.dims[0], D.dims[1]
    if D.dims[2] != d - a:
        raise ShapeError("terms must have ranks a, d, d - a")
    if len(phis) != a:
        raise ShapeError(f"need {a} homomorphisms, got {len(phis)}")
    z = _gr(A, z)
    d0, d1 = D.diffs
    Zb = None
    psi_cols, phi_objs = [], []
    for phi in phis:
        cols = _hom_as_columns(A, phi, d)
        if cols is not None:
            phi_objs.append(cols)
            psi_cols.append([c * z for c in cols])
            continue
        if Zb is None:
            Zb = D.integral_cohomology()[1].kernel_basis
        psi = equivariant_hom_lift(Zb, phi, z, G, d, D.p)
        phi_objs.append(phi)
        psi_cols.append(psi.columns())
    Phi = []
    for i in range(d):
        Phi.append([psi_cols[j][i] for j in range(a)] + list(d1[i]))
    Lam = []
    for i in range(a):
        row = d0[i]
        Lam.append([_apply_hom(A, phi, row) for phi in phi_objs])
    return OrganisingMatrix(D, Phi, Lam, psi_cols, phi_objs, z)


def _apply_hom(A, phi, m):
    if isinstance(phi, EquivariantHom):
        return phi(realify_vector([_gr(A, x) for x in m]))
    return hom_value(A, phi, m)


def _central_power(A, z, a, only=None):
    n = A.reduced_norm([[z]], only=only)
    return n ** a if a else (A.central_one() if only is None else
                             A.idempotent(only))


def verify_organiser_identity(om, L=None, lattice=None):
    """nr(z)^a nr(Lambda) e_0 L = nr(Phi)?

    ``L`` defaults to the canonical characteristic element of e_0 D.  An
    exact equality is reported as 'exact'; otherwise the ratio on the e_0
    components is tested with unit_reduced_norm_test.
    """
    D = om.D
    A = D.A
    only = set(D.support_chis)
    e0 = annihilation_idempotent(D)
    if L is None:
        L = (characteristic_element(restrict_complex(D, e0)).value if not e0.is_zero()
             else CentralElement(A, [0] * A.k))
    nrz = _central_power(A, om.z, om.a, only)
    nrL = A.reduced_norm(om.Lam, only=only) if om.a else A.idempotent(only)
    lhs = nrz * nrL * e0 * L
    rhs = A.reduced_norm(om.Phi, only=only)
    out = {"lhs": [str(c) for c in lhs.components], "rhs": [str(c) for c in rhs.components],
           "e0": [str(c) for c in e0.components]}
    if lhs == rhs:
        out.update(verdict="exact", holds=True)
        return out
    off = [c for c in range(A.k) if not e0.components[c] and rhs.components[c]]
    zero = [c for c in e0.support() if not lhs.components[c] or not rhs.components[c]]
    if off or zero:
        out.update(verdict="fail", holds=False,
                   reason="components disagree outside e_0 or vanish on e_0")
        return out
    ratio = CentralElement(A, [lhs.components[c] / rhs.components[c] if e0.components[c] else 1
                               for c in range(A.k)])
    test = A.unit_reduced_norm_test(ratio, D.p, lattice)
    out.update(verdict="unit-" + test["verdict"], holds=test["verdict"] != "fail",
               ratio=[str(c) for c in ratio.components], unit_test=test)
    return out


def canonical_presentations(D, om, value=None, xi=None, budget=None, xi_kwargs=None):
    """Pi, the finer Pi' and the displayed containment in Fit^{0,tot}(Pi) and Fit^a.

    ``value`` defaults to nr(Phi) (equal to nr(z)^a nr(Lambda) e_0 L under the
    canonical characteristic element).
    """
    A, G = D.A, D.A.G
    a, d = D.dims[0], D.dims[1]
    d1 = D.diffs[1]
    zero = GroupRingElement.zero(G)
    one = GroupRingElement.one(G)
    rows_pi = []
    for i in range(a):
        rows_pi.append([one if j == i else zero for j in range(a)] + [zero] * (d - a))
    for i in range(d):
        rows_pi.append([zero] * a + list(d1[i]))
    rows_fine = [[zero] * d for _ in range(a)] + [list(r) for r in om.Phi]
    Pi = Presentation(A, rows_pi, D.p, label="canonical")
    Pi_fine = Presentation(A, rows_fine, D.p, label="finer")
    if not is_finer(Pi_fine, Pi):
        raise NotFiner("finer presentation check failed: construction bug")
    M = []
    for i in range(d):
        M.append([one if (j == i and i < a) else zero for j in range(a)] + list(d1[i]))
    idem = D.support if D.support is not None else None
    kw = dict(xi=xi, budget=budget, xi_kwargs=xi_kwargs, idempotent=idem)
    fit_tot = total_fitting_lower_bound(Pi, finer=[Pi_fine], a=0, **kw)
    fit_a = fitting_invariant_matrix(A, M, a, om.psi_cols, p=D.p, extra=[om.Phi], **kw)
    only = set(D.support_chis)
    if value is None:
        value = A.reduced_norm(om.Phi, only=only)

    def verdict(L):
        if L.contains(value):
            return MEMBER
        return NON_MEMBER if L.flag == EXACT else INCONCLUSIVE

    return {"Pi": Pi, "Pi_finer": Pi_fine, "block_matrix": M,
            "value": value,
            "fit0_tot": fit_tot, "fit_a": fit_a,
            "fit0_tot_verdict": verdict(fit_tot), "fit_a_verdict": verdict(fit_a),
            "flags": {"fit0_tot": fit_tot.flag, "fit_a": fit_a.flag}}


# ---------------------------------------------------------------------------
# special elements

class SpecialElement:
    def __init__(self, eta, record):
        self.eta = eta
        self.record = record

    @property
    def coords(self):
        return self.eta.coords

    @property
    def frame(self):
        return self.eta.frame


def _kernel_elements(C, count, rng):
    """Random integral module elements in the kernel of the last differential."""
    G = C.A.G
    H1 = C.integral_cohomology()[1]
    K = H1.kernel_basis
    out = []
    for _ in range(count):
        if not K:
            out.append([GroupRingElement.zero(G)] * C.dims[-2])
            continue
        v = [Fraction(0)] * len(K[0])
        for row in K:
            c = rng.randint(-3, 3)
            if c:
                v = [x + c * y for x, y in zip(v, row)]
        out.append(unrealify(v, G))
    return out


def h1_frame(C, r, support, seed=0, tries=60):
    """A rational frame of rank r for H^1 on the given characters (seeded search)."""
    A = C.A
    rng = random.Random(f"frame-{seed}")
    last = None
    for _ in range(tries):
        elems = _kernel_elements(C, r, rng)
        try:
            return WedgeFrame(A, elems, support=support), elems
        except ShapeError as e:
            last = e
    raise ShapeError(f"no frame found for H^1: {last}")


def _chi_pull_back(C, t, pi, chi, X):
    """Rows of t(pi^{-1}(X)) on the chi-component, or None if X is dependent in Y."""
    A = C.A
    k = A.degrees[chi]
    a = len(X)
    rel = A.rho_matrix(chi, pi.relations) if pi.relations else []
    xrows = element_rows(A, chi, X)
    r_rel = rank(rel) if rel else 0
    if rank(xrows + rel) - r_rel != k * a:
        return None
    Pm = A.rho_matrix(chi, pi.P)
    Tm = t.chi_matrix(chi)
    out = []
    nP = len(Pm)
    for y in xrows:
        sol = solve_left(Pm + rel, y)
        if sol is None:
            raise ShapeError("element of Y not in the image of pi")
        v = sol[:nP]
        w = [sum((v[i] * Tm[i][j] for i in range(nP) if v[i]), 0) for j in range(len(Tm[0]))]
        out.append(w)
    return out


def special_element(C, t, L=None, pi=None, X=(), frame=None, seed=0):
    """Non-abelian higher special element for (C, t, L, pi, X).

    Coordinates are taken in a rational frame of e_pi e_a H^1 (found by a
    seeded search unless supplied as a list of module elements).  On each
    supported character the coordinate is L_chi times the determinant of
    t(pi^{-1}(X)) expressed in the frame.  Galois stability of the result is
    asserted.
    """
    A = C.A
    if not C.is_two_term():
        raise ShapeError("special elements are defined for two-term complexes")
    if t is not None:
        check_trivialisation(C, t)
    if L is None:
        L = characteristic_element(C, t).value
    if pi is None:
        pi = Surjection.identity(C)
    X = [[_gr(A, x) for x in m] for m in X]
    for m in X:
        if len(m) != pi.s:
            raise ShapeError(f"elements of X must have {pi.s} entries")
    a = len(X)
    ea, _ = rank_idempotents(C, a)
    epi = surjection_idempotent(C, pi)
    e = ea * epi
    supp = e.support()
    if frame is None:
        frame, _ = h1_frame(C, a, supp, seed) if a else (WedgeFrame(A, [], support=supp), None)
    elif not isinstance(frame, WedgeFrame):
        frame = WedgeFrame(A, frame, support=supp)
    comps = []
    for chi in range(A.k):
        if chi not in supp:
            comps.append(0)
            continue
        if a == 0:
            comps.append(L.components[chi])
            continue
        rows = _chi_pull_back(C, t, pi, chi, X)
        if rows is None:
            comps.append(0)
            continue
        frows = element_rows(A, chi, frame.basis)
        coeff = []
        for r in rows:
            sol = solve_left(frows, r)
            if sol is None:
                raise ShapeError("trivialised element is not in H^1")
            coeff.append(sol)
        comps.append(L.components[chi] * det(coeff))
    coords = CentralElement(A, comps)
    if not coords.is_galois_stable():
        raise RationalityFailure("special element coordinates are not Galois-stable: "
                                 f"defect {coords.galois_defect()}")
    eta = WedgeElement(frame, coords)
    record = {"a": a, "support": [A.labels[c] for c in supp],
              "e_a": [str(c) for c in ea.components],
              "e_pi": [str(c) for c in epi.components],
              "frame": frame.to_dict(), "galois_stable": True, "seed": seed}
    return SpecialElement(eta, record)


# ---------------------------------------------------------------------------
# the integrality pipeline

def _p_integral_multiple(e, p):
    """p^k * e with k minimal making every coefficient p-integral."""
    k = 0
    while not (e * (p ** k)).is_p_integral(p):
        k += 1
    return e * (p ** k), k


def default_witness(A, p, e):
    """(R[G] cap R[G]e) times the denominator witness of R[G]e."""
    w = denominator_witnesses(A, p)[0][0]
    if all(c == 1 for c in e.components):
        return w, "denominator witness of R[G]"
    f, k = _p_integral_multiple(e, p)
    return f * w, f"p^{k} e times the denominator witness"


def _integral_lift(C, pi, x):
    """f in F^last over Z_(p) with pi(f) = x in Y."""
    G = C.A.G
    M = realify_matrix(pi.P, G)
    if pi.relations:
        M = M + realify_matrix(pi.relations, G)
    sol = solve_integral(M, realify_vector(x), C.p)
    if sol is None:
        return None
    return unrealify(sol[:len(pi.P) * G.order], G)


def auxiliary_complex(C, pi, X, support, seed=0, tries=40):
    """D: X -> X + F^1 -> F^2 over R[G]e with iota_1, iota_2 as chosen lifts."""
    A, G = C.A, C.A.G
    a = len(X)
    d1, d2 = C.dims
    rng = random.Random(f"iota1-{seed}")
    chis = support.support()
    h = None
    for _ in range(tries):
        cand = _kernel_elements(C, a, rng)
        ok = True
        for chi in chis:
            rows = element_rows(A, chi, cand)
            if rank(rows) < A.degrees[chi] * a:
                ok = False
                break
        if ok:
            h = cand
            break
    if h is None:
        raise ShapeError("no injective iota_1 found")
    f = []
    for x in X:
        lift = _integral_lift(C, pi, x)
        if lift is None:
            raise ShapeError("element of X has no integral lift through pi")
        f.append(lift)
    zero = GroupRingElement.zero(G)
    delta0 = [[zero] * a + list(h[i]) for i in range(a)]
    delta1 = [list(f[i]) for i in range(a)] + [list(r) for r in C.diffs[0]]
    D = AdmissibleComplex(A, [delta0, delta1], C.p, 0, support=support,
                          dims=[a, a + d1, d2])
    return D, h, f


def integrality_pipeline(C, t, L=None, pi=None, X=(), phis=(), x=None, z=1, y=None,
                         seed=0, xi=None, xi_kwargs=None, budget=None, frame=None):
    """Verify the integrality and annihilation statements on one instance.

    The value nr(z)^a (wedge phi)(eta_X) (or nr(y)^{2a} (wedge phi)(eta_X)) is
    computed from the special element and compared with e_pi e_a nr(Phi) for
    the organising matrix of the auxiliary complex.  Fit^a membership is
    tested in the quadratic presentation (alpha, beta) -> (alpha, iota_2
    alpha + d beta), and x * value is applied to the torsion of Y.
    """
    A, G, p = C.A, C.A.G, C.p
    if L is None:
        L = characteristic_element(C, t).value
    if pi is None:
        pi = Surjection.identity(C)
    X = [[_gr(A, v) for v in m] for m in X]
    a = len(X)
    if len(phis) != a:
        raise ShapeError(f"need {a} homomorphisms, got {len(phis)}")
    phis = [[_gr(A, c) for c in phi] for phi in phis]
    ea, eab = rank_idempotents(C, a)
    epi = surjection_idempotent(C, pi)
    only = set(eab.support())
    flags = []
    report = {"a": a, "e_a": [str(c) for c in ea.components],
              "e_(a)": [str(c) for c in eab.components],
              "e_pi": [str(c) for c in epi.components], "flags": flags}
    if y is not None:
        y = _gr(A, y)
        zeff = y * y
        report["variant"] = "y"
    else:
        zeff = _gr(A, z)
        report["variant"] = "z"
    # reduction hypothesis: X generates a free module of rank a on e_(a)
    in_reduction = True
    for chi in only:
        k = A.degrees[chi]
        rel = A.rho_matrix(chi, pi.relations) if pi.relations else []
        rr = rank(rel) if rel else 0
        xr = element_rows(A, chi, X)
        if (rank(xr + rel) if (xr or rel) else 0) - rr != k * a:
            in_reduction = False
            break
    if not in_reduction:
        flags.append(OUTSIDE_REDUCTION)
    se = special_element(C, t, L, pi, X, frame=frame, seed=seed)
    report["special_element"] = {"coords": [str(c) for c in se.coords.components],
                                 **se.record}
    pairing = pair_with_frame(A, se.eta, phis) if a else se.coords
    scale = _central_power(A, zeff, a, only)
    value = scale * pairing
    report["value"] = [str(c) for c in value.components]
    # annihilation of (Y_pi)_tor
    Ytor, yfree = pi.torsion_module(p)
    user_x = x is not None
    if user_x:
        xw = x if isinstance(x, CentralElement) else A.from_group_ring(_gr(A, x))
        xnote = "supplied"
    else:
        xw, xnote = default_witness(A, p, eab)
    xv = (xw * value)
    ann = annihilation_detail(xv.to_group_ring(), Ytor) if Ytor.exponents else \
        {"annihilates": True, "integral": xv.is_p_integral(p), "reason": "zero module"}
    if not isinstance(ann, dict):
        ann = {"annihilates": bool(ann)}
    report["torsion"] = {"exponents": Ytor.exponents, "free_rank": yfree}
    report["witness"] = {"x": [str(c) for c in xw.components], "note": xnote}
    report["annihilation"] = ann
    if user_x and not ann["annihilates"]:
        flags.append(USER_WITNESS_FAIL)
    if not in_reduction:
        report["fit_a_verdict"] = None
        report["routes_agree"] = None
        report["verdict"] = "pass" if ann["annihilates"] else "fail"
        return report
    # organiser route
    D, h, f = auxiliary_complex(C, pi, X, eab, seed=seed)
    d1 = C.dims[0]
    zero = GroupRingElement.zero(G)
    phis_D = [[zero] * a + list(phi) for phi in phis]
    om = organising_matrix(D, zeff, phis_D)
    ident = verify_organiser_identity(om)
    nrPhi = A.reduced_norm(om.Phi, only=only)
    # the canonical characteristic element of D differs from L nr(iota_1^-1 t pi^-1)
    # by nr(-1)^a, the reduced norm of the unit -I_a
    sign = CentralElement(A, [(-1) ** (A.degrees[c] * a) for c in range(A.k)])
    organiser_value = nrPhi * epi * ea * sign
    if organiser_value == value:
        agree = "exact"
    else:
        comps = []
        bad = False
        for c in range(A.k):
            u, v = value.components[c], organiser_value.components[c]
            if bool(u) != bool(v):
                bad = True
            comps.append(u / v if v else 1)
        if bad:
            agree = "fail"
        else:
            ratio = CentralElement(A, comps)
            agree = "unit-" + A.unit_reduced_norm_test(ratio, p)["verdict"]
    report["organiser_value"] = [str(c) for c in organiser_value.components]
    report["organiser_identity"] = ident
    report["routes_agree"] = agree
    # Fit^a of the quadratic presentation theta
    one = GroupRingElement.one(G)
    theta = []
    for i in range(a):
        theta.append([one if j == i else zero for j in range(a)] + list(f[i]))
    for i in range(d1):
        theta.append([zero] * a + list(C.diffs[0][i]))
    fit = fitting_invariant_matrix(A, theta, a, om.psi_cols, p=p, xi=xi, idempotent=eab,
                                   budget=budget, extra=[om.Phi], xi_kwargs=xi_kwargs)
    member = fit.contains(value)
    report["fit_a_flag"] = fit.flag
    report["fit_a_verdict"] = MEMBER if member else (
        NON_MEMBER if fit.flag == EXACT else INCONCLUSIVE)
    report["presentation"] = [[str(v) for v in r] for r in theta]
    ok = (ann["annihilates"] and member and agree != "fail" and ident["holds"])
    report["verdict"] = "pass" if ok else "fail"
    return report

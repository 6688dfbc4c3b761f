"""Arithmetic evaluators over exact inputs.

Every quantity is a central element of Q(zeta_m)[G] assembled from supplied
exact data (rationals or cyclotomic numbers); nothing here computes L-values,
heights or periods.
"""

from fractions import Fraction

from .errors import ClassificationError, IncompleteData, ShapeError
from .fitting import EXACT, INCONCLUSIVE, fitting_invariant_matrix
from .group_algebra import CentralElement, GroupRingElement
from .linalg import det
from .plattice import annihilation_detail
from .scalars import CycloElement, p_content


def _gr(A, x):
    if isinstance(x, dict):
        coeffs = [0] * A.n
        for k, v in x.items():
            coeffs[int(k)] = v
        return GroupRingElement(A.G, coeffs)
    if isinstance(x, (list, tuple)):
        if len(x) != A.n:
            raise ShapeError(f"coefficient list of length {len(x)} for a group of order {A.n}")
        return GroupRingElement(A.G, list(x))
    return GroupRingElement.coerce(A.G, x)


def _glabel(G, g):
    return G.labels[g] if G.labels else str(g)


def _central(A, x):
    """Central element from a CentralElement, a scalar or a per-character list."""
    if isinstance(x, CentralElement):
        return x
    if isinstance(x, (list, tuple)):
        if len(x) != A.k:
            raise ShapeError(f"{len(x)} values for {A.k} characters")
        return CentralElement(A, list(x))
    return CentralElement(A, [x] * A.k)


# ---------------------------------------------------------------------------
# Euler factors, resolvents, heights

def euler_factor(A, frob, a_v, Nv, customary=False):
    """Reduced norm of 1 - a_v Phi + Nv^-2 Phi^2 and its iota image.

    With ``customary`` the classical normalisation 1 - a_v Nv^-1 Phi + Nv^-1 Phi^2
    (the Euler polynomial evaluated at Nv^-1) is used instead.
    """
    if Nv < 2:
        raise ValueError("Nv must be at least 2")
    G = A.G
    phi = GroupRingElement.basis(G, frob)
    phi2 = phi * phi
    one = GroupRingElement.one(G)
    if customary:
        x = one - phi * Fraction(a_v, Nv) + phi2 * Fraction(1, Nv)
    else:
        x = one - phi * a_v + phi2 * Fraction(1, Nv * Nv)
    val = A.nr(x)
    return val, val.iota()


def log_resolvent(A, table):
    """Reduced norm of a square matrix of group-ring entries.

    Entries may be group-ring elements, per-g coefficient lists or dicts
    {g: value}.
    """
    M = [[_gr(A, x) for x in row] for row in table]
    if any(len(r) != len(M) for r in M):
        raise ShapeError("logarithmic resolvent table must be square")
    return A.reduced_norm(M)


def height_matrix(A, table):
    """(sum_g <g P_i, Q_j> g^{-1})_{i,j} from table[g][i][j]."""
    n = A.n
    if len(table) != n:
        raise ShapeError(f"need one pairing table per group element ({n})")
    a = len(table[0])
    H = []
    for i in range(a):
        row = []
        for j in range(a):
            coeffs = [0] * n
            for g in range(n):
                coeffs[A.G.inverses[g]] = table[g][i][j]
            row.append(GroupRingElement(A.G, coeffs))
        H.append(row)
    return H


def height_matrix_nr(A, table, e=None):
    """nr(e h) for the height matrix; 1 (or e) when a = 0."""
    only = None if e is None else set(e.support())
    if not table or not table[0]:
        return A.central_one() if e is None else e
    return A.reduced_norm(height_matrix(A, table), only=only)


# ---------------------------------------------------------------------------
# leading-term products

class ArithmeticData:
    """Container for exact per-character inputs keyed by name."""

    FIELDS = ("L", "Omega", "w", "d", "euler", "log_table", "height", "tau_star",
              "varrho")

    def __init__(self, **values):
        unknown = set(values) - set(self.FIELDS)
        if unknown:
            raise ValueError(f"unknown fields {sorted(unknown)}")
        self.values = values

    def get(self, key, default=None):
        return self.values.get(key, default)

    def __contains__(self, key):
        return key in self.values


class CongruenceReport(dict):
    """Evaluated element plus integrality and annihilation verdicts."""

    @property
    def passed(self):
        return self.get("verdict") == "pass"


_REQUIRED = {
    "general": ("L", "Omega", "w", "d", "log_table", "height"),
    "classical-selmer": ("L", "Omega", "w", "d", "height", "tau_star", "varrho"),
}


def key_product(A, data, a, p, alpha=1, y=1, mode="general", sha=None, selmer=None,
                e_a_upper=None, bridge=None, euler_places=None):
    """Assemble the leading-term product and check it.

    general: alpha nr(y)^{2a} prod_T iota(P_v) L/(Omega w^d) LR height
    classical-selmer: nr(y)^{2a} L/(Omega w^d) (tau* prod varrho)^d height,
    multiplied by alpha for the annihilation check.

    ``sha`` is a FinPModule model of the Tate-Shafarevich group; ``selmer`` a
    presentation matrix over Z_(p)[G] whose Fit^a (over R[G]e_(a)) should
    contain the product.  ``bridge`` is an optional central factor supplied by
    the caller to compare with other normalisations.
    """
    if mode not in _REQUIRED:
        raise ValueError(f"unknown mode {mode!r}")
    missing = [k for k in _REQUIRED[mode] if k not in data]
    if mode == "general" and not data.get("euler"):
        missing.append("euler")
    if missing:
        raise IncompleteData(missing)
    e = A.central_one() if e_a_upper is None else _central(A, e_a_upper)
    only = set(e.support())
    d = int(data.get("d"))
    L = _central(A, data.get("L"))
    Om = _central(A, data.get("Omega"))
    w = _central(A, data.get("w"))
    for name, z in (("Omega", Om), ("w", w)):
        if any(not z.components[c] for c in only):
            raise ValueError(f"{name} has a zero component")
    ht = _central(A, data.get("height"))
    yv = A.reduced_norm([[_gr(A, y)]], only=only) ** (2 * a) if a else e
    base = L * (Om * w ** d).pseudo_inverse() * ht * yv
    factors = {"L/(Omega w^d)": L * (Om * w ** d).pseudo_inverse(), "height": ht,
               "nr(y)^2a": yv}
    if mode == "general":
        lr = log_resolvent(A, data.get("log_table"))
        eul = A.central_one()
        for frob, a_v, Nv in data.get("euler"):
            eul = eul * euler_factor(A, frob, a_v, Nv)[1]
        base = base * lr * eul
        factors.update({"LR": lr, "euler": eul})
    else:
        tau = _central(A, data.get("tau_star"))
        rho = A.central_one()
        for v in data.get("varrho"):
            rho = rho * _central(A, v)
        const = (tau * rho) ** d
        base = base * const
        factors["(tau* varrho)^d"] = const
    if bridge is not None:
        base = base * _central(A, bridge)
        factors["bridge"] = _central(A, bridge)
    al = alpha if isinstance(alpha, CentralElement) else A.from_group_ring(_gr(A, alpha))
    value = base * al if mode == "general" else base
    ann_value = base * al
    contents = ann_value.coefficient_p_contents(p)
    integral = all(c >= 0 for c in contents)
    rep = CongruenceReport(
        mode=mode, a=a,
        value=[str(c) for c in value.components],
        coefficients=[str(c) for c in ann_value.to_group_ring().coeffs],
        coefficient_p_contents=[None if c == float("inf") else c for c in contents],
        integral=integral,
        factors={k: [str(c) for c in v.components] for k, v in factors.items()})
    ok = integral
    if sha is not None:
        det_ = annihilation_detail(ann_value.to_group_ring(), sha)
        rep["annihilation"] = det_
        ok = ok and det_["annihilates"]
    if selmer is not None:
        M = [[_gr(A, x) for x in row] for row in selmer]
        fit = fitting_invariant_matrix(A, M, a, (), p=p, idempotent=e)
        member = fit.contains(base if mode == "classical-selmer" else value)
        rep["selmer_fit"] = {"flag": fit.flag,
                             "verdict": "MEMBER" if member else
                             ("NON-MEMBER" if fit.flag == EXACT else INCONCLUSIVE)}
        if not member and fit.flag == EXACT:
            ok = False
    rep["verdict"] = "pass" if ok else "fail"
    rep["_value"] = value
    return rep


# ---------------------------------------------------------------------------
# generalised dihedral groups

class DihedralStructure:
    """P (Sylow p, abelian, index 2), tau, and the character classification."""

    def __init__(self, A, p):
        G = A.G
        n = A.n
        if p == 2:
            raise ClassificationError("p must be odd")
        if n % 2:
            raise ClassificationError("group order must be even")
        pk = 1
        while n % (pk * p) == 0:
            pk *= p
        if 2 * pk != n:
            raise ClassificationError("Sylow p-subgroup does not have index 2")
        P = [g for g in range(n) if pk % G.orders[g] == 0]
        if len(P) != pk:
            raise ClassificationError("Sylow p-subgroup is not normal")
        for g in P:
            for h in P:
                if G.table[g][h] != G.table[h][g]:
                    raise ClassificationError("Sylow p-subgroup is not abelian")
        Pset = set(P)
        tau = min(g for g in range(n) if g not in Pset)
        ti = G.inverses[tau]
        for g in P:
            if G.table[G.table[tau][g]][ti] != G.inverses[g]:
                raise ClassificationError("tau does not invert the Sylow p-subgroup")
        self.A, self.P, self.tau = A, P, tau
        self.branch = {}
        eps = None
        for chi in range(A.k):
            vals = A.chars[chi]
            if A.degrees[chi] == 1:
                if all(v == 1 for v in vals):
                    self.branch[chi] = "1"
                elif all((v == 1) == (g in Pset) for g, v in enumerate(vals)):
                    self.branch[chi] = "eps"
                    eps = chi
                else:
                    raise ClassificationError(f"unexpected linear character {A.labels[chi]}")
            elif A.degrees[chi] == 2 and all(vals[g] == 0 for g in range(n) if g not in Pset):
                self.branch[chi] = "induced"
            else:
                raise ClassificationError(f"character {A.labels[chi]} is not induced from P")
        self.eps = eps
        self.triv = next(c for c, b in self.branch.items() if b == "1")


def _exact(x):
    return x if isinstance(x, CycloElement) else Fraction(x)


def dihedral_Q(branch, L, Omega, h, sqrt_disc, sign_count=0, u=1):
    """Q_psi for one branch.

    branch '1':       (-1)^|S_ram| sqrt|d_k| L / (Omega^+ h)
    branch 'eps':     (-1)^|S_ram^sp| sqrt|d_K/d_k| L / (Omega^- h)
    branch 'induced': u_psi sqrt(|d_K| Nf(phi)) L / (Omega^psi h)
    ``sqrt_disc`` is the relevant exact square root; ``sign_count`` the size of
    S_ram (or S_ram^sp) for the first two branches.
    """
    if branch not in ("1", "eps", "induced"):
        raise ClassificationError(f"unknown branch {branch!r}")
    if not Omega or not h:
        raise ValueError("period and height factor must be nonzero")
    q = _exact(sqrt_disc) * _exact(L) / (_exact(Omega) * _exact(h))
    if branch == "induced":
        return u * q
    return q * (-1) ** sign_count


def h_F_psi(A, chi, i_Q, pairing, eps=None):
    """h_{F,psi}(Q) from the values pairing[g] = <g Q, Q>.

    Equals 1 when (psi trivial and i_Q = 1) or (psi = eps and i_Q = 0);
    otherwise psi(1)|G|^{-1} <T_psi Q, T_psi-check Q>, expanded with
    <g Q, h Q> = <h^{-1} g Q, Q>.
    """
    G = A.G
    vals = A.chars[chi]
    is_triv = all(v == 1 for v in vals)
    if (is_triv and i_Q == 1) or (eps is not None and chi == eps and i_Q == 0):
        return Fraction(1)
    if len(pairing) != A.n:
        raise ShapeError("need <gQ, Q> for every group element")
    s = CycloElement.rational(0, A.m)
    for g in range(A.n):
        for h in range(A.n):
            c = vals[G.inverses[g]] * vals[h]
            if c:
                s = s + c * pairing[G.table[G.inverses[h]][g]]
    out = s * Fraction(A.degrees[chi], A.n)
    return out.to_rational() if out.is_rational() else out


def u_psi(fixed_space_matrices):
    """prod_v det(-Phi_v^{-1} | V^{I_v}) from the matrices of Phi_v on the fixed spaces."""
    from .linalg import inverse
    u = Fraction(1)
    for M in fixed_space_matrices:
        if not M:
            continue
        Minv = inverse(M)
        u = u * det([[-x for x in row] for row in Minv])
    return u


def fixed_space_matrix(A, chi, inertia, frob):
    """Matrix of rho(frob) on the inertia-fixed subspace (row convention)."""
    from .linalg import identity, left_kernel, solve_left, matmul
    k = A.degrees[chi]
    mats = A.irreps[chi].matrices
    # v rho(g) = v for all g in I
    stacked = []
    for g in inertia:
        Mg = mats[g]
        D = [[Mg[i][j] - (1 if i == j else 0) for j in range(k)] for i in range(k)]
        stacked.append(D)
    big = [sum((D[i] for D in stacked), []) for i in range(k)] if stacked else None
    basis = left_kernel(big) if big else identity(k)
    if not basis:
        return []
    out = []
    for b in basis:
        img = matmul([b], mats[frob])[0]
        sol = solve_left(basis, img)
        if sol is None:
            raise ValueError("Frobenius does not preserve the inertia-fixed space")
        out.append(sol)
    return out


def dihedral_congruence_check(A, p, Q, t_Q, delta, i_Q):
    """Per-g integrality of the explicit dihedral congruence.

    ``Q`` and ``delta`` are per-character lists (entries for 1 and eps of
    ``delta`` are ignored).  Returns a dict with per-g values and verdicts.
    """
    S = DihedralStructure(A, p)
    G = A.G
    if i_Q not in (0, 1):
        raise ValueError("i_Q must be 0 or 1")
    t2 = Fraction(t_Q) ** 2
    rows = []
    for g in range(A.n):
        tg = G.table[S.tau][g]
        s = CycloElement.rational(0, A.m)
        for chi in range(A.k):
            if S.branch[chi] != "induced":
                continue
            cv = A.chars[chi]
            a = cv[G.inverses[g]]
            b = cv[G.inverses[tg]]
            s = s + ((a + b) if i_Q == 0 else (a - b)) * delta[chi] * Q[chi]
        if i_Q == 0:
            lead = 2 * Q[S.triv]
        else:
            lead = 2 * A.chars[S.eps][g] * Q[S.eps]
        val = t2 * (lead + t2 * s)
        pc = p_content(val, p)
        rows.append({"g": g, "label": _glabel(G, g), "value": str(val),
                     "integral": pc >= 0})
    return {"tau": _glabel(G, S.tau), "P": [_glabel(G, g) for g in S.P],
            "branches": {A.labels[c]: b for c, b in S.branch.items()},
            "per_g": rows, "all_integral": all(r["integral"] for r in rows),
            "failing": [r["g"] for r in rows if not r["integral"]]}

"""Built-in groups with irreducible representations.

Each group is generated by closing a set of generators in a concrete
faithful model (integer tuples, permutations or matrices).  Representation
matrices are propagated along the breadth-first words, so only generator
images are written down here; everything is validated on construction.

Available names: C1..C6, C2xC2, S3, D4, D5, Q8, A4.
"""

from functools import lru_cache

from .group_algebra import GroupAlgebra, GroupData, IrrepData
from .linalg import matmul
from .scalars import CycloElement


def _closure(gens, mul, identity):
    elems = [identity]
    index = {identity: 0}
    words = [None]  # (parent, generator index)
    i = 0
    while i < len(elems):
        x = elems[i]
        for k, s in enumerate(gens):
            y = mul(x, s)
            if y not in index:
                index[y] = len(elems)
                elems.append(y)
                words.append((i, k))
        i += 1
    table = [[index[mul(a, b)] for b in elems] for a in elems]
    return elems, words, table


def _propagate(words, gen_mats, degree):
    mats = [[[int(i == j) for j in range(degree)] for i in range(degree)]]
    for w in words[1:]:
        parent, k = w
        mats.append(matmul(mats[parent], gen_mats[k]))
    return mats


def _perm_mul(a, b):
    # (a*b)(x) = a(b(x))
    return tuple(a[b[x]] for x in range(len(a)))


def _mat_key_mul(a, b):
    n = int(round(len(a) ** 0.5))
    A = [list(a[i * n:(i + 1) * n]) for i in range(n)]
    B = [list(b[i * n:(i + 1) * n]) for i in range(n)]
    C = matmul(A, B)
    return tuple(x for row in C for x in row)


def _key(M):
    return tuple(x for row in M for x in row)


def _z(m, k=1):
    return CycloElement.zeta(m, k)


def _word_labels(words, names):
    labels = ["e"]
    for w in words[1:]:
        parent, k = w
        labels.append((labels[parent] if parent else "") + names[k])
    return labels


def _build(name, gens, mul, identity, irreps_gens, names):
    """irreps_gens: list of (label, degree, generator matrices)."""
    elems, words, table = _closure(gens, mul, identity)
    G = GroupData(table, name=name, labels=_word_labels(words, names))
    irreps = [IrrepData(lab, deg, _propagate(words, gm, deg)) for lab, deg, gm in irreps_gens]
    return GroupAlgebra(G, irreps)


def _cyclic(n):
    gens = [(1 % n,)]
    mul = lambda a, b: ((a[0] + b[0]) % n,)
    irreps = [(f"chi{j}", 1, [[[_z(n, j)]]]) for j in range(n)]
    return _build(f"C{n}", gens, mul, (0,), irreps, "g")


def _klein():
    gens = [(1, 0), (0, 1)]
    mul = lambda a, b: ((a[0] + b[0]) % 2, (a[1] + b[1]) % 2)
    irreps = []
    for sa in (1, -1):
        for sb in (1, -1):
            irreps.append((f"chi{'+' if sa > 0 else '-'}{'+' if sb > 0 else '-'}", 1,
                           [[[sa]], [[sb]]]))
    return _build("C2xC2", gens, mul, (0, 0), irreps, "ab")


def _s3():
    s, c = (1, 0, 2), (1, 2, 0)
    irreps = [
        ("triv", 1, [[[1]], [[1]]]),
        ("sign", 1, [[[-1]], [[1]]]),
        ("rho", 2, [[[0, 1], [1, 0]], [[0, -1], [1, -1]]]),
    ]
    return _build("S3", [s, c], _perm_mul, (0, 1, 2), irreps, "sc")


def _d4():
    r, s = (1, 2, 3, 0), (0, 3, 2, 1)
    irreps = []
    for sr in (1, -1):
        for ss in (1, -1):
            irreps.append((f"chi{'+' if sr > 0 else '-'}{'+' if ss > 0 else '-'}", 1,
                           [[[sr]], [[ss]]]))
    irreps.append(("rho", 2, [[[0, -1], [1, 0]], [[1, 0], [0, -1]]]))
    return _build("D4", [r, s], _perm_mul, (0, 1, 2, 3), irreps, "rs")


def _d5():
    r, s = (1, 2, 3, 4, 0), (0, 4, 3, 2, 1)
    irreps = [("triv", 1, [[[1]], [[1]]]), ("sign", 1, [[[1]], [[-1]]])]
    for k in (1, 2):
        ck = _z(10, 2 * k) + _z(10, -2 * k)
        irreps.append((f"rho{k}", 2, [[[0, -1], [1, ck]], [[0, 1], [1, 0]]]))
    return _build("D5", [r, s], _perm_mul, (0, 1, 2, 3, 4), irreps, "rs")


def _q8():
    i4 = _z(4)
    gi = [[i4, 0], [0, -i4]]
    gj = [[0, -1], [1, 0]]
    gens = [_key(gi), _key(gj)]
    one = CycloElement.rational(1, 4)
    zero = CycloElement.rational(0, 4)
    ident = (one, zero, zero, one)
    gens = [tuple(CycloElement.rational(x, 4) if not isinstance(x, CycloElement) else x
                  for x in g) for g in gens]
    irreps = []
    for si in (1, -1):
        for sj in (1, -1):
            irreps.append((f"chi{'+' if si > 0 else '-'}{'+' if sj > 0 else '-'}", 1,
                           [[[si]], [[sj]]]))
    irreps.append(("rho", 2, [gi, gj]))
    return _build("Q8", gens, _mat_key_mul, ident, irreps, "ij")


def _a4():
    a, b = (1, 2, 0, 3), (1, 0, 3, 2)

    def rep3(p):
        M = [[0] * 3 for _ in range(3)]
        for j in range(3):
            # p(v_j) = e_{p(j)} - e_{p(3)} = v_{p(j)} - v_{p(3)} with v_3 = 0
            if p[j] != 3:
                M[p[j]][j] += 1
            if p[3] != 3:
                M[p[3]][j] -= 1
        return M

    w = _z(6, 2)
    irreps = [("triv", 1, [[[1]], [[1]]]),
              ("omega", 1, [[[w]], [[1]]]),
              ("omega2", 1, [[[w * w]], [[1]]]),
              ("rho", 3, [rep3(a), rep3(b)])]
    return _build("A4", [a, b], _perm_mul, (0, 1, 2, 3), irreps, "ab")


_BUILDERS = {
    "C1": lambda: _cyclic(1), "C2": lambda: _cyclic(2), "C3": lambda: _cyclic(3),
    "C4": lambda: _cyclic(4), "C5": lambda: _cyclic(5), "C6": lambda: _cyclic(6),
    "C2xC2": _klein, "S3": _s3, "D4": _d4, "D5": _d5, "Q8": _q8, "A4": _a4,
}

BUILTIN_GROUPS = tuple(_BUILDERS)


@lru_cache(maxsize=None)
def builtin(name):
    """Validated GroupAlgebra for a built-in group name."""
    key = name.replace("×", "x").replace("X", "x")
    if key not in _BUILDERS:
        raise KeyError(f"unknown built-in group {name!r}; choose from {', '.join(_BUILDERS)}")
    return _BUILDERS[key]()

"""Exact JSON encoding of scalars, group-ring elements, matrices and groups.

Rationals are strings "num/den"; cyclotomic numbers are {"m": m, "coeffs":
[...]} in the reduced power basis; group-ring elements are {"coeffs":
{index: scalar}} (a plain list of per-element scalars or a bare scalar is
also accepted).
"""

import math
from fractions import Fraction

from .errors import ParseError, SchemaError
from .group_algebra import (CentralElement, GroupAlgebra, GroupData, GroupRingElement,
                            IrrepData)
from .group_data import builtin
from .scalars import CycloElement, format_rational, parse_rational


def parse_scalar(x, field="value"):
    if isinstance(x, dict):
        if "m" not in x or "coeffs" not in x:
            raise ParseError("cyclotomic scalars need 'm' and 'coeffs'", field)
        try:
            m = int(x["m"])
        except (TypeError, ValueError):
            raise ParseError("conductor must be an integer", field)
        if m < 1:
            raise ParseError("conductor must be positive", field)
        coeffs = [parse_rational(c, f"{field}.coeffs[{i}]") for i, c in enumerate(x["coeffs"])]
        z = CycloElement(m, coeffs)
        return z.to_rational() if z.is_rational() else z
    if isinstance(x, float):
        raise ParseError("floating-point values are not exact; use 'num/den'", field)
    return parse_rational(x, field)


def parse_group_ring(A, x, field="element"):
    n = A.n
    if isinstance(x, GroupRingElement):
        return x
    if isinstance(x, dict) and "coeffs" in x:
        c = x["coeffs"]
        if isinstance(c, dict):
            coeffs = [0] * n
            for k, v in c.items():
                try:
                    g = int(k)
                except ValueError:
                    raise ParseError(f"group element index {k!r} is not an integer", field)
                if not 0 <= g < n:
                    raise ParseError(f"group element index {g} out of range", field)
                coeffs[g] = parse_scalar(v, f"{field}.coeffs[{k}]")
            return GroupRingElement(A.G, coeffs)
        x = c
    if isinstance(x, list):
        if len(x) != n:
            raise ParseError(f"expected {n} coefficients, got {len(x)}", field)
        return GroupRingElement(A.G, [parse_scalar(v, f"{field}[{i}]") for i, v in enumerate(x)])
    return GroupRingElement.basis(A.G, 0, parse_scalar(x, field))


def parse_matrix(A, M, field="matrix"):
    if not isinstance(M, list) or any(not isinstance(r, list) for r in M):
        raise ParseError("matrices are row-major nested arrays", field)
    if M and any(len(r) != len(M[0]) for r in M):
        raise ParseError("matrix rows have different lengths", field)
    return [[parse_group_ring(A, x, f"{field}[{i}][{j}]") for j, x in enumerate(r)]
            for i, r in enumerate(M)]


def parse_vector(A, v, field="vector"):
    if not isinstance(v, list):
        raise ParseError("module elements are arrays of group-ring elements", field)
    return [parse_group_ring(A, x, f"{field}[{i}]") for i, x in enumerate(v)]


def parse_central(A, x, field="central"):
    """Per-character list, {"components": [...]}, a scalar, or a central group-ring element."""
    if isinstance(x, dict) and "components" in x:
        x = x["components"]
    if isinstance(x, list):
        if len(x) != A.k:
            raise ParseError(f"expected {A.k} character components, got {len(x)}", field)
        return CentralElement(A, [parse_scalar(v, f"{field}[{i}]") for i, v in enumerate(x)])
    if isinstance(x, dict) and "coeffs" in x:
        try:
            return A.from_group_ring(parse_group_ring(A, x, field))
        except ValueError as e:
            raise ParseError(str(e), field)
    return CentralElement(A, [parse_scalar(x, field)] * A.k)


def parse_character_map(A, x, field):
    """Per-character values keyed by label (or given as a list)."""
    if isinstance(x, dict):
        out = [None] * A.k
        for k, v in x.items():
            if k not in A.labels:
                raise ParseError(f"unknown character label {k!r}", field)
            out[A.labels.index(k)] = parse_scalar(v, f"{field}.{k}")
        return out
    if isinstance(x, list) and len(x) == A.k:
        return [parse_scalar(v, f"{field}[{i}]") for i, v in enumerate(x)]
    raise ParseError(f"expected {A.k} per-character values", field)


def parse_group(desc, field="group"):
    if isinstance(desc, str):
        try:
            return builtin(desc)
        except KeyError as e:
            raise ParseError(str(e), field)
    if not isinstance(desc, dict):
        raise ParseError("group must be a built-in name or an object", field)
    for key in ("table", "irreps"):
        if key not in desc:
            raise ParseError(f"missing '{key}'", field)
    table = desc["table"]
    if "order" in desc and int(desc["order"]) != len(table):
        raise ParseError("order does not match the table", field)
    G = GroupData(table, desc.get("inverses"), desc.get("classes"), desc.get("exponent"),
                  desc.get("name"), desc.get("labels"))
    irreps = []
    for i, r in enumerate(desc["irreps"]):
        f = f"{field}.irreps[{i}]"
        mats = [[[parse_scalar(x, f) for x in row] for row in M] for M in r["matrices"]]
        irreps.append(IrrepData(r.get("label", f"chi{i}"), r["degree"], mats))
    return GroupAlgebra(G, irreps)


def group_to_dict(A):
    G = A.G
    return {"name": G.name, "order": G.order, "table": G.table, "inverses": G.inverses,
            "classes": G.classes, "exponent": G.exponent, "labels": G.labels,
            "irreps": [{"label": r.label, "degree": r.degree,
                        "matrices": [[[encode(x) for x in row] for row in M]
                                     for M in r.matrices]} for r in A.irreps]}


def encode(x):
    """JSON-ready form of exact values and containers."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        return None if math.isinf(x) else x
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, CycloElement):
        if x.is_rational():
            return format_rational(x.to_rational())
        return {"m": x.m, "coeffs": [format_rational(c) for c in x.coeffs]}
    if isinstance(x, GroupRingElement):
        return {"coeffs": {str(g): encode(c) for g, c in enumerate(x.coeffs) if c}}
    if isinstance(x, CentralElement):
        out = {"components": [encode(c) for c in x.components]}
        if x.is_galois_stable():
            out["coefficients"] = [encode(c) for c in x.coefficients()]
        return out
    if hasattr(x, "to_dict"):
        return encode(x.to_dict())
    if isinstance(x, dict):
        return {str(k): encode(v) for k, v in x.items() if not str(k).startswith("_")}
    if isinstance(x, (list, tuple)):
        return [encode(v) for v in x]
    raise SchemaError(f"cannot encode {type(x).__name__}")

"""Scenario ingestion, dispatch and reporting.

A scenario is a JSON object

    {"group": "S3" | {...}, "prime": 3, "task": "integrality",
     "payload": {...}, "flags": {"seed": 0, ...}}

and a report echoes the scenario, the outputs (central elements in both
component and coefficient form), the trust flags and a verdict.  Exit codes:
0 all verdicts pass, 1 some verdict fails, 2 an error or inconclusive result.
"""

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import bsd
from .complexes import (AdmissibleComplex, Surjection, Trivialisation, char_component_compat,
                        characteristic_element, check_admissible)
from .errors import ArtifactError, ParseError, SchemaError
from .fitting import EXACT, INCONCLUSIVE, fitting_invariant_matrix
from .organiser import (MEMBER, canonical_presentations, integrality_pipeline,
                        organising_matrix, special_element, verify_organiser_identity)
from .plattice import FinPModule
from .serialize import (encode, parse_central, parse_character_map, parse_group,
                        parse_matrix, parse_scalar, parse_vector)

TASKS = ("check-admissible", "char-element", "organise", "fitting", "special-element",
         "integrality", "bsd-product", "dihedral-congruence")

PASS, FAIL, ERROR, UNDECIDED = "pass", "fail", "error", "inconclusive"


def _need(payload, key, task):
    if key not in payload:
        raise SchemaError(f"task {task!r} requires payload field {key!r}")
    return payload[key]


def _int(x, field):
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise ParseError("expected an integer", field)
    try:
        return int(x)
    except ValueError:
        raise ParseError(f"malformed integer {x!r}", field)


def _complex(A, p, payload, task):
    diffs = _need(payload, "differentials", task)
    if not isinstance(diffs, list) or not diffs:
        raise SchemaError("'differentials' must be a non-empty list of matrices")
    mats = [parse_matrix(A, M, f"payload.differentials[{i}]") for i, M in enumerate(diffs)]
    support = payload.get("support")
    e = parse_central(A, support, "payload.support") if support is not None else None
    dims = payload.get("dims")
    return AdmissibleComplex(A, mats, p, payload.get("start_degree"), support=e, dims=dims)


def _trivialisation(A, payload):
    T = payload.get("trivialisation")
    return None if T is None else Trivialisation(A, parse_matrix(A, T, "payload.trivialisation"))


def _surjection(A, payload):
    s = payload.get("surjection")
    if s is None:
        return None
    P = parse_matrix(A, s["P"], "payload.surjection.P")
    rel = parse_matrix(A, s.get("relations", []), "payload.surjection.relations")
    return Surjection(A, P, rel)


def _vectors(A, payload, key):
    return [parse_vector(A, v, f"payload.{key}[{i}]") for i, v in enumerate(payload.get(key, []))]


def _xi_kwargs(flags, seed):
    kw = {"seed": seed}
    if "jobs" in flags:
        kw["jobs"] = int(flags["jobs"])
    return kw


def _fin_module(payload, field):
    if payload is None:
        return None
    exps = [_int(k, f"{field}.exponents") for k in payload.get("exponents", [])]
    action = {int(g): M for g, M in payload.get("action", {}).items()}
    return FinPModule(_int(payload["p"], f"{field}.p") if "p" in payload else None, exps,
                      action or None)


# ---------------------------------------------------------------------------
# task handlers: (A, p, payload, flags, seed) -> (outputs, verdict, trust flags)

def _task_check_admissible(A, p, payload, flags, seed):
    C = _complex(A, p, payload, "check-admissible")
    rep = check_admissible(C)
    return rep, PASS if rep["admissible"] else FAIL, []


def _task_char_element(A, p, payload, flags, seed):
    C = _complex(A, p, payload, "char-element")
    t = _trivialisation(A, payload)
    ce = characteristic_element(C, t)
    out = {"value": ce.value, "provenance": ce.provenance}
    verdict = PASS
    if payload.get("compat"):
        cmp = char_component_compat(C, t)
        out["e0_compatibility"] = cmp
        verdict = PASS if cmp["match"] else FAIL
    return out, verdict, []


def _task_organise(A, p, payload, flags, seed):
    D = _complex(A, p, payload, "organise")
    z = payload.get("z", 1)
    z = parse_vector(A, [z], "payload.z")[0]
    phis = _vectors(A, payload, "phis")
    om = organising_matrix(D, z, phis)
    L = payload.get("L")
    ident = verify_organiser_identity(om, parse_central(A, L, "payload.L") if L else None)
    pres = canonical_presentations(D, om, budget=flags.get("budget"),
                                   xi_kwargs=_xi_kwargs(flags, seed))
    out = {"organising_matrix": om, "identity": ident,
           "Pi": [[str(x) for x in r] for r in pres["Pi"].matrix],
           "Pi_finer": [[str(x) for x in r] for r in pres["Pi_finer"].matrix],
           "value": pres["value"],
           "fit0_tot_verdict": pres["fit0_tot_verdict"],
           "fit_a_verdict": pres["fit_a_verdict"]}
    trust = [pres["flags"]["fit0_tot"], pres["flags"]["fit_a"]]
    verdicts = (pres["fit0_tot_verdict"], pres["fit_a_verdict"])
    if not ident["holds"]:
        v = FAIL
    elif all(x == MEMBER for x in verdicts):
        v = PASS
    elif INCONCLUSIVE in verdicts:
        v = UNDECIDED
    else:
        v = FAIL
    return out, v, trust


def _task_fitting(A, p, payload, flags, seed):
    M = parse_matrix(A, _need(payload, "matrix", "fitting"), "payload.matrix")
    a = _int(payload.get("a", 0), "payload.a")
    pool = _vectors(A, payload, "phi_pool")
    idem = payload.get("idempotent")
    idem = parse_central(A, idem, "payload.idempotent") if idem is not None else None
    L = fitting_invariant_matrix(A, M, a, pool, p=p, allow_repeats=bool(payload.get("allow_repeats")),
                                 idempotent=idem, budget=payload.get("budget"),
                                 xi_kwargs=_xi_kwargs(flags, seed))
    out = {"lattice": L, "minor_count": L.minor_count, "truncated": L.truncated}
    v = PASS
    if "element" in payload:
        z = parse_central(A, payload["element"], "payload.element")
        member = L.contains(z)
        out["element"] = z
        out["membership"] = MEMBER if member else ("NON-MEMBER" if L.flag == EXACT
                                                   else INCONCLUSIVE)
        v = PASS if member else (FAIL if L.flag == EXACT else UNDECIDED)
    return out, v, [L.flag]


def _task_special_element(A, p, payload, flags, seed):
    C = _complex(A, p, payload, "special-element")
    t = _trivialisation(A, payload)
    L = payload.get("L")
    L = parse_central(A, L, "payload.L") if L is not None else None
    frame = _vectors(A, payload, "frame") or None
    se = special_element(C, t, L, _surjection(A, payload), _vectors(A, payload, "X"),
                         frame=frame, seed=seed)
    return {"coords": se.coords, "record": se.record}, PASS, []


def _task_integrality(A, p, payload, flags, seed):
    C = _complex(A, p, payload, "integrality")
    t = _trivialisation(A, payload)
    L = payload.get("L")
    L = parse_central(A, L, "payload.L") if L is not None else None
    x = payload.get("x")
    x = parse_central(A, x, "payload.x") if x is not None else None
    y = payload.get("y")
    y = parse_vector(A, [y], "payload.y")[0] if y is not None else None
    z = parse_vector(A, [payload.get("z", 1)], "payload.z")[0]
    rep = integrality_pipeline(C, t, L, _surjection(A, payload), _vectors(A, payload, "X"),
                               _vectors(A, payload, "phis"), x=x, z=z, y=y, seed=seed,
                               budget=flags.get("budget"), xi_kwargs=_xi_kwargs(flags, seed))
    trust = [rep["fit_a_flag"]] if rep.get("fit_a_flag") else []
    v = rep["verdict"]
    if v == PASS and rep.get("fit_a_verdict") == INCONCLUSIVE:
        v = UNDECIDED
    return rep, v, trust + list(rep.get("flags", []))


def _task_bsd_product(A, p, payload, flags, seed):
    fields = {}
    for key in ("L", "Omega", "w", "height", "tau_star"):
        if key in payload:
            fields[key] = parse_central(A, payload[key], f"payload.{key}")
    if "d" in payload:
        fields["d"] = _int(payload["d"], "payload.d")
    if "euler" in payload:
        fields["euler"] = [(_int(e["frob"], f"payload.euler[{i}].frob"),
                            _int(e["a_v"], f"payload.euler[{i}].a_v"),
                            _int(e["Nv"], f"payload.euler[{i}].Nv"))
                           for i, e in enumerate(payload["euler"])]
    if "log_table" in payload:
        fields["log_table"] = parse_matrix(A, payload["log_table"], "payload.log_table")
    if "varrho" in payload:
        fields["varrho"] = [parse_central(A, v, f"payload.varrho[{i}]")
                            for i, v in enumerate(payload["varrho"])]
    data = bsd.ArithmeticData(**fields)
    sha = payload.get("sha")
    if sha is not None:
        sha = dict(sha, p=p)
    alpha = payload.get("alpha", 1)
    rep = bsd.key_product(
        A, data, _int(payload.get("a", 0), "payload.a"), p,
        alpha=parse_central(A, alpha, "payload.alpha"),
        y=parse_vector(A, [payload.get("y", 1)], "payload.y")[0],
        mode=payload.get("mode", "general"), sha=_fin_module(sha, "payload.sha"),
        selmer=parse_matrix(A, payload["selmer"], "payload.selmer") if "selmer" in payload
        else None,
        e_a_upper=parse_central(A, payload["e_a_upper"], "payload.e_a_upper")
        if "e_a_upper" in payload else None,
        bridge=parse_central(A, payload["bridge"], "payload.bridge") if "bridge" in payload
        else None)
    trust = [rep["selmer_fit"]["flag"]] if "selmer_fit" in rep else []
    out = dict(rep)
    out["element"] = out.pop("_value")
    return out, rep["verdict"], trust


def _task_dihedral(A, p, payload, flags, seed):
    Q = parse_character_map(A, _need(payload, "Q", "dihedral-congruence"), "payload.Q")
    delta = payload.get("delta", {})
    dl = [1] * A.k
    if delta:
        vals = parse_character_map(A, dict({l: 1 for l in A.labels}, **delta)
                                   if isinstance(delta, dict) else delta, "payload.delta")
        dl = [1 if v is None else v for v in vals]
    Q = [0 if v is None else v for v in Q]
    rep = bsd.dihedral_congruence_check(A, p, Q, parse_scalar(payload.get("t_Q", 1), "payload.t_Q"),
                                        dl, _int(payload.get("i_Q", 0), "payload.i_Q"))
    return rep, PASS if rep["all_integral"] else FAIL, []


HANDLERS = {
    "check-admissible": _task_check_admissible,
    "char-element": _task_char_element,
    "organise": _task_organise,
    "fitting": _task_fitting,
    "special-element": _task_special_element,
    "integrality": _task_integrality,
    "bsd-product": _task_bsd_product,
    "dihedral-congruence": _task_dihedral,
}


def run_scenario(scenario, prime=None, seed=None, expect_task=None, timestamp=False):
    """Evaluate one scenario dict and return the report dict (never raises)."""
    report = {"scenario": scenario}
    try:
        if not isinstance(scenario, dict):
            raise SchemaError("scenario must be a JSON object")
        task = scenario.get("task")
        if task not in HANDLERS:
            raise SchemaError(f"unknown task {task!r}; expected one of {', '.join(TASKS)}")
        if expect_task is not None and task != expect_task:
            raise SchemaError(f"scenario task {task!r} does not match subcommand {expect_task!r}")
        flags = dict(scenario.get("flags") or {})
        p = prime if prime is not None else scenario.get("prime")
        if p is None:
            raise SchemaError("a prime is required (scenario 'prime' or --prime)")
        p = _int(p, "prime")
        s = seed if seed is not None else flags.get("seed", 0)
        s = _int(s, "flags.seed")
        payload = scenario.get("payload")
        if not isinstance(payload, dict):
            raise SchemaError("'payload' must be an object")
        A = parse_group(scenario.get("group"), "group")
        outputs, verdict, trust = HANDLERS[task](A, p, payload, flags, s)
        report.update(task=task, prime=p, seed=s, group=A.name, outputs=encode(outputs),
                      flags=sorted(set(trust)), verdict=verdict)
    except (ArtifactError, ValueError, KeyError, TypeError, ZeroDivisionError) as e:
        report.update(verdict=ERROR, error={"type": type(e).__name__, "message": str(e),
                                            "field": getattr(e, "field", None)})
    if timestamp:
        report["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    return report


def dumps(report):
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def render_text(report):
    lines = [f"task: {report.get('task', '?')}  group: {report.get('group', '?')}  "
             f"p: {report.get('prime', '?')}  seed: {report.get('seed', '?')}"]
    if report.get("verdict") == ERROR:
        err = report["error"]
        lines.append(f"error: {err['type']}: {err['message']}")
    else:
        if report.get("flags"):
            lines.append("flags: " + ", ".join(report["flags"]))
        out = report.get("outputs", {})
        for key in sorted(out):
            val = out[key]
            if isinstance(val, (dict, list)):
                val = json.dumps(val, sort_keys=True)
                if len(val) > 160:
                    val = val[:157] + "..."
            lines.append(f"{key}: {val}")
    lines.append(f"verdict: {report.get('verdict')}")
    return "\n".join(lines) + "\n"


def exit_code(verdicts):
    verdicts = list(verdicts)
    if any(v in (ERROR, UNDECIDED) for v in verdicts):
        return 2
    if any(v == FAIL for v in verdicts):
        return 1
    return 0


def load_scenario(path):
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}", str(path))


def _run_file(args):
    path, prime, seed = args
    try:
        sc = load_scenario(path)
    except (OSError, ParseError) as e:
        return path.name, {"verdict": ERROR, "error": {"type": type(e).__name__,
                                                       "message": str(e), "field": None}}
    return path.name, run_scenario(sc, prime=prime, seed=seed)


def batch(directory, jobs=1, prime=None, seed=None, out_dir=None):
    """Run every *.json scenario in ``directory``; returns the summary dict."""
    directory = Path(directory)
    files = sorted(directory.glob("*.json"))
    work = [(f, prime, seed) for f in files]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_file, work))
    else:
        results = [_run_file(w) for w in work]
    counts = {}
    errors = []
    for name, rep in results:
        v = rep["verdict"]
        counts[v] = counts.get(v, 0) + 1
        if v == ERROR:
            errors.append({"scenario": name, **rep["error"]})
        if out_dir is not None:
            Path(out_dir).mkdir(parents=True, exist_ok=True)
            (Path(out_dir) / (Path(name).stem + ".report.json")).write_text(
                dumps(rep), encoding="utf-8")
    return {"total": len(results), "counts": counts, "errors": errors,
            "reports": {name: rep["verdict"] for name, rep in results}}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, default=None, help="override the scenario prime")
    common.add_argument("--report", choices=("json", "text"), default="json")
    common.add_argument("--seed", type=int, default=None,
                        help="seed for randomized lift choices")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--timestamp", action="store_true", help="add a timestamp to reports")
    common.add_argument("-o", "--output", default=None, help="write the report here")
    ap = argparse.ArgumentParser(prog="ncfit", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in TASKS + ("run",):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("scenario")
    bp = sub.add_parser("batch", parents=[common])
    bp.add_argument("directory")
    bp.add_argument("--out-dir", default=None, help="directory for per-scenario reports")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "batch":
        summary = batch(args.directory, args.jobs, args.prime, args.seed, args.out_dir)
        text = dumps(summary)
        code = exit_code(summary["reports"].values())
    else:
        try:
            sc = load_scenario(args.scenario)
        except (OSError, ParseError) as e:
            sys.stderr.write(f"ncfit: {e}\n")
            return 2
        expect = None if args.command == "run" else args.command
        rep = run_scenario(sc, args.prime, args.seed, expect, args.timestamp)
        text = dumps(rep) if args.report == "json" else render_text(rep)
        code = exit_code([rep["verdict"]])
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

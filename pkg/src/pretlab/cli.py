"""Command-line experiment runner.  Each subcommand builds a Result holding a
short text rendering, long-format rows (item, statistic, value) for CSV and a
JSON payload; the writer adds a header echoing the resolved config."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import PretlabError

META_KEYS = ("command", "config", "output", "format", "handler", "witness_command", "seed")
JSON_SAFE_INT = 2**53


@dataclass
class Result:
    text: str
    rows: list = field(default_factory=list)
    payload: dict = field(default_factory=dict)


# ---------------------------------------------------------------- parsing helpers


def _form(text):
    from .quadforms import BinaryQuadraticForm

    return BinaryQuadraticForm.parse(text)


def _function(text):
    from .multfun import parse_function

    return parse_function(text)


def _chi(text):
    from .multfun import character

    q, _, idx = str(text).partition(":")
    return character(int(q), int(idx or 0))


def _arc(text):
    c, _, h = str(text).partition(":")
    return (float(c), float(h))


def _jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        x = int(x)
        return str(x) if abs(x) >= JSON_SAFE_INT else x
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return str(x)


def _cell(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


# ---------------------------------------------------------------- handlers


def cmd_rado(a):
    from .equations import classify_rado

    t = classify_rado(a.a, a.b, a.c)
    return Result(t.cls, [("triple", "class", t.cls)], {"a": a.a, "b": a.b, "c": a.c, "class": t.cls})


def cmd_forms(a):
    from .equations import forms_for

    ft = forms_for((a.a, a.b, a.c))
    ok = ft.identity_holds(a.a, a.b, a.c)
    rows, lines = [], []
    for j, (P, coord) in enumerate(zip(ft.forms, ft.coordinate_map), start=1):
        rows += [(f"P{j}", "form", str(P)), (f"P{j}", "coordinate", coord)]
        lines.append(f"P{j} = {P}  -> {coord}")
    rows.append(("identity", "holds", ok))
    lines.append(f"identity holds: {ok}")
    payload = {"forms": [P.to_list() for P in ft.forms], "coordinate_map": list(ft.coordinate_map), "identity_holds": ok}
    return Result("\n".join(lines), rows, payload)


def cmd_solve(a):
    from .equations import solution

    s = solution((a.a, a.b, a.c), a.k, a.m, a.n)
    rows = [("solution", "x", s.x), ("solution", "y", s.y), ("solution", "z", s.z),
            ("solution", "positive", s.positive), ("solution", "distinct", s.distinct)]
    return Result(f"{s.x} {s.y} {s.z}", rows, {"x": s.x, "y": s.y, "z": s.z, "positive": s.positive, "distinct": s.distinct})


def cmd_omega(a):
    from .quadforms import omega, omega_partial_sum

    P = _form(a.form)
    rows, payload, lines = [], {"form": P.to_list()}, []
    if a.r is not None:
        w = omega(P, a.r)
        rows.append((f"r={a.r}", "omega", w))
        payload["omega"] = w
        lines.append(str(w))
    if a.partial is not None:
        s = omega_partial_sum(P, a.partial)
        rows.append((f"X={a.partial}", "omega_partial_sum", s))
        payload["omega_partial_sum"] = s
        lines.append(repr(s))
    if not lines:
        raise argparse.ArgumentTypeError("give --r and/or --partial")
    return Result("\n".join(lines), rows, payload)


def cmd_distance(a):
    from .multfun import distance

    B = math.inf if a.B in ("inf", None) else float(a.B)
    d = distance(_function(a.f), _function(a.g), float(a.A), B, a.truncation)
    return Result(repr(d), [("pair", "distance", d)], {"distance": d, "truncation": a.truncation if math.isinf(B) else None})


def cmd_folner(a):
    from .folner import FolnerSpec, dilation_defect, elements

    form = _form(a.form) if a.form else None
    spec = FolnerSpec(a.kind, a.r, a.K, form)
    mode, elems = elements(spec, a.samples, a.seed, a.cap)
    rows = [("family", "size", spec.size), ("family", "mode", mode),
            ("family", "support", " ".join(map(str, spec.support)))]
    for p in spec.support:
        rows.append((f"p={p}", "dilation_defect", dilation_defect(spec, p)))
    for i, e in enumerate(elems):
        rows.append((f"Q[{i}]", "value", e.value))
    payload = {"spec": spec.to_dict(), "size": spec.size, "mode": mode, "support": list(spec.support),
               "elements": [str(e.value) for e in elems]}
    text = f"{spec}: size {spec.size}, {mode}, {len(elems)} elements"
    return Result(text, rows, payload)


def cmd_qdelta(a):
    from .folner import find_q_delta_L

    q = find_q_delta_L(a.delta, a.L, a.cap)
    rows = [("Q_delta_L", "n_shift", q.n_shift), ("Q_delta_L", "value", q.value),
            ("Q_delta_L", "angle", q.angle), ("Q_delta_L", "chord_upper", q.chord_upper)]
    return Result(f"n = {q.n_shift}", rows, q.to_dict())


def _build_one(job):
    from .gridwitness import construct_v, make_params, witness_to_dict

    case, s, r, K, L, Qs, delta = job
    params = make_params(case, r, K, L, *Qs, s=s, delta=delta)
    return witness_to_dict(params, construct_v(params))


def _threads():
    try:
        return max(1, int(os.environ.get("PRETLAB_THREADS", "1")))
    except ValueError:
        return 1


def cmd_witness_build(a):
    from .folner import sample
    from .gridwitness import case_for, families, nondegenerate_parameters

    case = case_for(a.a, a.b, a.c)
    s, r, K, L = nondegenerate_parameters(case)
    s = a.s if a.s is not None else s
    r, K, L = (a.r or r), (a.K or K), (a.L or L)
    fams = families(case, r, K, L, s)
    draws = [sample(f, a.batch, a.seed + i) for i, f in enumerate(fams)]
    jobs = [(case, s, r, K, L, tuple(d[i] for d in draws), a.delta) for i in range(a.batch)]
    workers = min(_threads(), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            records = list(pool.map(_build_one, jobs))
    else:
        records = [_build_one(j) for j in jobs]
    rows = []
    for i, rec in enumerate(records):
        rows += [(f"witness[{i}]", "v", rec["v"]), (f"witness[{i}]", "all_pass", rec["all_pass"]),
                 (f"witness[{i}]", "conditions", len(rec["conditions"]))]
    ok = all(r["all_pass"] for r in records)
    text = f"{case.kind} {case.triple}: {len(records)} witness(es), all conditions pass: {ok}"
    payload = {"case": case.to_dict(), "witnesses": records}
    return Result(text, rows, payload)


def cmd_witness_verify(a):
    from .gridwitness import verify_witness, witness_from_dict

    with open(a.file) as fh:
        data = json.load(fh)
    records = data.get("result", data).get("witnesses", [data.get("result", data)])
    rows, passes = [], []
    for i, rec in enumerate(records):
        params, w = witness_from_dict(rec)
        rep = verify_witness(params, w)
        passes.append(rep.all_pass)
        rows += [(f"witness[{i}]", "all_pass", rep.all_pass), (f"witness[{i}]", "failures", " | ".join(rep.failures))]
    ok = all(passes)
    if not ok:
        from .errors import VerificationFailure

        raise VerificationFailure(f"{passes.count(False)} witness(es) fail verification")
    return Result(f"verified {len(records)} witness(es): all pass", rows, {"verified": len(records), "all_pass": ok})


def cmd_sdelta(a):
    from fractions import Fraction

    from .equations import s_delta_density, sdelta_spec

    spec = sdelta_spec((a.a, a.b, a.c), a.delta, Fraction(a.alpha_sq) if a.alpha_sq else None)
    count, dens = s_delta_density(spec, a.N)
    rows = [("S_delta", "count", count), ("S_delta", "density", dens), ("S_delta", "alpha_sq", str(spec.alpha_sq))]
    return Result(f"{count} {dens!r}", rows, {"count": count, "density": dens, "alpha_sq": str(spec.alpha_sq)})


def _hit_rows(hit):
    return [("triple", "x", hit.x), ("triple", "y", hit.y), ("triple", "z", hit.z),
            ("triple", "params", " ".join(map(str, hit.params))), ("triple", "scanned", hit.scanned)]


def cmd_mono(a):
    from .equations import monochromatic_search, raw_monochromatic_scan, verify_monochromatic

    fs = [_function(t) for t in a.f]
    triple = (a.a, a.b, a.c)
    if a.raw_bound:
        hit = raw_monochromatic_scan(triple, fs, a.half_width, a.raw_bound)
    else:
        hit = monochromatic_search(triple, fs, a.half_width, (a.k_max, a.m_max))
    ok = verify_monochromatic(triple, fs, a.half_width, hit.as_tuple())
    rows = _hit_rows(hit) + [("triple", "verified", ok)]
    payload = {"x": hit.x, "y": hit.y, "z": hit.z, "params": list(hit.params), "angles": [list(r) for r in hit.angles],
               "scanned": hit.scanned, "verified": ok}
    return Result(f"{hit.x} {hit.y} {hit.z}", rows, payload)


def cmd_recur(a):
    from .equations import classify_rado
    from .rotation import ArcSet, RotationSystem, arc_measure, random_system, recurrence_search

    triple = classify_rado(a.a, a.b, a.c)
    if a.random:
        rng = np.random.default_rng(a.seed)
        systems = [random_system(rng, a.max_s, a.max_q) for _ in range(a.random)]
    else:
        fs = tuple(_function(t) for t in a.f)
        arcs = [_arc(t) for t in a.arc] if a.arc else [(0.0, math.pi / 3)] * len(fs)
        systems = [(RotationSystem(fs), ArcSet(tuple(arcs)))]
    rows, items, lines = [], [], []
    for i, (system, A) in enumerate(systems):
        w = recurrence_search(system, A, triple, a.eps, (a.k_max, a.m_max))
        mu = arc_measure(A)
        rows += [(f"system[{i}]", "x", w.x), (f"system[{i}]", "y", w.y), (f"system[{i}]", "z", w.z),
                 (f"system[{i}]", "mu_A", mu), (f"system[{i}]", "joint_measure", w.measure),
                 (f"system[{i}]", "target", w.target)]
        items.append({"functions": [f.to_dict() for f in system.functions], "arcs": A.to_dict()["arcs"],
                      "x": w.x, "y": w.y, "z": w.z, "params": list(w.params), "mu_A": mu,
                      "joint_measure": w.measure, "target": w.target})
        lines.append(f"{w.x} {w.y} {w.z} {w.measure!r}")
    return Result("\n".join(lines), rows, {"systems": items})


def cmd_conc_lin(a):
    from .rotation import concentration_linear

    r = concentration_linear(_function(a.f), _chi(a.chi), a.t, a.Q, a.a, a.K, a.N, a.truncation)
    d = r.to_dict()
    return Result(f"lhs {r.lhs!r} rhs {r.rhs!r} holds {r.holds}", [("concentration", k, v) for k, v in d.items()], d)


def cmd_conc_quad(a):
    from .rotation import concentration_quadratic

    r = concentration_quadratic(_function(a.f), _chi(a.chi), a.t, _form(a.form), a.Q, a.a, a.b, a.K, a.N, a.truncation)
    d = r.to_dict()
    return Result(f"lhs {r.lhs!r} rhs {r.rhs!r} holds {r.holds}", [("concentration", k, v) for k, v in d.items()], d)


def cmd_factor_crit(a):
    from .rotation import factor_criterion

    st = factor_criterion(_function(a.f), a.kind, a.r, a.K, a.N, _form(a.form) if a.form else None, a.samples, a.seed)
    rows = [("statistic", "value", st.value), ("statistic", "mode", st.mode)]
    rows += [(f"Q={q}", "average", avg) for q, _, avg in st.per_Q]
    return Result(repr(st.value), rows, st.to_dict())


def cmd_chu(a):
    from .rotation import FiniteProbSpace, chu_check, random_prob_space

    if a.space:
        with open(a.space) as fh:
            d = json.load(fh)
        spaces = [FiniteProbSpace(tuple(d["weights"]), tuple(d["F"]), tuple(tuple(p) for p in d.get("partitions", ())))]
    else:
        rng = np.random.default_rng(a.seed)
        spaces = [random_prob_space(rng, a.atoms, a.ell) for _ in range(a.count)]
    results = [chu_check(s) for s in spaces]
    violations = sum(not r.holds for r in results)
    worst = min(r.lhs - r.rhs for r in results)
    rows = [("chu", "instances", len(results)), ("chu", "violations", violations), ("chu", "min_gap", worst)]
    payload = {"instances": len(results), "violations": violations, "min_gap": worst,
               "results": [r.to_dict() for r in results]}
    return Result(f"{len(results)} instances, {violations} violations, min gap {worst!r}", rows, payload)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file whose keys override the flags")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", help="write here instead of stdout")
    common.add_argument("--format", choices=("text", "csv", "json"), default="text")

    parser = argparse.ArgumentParser(prog="pretlab", description="Pretentious rotations and Pythagorean-type equations.")
    parser.add_argument("--version", action="version", version=f"pretlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text, triple=False):
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if triple:
            for c in "abc":
                p.add_argument(c, type=int)
        p.set_defaults(handler=handler)
        return p

    add("rado", cmd_rado, "classify a coefficient triple", triple=True)
    add("forms", cmd_forms, "the three parametrizing quadratic forms", triple=True)
    p = add("solve", cmd_solve, "parametrized solution k*(x, y, z)(m, n)", triple=True)
    for name, default in (("k", 1), ("m", 2), ("n", 1)):
        p.add_argument(f"--{name}", type=int, default=default)

    p = add("omega", cmd_omega, "omega_P(r) and sum_{p<=X} omega_P(p)/p")
    p.add_argument("--form", required=True, help="alpha,beta,gamma")
    p.add_argument("--r", type=int)
    p.add_argument("--partial", type=int, metavar="X")

    p = add("distance", cmd_distance, "pretentious distance D(f, g; A, B)")
    p.add_argument("--f", required=True)
    p.add_argument("--g", default="one")
    p.add_argument("--A", default=1.0)
    p.add_argument("--B", default="inf")
    p.add_argument("--truncation", type=int, default=10**5)

    p = add("folner", cmd_folner, "multiplicative Folner families")
    p.add_argument("--kind", choices=("PhiR", "PhiRK", "PhiRKP"), default="PhiR")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--K", type=int)
    p.add_argument("--form")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--cap", type=int, default=10**6)

    p = add("qdelta", cmd_qdelta, "the modulus Q_{delta,L}")
    p.add_argument("--delta", type=float, default=1.9)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--cap", type=int, default=10**6)

    p = sub.add_parser("witness", help="grid witnesses")
    wsub = p.add_subparsers(dest="witness_command", required=True)
    b = wsub.add_parser("build", parents=[common], help="construct and verify grid witnesses")
    for c in "abc":
        b.add_argument(c, type=int)
    for name in ("s", "r", "K", "L"):
        b.add_argument(f"--{name}", type=int)
    b.add_argument("--delta", type=float, default=1.9)
    b.add_argument("--batch", type=int, default=1)
    b.set_defaults(handler=cmd_witness_build)
    v = wsub.add_parser("verify", parents=[common], help="re-verify a witness JSON file")
    v.add_argument("file")
    v.set_defaults(handler=cmd_witness_verify)

    p = add("sdelta", cmd_sdelta, "count of S_delta in [N]^2", triple=True)
    p.add_argument("--delta", type=float, default=0.3)
    p.add_argument("--N", type=int, default=1000)
    p.add_argument("--alpha-sq", dest="alpha_sq")

    p = add("mono", cmd_mono, "monochromatic solution search", triple=True)
    p.add_argument("--f", action="append", default=[], help="repeatable")
    p.add_argument("--half-width", dest="half_width", type=float, default=0.1)
    p.add_argument("--k-max", dest="k_max", type=int, default=50)
    p.add_argument("--m-max", dest="m_max", type=int, default=50)
    p.add_argument("--raw-bound", dest="raw_bound", type=int)

    p = add("recur", cmd_recur, "recurrence search in rotation systems", triple=True)
    p.add_argument("--f", action="append", default=[], help="repeatable, one per coordinate")
    p.add_argument("--arc", action="append", default=[], help="center:half_width, one per coordinate")
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--k-max", dest="k_max", type=int, default=200)
    p.add_argument("--m-max", dest="m_max", type=int, default=200)
    p.add_argument("--random", type=int, default=0, help="use this many seeded random systems")
    p.add_argument("--max-s", dest="max_s", type=int, default=3)
    p.add_argument("--max-q", dest="max_q", type=int, default=16)

    for name, handler in (("conc-lin", cmd_conc_lin), ("conc-quad", cmd_conc_quad)):
        p = add(name, handler, "finite-stage concentration average")
        p.add_argument("--f", required=True)
        p.add_argument("--chi", default="1:0", help="Q:INDEX")
        p.add_argument("--t", type=float, default=0.0)
        p.add_argument("--Q", type=int, required=True)
        p.add_argument("--a", type=int, default=1)
        p.add_argument("--K", type=int, required=True)
        p.add_argument("--N", type=int, default=1000)
        p.add_argument("--truncation", type=int, default=10**5)
        if name == "conc-quad":
            p.add_argument("--b", type=int, default=0)
            p.add_argument("--form", default="1,0,1")

    p = add("factor-crit", cmd_factor_crit, "finite-stage factor statistic")
    p.add_argument("--f", required=True)
    p.add_argument("--kind", choices=("Archimedean", "FinSupp", "FinSuppP"), default="Archimedean")
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--K", type=int)
    p.add_argument("--N", type=int, default=1000)
    p.add_argument("--form")
    p.add_argument("--samples", type=int, default=20)

    p = add("chu", cmd_chu, "the Chu inequality on finite probability spaces")
    p.add_argument("--space", help="JSON file with weights, F, partitions")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--atoms", type=int, default=16)
    p.add_argument("--ell", type=int, default=3)
    return parser


def resolve(parser, argv):
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config) as fh:
                overrides = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config: {exc}")
        if not isinstance(overrides, dict):
            parser.error("config must be a JSON object")
        for key, value in overrides.get("params", overrides).items():
            key = key.replace("-", "_")
            if key in META_KEYS or not hasattr(args, key):
                parser.error(f"unknown config key {key!r}")
            setattr(args, key, value)
    return args


def resolved_config(args) -> dict:
    name = args.command + (f" {args.witness_command}" if getattr(args, "witness_command", None) else "")
    params = {k: v for k, v in sorted(vars(args).items()) if k not in META_KEYS}
    return {"subcommand": name, "params": _jsonable(params), "seed": args.seed, "format": args.format}


def render(args, result: Result) -> str:
    config = resolved_config(args)
    if args.format == "json":
        doc = {"pretlab_version": __version__, "config": config, "result": _jsonable(result.payload)}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.format == "csv":
        buf = io.StringIO()
        buf.write(f"# pretlab {__version__}\n")
        buf.write(f"# config {json.dumps(config, sort_keys=True)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("item", "statistic", "value"))
        for item, stat, value in result.rows:
            w.writerow((item, stat, _cell(value)))
        return buf.getvalue()
    return result.text + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = resolve(parser, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = args.handler(args)
    except PretlabError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (ValueError, TypeError, argparse.ArgumentTypeError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    out = render(args, result)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())

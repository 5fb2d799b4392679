"""Command-line front end.

Every command builds one report dict; ``--json`` prints it as a single JSON
document, otherwise a plain rendering of the same structure is printed.
Exit status: 0 when the report is ok, 1 on violations or invalid input files,
2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

from . import __version__, calculus, completion, doctrine, semantics, syntax
from .errors import GrailError

DATA = Path(__file__).resolve().parent / "data"
KIND_DIRS = {".glt": "theories", ".gld": "derivations", ".glm": "models"}


class UsageError(Exception):
    pass


# files

def resolve(name: str, suffix: str) -> Path:
    """A path as given, or else the bundled file of that name."""
    p = Path(name)
    if p.exists():
        return p
    for cand in (DATA / KIND_DIRS[suffix] / p.name, DATA / KIND_DIRS[suffix] / (p.name + suffix)):
        if cand.exists():
            return cand
    raise UsageError(f"no such file: {name}")


def bundled_files() -> list:
    return sorted(p for d in KIND_DIRS.values() for p in (DATA / d).iterdir() if p.suffix in KIND_DIRS)


def expected_status(text: str) -> str | None:
    """The ``; expect: ...`` header of a bundled file."""
    for line in text.splitlines():
        line = line.strip()
        if line.startswith(";") and line.lstrip("; ").startswith("expect:"):
            return line.split("expect:", 1)[1].strip()
        if line and not line.startswith(";"):
            break
    return None


def theory_by_name(name: str, near: Path | None = None) -> syntax.Theory:
    dirs = []
    if near is not None:
        dirs += [near.parent, near.parent.parent / "theories"]
    dirs.append(DATA / "theories")
    for d in dirs:
        if not d.is_dir():
            continue
        for p in sorted(d.glob("*.glt")):
            try:
                th = syntax.load_theory(p)
            except GrailError:
                continue
            if th.name == name:
                return th
    raise UsageError(f"cannot find theory {name}; pass --theory")


def load_theory_arg(args, near=None, wanted=None) -> syntax.Theory:
    if getattr(args, "theory", None):
        return syntax.load_theory(resolve(args.theory, ".glt"))
    if wanted is None:
        raise UsageError("--theory is required")
    return theory_by_name(wanted, near)


def env_eps(args):
    if args.eps is not None:
        return args.eps
    raw = os.environ.get("GRAIL_EPS")
    if raw:
        try:
            return float(raw)
        except ValueError:
            raise UsageError(f"GRAIL_EPS must be a number, got {raw!r}") from None
    return None


# commands

def cmd_check_theory(args) -> dict:
    th = syntax.load_theory(resolve(args.file, ".glt"))
    sig = th.sig
    items = [{"theory": th.name, "semiring": sig.ring.kind, "fragment": sig.fragment,
              "classical": sig.classical, "sorts": list(sig.sorts),
              "functions": {f.name: [str(g) for g in f.grades] for f in sig.functions.values()},
              "predicates": {p.name: [str(g) for g in p.grades] for p in sig.predicates.values()},
              "axioms": sorted(th.axioms)}]
    return {"status": "ok", "items": items}


def cmd_check_derivation(args) -> dict:
    path = resolve(args.file, ".gld")
    text = path.read_text(encoding="utf-8")
    th = load_theory_arg(args, path, calculus.peek_theory_name(text))
    df = calculus.parse_derivation(th.sig, text)
    if df.theory_name != th.name:
        raise GrailError(f"derivation is for theory {df.theory_name}, given {th.name}")
    bad = calculus.check_derivation(th.sig, th.axioms, df.derivation)
    root = df.derivation.conclusion
    return {"status": "violations" if bad else "ok",
            "name": df.name, "theory": th.name, "conclusion": str(root),
            "nodes": df.derivation.size(), "items": [v.to_json() for v in bad]}


def cmd_grade(args) -> dict:
    th = load_theory_arg(args)
    if (args.formula is None) == (args.term is None):
        raise UsageError("give exactly one of --formula and --term")
    if args.formula is not None:
        phi = syntax.parse_formula_text(th.sig, args.formula)
        ctx = syntax.infer_ctx(th.sig, phi)
        syntax.check_formula(th.sig, ctx, phi)
        variables = args.var or [x for x, _ in ctx]
        items = [{"var": x, "grade": str(syntax.grade_formula(th.sig, phi, x))} for x in variables]
    else:
        t = syntax.parse_term_text(th.sig, args.term)
        variables = args.var or sorted(syntax.term_vars(t))
        items = [{"var": x, "grade": str(syntax.grade_term(th.sig, t, x))} for x in variables]
    return {"status": "ok", "items": items}


def _model(args):
    path = resolve(args.model, ".glm")
    text = path.read_text(encoding="utf-8")
    th = load_theory_arg(args, path, semantics.peek_model_theory(text))
    m = semantics.parse_model(text, th)
    eps = env_eps(args)
    if eps is not None:
        m = m.with_eps(eps)
    return m, th


def _ctx_arg(sig, text, phi):
    if text:
        from . import sexpr
        return syntax.parse_ctx(sexpr.read_one(text))
    return syntax.infer_ctx(sig, phi)


def cmd_eval(args) -> dict:
    m, th = _model(args)
    if args.sequent:
        from . import sexpr
        ctx = _ctx_arg(th.sig, args.ctx, None) if args.ctx else ()
        seq = syntax.parse_sequent(th.sig, sexpr.read_one(args.sequent), ctx)
        if not args.ctx:
            both = syntax.Tensor(seq.concl, seq.hyps[0]) if seq.hyps else seq.concl
            for h in seq.hyps[1:]:
                both = syntax.Tensor(both, h)
            seq = syntax.Sequent(syntax.infer_ctx(th.sig, both), seq.hyps, seq.concl)
        syntax.check_sequent(th.sig, seq)
        res = semantics.check_sequent_semantics(m, seq)
        return {"status": "ok" if res.ok else "violations", "sequent": str(seq), "eps": m.eps,
                "items": [res.to_json()]}
    if args.formula is None:
        raise UsageError("give --formula or --sequent")
    phi = syntax.parse_formula_text(th.sig, args.formula)
    ctx = _ctx_arg(th.sig, args.ctx, phi)
    syntax.check_formula(th.sig, ctx, phi)
    ev = semantics.eval_formula(m, ctx, phi)
    items = []
    limit = args.samples if args.samples is not None else 64
    for k in range(min(len(ev.values), limit)):
        pt = ev.point(k)
        items.append({"point": {x: m.space(s).labels[i] for (x, s), i in zip(ctx, pt)},
                      "value": semantics._fmt(float(ev.values[k]))})
    return {"status": "ok", "formula": syntax.to_sexpr(phi), "points": int(len(ev.values)),
            "shown": len(items), "items": items}


def cmd_check_model(args) -> dict:
    m, th = _model(args)
    rep = semantics.check_theory_model(m, th)
    out = {"model": m.name, "theory": th.name, "eps": m.eps,
           "items": [s.to_json() for s in rep.symbols] +
                    [{"axiom": k, **v.to_json()} for k, v in rep.axioms.items()]}
    ok = rep.ok
    if args.lemma_depth:
        lem = semantics.lemma_sound_suite(m, depth=args.lemma_depth)
        out["lemma"] = lem.to_json(args.timing)
        ok &= lem.ok
    if args.samples:
        h = semantics.soundness_property_harness(m, th, args.samples, seed=args.seed)
        out["harness"] = h.to_json()
        ok &= h.ok
    out["status"] = "ok" if ok else "violations"
    return out


def _grid_arg(text):
    if not text:
        return None
    vals = []
    for part in text.split(","):
        part = part.strip()
        vals.append(math.inf if part == "inf" else float(_fraction(part)))
    return tuple(vals)


def _fraction(text):
    from fractions import Fraction
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text}") from None


def cmd_laws(args) -> dict:
    try:
        doc, objs, grades = doctrine.instance(args.doctrine)
    except GrailError as exc:
        raise UsageError(str(exc)) from None
    if args.max_size:
        objs = [doctrine.FinSet.of_size(n) for n in range(1, args.max_size + 1)]
    reps = doctrine.law_suite(doc, objs, grades, fragments=args.fragments, seed=args.seed,
                              grid=_grid_arg(args.grid))
    failing = sorted(r.law for r in reps if not r.ok)
    out = {"doctrine": doc.name, "objects": [A.size for A in objs], "grades": [str(g) for g in grades],
           "failing": failing, "items": [r.to_json() for r in reps]}
    expected = doctrine.EXPECTED_BREAKAGE.get(args.doctrine)
    if expected is not None:
        out["expected_violation"] = expected
    out["status"] = "ok" if not failing else "violations"
    return out


def cmd_complete(args) -> dict:
    try:
        doc, _, _ = doctrine.instance(args.doctrine)
    except GrailError as exc:
        raise UsageError(str(exc)) from None
    grid = _grid_arg(args.grid)
    if doc.kind == "kripke":
        spaces = completion.element_spaces(doc, max_size=min(args.max_size, 2), grid=grid)
    else:
        spaces = completion.grid_spaces(doc, max_size=args.max_size, grid=grid)
    cap = args.grade_cap if args.grade_cap is not None else completion.DISCRETE_CAP
    samples = args.samples if args.samples is not None else 24
    rep = completion.completion_report(doc, spaces, grid=grid, samples=samples, seed=args.seed, cap=cap)
    items = rep.pop("axioms")
    return {"status": "ok" if rep.pop("ok") else "violations", "doctrine": doc.name, **rep, "items": items}


def cmd_prove(args) -> dict:
    from . import sexpr
    th = load_theory_arg(args)
    ctx = syntax.parse_ctx(sexpr.read_one(args.ctx)) if args.ctx else ()
    goal = syntax.parse_sequent(th.sig, sexpr.read_one(args.goal), ctx)
    if not args.ctx:
        parts = list(goal.hyps) + [goal.concl]
        whole = parts[0]
        for p in parts[1:]:
            whole = syntax.Tensor(whole, p)
        goal = syntax.Sequent(syntax.infer_ctx(th.sig, whole), goal.hyps, goal.concl)
    syntax.check_sequent(th.sig, goal)
    d = calculus.search_bounded(th, goal, args.depth)
    if d is None:
        return {"status": "violations", "goal": str(goal), "found": False, "items": []}
    bad = calculus.check_derivation(th.sig, th.axioms, d)
    return {"status": "ok" if not bad else "violations", "goal": str(goal), "found": True,
            "derivation": calculus.derivation_sexpr(d), "items": [v.to_json() for v in bad]}


COMMANDS = {
    "check-theory": cmd_check_theory,
    "check-derivation": cmd_check_derivation,
    "grade": cmd_grade,
    "eval": cmd_eval,
    "check-model": cmd_check_model,
    "laws": cmd_laws,
    "complete": cmd_complete,
    "prove": cmd_prove,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument("--eps", type=float, default=None, help="tolerance (overrides GRAIL_EPS)")
    common.add_argument("--grade-cap", type=int, default=None, help="largest discrete grade searched")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")

    p = argparse.ArgumentParser(prog="grail", description="Graded linear logic with quantitative equality.")
    p.add_argument("--version", action="version", version=f"grail {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check-theory", parents=[common], help="parse and validate a theory file")
    s.add_argument("file")

    s = sub.add_parser("check-derivation", parents=[common], help="check a derivation file")
    s.add_argument("file")
    s.add_argument("--theory")

    s = sub.add_parser("grade", parents=[common], help="grade of variables in a formula or term")
    s.add_argument("--theory", required=True)
    s.add_argument("--formula")
    s.add_argument("--term")
    s.add_argument("--var", action="append")

    s = sub.add_parser("eval", parents=[common], help="evaluate a formula or sequent in a model")
    s.add_argument("--model", required=True)
    s.add_argument("--theory")
    s.add_argument("--formula")
    s.add_argument("--sequent")
    s.add_argument("--ctx")

    s = sub.add_parser("check-model", parents=[common], help="validate a model against its theory")
    s.add_argument("model")
    s.add_argument("--theory")
    s.add_argument("--lemma-depth", type=int, default=0)

    s = sub.add_parser("laws", parents=[common], help="run the doctrine law suite on an instance")
    s.add_argument("--doctrine", default="quantale", help=", ".join(doctrine.INSTANCES))
    s.add_argument("--max-size", type=int, default=0)
    s.add_argument("--grid")
    s.add_argument("--fragments", action="store_true")

    s = sub.add_parser("complete", parents=[common], help="check the Lipschitz completion of an instance")
    s.add_argument("--doctrine", default="quantale")
    s.add_argument("--max-size", type=int, default=3)
    s.add_argument("--grid")

    s = sub.add_parser("prove", parents=[common], help="bounded proof search")
    s.add_argument("--theory", required=True)
    s.add_argument("--goal", required=True)
    s.add_argument("--ctx")
    s.add_argument("--depth", type=int, default=4)
    return p


def _render(report: dict) -> str:
    lines = [f"{report['command']}: {report['status']}"]
    for k, v in report.items():
        if k in ("command", "status", "items", "derivation"):
            continue
        if isinstance(v, (dict, list)):
            v = json.dumps(v, sort_keys=True)
        lines.append(f"  {k}: {v}")
    for item in report.get("items", []):
        lines.append("  - " + ", ".join(f"{k}={json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v}"
                                        for k, v in item.items()))
    if "derivation" in report:
        lines.append(report["derivation"])
    return "\n".join(lines)


def run(argv=None):
    """Parse argv and execute; returns (exit code, report, parsed args)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        body = COMMANDS[args.command](args)
    except UsageError:
        raise
    except (GrailError, OSError) as exc:
        body = {"status": "error", "error": str(exc), "items": []}
    report = {"command": args.command, **body}
    report["settings"] = {"seed": args.seed, "eps": env_eps(args), "grade_cap": args.grade_cap,
                          "samples": args.samples}
    if args.timing:
        report["seconds"] = round(time.perf_counter() - started, 3)
    return (0 if report["status"] == "ok" else 1), report, args


def main(argv=None) -> int:
    try:
        code, report, args = run(argv)
    except UsageError as exc:
        print(f"grail: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(report, sort_keys=True, indent=2, default=str))
    elif report["command"] == "grade" and report["status"] == "ok":
        for item in report["items"]:
            print(item["grade"] if len(report["items"]) == 1 else f"{item['var']}: {item['grade']}")
    else:
        print(_render(report))
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands: build, derham, dual, eulerian, verify, zoo.  Output is
deterministic for fixed inputs: labels sorted, rationals printed p/q,
no timestamps.  Exit codes: 0 success, 1 when a verify verdict is not
PASS, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .constructors import parse_recipe
from .derham import derham_cohomology, koszul_homology
from .dual import matlis_dual
from .errors import GderhamError
from .gmodule import is_eulerian
from .grading import Mode
from .verify import run_harness


def _parse_window(text: str | None):
    if text is None:
        return None
    text = text.strip()
    if "x" in text:
        lows, highs = [], []
        for axis in text.split("x"):
            parts = axis.strip().split(",")
            if len(parts) != 2:
                raise GderhamError(f"bad window axis {axis!r}; want lo,hi")
            lows.append(int(parts[0]))
            highs.append(int(parts[1]))
        return tuple(lows), tuple(highs)
    lo, sep, hi = text.partition("..")
    if not sep:
        raise GderhamError(f"bad window {text!r}; want lo..hi")
    return int(lo), int(hi)


def _mode(value: str | None) -> Mode | None:
    if value is None:
        return None
    return Mode(value)


def _emit(payload, out: str, as_text, as_csv) -> None:
    if out == "json":
        print(json.dumps(payload, sort_keys=True, indent=2))
    elif out == "csv":
        sys.stdout.write(as_csv())
    else:
        sys.stdout.write(as_text())


def _presentation_text(m) -> str:
    lines = [repr(m)]
    for label in m.support():
        lines.append(f"  label {m.spec.label_to_json(label)}: dim {m.piece_dim(label)}")
    return "\n".join(lines) + "\n"


def _presentation_csv(m) -> str:
    lines = ["label,dim"]
    for label in m.support():
        rendered = (str(label[0]) if m.spec.mode is Mode.COARSE
                    else ";".join(str(v) for v in label))
        lines.append(f"{rendered},{m.piece_dim(label)}")
    return "\n".join(lines) + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="gderham",
        description="Exact cohomology and duality for graded Weyl-algebra modules")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, recipe_required=True):
        p.add_argument("--recipe", required=recipe_required,
                       help='module recipe, e.g. "E(n=2)" or "sum(E(n=1),E(n=1))"')
        p.add_argument("--mode", choices=["coarse", "fine"], default=None)
        p.add_argument("--window", default=None,
                       help='box override: "lo..hi" or per-axis "a,b x c,d"')
        p.add_argument("--out", choices=["json", "csv", "text"], default="json")

    common(sub.add_parser("build", help="print the presentation"))
    derham_p = sub.add_parser("derham", help="cohomology table")
    common(derham_p)
    derham_p.add_argument("--homological", action="store_true",
                          help="report the homologically indexed table instead")
    common(sub.add_parser("dual", help="print the dual presentation"))
    common(sub.add_parser("eulerian", help="Euler eigenvalue check"))
    verify_p = sub.add_parser("verify", help="run theorem checks")
    common(verify_p, recipe_required=False)
    verify_p.add_argument("--theorem", default="all",
                          choices=["duality", "surjections", "injections",
                                   "eulerian", "noninjectivity", "all"])
    verify_p.add_argument("--parallel", type=int, default=1)
    zoo_p = sub.add_parser("zoo", help="list the built-in module zoo")
    zoo_p.add_argument("--out", choices=["json", "csv", "text"], default="json")

    if argv is None:
        argv = sys.argv[1:]
    # argparse rejects option values with a leading dash; fold window
    # values like "-3..3" into --window=... form
    folded = []
    skip = False
    for k, tok in enumerate(argv):
        if skip:
            skip = False
            continue
        if tok == "--window" and k + 1 < len(argv):
            folded.append(f"--window={argv[k + 1]}")
            skip = True
        else:
            folded.append(tok)
    args = parser.parse_args(folded)
    try:
        return _dispatch(args)
    except GderhamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "zoo":
        from .verify import ZOO_RECIPES
        payload = [{"recipe": recipe, "mode": mode.value}
                   for recipe, mode in ZOO_RECIPES]
        _emit(payload, args.out,
              lambda: "".join(f"{p['recipe']}  [{p['mode']}]\n" for p in payload),
              lambda: "recipe,mode\n" + "".join(
                  f"\"{p['recipe']}\",{p['mode']}\n" for p in payload))
        return 0

    if args.command == "verify":
        reports = run_harness(args.theorem, args.recipe, _mode(args.mode),
                              _parse_window(args.window), args.parallel)
        payload = [r.to_json_dict() for r in reports]
        _emit(payload, args.out,
              lambda: "".join(
                  f"{r.verdict:12s} {r.theorem:20s} {r.recipe}\n" for r in reports),
              lambda: "theorem,recipe,verdict\n" + "".join(
                  f"{r.theorem},\"{r.recipe}\",{r.verdict}\n" for r in reports))
        return 0 if all(r.passed for r in reports) else 1

    m = parse_recipe(args.recipe, _mode(args.mode), _parse_window(args.window))
    if args.command == "build":
        _emit(m.to_json_dict(), args.out,
              lambda: _presentation_text(m), lambda: _presentation_csv(m))
        return 0
    if args.command == "dual":
        d = matlis_dual(m)
        _emit(d.to_json_dict(), args.out,
              lambda: _presentation_text(d), lambda: _presentation_csv(d))
        return 0
    if args.command == "derham":
        table = (koszul_homology(m) if getattr(args, "homological", False)
                 else derham_cohomology(m))
        _emit(table.to_json_dict(), args.out, table.to_text, table.to_csv)
        return 0
    if args.command == "eulerian":
        report = is_eulerian(m)
        payload = {
            "recipe": args.recipe,
            "eulerian": report.ok,
            "labels_checked": report.labels_checked,
            "witness": None if report.ok else {
                "label": m.spec.label_to_json(report.witness_label),
                "defect": [[r, c, str(v)] for r, c, v in report.defect.entries()],
            },
        }
        _emit(payload, args.out,
              lambda: (f"eulerian: {report.ok}"
                       + ("" if report.ok else
                          f" (witness at {report.witness_label})") + "\n"),
              lambda: f"recipe,eulerian\n\"{args.recipe}\",{report.ok}\n")
        return 0
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())

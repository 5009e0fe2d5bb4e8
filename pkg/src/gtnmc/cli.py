"""Command-line entry point.

Exit status: 0 when the property holds / a plan exists / a replay is accepted,
1 when it is refuted / unreachable / rejected, 2 on a fault or resource limit,
64 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from typing import Optional

from gtnmc.dsl import ast as A
from gtnmc.dsl.parser import parse_expr, parse_model
from gtnmc.dsl.printer import format_assertion, format_expr
from gtnmc.errors import MissionFailed, ModelError, NotUnsatisfiable, ParseError
from gtnmc.explorer import (
    Accepted,
    SearchOptions,
    as_interpreter,
    check_assertion,
    model_digest,
    read_trace,
    replay,
    write_trace,
)

EXIT_OK, EXIT_REFUTED, EXIT_FAULT, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _bound(text: str) -> tuple:
    try:
        lo, hi = (int(x) for x in text.split(".."))
    except ValueError:
        raise argparse.ArgumentTypeError("expected LO..HI") from None
    if lo > hi:
        raise argparse.ArgumentTypeError("empty range")
    return lo, hi


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-states", type=_positive, default=None, help="state cap for every search")
    common.add_argument("--workers", type=_positive, default=1, help="explorer worker threads")
    common.add_argument("--default-bound", type=_bound, default=None, metavar="LO..HI",
                        help="range of variables declared without one")
    common.add_argument("--emit-stats", action="store_true", help="print a machine-readable stats line")
    common.add_argument("--output", "-o", default=None, help="output file or directory")

    p = _Parser(prog="gtnmc", description="Model checking, planning and mission simulation.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", parents=[common], help="check the assertions of a model")
    c.add_argument("model")
    c.add_argument("--assert", dest="inline", action="append", default=None,
                   help="inline assertion, replacing those in the file (repeatable)")

    pl = sub.add_parser("plan", parents=[common], help="optimal plan for a model or a mission config")
    pl.add_argument("path", help="model file, or mission config (.json)")
    pl.add_argument("--entry", default="main()")
    pl.add_argument("--goal", default=None)
    pl.add_argument("--objective", default=None, help="variable to optimise")
    pl.add_argument("--direction", choices=("max", "min"), default="max")

    g = sub.add_parser("gtn", parents=[common], help="translate and solve a goal task network")
    g.add_argument("problem")
    g.add_argument("--goal", required=True)
    g.add_argument("--objective", default=None, metavar="VAR[:max|min]")
    g.add_argument("--emit-model", action="store_true", help="print the translated model")

    m = sub.add_parser("muc", parents=[common], help="minimal incompatible goal subset")
    m.add_argument("model")
    m.add_argument("ledger", help="ledger JSON with the goal list")
    m.add_argument("--entry", default="main()")
    m.add_argument("--seed", type=int, default=None)

    r = sub.add_parser("replay", parents=[common], help="replay a trace file against a model")
    r.add_argument("model")
    r.add_argument("trace")
    r.add_argument("--entry", default=None, help="defaults to the entry recorded in the trace")
    r.add_argument("--goal", default=None)

    ms = sub.add_parser("mission", parents=[common], help="simulate a survey mission")
    src = ms.add_mutually_exclusive_group()
    src.add_argument("config", nargs="?", default=None, help="mission config (.json)")
    src.add_argument("--profile", choices=("scenario", "verification"), default=None)
    ms.add_argument("--seed", type=int, default=None)
    ms.add_argument("--level", type=int, choices=(1, 2), default=None)
    ms.add_argument("--emit-model", action="store_true", help="write the planning model instead of simulating")
    return p


def _options(args) -> SearchOptions:
    opts = SearchOptions(workers=args.workers)
    if args.max_states is not None:
        opts.max_states = args.max_states
    if args.default_bound is not None:
        opts.default_bound = args.default_bound
    return opts


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _load_model(path: str, inline=None) -> A.Model:
    text = _read(path)
    model = parse_model(text, path)
    if inline:
        extra = "".join(f"\n#assert {a.strip().rstrip(';')};" for a in inline)
        with_inline = parse_model(text + extra, path)
        model = A.Model(model.vars, model.defines, model.procs, with_inline.assertions[len(model.assertions):])
    return model


def _out_path(args, default_name: str) -> str:
    if args.output is None:
        return default_name
    if os.path.isdir(args.output):
        return os.path.join(args.output, default_name)
    return args.output


def _stats(args, stats, out):
    if args.emit_stats and stats is not None:
        print(stats.line(), file=out)


# ---------------------------------------------------------------- commands


def cmd_check(args, out) -> int:
    model = _load_model(args.model, args.inline)
    if not model.assertions:
        raise UsageError("the model has no assertions; pass --assert")
    interp = as_interpreter(model, _options(args).default_bound)
    outdir = args.output or "."
    if args.output and not os.path.isdir(outdir):
        os.makedirs(outdir, exist_ok=True)
    status = EXIT_OK
    base = os.path.splitext(os.path.basename(args.model))[0]
    for i, a in enumerate(model.assertions, 1):
        res = check_assertion(interp, a, _options(args))
        line = f"{'VALID' if res.holds else 'INVALID'} {format_assertion(a)}"
        trace = res.witness_trace
        if trace is not None:
            path = os.path.join(outdir, f"{base}.{i}.trace")
            write_trace(path, trace, interp.layout, model, a.process)
            line += f" trace={path}"
        print(line, file=out)
        _stats(args, res.stats, out)
        if not res.holds:
            status = EXIT_REFUTED
    return status


def _first_optimal(model: A.Model):
    for a in model.assertions:
        if isinstance(a, A.ReachesOptimal):
            return a
    return None


def cmd_plan(args, out) -> int:
    if args.path.endswith(".json"):
        from gtnmc import mission

        cfg = mission.load_config(args.path)
        model = mission.build_mission_model(cfg)
        entry, goal = mission.ENTRY, parse_expr(mission.mission_goal(cfg))
        objective, direction = mission.CURRENCY, "max"
    else:
        model = _load_model(args.path)
        declared = _first_optimal(model)
        entry = args.entry if declared is None else declared.process
        if args.goal is not None:
            goal = parse_expr(args.goal, model)
        elif declared is not None:
            goal = declared.goal
        else:
            raise UsageError("no goal: pass --goal or add a 'reaches ... with' assertion")
        objective = args.objective or (declared.objective if declared else None)
        direction = args.direction if args.objective or declared is None else declared.direction
        if objective is None:
            raise UsageError("no objective: pass --objective")
    from gtnmc.explorer import check_reaches_optimal

    interp = as_interpreter(model, _options(args).default_bound)
    res = check_reaches_optimal(interp, entry, goal, objective, direction, _options(args))
    _stats(args, res.stats, out)
    if not res.holds:
        print("INVALID no plan reaches the goal", file=out)
        return EXIT_REFUTED
    path = _out_path(args, "plan.trace")
    write_trace(path, res.witness, interp.layout, model, entry)
    print(f"VALID {objective}={res.objective_value} steps={len(res.witness)} trace={path}", file=out)
    print(" ".join(res.witness.labels), file=out)
    return EXIT_OK


def cmd_gtn(args, out) -> int:
    from gtnmc import gtn
    from gtnmc.dsl.printer import format_model

    problem = gtn.load_problem(args.problem)
    model = gtn.translate_gtn(problem)
    if args.emit_model:
        print(format_model(model), file=out)
    objective = None
    if args.objective:
        var, _, direction = args.objective.partition(":")
        objective = (var, direction or "max")
        if objective[1] not in ("max", "min"):
            raise UsageError("objective direction must be max or min")
    res = gtn.solve_gtn(problem, args.goal, objective, _options(args), model=model)
    _stats(args, res.stats, out)
    if not res.holds:
        print("INVALID goal unreachable", file=out)
        return EXIT_REFUTED
    trace = res.witness_trace
    path = _out_path(args, "gtn.trace")
    write_trace(path, trace, as_interpreter(model).layout, model, gtn.entry_call(problem))
    print(f"VALID steps={len(trace)} trace={path}", file=out)
    print(" ".join(trace.labels), file=out)
    return EXIT_OK


def cmd_muc(args, out) -> int:
    from gtnmc.goals import find_muc, load_ledger

    model = _load_model(args.model)
    ledger = load_ledger(args.ledger)
    seed = _seed(args.seed, out)
    try:
        core = find_muc(model, args.entry, ledger.goals, seed=seed, options=_options(args))
    except NotUnsatisfiable:
        print("COMPATIBLE the goal set is jointly reachable", file=out)
        return EXIT_OK
    print("INCOMPATIBLE " + " ".join(g.name for g in core), file=out)
    for g in core:
        print(f"  {g.name}: {format_expr(g.cond)}", file=out)
    return EXIT_REFUTED


def cmd_replay(args, out) -> int:
    model = _load_model(args.model)
    tf = read_trace(args.trace)
    if tf.digest and tf.digest != model_digest(model):
        print(f"warning: trace was recorded against model {tf.digest}", file=sys.stderr)
    entry = args.entry or tf.entry or "main()"
    goal = parse_expr(args.goal, model) if args.goal else None
    verdict = replay(model, entry, tf.labels, goal, _options(args).default_bound)
    if isinstance(verdict, Accepted):
        print(f"ACCEPTED steps={len(tf.labels)}", file=out)
        return EXIT_OK
    print(f"REJECTED index={verdict.index} reason={verdict.reason} detail={verdict.detail}", file=out)
    return EXIT_REFUTED


def _seed(seed: Optional[int], out) -> int:
    if seed is None:
        seed = random.SystemRandom().randrange(2 ** 31)
        print(f"seed {seed}", file=out)
    return seed


def cmd_mission(args, out) -> int:
    from gtnmc import mission

    if args.config:
        cfg = mission.load_config(args.config)
    elif args.profile == "verification":
        cfg = mission.verification_profile()
    else:
        cfg = mission.scenario_profile()
    if args.level is not None:
        cfg.level = args.level
    if args.emit_model:
        from gtnmc.dsl.printer import format_model

        _write_log(args, format_model(mission.build_mission_model(cfg)), out, "mission.model")
        return EXIT_OK
    cfg.seed = _seed(args.seed, out)
    try:
        log = mission.run_mission(cfg, _options(args))
    except MissionFailed as e:
        text = e.log.text() if e.log else ""
        _write_log(args, text, out)
        print(f"FAILED {e}", file=out)
        return EXIT_REFUTED
    text = f"# seed {cfg.seed}\n" + log.text()
    _write_log(args, text, out)
    print(f"{'DONE' if log.outcome == 'recovered' else 'ABORTED'} outcome={log.outcome} "
          f"scales={','.join(map(str, log.scales))}", file=out)
    return EXIT_OK if log.outcome == "recovered" else EXIT_REFUTED


def _write_log(args, text: str, out, name: str = "mission.log"):
    if args.output:
        with open(_out_path(args, name), "w", encoding="utf-8") as f:
            f.write(text)
    else:
        out.write(text)


COMMANDS = {
    "check": cmd_check,
    "plan": cmd_plan,
    "gtn": cmd_gtn,
    "muc": cmd_muc,
    "replay": cmd_replay,
    "mission": cmd_mission,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as e:
        print(e.format(), file=sys.stderr)
        return EXIT_FAULT
    except (ModelError, json.JSONDecodeError, KeyError, ValueError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAULT


if __name__ == "__main__":
    sys.exit(main())

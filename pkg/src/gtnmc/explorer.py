"""Explicit-state search: reachability, optimal witnesses, safety, deadlock, replay.

All searches are breadth-first.  Successors of a configuration are visited in
label order and each BFS level is processed in discovery order, so the first
path found to any configuration is the shortest one and, among those, the
lexicographically smallest label sequence.
"""

from __future__ import annotations

import hashlib
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Union

from gtnmc.dsl import ast as A
from gtnmc.dsl.parser import expand_with, parse_expr, parse_proc
from gtnmc.dsl.printer import format_expr, format_model, format_proc
from gtnmc.dsl.validate import DEFAULT_BOUND
from gtnmc.errors import EvalFault, ModelError, RangeFault, RecursionFault, StateLimitExceeded, StateSpaceFault
from gtnmc.semantics import Interpreter, run_deep

DEFAULT_MAX_STATES = 50_000_000
DEFAULT_MAX_DEPTH = 1_000_000


@dataclass
class SearchOptions:
    max_states: int = DEFAULT_MAX_STATES
    max_depth: int = DEFAULT_MAX_DEPTH
    workers: int = 1
    default_bound: tuple = DEFAULT_BOUND


@dataclass
class Stats:
    states: int = 0
    transitions: int = 0
    peak_frontier: int = 0
    wall_ms: float = 0.0

    def line(self) -> str:
        return (f"stats states={self.states} transitions={self.transitions} "
                f"peak_frontier={self.peak_frontier} wall_ms={self.wall_ms:.1f}")


@dataclass(frozen=True)
class TraceStep:
    label: str
    valuation: tuple


@dataclass
class WitnessTrace:
    """Labels with the valuation reached after each one."""

    initial: tuple
    steps: list = field(default_factory=list)
    origin: str = ""

    @property
    def labels(self) -> list:
        return [s.label for s in self.steps]

    @property
    def final(self) -> tuple:
        return self.steps[-1].valuation if self.steps else self.initial

    def __len__(self) -> int:
        return len(self.steps)


# ---------------------------------------------------------------- results


@dataclass
class CheckResult:
    stats: Stats = field(default_factory=Stats, kw_only=True)
    holds = False

    @property
    def witness_trace(self) -> Optional[WitnessTrace]:
        return None


@dataclass
class Reachable(CheckResult):
    witness: WitnessTrace
    holds = True

    @property
    def witness_trace(self):
        return self.witness


@dataclass
class Unreachable(CheckResult):
    pass


@dataclass
class Optimal(CheckResult):
    witness: WitnessTrace
    objective_value: int
    holds = True

    @property
    def witness_trace(self):
        return self.witness


@dataclass
class SafetyHolds(CheckResult):
    holds = True


@dataclass
class SafetyViolated(CheckResult):
    counterexample: WitnessTrace

    @property
    def witness_trace(self):
        return self.counterexample


@dataclass
class DeadlockFound(CheckResult):
    trace: WitnessTrace

    @property
    def witness_trace(self):
        return self.trace


@dataclass
class DeadlockFreeOk(CheckResult):
    holds = True


@dataclass
class Accepted:
    final: tuple
    trace: WitnessTrace
    accepted = True


@dataclass
class Rejected:
    index: int
    reason: str  # no-such-enabled-label | ambiguous | fault | goal-not-reached
    detail: str = ""
    accepted = False


ReplayVerdict = Union[Accepted, Rejected]


# ---------------------------------------------------------------- helpers


def as_interpreter(model, default_bound=DEFAULT_BOUND) -> Interpreter:
    if isinstance(model, Interpreter):
        return model
    return Interpreter(model, default_bound=default_bound)


def as_call(entry) -> A.Call:
    if isinstance(entry, A.Call):
        return entry
    p = parse_proc(entry if "(" in entry else entry + "()")
    if not isinstance(p, A.Call):
        raise ModelError(f"entry must be a process call, got {entry!r}")
    return p


def as_cond(cond, model: A.Model):
    if isinstance(cond, str):
        return parse_expr(cond, model)
    # conditions built elsewhere may still name the model's macros
    return expand_with(cond, model)


def model_digest(model: A.Model) -> str:
    return hashlib.blake2b(format_model(model).encode("utf-8"), digest_size=16).hexdigest()


class _Search:
    """Level-synchronized BFS with parent pointers."""

    def __init__(self, interp: Interpreter, entry: A.Call, opts: SearchOptions, origin: str):
        self.interp = interp
        self.opts = opts
        self.origin = origin
        self.stats = Stats()
        init = interp.initial_config(entry)
        self.init_key = init.key
        self.parents: dict = {self.init_key: None}
        self.depth = 0
        self._t0 = time.perf_counter()

    def trace(self, key) -> WitnessTrace:
        steps = []
        for label, vals in self._walk(key):
            steps.append(TraceStep(label, vals))
        return WitnessTrace(self.init_key[0], steps, self.origin)

    def _walk(self, key):
        chain = []
        while self.parents[key] is not None:
            pred, label = self.parents[key]
            chain.append((label, key[0]))
            key = pred
        chain.reverse()
        return chain

    def labels_to(self, key) -> list:
        return [label for label, _ in self._walk(key)]

    def fault(self, exc: Exception, key) -> StateSpaceFault:
        path = self.labels_to(key)
        label = getattr(exc, "label", None)
        if label is not None:
            path.append(label)
        return StateSpaceFault(exc, path)

    def expand(self, key) -> list:
        vals, proc = key
        try:
            steps = self.interp.raw_steps(vals, proc)
        except (EvalFault, RangeFault, RecursionFault) as e:
            raise self.fault(e, key) from e
        steps.sort(key=lambda st: st[0])
        return steps

    def expand_level(self, frontier: list, pool) -> list:
        if pool is None or len(frontier) < 64:
            return [self.expand(k) for k in frontier]
        n = self.opts.workers
        chunk = (len(frontier) + n - 1) // n
        parts = [frontier[i:i + chunk] for i in range(0, len(frontier), chunk)]
        results = list(pool.map(lambda part: [self.expand(k) for k in part], parts))
        return [steps for part in results for steps in part]

    def run(self, on_new=None, on_expand=None):
        """Explore everything reachable.

        ``on_new(key)`` is called for each new configuration in discovery order
        (the initial one first) and may return a truthy value to stop.
        ``on_expand(key, steps)`` likewise sees each expanded configuration.
        """
        if on_new and on_new(self.init_key):
            return self.finish(self.init_key)
        frontier = [self.init_key]
        pool = None
        prev_stack = None
        if self.opts.workers > 1:
            prev_stack = threading.stack_size(256 * 1024 * 1024)
            pool = ThreadPoolExecutor(max_workers=self.opts.workers)
        try:
            while frontier:
                self.stats.peak_frontier = max(self.stats.peak_frontier, len(frontier))
                if self.depth >= self.opts.max_depth:
                    raise StateLimitExceeded(self.opts.max_depth, "witness length")
                expanded = self.expand_level(frontier, pool)
                self.depth += 1
                nxt = []
                parents = self.parents
                for key, steps in zip(frontier, expanded):
                    self.stats.transitions += len(steps)
                    if on_expand and on_expand(key, steps):
                        return self.finish(key)
                    for label, vals, proc in steps:
                        child = (vals, proc)
                        if child in parents:
                            continue
                        parents[child] = (key, label)
                        if len(parents) > self.opts.max_states:
                            raise StateLimitExceeded(self.opts.max_states)
                        if on_new and on_new(child):
                            return self.finish(child)
                        nxt.append(child)
                frontier = nxt
        finally:
            if pool is not None:
                pool.shutdown()
                threading.stack_size(prev_stack)
        return self.finish(None)

    def finish(self, key):
        self.stats.states = len(self.parents)
        self.stats.wall_ms = (time.perf_counter() - self._t0) * 1000
        return key


def _opts(options: Optional[SearchOptions], kw: dict) -> SearchOptions:
    opts = options or SearchOptions()
    for k, v in kw.items():
        setattr(opts, k, v)
    return opts


def _goal_pred(search: _Search, interp: Interpreter, cond):
    fn = interp.expr_fn(cond)

    def pred(key):
        try:
            return bool(fn(key[0]))
        except (EvalFault, RangeFault) as e:
            raise search.fault(e, key) from e

    return pred


# ---------------------------------------------------------------- checks


def check_reaches(model, entry, goal, options: Optional[SearchOptions] = None, **kw) -> CheckResult:
    """Shortest witness to a configuration satisfying ``goal``."""
    opts = _opts(options, kw)
    interp = as_interpreter(model, opts.default_bound)
    entry, goal = as_call(entry), as_cond(goal, interp.model)

    def go():
        search = _Search(interp, entry, opts, f"reaches {format_expr(goal)}")
        hit = search.run(on_new=_goal_pred(search, interp, goal))
        if hit is None:
            return Unreachable(stats=search.stats)
        return Reachable(search.trace(hit), stats=search.stats)

    return run_deep(go)


def check_reaches_optimal(model, entry, goal, objective: str, direction: str = "max",
                          options: Optional[SearchOptions] = None, **kw) -> CheckResult:
    """Goal configuration with the extremal objective value, by full enumeration.

    Ties go to the shorter witness, then to the lexicographically smaller one.
    """
    if direction not in ("max", "min"):
        raise ValueError("direction must be 'max' or 'min'")
    opts = _opts(options, kw)
    interp = as_interpreter(model, opts.default_bound)
    entry, goal = as_call(entry), as_cond(goal, interp.model)
    layout = interp.layout
    if objective not in layout.offsets or layout.shapes[objective]:
        raise ModelError(f"objective {objective!r} is not a declared scalar")
    slot = layout.offsets[objective]
    sign = 1 if direction == "max" else -1

    def go():
        search = _Search(interp, entry, opts, f"reaches {format_expr(goal)} with {direction}({objective})")
        is_goal = _goal_pred(search, interp, goal)
        best: list = []

        def on_new(key):
            if is_goal(key):
                score = sign * key[0][slot]
                # discovery order is (depth, lexicographic), so only strictly better replaces
                if not best or score > best[0]:
                    best[:] = [score, key]
            return False

        search.run(on_new=on_new)
        if not best:
            return Unreachable(stats=search.stats)
        key = best[1]
        return Optimal(search.trace(key), key[0][slot], stats=search.stats)

    return run_deep(go)


def check_global_safety(model, entry, cond, options: Optional[SearchOptions] = None, **kw) -> CheckResult:
    """``[] cond``: holds iff no reachable configuration violates ``cond``."""
    opts = _opts(options, kw)
    interp = as_interpreter(model, opts.default_bound)
    cond = as_cond(cond, interp.model)
    res = check_reaches(interp, entry, A.Unary("!", cond), opts)
    if isinstance(res, Reachable):
        res.witness.origin = f"[] {format_expr(cond)}"
        return SafetyViolated(res.witness, stats=res.stats)
    return SafetyHolds(stats=res.stats)


def check_deadlock_free(model, entry, options: Optional[SearchOptions] = None, **kw) -> CheckResult:
    """Looks for a reachable non-terminated configuration without successors."""
    opts = _opts(options, kw)
    interp = as_interpreter(model, opts.default_bound)
    entry = as_call(entry)

    def go():
        search = _Search(interp, entry, opts, "deadlockfree")

        def on_expand(key, steps):
            if steps:
                return False
            try:
                return not interp.is_terminated(key[0], key[1])
            except (EvalFault, RangeFault, RecursionFault) as e:
                raise search.fault(e, key) from e

        hit = search.run(on_expand=on_expand)
        if hit is None:
            return DeadlockFreeOk(stats=search.stats)
        return DeadlockFound(search.trace(hit), stats=search.stats)

    return run_deep(go)


def check_assertion(model, assertion, options: Optional[SearchOptions] = None, **kw) -> CheckResult:
    t = type(assertion)
    if t is A.Reaches:
        return check_reaches(model, assertion.process, assertion.goal, options, **kw)
    if t is A.ReachesOptimal:
        return check_reaches_optimal(model, assertion.process, assertion.goal, assertion.objective,
                                     assertion.direction, options, **kw)
    if t is A.GlobalSafety:
        return check_global_safety(model, assertion.process, assertion.cond, options, **kw)
    if t is A.DeadlockFree:
        return check_deadlock_free(model, assertion.process, options, **kw)
    raise TypeError(f"not an assertion: {assertion!r}")


# ---------------------------------------------------------------- replay


def replay(model, entry, labels, goal=None, default_bound=DEFAULT_BOUND) -> ReplayVerdict:
    """Execute a label sequence from the initial configuration.

    A label must match exactly one distinct successor; if ``goal`` is given the
    final valuation must also satisfy it.
    """
    interp = as_interpreter(model, default_bound)
    entry = as_call(entry)
    goal = as_cond(goal, interp.model) if goal is not None else None

    def go():
        cfg = interp.initial_config(entry)
        vals, proc = cfg.key
        trace = WitnessTrace(vals, [], "replay")
        for i, label in enumerate(labels):
            try:
                steps = interp.raw_steps(vals, proc)
            except (EvalFault, RangeFault, RecursionFault) as e:
                return Rejected(i, "fault", str(e))
            targets = list(dict.fromkeys((v, p) for lab, v, p in steps if lab == label))
            if not targets:
                return Rejected(i, "no-such-enabled-label", label)
            if len(targets) > 1:
                return Rejected(i, "ambiguous", label)
            vals, proc = targets[0]
            trace.steps.append(TraceStep(label, vals))
        if goal is not None:
            try:
                ok = interp.eval_cond(vals, goal)
            except (EvalFault, RangeFault) as e:
                return Rejected(len(labels), "fault", str(e))
            if not ok:
                return Rejected(len(labels), "goal-not-reached", format_expr(goal))
        return Accepted(vals, trace)

    return run_deep(go)


# ---------------------------------------------------------------- trace files


def format_trace(trace: WitnessTrace, layout, model: A.Model, entry) -> str:
    entry = as_call(entry)
    lines = [f"# model {model_digest(model)} entry {format_proc(entry)}"]
    if trace.origin:
        lines.append(f"# origin {trace.origin}")
    prev = trace.initial
    for i, step in enumerate(trace.steps, 1):
        changes = ",".join(f"{n}={v}" for n, v in layout.changed(prev, step.valuation)) or "-"
        lines.append(f"{i} {step.label} {changes}")
        prev = step.valuation
    return "\n".join(lines) + "\n"


def write_trace(path, trace: WitnessTrace, layout, model: A.Model, entry):
    with open(path, "w", encoding="utf-8") as f:
        f.write(format_trace(trace, layout, model, entry))


@dataclass
class TraceFile:
    digest: str
    entry: str
    labels: list
    changes: list  # per step: {slot name: value}


def parse_trace(text: str) -> TraceFile:
    digest = entry = ""
    labels, changes = [], []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) >= 4 and parts[0] == "model" and parts[2] == "entry":
                digest, entry = parts[1], " ".join(parts[3:])
            continue
        parts = line.split(None, 2)
        if len(parts) < 2 or not parts[0].isdigit():
            raise ValueError(f"trace line {n}: expected '<index> <label> <changes>'")
        labels.append(parts[1])
        delta = {}
        if len(parts) == 3 and parts[2] != "-":
            for item in _split_changes(parts[2]):
                name, _, value = item.rpartition("=")
                delta[name] = int(value)
        changes.append(delta)
    return TraceFile(digest, entry, labels, changes)


def _split_changes(text: str) -> list:
    # commas may appear inside multi-dimensional slot names only as "][", so a plain split is safe
    return [x for x in text.split(",") if x]


def read_trace(path) -> TraceFile:
    with open(path, encoding="utf-8") as f:
        return parse_trace(f.read())


def terminating_traces(model, entry, max_len: int, default_bound=DEFAULT_BOUND) -> set:
    """Label sequences of runs of length <= ``max_len`` ending in a terminated configuration."""
    interp = as_interpreter(model, default_bound)
    entry = as_call(entry)

    def go():
        out = set()
        init = interp.initial_config(entry)
        stack = [(init.valuation, init.process, ())]
        seen = set()
        while stack:
            vals, proc, labels = stack.pop()
            if (vals, proc, labels) in seen:
                continue
            seen.add((vals, proc, labels))
            if interp.is_terminated(vals, proc):
                out.add(labels)
            if len(labels) < max_len:
                for label, v2, p2 in interp.raw_steps(vals, proc):
                    stack.append((v2, p2, labels + (label,)))
        return out

    return run_deep(go)

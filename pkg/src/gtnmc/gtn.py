"""Goal task networks: data model, a direct executor and translation to a process model.

A node ``e`` has sub-nodes, a guard and a transition.  Executing ``e`` means
running any of its sub-nodes zero or more times (each run being a full
execution of that sub-node) and then firing ``e`` itself.  ``translate_gtn``
emits the matching process definitions, so the event sequences of the model's
terminating runs are exactly the executions enumerated here.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Optional

from gtnmc.dsl import ast as A
from gtnmc.dsl.parser import parse_expr, parse_model, parse_program
from gtnmc.errors import EvalFault, ModelError, RangeFault
from gtnmc.explorer import SearchOptions, as_interpreter, check_reaches, check_reaches_optimal
from gtnmc.semantics import Interpreter

# node ids double as event labels: a name with optional numeric parts ("goto.3")
_ID_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(\.[0-9]+)*$")


class GtnFault(ModelError):
    """Guard or transition fault while executing a GTN, with the partial execution."""

    def __init__(self, cause: Exception, partial=()):
        self.cause = cause
        self.partial = tuple(partial)
        super().__init__(f"{cause} (after {' '.join(self.partial) or '<start>'})")


@dataclass(frozen=True)
class GtnNode:
    id: str
    subs: tuple = ()
    guard: object = A.BoolLit(True)
    transition: A.Program = A.EMPTY_PROGRAM
    kind: str = "task"

    @property
    def primitive(self) -> bool:
        return not self.subs


@dataclass
class GtnProblem:
    root: str
    nodes: dict  # id -> GtnNode, in definition order
    variables: tuple  # VarDecl
    initial: dict = field(default_factory=dict)  # overrides of declared initial values

    def __post_init__(self):
        self._interp: Optional[Interpreter] = None
        self._check()

    def _check(self):
        if self.root not in self.nodes:
            raise ModelError(f"root {self.root!r} is not a node")
        for n in self.nodes.values():
            if not _ID_RE.match(n.id):
                raise ModelError(f"invalid node id {n.id!r}")
            for s in n.subs:
                if s not in self.nodes:
                    raise ModelError(f"node {n.id!r} lists unknown sub-node {s!r}")
        # hierarchy must be acyclic
        state: dict = {}

        def visit(nid, path):
            if state.get(nid) == 1:
                raise ModelError("cyclic sub-node hierarchy: " + " -> ".join(path + (nid,)))
            if state.get(nid) == 2:
                return
            state[nid] = 1
            for s in self.nodes[nid].subs:
                visit(s, path + (nid,))
            state[nid] = 2

        for nid in self.nodes:
            visit(nid, ())
        names = {}
        for nid in self.nodes:
            for pname in (proc_name(nid), "trans_" + proc_name(nid), "sub_" + proc_name(nid)):
                if pname in names and names[pname] != nid:
                    raise ModelError(f"nodes {names[pname]!r} and {nid!r} map to the same process {pname!r}")
                names[pname] = nid

    @property
    def root_node(self) -> GtnNode:
        return self.nodes[self.root]

    @property
    def interpreter(self) -> Interpreter:
        if self._interp is None:
            self._interp = Interpreter(A.Model(vars=self.variables))
        return self._interp

    def initial_valuation(self) -> tuple:
        return self.interpreter.layout.make(self.initial)


@dataclass(frozen=True)
class GtnExecution:
    """Fired node ids and the valuations ``s_0 .. s_n`` around them."""

    nodes: tuple
    states: tuple


class _NotEnabled:
    def __bool__(self):
        return False

    def __repr__(self):
        return "NotEnabled"


NotEnabled = _NotEnabled()


def proc_name(node_id: str) -> str:
    return node_id.replace(".", "_")


def gtn_fire(problem: GtnProblem, node, valuation):
    """Fire one node: the new valuation, or ``NotEnabled`` when the guard is false."""
    if isinstance(node, str):
        node = problem.nodes[node]
    interp = problem.interpreter
    try:
        if not interp.eval_cond(valuation, node.guard):
            return NotEnabled
        return interp.exec_program(valuation, node.transition)
    except (EvalFault, RangeFault) as e:
        raise GtnFault(e, (node.id,)) from e


def enumerate_executions(problem: GtnProblem, max_steps: int, start=None) -> list:
    """Every valid execution of the root with at most ``max_steps`` firings.

    Sorted by length, then by node ids.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be positive")
    s0 = problem.initial_valuation() if start is None else tuple(start)
    memo_runs: dict = {}
    memo_subs: dict = {}

    def runs(nid, s, budget):
        # [(ids, states after each firing)] for complete executions of nid
        key = (nid, s, budget)
        if key in memo_runs:
            return memo_runs[key]
        node = problem.nodes[nid]
        out = []
        if budget >= 1:
            for ids, states in sub_runs(node, s, budget - 1):
                pre = states[-1] if states else s
                try:
                    post = gtn_fire(problem, node, pre)
                except GtnFault as e:
                    raise GtnFault(e.cause, ids + (nid,)) from e.cause
                if post is not NotEnabled:
                    out.append((ids + (nid,), states + (post,)))
        memo_runs[key] = out
        return out

    def sub_runs(node, s, budget):
        key = (node.id, s, budget)
        if key in memo_subs:
            return memo_subs[key]
        out = {(): ()}
        if node.subs and budget >= 1:
            for child in node.subs:
                for ids, states in runs(child, s, budget):
                    rest_budget = budget - len(ids)
                    for ids2, states2 in sub_runs(node, states[-1], rest_budget):
                        out.setdefault(ids + ids2, states + states2)
        result = list(out.items())
        memo_subs[key] = result
        return result

    found = {}
    for ids, states in runs(problem.root, s0, max_steps):
        found.setdefault(ids, (s0,) + states)
    return [GtnExecution(ids, found[ids]) for ids in sorted(found, key=lambda k: (len(k), k))]


def _label(node_id: str) -> A.Label:
    name, *parts = node_id.split(".")
    return A.Label(name, tuple(A.IntLit(int(p)) for p in parts))


def _init_expr(values: list):
    if len(values) == 1:
        return A.IntLit(values[0])
    runs: list = []
    for v in values:
        if runs and runs[-1][0] == v:
            runs[-1][1] += 1
        else:
            runs.append([v, 1])
    return tuple((A.IntLit(v), A.IntLit(n)) for v, n in runs)


def _choice(calls: list, cls=A.InternalChoice):
    out = calls[0]
    for c in calls[1:]:
        out = cls(out, c)
    return out


def translate_gtn(problem: GtnProblem) -> A.Model:
    """Process model whose ``<root>()`` runs are the executions of the root node."""
    layout = problem.interpreter.layout
    init = problem.initial_valuation()
    vars_ = []
    for v in problem.variables:
        off = layout.offsets[v.name]
        values = list(init[off:off + layout.size(v.name)])
        vars_.append(A.VarDecl(v.name, v.dims, v.lo, v.hi, _init_expr(values) if v.dims else A.IntLit(values[0])))
    procs = []
    for node in problem.nodes.values():
        name = proc_name(node.id)
        trans = A.ProcDef("trans_" + name, (),
                          A.Guarded(node.guard, A.EventPrefix(_label(node.id), node.transition, A.SKIP)))
        procs.append(trans)
        if node.primitive:
            procs.append(A.ProcDef(name, (), A.Call(trans.name)))
            continue
        sub = "sub_" + name
        repeat = A.InternalChoice(A.Call(sub), A.SKIP)
        procs.append(A.ProcDef(sub, (), A.Seq(_choice([A.Call(proc_name(s)) for s in node.subs]), repeat)))
        # zero or more sub-node runs, then the node's own firing
        procs.append(A.ProcDef(name, (), A.Seq(repeat, A.Call(trans.name))))
    return A.Model(vars=tuple(vars_), procs=tuple(procs))


def entry_call(problem: GtnProblem) -> A.Call:
    return A.Call(proc_name(problem.root))


def solve_gtn(problem: GtnProblem, goal, objective: Optional[tuple] = None,
              options: Optional[SearchOptions] = None, model: Optional[A.Model] = None):
    """Translate and search; witness labels are node ids.

    ``objective`` is ``(variable, 'max' | 'min')`` for an optimal plan.
    """
    model = model or translate_gtn(problem)
    interp = as_interpreter(model)
    if isinstance(goal, str):
        goal = parse_expr(goal)
    if objective is None:
        return check_reaches(interp, entry_call(problem), goal, options)
    var, direction = objective
    return check_reaches_optimal(interp, entry_call(problem), goal, var, direction, options)


# ---------------------------------------------------------------- files


def _parse_variables(spec) -> tuple:
    if isinstance(spec, str):
        spec = [spec]
    decls = []
    for item in spec:
        if isinstance(item, str):
            text = item if item.strip().endswith(";") else item + ";"
            decls.extend(parse_model(text, "<variables>").vars)
            continue
        name = item["name"]
        dims = tuple(A.IntLit(int(d)) for d in _as_list(item.get("length", item.get("dims", []))))
        lo = hi = None
        if "range" in item:
            lo, hi = (A.IntLit(int(x)) for x in item["range"])
        init = item.get("init", 0)
        if isinstance(init, list):
            init_expr = tuple((A.IntLit(int(x)), A.IntLit(1)) for x in init)
        else:
            init_expr = A.IntLit(int(init))
        decls.append(A.VarDecl(name, dims, lo, hi, init_expr))
    return tuple(decls)


def _as_list(x):
    if isinstance(x, list):
        return x
    return [x] if x else []


def problem_from_dict(data: dict) -> GtnProblem:
    variables = _parse_variables(data.get("variables", []))
    nodes = {}
    for item in data["nodes"]:
        guard = item.get("guard", "true")
        transition = item.get("transition", "")
        node = GtnNode(
            id=item["id"],
            subs=tuple(item.get("subs", [])),
            guard=parse_expr(guard) if isinstance(guard, str) else guard,
            transition=parse_program(transition) if isinstance(transition, str) else transition,
            kind=item.get("kind", "task"),
        )
        if node.id in nodes:
            raise ModelError(f"duplicate node id {node.id!r}")
        nodes[node.id] = node
    root = data.get("root") or next(iter(nodes))
    return GtnProblem(root, nodes, variables, dict(data.get("initial", {})))


def load_problem(path) -> GtnProblem:
    with open(path, encoding="utf-8") as f:
        return problem_from_dict(json.load(f))

"""Static checks over a parsed model.

``validate_model`` never raises on a parseable model; every problem becomes a
:class:`Finding` in the returned report.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field

from gtnmc import builtins
from gtnmc.dsl import ast as A
from gtnmc.dsl.walk import iter_expr_names, iter_proc_parts, iter_stmt_exprs
from gtnmc.errors import EvalFault

DEFAULT_BOUND = (-1_000_000_000, 1_000_000_000)


class NotConstant(Exception):
    pass


_CMP = {
    "==": operator.eq, "!=": operator.ne, "<": operator.lt,
    "<=": operator.le, ">": operator.gt, ">=": operator.ge,
}


def const_eval(e):
    """Evaluate an expression that must not depend on state or parameters."""
    t = type(e)
    if t is A.IntLit or t is A.DecLit:
        return e.value
    if t is A.BoolLit:
        return int(e.value)
    if t is A.Unary:
        v = const_eval(e.operand)
        return -v if e.op == "-" else int(not v)
    if t is A.Binary:
        a = const_eval(e.left)
        if e.op == "&&":
            return int(bool(a) and bool(const_eval(e.right)))
        if e.op == "||":
            return int(bool(a) or bool(const_eval(e.right)))
        b = const_eval(e.right)
        if e.op in _CMP:
            return int(_CMP[e.op](a, b))
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            return builtins.div(a, b)
        if e.op == "%":
            return builtins.mod(a, b)
        if e.op == "^":
            return builtins.power(a, b)
    if t is A.FuncCall and e.name in builtins.BUILTINS:
        return builtins.BUILTINS[e.name][0](*(const_eval(a) for a in e.args))
    raise NotConstant(e)


def const_int(e) -> int:
    return builtins.to_int(const_eval(e))


def var_shape(v: A.VarDecl) -> tuple:
    return tuple(const_int(d) for d in v.dims)


def var_range(v: A.VarDecl, default=DEFAULT_BOUND) -> tuple:
    if v.lo is None:
        return tuple(default)
    return const_int(v.lo), const_int(v.hi)


def var_init(v: A.VarDecl) -> list:
    """Flattened initial values (row-major for arrays)."""
    shape = var_shape(v)
    size = 1
    for d in shape:
        size *= d
    if v.init is None:
        return [0] * size
    if isinstance(v.init, tuple):
        values = []
        for e, rep in v.init:
            values.extend([const_int(e)] * const_int(rep))
        return values
    return [const_int(v.init)] * size


@dataclass(frozen=True)
class Finding:
    kind: str
    message: str
    where: str = ""

    def __str__(self) -> str:
        return f"{self.where}: {self.message}" if self.where else self.message


@dataclass
class ValidationReport:
    findings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.findings

    def kinds(self) -> list:
        return [f.kind for f in self.findings]

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "\n".join(str(f) for f in self.findings) or "ok"


class _Checker:
    def __init__(self, model: A.Model):
        self.model = model
        self.report = ValidationReport()
        self.shapes: dict = {}
        self.procs = {p.name: p for p in model.procs}

    def add(self, kind: str, message: str, where: str = ""):
        self.report.findings.append(Finding(kind, message, where))

    def run(self) -> ValidationReport:
        for v in self.model.vars:
            self.check_var(v)
        for p in self.model.procs:
            self.check_proc(p)
        for i, a in enumerate(self.model.assertions):
            self.check_assertion(a, f"assertion {i + 1}")
        return self.report

    # ---------------------------------------------------------- variables
    def check_var(self, v: A.VarDecl):
        where = f"var {v.name}"
        try:
            shape = var_shape(v)
        except (NotConstant, EvalFault):
            self.add("non-constant", "array dimensions must be constant", where)
            return
        if any(d < 1 for d in shape):
            self.add("shape", "array dimensions must be positive", where)
            return
        self.shapes[v.name] = shape
        try:
            lo, hi = var_range(v)
        except (NotConstant, EvalFault):
            self.add("non-constant", "range bounds must be constant", where)
            return
        if lo > hi:
            self.add("range", f"empty range {{{lo}..{hi}}}", where)
        try:
            values = var_init(v)
        except (NotConstant, EvalFault):
            self.add("non-constant", "initializer must be constant", where)
            return
        size = 1
        for d in shape:
            size *= d
        if len(values) != size:
            self.add("init-length", f"initializer has {len(values)} values, expected {size}", where)
        bad = [x for x in values if not lo <= x <= hi]
        if bad:
            self.add("range", f"initial value {bad[0]} outside {{{lo}..{hi}}}", where)

    # ---------------------------------------------------------- expressions
    def check_expr(self, e, scope: frozenset, where: str):
        for name, is_index, n in iter_expr_names(e, scope):
            if is_index:
                if name not in self.shapes:
                    if self.model.var(name) is None:
                        self.add("unresolved", f"unknown array {name!r}", where)
                    continue
                if n > len(self.shapes[name]):
                    self.add("index-count", f"{name!r} has {len(self.shapes[name])} dimension(s)", where)
            elif name not in self.shapes and self.model.var(name) is None:
                self.add("unresolved", f"unknown identifier {name!r}", where)
            elif self.shapes.get(name):
                if not self._row_arg_ok(e, name):
                    self.add("index-count", f"array {name!r} used without index", where)
        self._check_funcs(e, where)

    def _row_arg_ok(self, e, name: str) -> bool:
        # a bare array name is only meaningful as a row argument to dist()
        for sub in _iter_subexprs(e):
            if type(sub) is A.FuncCall and sub.name in builtins.ROW_ARGS:
                if any(type(a) is A.Name and a.id == name for a in sub.args):
                    return True
        return False

    def _check_funcs(self, e, where: str):
        for sub in _iter_subexprs(e):
            if type(sub) is A.FuncCall:
                spec = builtins.BUILTINS.get(sub.name)
                if spec is None:
                    self.add("unresolved", f"unknown function {sub.name!r}", where)
                elif not spec[1] <= len(sub.args) <= spec[2]:
                    self.add("arity", f"{sub.name}() takes {spec[1]}..{spec[2]} arguments", where)

    def check_stmts(self, stmts, scope: frozenset, where: str):
        for e, bound in iter_stmt_exprs(stmts, scope):
            self.check_expr(e, bound, where)
        for s in _iter_assigns(stmts):
            name = s.target.id if type(s.target) is A.Name else s.target.name
            if name in scope:
                self.add("assign-param", f"cannot assign to parameter or local {name!r}", where)
            elif type(s.target) is A.Index and name in self.shapes:
                if len(s.target.indices) != len(self.shapes[name]):
                    self.add("index-count", f"assignment to {name!r} needs {len(self.shapes[name])} index(es)",
                             where)

    # ---------------------------------------------------------- processes
    def check_call(self, call: A.Call, scope: frozenset, where: str):
        target = self.procs.get(call.name)
        if target is None:
            self.add("unresolved-call", f"call to undefined process {call.name}()", where)
        elif len(target.params) != len(call.args):
            self.add("arity", f"{call.name}() takes {len(target.params)} argument(s), got {len(call.args)}",
                     where)
        for a in call.args:
            self.check_expr(a, scope, where)

    def check_proc(self, p: A.ProcDef):
        where = f"process {p.name}"
        scope = frozenset(p.params)
        for part in iter_proc_parts(p.body):
            t = type(part)
            if t is A.EventPrefix:
                for i in part.label.indices:
                    self.check_expr(i, scope, where)
                self.check_stmts(part.program.stmts, scope, where)
            elif t is A.Guarded or t is A.IfElse:
                self.check_expr(part.cond, scope, where)
            elif t is A.Call:
                self.check_call(part, scope, where)

    def check_assertion(self, a, where: str):
        self.check_call(a.process, frozenset(), where)
        t = type(a)
        if t is A.Reaches or t is A.ReachesOptimal:
            self.check_expr(a.goal, frozenset(), where)
        if t is A.ReachesOptimal:
            v = self.model.var(a.objective)
            if v is None or v.dims:
                self.add("objective", f"objective {a.objective!r} is not a declared scalar", where)
        if t is A.GlobalSafety:
            self.check_expr(a.cond, frozenset(), where)


def _iter_subexprs(e):
    stack = [e]
    while stack:
        x = stack.pop()
        yield x
        t = type(x)
        if t is A.Index:
            stack.extend(x.indices)
        elif t is A.Unary:
            stack.append(x.operand)
        elif t is A.Binary:
            stack.extend((x.left, x.right))
        elif t is A.FuncCall:
            stack.extend(x.args)
        elif t is A.Quant:
            stack.extend((x.lo, x.hi, x.body))


def _iter_assigns(stmts):
    for s in stmts:
        if type(s) is A.Assign:
            yield s
        elif type(s) is A.IfStmt:
            yield from _iter_assigns(s.then)
            yield from _iter_assigns(s.orelse)


def validate_model(model: A.Model) -> ValidationReport:
    """Report unresolved names, arity mismatches and bad initializers."""
    try:
        return _Checker(model).run()
    except Exception as e:  # validation must stay total
        report = ValidationReport()
        report.findings.append(Finding("internal", f"validator could not finish: {e}"))
        return report

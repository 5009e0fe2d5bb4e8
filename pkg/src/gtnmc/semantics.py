"""Operational semantics of the modelling language.

Expressions and statement lists are compiled once into Python functions over
a flat integer valuation.  Process terms are kept in canonical form and
interned per :class:`Interpreter`, so configurations hash and compare cheaply.
"""

from __future__ import annotations

import hashlib
import itertools
import random
import sys
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from gtnmc import builtins
from gtnmc.dsl import ast as A
from gtnmc.dsl.printer import format_proc
from gtnmc.dsl.validate import DEFAULT_BOUND, NotConstant, const_eval, validate_model
from gtnmc.dsl.validate import var_init, var_range, var_shape
from gtnmc.dsl.walk import rewrite_proc
from gtnmc.errors import EvalFault, ModelError, RangeFault, RecursionFault

DEFAULT_RECURSION_LIMIT = 10_000


# ---------------------------------------------------------------- layout


@dataclass
class Layout:
    """Slot assignment for every scalar and array element, in declaration order."""

    names: list
    offsets: dict
    shapes: dict
    ranges: list
    slot_names: list
    init: tuple

    @classmethod
    def from_model(cls, model: A.Model, default_bound=DEFAULT_BOUND) -> "Layout":
        names, offsets, shapes, ranges, slot_names, init = [], {}, {}, [], [], []
        for v in model.vars:
            shape = var_shape(v)
            lo, hi = var_range(v, default_bound)
            names.append(v.name)
            offsets[v.name] = len(ranges)
            shapes[v.name] = shape
            if shape:
                for idx in itertools.product(*(range(d) for d in shape)):
                    slot_names.append(v.name + "".join(f"[{i}]" for i in idx))
            else:
                slot_names.append(v.name)
            values = var_init(v)
            ranges.extend([(lo, hi)] * len(values))
            init.extend(values)
        return cls(names, offsets, shapes, ranges, slot_names, tuple(init))

    def size(self, name: str) -> int:
        n = 1
        for d in self.shapes[name]:
            n *= d
        return n

    def get(self, vals, name: str):
        """Scalar value, or a flat list for an array."""
        off = self.offsets[name]
        if not self.shapes[name]:
            return vals[off]
        return list(vals[off:off + self.size(name)])

    def make(self, overrides: Optional[dict] = None, base=None) -> tuple:
        """Valuation built from ``base`` (default: initial) with named overrides."""
        out = list(self.init if base is None else base)
        for name, value in (overrides or {}).items():
            off = self.offsets[name]
            if isinstance(value, (list, tuple)):
                if len(value) != self.size(name):
                    raise ValueError(f"{name}: expected {self.size(name)} values")
                out[off:off + len(value)] = [int(x) for x in value]
            else:
                out[off] = int(value)
        return tuple(out)

    def as_dict(self, vals) -> dict:
        return {n: self.get(vals, n) for n in self.names}

    def changed(self, before, after) -> list:
        return [(self.slot_names[i], after[i]) for i in range(len(after)) if before[i] != after[i]]

    def slot_of(self, slot_name: str) -> int:
        try:
            return self._slot_index[slot_name]
        except AttributeError:
            self._slot_index = {n: i for i, n in enumerate(self.slot_names)}
            return self._slot_index[slot_name]


# ---------------------------------------------------------------- compilation


def _index(off, shape, name, idx):
    flat = 0
    for i, d in zip(idx, shape):
        if type(i) is not int:
            i = _as_int_index(i, name)
        if i < 0 or i >= d:
            raise EvalFault(f"index {i} out of bounds for {name} (size {d})")
        flat = flat * d + i
    return off + flat


def _row(s, off, shape, name, idx):
    start = _index(off, shape[:len(idx)], name, idx) - off if idx else 0
    width = 1
    for d in shape[len(idx):]:
        width *= d
    start = off + start * width
    return tuple(s[start:start + width])


def _as_int_index(i, name):
    if isinstance(i, (Fraction, float)) and i == int(i):
        return int(i)
    raise EvalFault(f"non-integer index {i} for {name}")


def _range_ints(lo, hi):
    return range(builtins.to_int(lo), builtins.to_int(hi) + 1)


def _store(v, lo, hi, slot):
    if type(v) is not int:
        v = builtins.to_int(v)
    if v < lo or v > hi:
        raise RangeFault(f"{slot} = {v} outside {{{lo}..{hi}}}")
    return v


_BASE_NS = {
    "_div": builtins.div,
    "_mod": builtins.mod,
    "_pow": builtins.power,
    "_ix": _index,
    "_row": _row,
    "_rng": _range_ints,
    "_st": _store,
    "_int": builtins.to_int,
}
for _name, (_fn, _lo, _hi) in builtins.BUILTINS.items():
    _BASE_NS["_f_" + _name] = _fn

_PY_CMP = {"==": "==", "!=": "!=", "<": "<", "<=": "<=", ">": ">", ">=": ">="}
_ASSIGN_OPS = {"+=": "({cur} + {v})", "-=": "({cur} - {v})", "*=": "({cur} * {v})",
               "/=": "_div({cur}, {v})", "%=": "_mod({cur}, {v})"}


class _Codegen:
    def __init__(self, layout: Layout):
        self.layout = layout
        self.ns = dict(_BASE_NS)
        self.counter = itertools.count()

    def const(self, value) -> str:
        name = f"_k{next(self.counter)}"
        self.ns[name] = value
        return name

    def fresh(self, prefix: str) -> str:
        return f"{prefix}{next(self.counter)}"

    # expressions ---------------------------------------------------------
    def expr(self, e, env: dict) -> str:
        t = type(e)
        if t is A.IntLit:
            return repr(e.value) if e.value >= 0 else f"({e.value})"
        if t is A.DecLit:
            return self.const(e.value)
        if t is A.BoolLit:
            return "True" if e.value else "False"
        if t is A.Name:
            if e.id in env:
                return env[e.id]
            if e.id not in self.layout.offsets:
                raise ModelError(f"unresolved identifier {e.id!r}")
            shape = self.layout.shapes[e.id]
            off = self.layout.offsets[e.id]
            if shape:
                return f"tuple(s[{off}:{off + self.layout.size(e.id)}])"
            return f"s[{off}]"
        if t is A.Index:
            return self.index(e, env, read=True)
        if t is A.Unary:
            inner = self.expr(e.operand, env)
            return f"(-{inner})" if e.op == "-" else f"(not {inner})"
        if t is A.Binary:
            a = self.expr(e.left, env)
            b = self.expr(e.right, env)
            op = e.op
            if op == "&&":
                return f"(bool({a}) and bool({b}))"
            if op == "||":
                return f"(bool({a}) or bool({b}))"
            if op in _PY_CMP:
                return f"({a} {op} {b})"
            if op in ("+", "-", "*"):
                return f"({a} {op} {b})"
            if op == "/":
                return f"_div({a}, {b})"
            if op == "%":
                return f"_mod({a}, {b})"
            if op == "^":
                return f"_pow({a}, {b})"
            raise ModelError(f"unknown operator {op!r}")
        if t is A.FuncCall:
            if e.name not in builtins.BUILTINS:
                raise ModelError(f"unknown function {e.name!r}")
            args = ", ".join(self.expr(a, env) for a in e.args)
            return f"_f_{e.name}({args})"
        if t is A.Quant:
            var = self.fresh("_q")
            inner = dict(env)
            inner[e.var] = var
            body = self.expr(e.body, inner)
            fn = "all" if e.op == "&&" else "any"
            lo, hi = self.expr(e.lo, env), self.expr(e.hi, env)
            return f"{fn}(bool({body}) for {var} in _rng({lo}, {hi}))"
        raise ModelError(f"not an expression: {e!r}")

    def index(self, e: A.Index, env: dict, read: bool) -> str:
        if e.name not in self.layout.offsets:
            raise ModelError(f"unresolved array {e.name!r}")
        shape = self.layout.shapes[e.name]
        off = self.layout.offsets[e.name]
        if len(e.indices) > len(shape):
            raise ModelError(f"too many indices for {e.name!r}")
        idx = [self.expr(i, env) for i in e.indices]
        sh = self.const(shape)
        if len(idx) < len(shape):
            if not read:
                raise ModelError(f"cannot assign to a row of {e.name!r}")
            return f"_row(s, {off}, {sh}, {e.name!r}, ({', '.join(idx)},))"
        if all(type(i) is A.IntLit for i in e.indices):
            vals = [i.value for i in e.indices]
            if all(0 <= v < d for v, d in zip(vals, shape)):
                flat = 0
                for v, d in zip(vals, shape):
                    flat = flat * d + v
                pos = str(off + flat)
                return f"s[{pos}]" if read else pos
        pos = f"_ix({off}, {sh}, {e.name!r}, ({', '.join(idx)},))"
        return f"s[{pos}]" if read else pos

    # statements ----------------------------------------------------------
    def stmts(self, stmts, env: dict, indent: str, out: list):
        env = dict(env)
        for st in stmts:
            t = type(st)
            if t is A.LocalVar:
                var = self.fresh("_l")
                out.append(f"{indent}{var} = {self.expr(st.value, env)}")
                env[st.name] = var
            elif t is A.Assign:
                self.assign(st, env, indent, out)
            elif t is A.IfStmt:
                out.append(f"{indent}if {self.expr(st.cond, env)}:")
                self.stmts(st.then, env, indent + "    ", out)
                out.append(f"{indent}    pass")
                if st.orelse:
                    out.append(f"{indent}else:")
                    self.stmts(st.orelse, env, indent + "    ", out)
                    out.append(f"{indent}    pass")
            else:
                raise ModelError(f"not a statement: {st!r}")

    def assign(self, st: A.Assign, env: dict, indent: str, out: list):
        target = st.target
        name = target.id if type(target) is A.Name else target.name
        if name in env:
            raise ModelError(f"cannot assign to local or parameter {name!r}")
        if name not in self.layout.offsets:
            raise ModelError(f"unresolved identifier {name!r}")
        if type(target) is A.Name:
            if self.layout.shapes[name]:
                raise ModelError(f"cannot assign to whole array {name!r}")
            pos = str(self.layout.offsets[name])
        else:
            pos = self.index(target, env, read=False)
        if not pos.isdigit():
            tmp = self.fresh("_p")
            out.append(f"{indent}{tmp} = {pos}")
            pos = tmp
            lo_hi = f"*_rg[{tmp}]"
            slot = f"_sn[{tmp}]"
            self.ns["_rg"] = self.layout.ranges
            self.ns["_sn"] = self.layout.slot_names
        else:
            lo, hi = self.layout.ranges[int(pos)]
            lo_hi = f"{lo}, {hi}"
            slot = repr(self.layout.slot_names[int(pos)])
        value = self.expr(st.value, env)
        if st.op != "=":
            value = _ASSIGN_OPS[st.op].format(cur=f"s[{pos}]", v=value)
        out.append(f"{indent}s[{pos}] = _st({value}, {lo_hi}, {slot})")

    # entry points --------------------------------------------------------
    def function(self, body_lines: list):
        src = "def _fn(s):\n" + "\n".join(body_lines) + "\n"
        ns = dict(self.ns)
        exec(compile(src, "<model>", "exec"), ns)
        fn = ns["_fn"]
        fn.source = src
        return fn


def compile_expr(layout: Layout, e):
    """Compile an expression to ``f(valuation) -> value``."""
    g = _Codegen(layout)
    return g.function([f"    return {g.expr(e, {})}"])


def compile_program(layout: Layout, program: A.Program):
    """Compile a statement list to ``f(valuation) -> valuation`` (tuple in, tuple out)."""
    g = _Codegen(layout)
    lines = ["    s = list(s)"]
    g.stmts(program.stmts, {}, "    ", lines)
    lines.append("    return tuple(s)")
    return g.function(lines)


# ---------------------------------------------------------------- configurations


@dataclass(frozen=True)
class Config:
    """A valuation paired with a canonical process continuation."""

    valuation: tuple
    process: object
    terminated: bool = field(default=False, compare=False)

    @property
    def key(self) -> tuple:
        return (self.valuation, self.process)


@dataclass(frozen=True)
class Step:
    label: str
    before: Config
    after: Config


def canonical_key(config: Config) -> str:
    """Stable hex digest of a configuration (valuation and printed process)."""
    h = hashlib.blake2b(digest_size=16)
    h.update(format_proc(config.process).encode("utf-8"))
    h.update(b"\x00")
    h.update(",".join(map(str, config.valuation)).encode("ascii"))
    return h.hexdigest()


# ---------------------------------------------------------------- rewriting

_CHOICES = (A.ExternalChoice, A.InternalChoice)


def _rewrite_root(p):
    """Apply one canonical rewrite at the root, or return None."""
    t = type(p)
    if t is A.Seq:
        if type(p.left) is A.Skip:
            return p.right
        if type(p.left) is A.Stop:
            return A.STOP
    elif t is A.Parallel:
        if type(p.left) is A.Skip:
            return p.right
        if type(p.right) is A.Skip:
            return p.left
    elif t in _CHOICES and p.left == p.right:
        return p.left
    return None


def _redex_positions(p, path=()):
    if _rewrite_root(p) is not None:
        yield path
    t = type(p)
    if t in (A.Seq, A.Parallel) or t in _CHOICES:
        yield from _redex_positions(p.left, path + ("left",))
        yield from _redex_positions(p.right, path + ("right",))
    elif t is A.EventPrefix:
        yield from _redex_positions(p.cont, path + ("cont",))
    elif t is A.Guarded:
        yield from _redex_positions(p.body, path + ("body",))
    elif t is A.IfElse:
        yield from _redex_positions(p.then, path + ("then",))
        yield from _redex_positions(p.orelse, path + ("orelse",))


def _replace_at(p, path, fn):
    if not path:
        return fn(p)
    head, rest = path[0], path[1:]
    kwargs = {f: getattr(p, f) for f in p.__dataclass_fields__}
    kwargs[head] = _replace_at(kwargs[head], rest, fn)
    return type(p)(**kwargs)


def normalize(p, rng: Optional[random.Random] = None):
    """Rewrite to normal form, picking redexes in random order when ``rng`` is given."""
    steps = 0
    while True:
        positions = list(_redex_positions(p))
        if not positions:
            return p
        path = rng.choice(positions) if rng else positions[-1]
        p = _replace_at(p, path, _rewrite_root)
        steps += 1
        if steps > 1_000_000:
            raise RuntimeError("rewriting did not terminate")


# ---------------------------------------------------------------- interpreter


class Interpreter:
    """Transition system of one model.

    Compiled code and canonical terms are cached on the instance; the caches
    are only ever extended, so concurrent readers see consistent entries.
    """

    def __init__(self, model: A.Model, default_bound=DEFAULT_BOUND,
                 recursion_limit: int = DEFAULT_RECURSION_LIMIT, validate: bool = True):
        if validate:
            report = validate_model(model)
            if not report.ok:
                raise ModelError("model has validation findings:\n" + str(report))
        self.model = model
        self.layout = Layout.from_model(model, default_bound)
        self.recursion_limit = recursion_limit
        self.procs = {p.name: p for p in model.procs}
        self._exprs: dict = {}
        self._progs: dict = {}
        self._pool: dict = {}
        self._bodies: dict = {}
        self._canon: dict = {}

    # expression layer ------------------------------------------------------
    def expr_fn(self, e):
        fn = self._exprs.get(e)
        if fn is None:
            fn = self._exprs.setdefault(e, compile_expr(self.layout, e))
        return fn

    def program_fn(self, p: A.Program):
        fn = self._progs.get(p)
        if fn is None:
            fn = self._progs.setdefault(p, compile_program(self.layout, p))
        return fn

    def eval_expr(self, vals, e):
        return self.expr_fn(e)(vals)

    def eval_cond(self, vals, cond) -> bool:
        return bool(self.expr_fn(cond)(vals))

    def exec_program(self, vals, program: A.Program) -> tuple:
        if not program.stmts:
            return tuple(vals)
        return self.program_fn(program)(vals)

    # term construction ------------------------------------------------------
    def intern(self, p):
        return self._pool.setdefault(p, p)

    def seq(self, left, right):
        if left is A.SKIP or type(left) is A.Skip:
            return right
        if type(left) is A.Stop:
            return A.STOP
        return self.intern(A.Seq(left, right))

    def par(self, left, right):
        if type(left) is A.Skip:
            return right
        if type(right) is A.Skip:
            return left
        return self.intern(A.Parallel(left, right))

    def choice(self, cls, left, right):
        if left == right:
            return left
        return self.intern(cls(left, right))

    def canon(self, p):
        """Canonical, interned form of a process term (bottom-up rewriting)."""
        hit = self._canon.get(p)
        if hit is not None:
            return hit
        t = type(p)
        if t is A.Skip:
            r = A.SKIP
        elif t is A.Stop:
            r = A.STOP
        elif t is A.Seq:
            r = self.seq(self.canon(p.left), self.canon(p.right))
        elif t is A.Parallel:
            r = self.par(self.canon(p.left), self.canon(p.right))
        elif t in _CHOICES:
            r = self.choice(t, self.canon(p.left), self.canon(p.right))
        elif t is A.EventPrefix:
            r = self.intern(A.EventPrefix(p.label, p.program, self.canon(p.cont)))
        elif t is A.Guarded:
            r = self.intern(A.Guarded(p.cond, self.canon(p.body)))
        elif t is A.IfElse:
            r = self.intern(A.IfElse(p.cond, self.canon(p.then), self.canon(p.orelse)))
        elif t is A.Call:
            r = self.intern(A.Call(p.name, tuple(_fold_const(a) for a in p.args)))
        else:
            raise ModelError(f"not a process: {p!r}")
        self._canon[p] = r
        return r

    def call_key(self, call: A.Call, vals) -> tuple:
        args = []
        for a in call.args:
            args.append(a.value if type(a) is A.IntLit else builtins.to_int(self.eval_expr(vals, a)))
        return call.name, tuple(args)

    def body(self, key: tuple):
        b = self._bodies.get(key)
        if b is not None:
            return b
        name, args = key
        proc = self.procs.get(name)
        if proc is None:
            raise ModelError(f"call to undefined process {name}()")
        if len(proc.params) != len(args):
            raise ModelError(f"{name}() takes {len(proc.params)} argument(s), got {len(args)}")
        table = {p: A.IntLit(v) for p, v in zip(proc.params, args)}
        body = rewrite_proc(proc.body, lambda n, bound: table.get(n)) if table else proc.body
        return self._bodies.setdefault(key, self.canon(body))

    # configurations ---------------------------------------------------------
    def initial_config(self, entry: A.Call, valuation=None) -> Config:
        vals = self.layout.init if valuation is None else tuple(valuation)
        proc = self.canon(entry)
        return Config(vals, proc, self.is_terminated(vals, proc))

    def make_config(self, vals, proc) -> Config:
        return Config(vals, proc, self.is_terminated(vals, proc))

    def is_terminated(self, vals, p) -> bool:
        return self._terminated(p, vals, [], set())

    def _terminated(self, p, s, stack: list, active: set) -> bool:
        t = type(p)
        if t is A.Skip:
            return True
        if t is A.Stop or t is A.EventPrefix:
            return False
        if t is A.Seq or t is A.Parallel:
            return self._terminated(p.left, s, stack, active) and self._terminated(p.right, s, stack, active)
        if t in _CHOICES:
            return self._terminated(p.left, s, stack, active) or self._terminated(p.right, s, stack, active)
        if t is A.Guarded:
            return self.eval_cond(s, p.cond) and self._terminated(p.body, s, stack, active)
        if t is A.IfElse:
            branch = p.then if self.eval_cond(s, p.cond) else p.orelse
            return self._terminated(branch, s, stack, active)
        if t is A.Call:
            key = self.call_key(p, s)
            if key in active:
                return False
            self._enter(key, stack, active)
            try:
                return self._terminated(self.body(key), s, stack, active)
            finally:
                stack.pop()
                active.discard(key)
        raise ModelError(f"not a process: {p!r}")

    def _enter(self, key, stack: list, active: set):
        if len(stack) >= self.recursion_limit:
            shown = [f"{n}({', '.join(map(str, a))})" for n, a in stack[-8:]]
            raise RecursionFault(
                f"more than {self.recursion_limit} nested calls without an event; probable unguarded "
                f"recursion (innermost: {' -> '.join(shown)})", stack)
        stack.append(key)
        active.add(key)

    def raw_steps(self, vals, p) -> list:
        """``[(label, valuation, continuation), ...]`` for a term at a valuation."""
        out: list = []
        self._steps(p, vals, out, None, [], set())
        return out

    def _steps(self, p, s, out: list, wrap, stack: list, active: set):
        # ``wrap`` rebuilds the enclosing context around a stepped subterm
        t = type(p)
        if t is A.EventPrefix:
            label = self.label_text(p.label, s)
            try:
                s2 = self.exec_program(s, p.program)
            except (EvalFault, RangeFault) as e:
                e.label = label
                raise
            cont = p.cont
            out.append((label, s2, wrap(cont) if wrap else cont))
        elif t is A.Skip or t is A.Stop:
            return
        elif t is A.Seq:
            right = p.right
            self._steps(p.left, s, out, _compose(wrap, lambda q: self.seq(q, right)), stack, active)
            if self._terminated(p.left, s, stack, active):
                self._steps(right, s, out, wrap, stack, active)
        elif t is A.Parallel:
            left, right = p.left, p.right
            self._steps(left, s, out, _compose(wrap, lambda q: self.par(q, right)), stack, active)
            self._steps(right, s, out, _compose(wrap, lambda q: self.par(left, q)), stack, active)
        elif t in _CHOICES:
            self._steps(p.left, s, out, wrap, stack, active)
            self._steps(p.right, s, out, wrap, stack, active)
        elif t is A.Guarded:
            if self.eval_cond(s, p.cond):
                self._steps(p.body, s, out, wrap, stack, active)
        elif t is A.IfElse:
            branch = p.then if self.eval_cond(s, p.cond) else p.orelse
            self._steps(branch, s, out, wrap, stack, active)
        elif t is A.Call:
            key = self.call_key(p, s)
            if key in active:
                # re-entered without an event in between: contributes nothing
                return
            self._enter(key, stack, active)
            try:
                self._steps(self.body(key), s, out, wrap, stack, active)
            finally:
                stack.pop()
                active.discard(key)
        else:
            raise ModelError(f"not a process: {p!r}")

    def label_text(self, label: A.Label, s) -> str:
        if not label.indices:
            return label.name
        parts = [label.name]
        for i in label.indices:
            parts.append(str(i.value if type(i) is A.IntLit else builtins.to_int(self.eval_expr(s, i))))
        return ".".join(parts)

    def successors(self, config: Config) -> list:
        out = []
        for label, vals, proc in self.raw_steps(config.valuation, config.process):
            out.append(Step(label, config, self.make_config(vals, proc)))
        return out


def _compose(outer, inner):
    if outer is None:
        return inner
    return lambda q: outer(inner(q))


def _fold_const(e):
    if type(e) is A.IntLit:
        return e
    try:
        return A.IntLit(builtins.to_int(const_eval(e)))
    except (NotConstant, EvalFault):
        return e


# ---------------------------------------------------------------- module-level API


def eval_cond(interp: Interpreter, valuation, cond) -> bool:
    return interp.eval_cond(valuation, cond)


def exec_program(interp: Interpreter, valuation, program: A.Program) -> tuple:
    return interp.exec_program(valuation, program)


def successors(interp: Interpreter, config: Config) -> list:
    return interp.successors(config)


def run_deep(fn, *args, stack_mb: int = 512, **kwargs):
    """Run ``fn`` on a thread with a large stack so deep call unfolding cannot crash."""
    result: dict = {}

    def target():
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 1_000_000))
        try:
            result["value"] = fn(*args, **kwargs)
        except BaseException as e:  # re-raised in the caller
            result["error"] = e

    prev = threading.stack_size()
    threading.stack_size(stack_mb * 1024 * 1024)
    try:
        t = threading.Thread(target=target, name="gtnmc-search")
        t.start()
    finally:
        threading.stack_size(prev)
    t.join()
    if "error" in result:
        raise result["error"]
    return result["value"]

"""Common currency, goal rewards, goal compatibility and minimal unsatisfiable cores."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from gtnmc import builtins
from gtnmc.dsl import ast as A
from gtnmc.dsl.parser import parse_expr
from gtnmc.dsl.printer import _fraction_text, format_expr, format_label
from gtnmc.dsl.validate import const_eval
from gtnmc.dsl.walk import assigned_names, iter_expr_names, map_events, rewrite_expr
from gtnmc.errors import NotUnsatisfiable, WiringError
from gtnmc.explorer import Reachable, SearchOptions, Stats, WitnessTrace, as_interpreter, check_reaches

DEFAULT_CURRENCY = "Λ"

_TEMPLATES = {
    "linear": "floor({rate} * __x)",
    "power": "floor({rate} * __x ^ {exponent})",
    "logarithmic": "floor({rate} * log(1 + __x, {base}))",
    "logistic": "floor({rate} / (1 + exp(-{steepness} * (__x - {midpoint}))))",
}
_PARAMS = {
    "linear": ("rate",),
    "power": ("rate", "exponent"),
    "logarithmic": ("rate", "base"),
    "logistic": ("rate", "midpoint", "steepness"),
}


def _decimal(x) -> Fraction:
    if isinstance(x, float):
        x = repr(x)
    f = Fraction(x)
    _fraction_text(f)  # raises unless the value has a finite decimal expansion
    return f


def _dec_text(f: Fraction) -> str:
    if f.denominator == 1:
        return f"({f.numerator})" if f < 0 else str(f.numerator)
    text = _fraction_text(f)
    return f"({text})" if f < 0 else text


@dataclass(frozen=True)
class ConversionFn:
    """Integer-valued map from a resource amount to currency units.

    ``kind`` is one of linear, power, logarithmic or logistic; the formulas are
    ``floor(rate*x)``, ``floor(rate*x^exponent)``, ``floor(rate*log_base(1+x))``
    and ``floor(rate/(1+exp(-steepness*(x-midpoint))))``.
    """

    kind: str
    rate: Fraction = Fraction(1)
    exponent: Fraction = Fraction(1)
    base: Fraction = Fraction(2)
    midpoint: Fraction = Fraction(0)
    steepness: Fraction = Fraction(1)

    def __post_init__(self):
        if self.kind not in _TEMPLATES:
            raise ValueError(f"unknown conversion kind {self.kind!r}")
        for name in ("rate", "exponent", "base", "midpoint", "steepness"):
            object.__setattr__(self, name, _decimal(getattr(self, name)))
        # parameter ranges on which every form is non-decreasing in x
        if self.rate < 0 or self.exponent < 0 or self.steepness < 0:
            raise ValueError("rate, exponent and steepness must be non-negative")
        if self.kind == "logarithmic" and self.base <= 1:
            raise ValueError("logarithm base must exceed 1")

    @classmethod
    def linear(cls, rate=1):
        return cls("linear", rate=rate)

    @classmethod
    def power(cls, rate=1, exponent=1):
        return cls("power", rate=rate, exponent=exponent)

    @classmethod
    def logarithmic(cls, rate=1, base=2):
        return cls("logarithmic", rate=rate, base=base)

    @classmethod
    def logistic(cls, rate=1, midpoint=0, steepness=1):
        return cls("logistic", rate=rate, midpoint=midpoint, steepness=steepness)

    def text(self, x: str = "__x") -> str:
        values = {k: _dec_text(getattr(self, k)) for k in _PARAMS[self.kind]}
        return _TEMPLATES[self.kind].format(**values).replace("__x", f"({x})")

    def to_expr(self, x):
        """The conversion applied to expression ``x``, as a syntax tree."""
        template = _template(self)
        return rewrite_expr(template, lambda n, b: x if n == "__x" else None)

    def __call__(self, x: int) -> int:
        return builtins.to_int(const_eval(self.to_expr(A.IntLit(int(x)))))

    def params(self) -> dict:
        return {k: str(getattr(self, k)) for k in _PARAMS[self.kind]}


_TEMPLATE_CACHE: dict = {}


def _template(fn: ConversionFn):
    t = _TEMPLATE_CACHE.get(fn)
    if t is None:
        t = _TEMPLATE_CACHE.setdefault(fn, parse_expr(fn.text()))
    return t


@dataclass(frozen=True)
class ResourceSpec:
    """Resource tracked by ``variable``; ``events`` optionally lists the labels allowed to change it."""

    name: str
    variable: str
    conversion: ConversionFn
    events: Optional[tuple] = None


@dataclass(frozen=True)
class GoalSpec:
    name: str
    cond: object
    reward: int = 0
    critical: bool = False
    event: Optional[str] = None

    def __post_init__(self):
        if isinstance(self.cond, str):
            object.__setattr__(self, "cond", parse_expr(self.cond))
        if self.reward < 0:
            raise ValueError("reward must be non-negative")


@dataclass
class CurrencyLedger:
    currency: str = DEFAULT_CURRENCY
    resources: list = field(default_factory=list)
    goals: list = field(default_factory=list)

    def critical_goal(self):
        conds = [g.cond for g in self.goals if g.critical]
        return conjunction(conds)


def conjunction(conds):
    if not conds:
        return A.BoolLit(True)
    out = conds[0]
    for c in conds[1:]:
        out = A.Binary("&&", out, c)
    return out


def label_matches(label: str, pattern: str) -> bool:
    """Exact match, or ``pattern`` is a leading run of dot-separated parts of ``label``."""
    return label == pattern or label.startswith(pattern + ".")


# ---------------------------------------------------------------- wiring


def _inc(var: str, amount):
    return A.Assign(A.Name(var), "+=", amount)


def _dec(var: str, amount):
    return A.Assign(A.Name(var), "-=", amount)


def wire_currency(model: A.Model, ledger: CurrencyLedger) -> A.Model:
    """Add currency updates for resource use and goal rewards to every event program."""
    if not ledger.resources and not ledger.goals:
        return model
    findings = []
    declared = {v.name for v in model.vars}
    if ledger.currency not in declared:
        findings.append(f"currency variable {ledger.currency!r} is not declared")
    for r in ledger.resources:
        if r.variable not in declared:
            findings.append(f"resource {r.name!r}: variable {r.variable!r} is not declared")
    for g in ledger.goals:
        for name, _, _ in iter_expr_names(g.cond):
            if name not in declared:
                findings.append(f"goal {g.name!r}: unknown identifier {name!r}")
    if findings:
        raise WiringError(findings)

    goal_reads = [
        {name for name, _, _ in iter_expr_names(g.cond)} for g in ledger.goals
    ]
    cur = ledger.currency

    def wire(ev: A.EventPrefix):
        label = format_label(ev.label)
        written = assigned_names(ev.program.stmts)
        pre, post = [], []
        for r in ledger.resources:
            if r.variable not in written:
                continue
            if r.events is not None and not any(label_matches(label, p) for p in r.events):
                findings.append(f"event {label!r} writes resource variable {r.variable!r} "
                                f"but is not annotated for resource {r.name!r}")
                continue
            before = f"_before_{r.variable}"
            v = A.Name(r.variable)
            pre.append(A.LocalVar(before, v))
            used = A.Binary("-", A.Name(before), v)
            made = A.Binary("-", v, A.Name(before))
            post.append(A.IfStmt(A.Binary("<", v, A.Name(before)), (_dec(cur, r.conversion.to_expr(used)),), ()))
            post.append(A.IfStmt(A.Binary(">", v, A.Name(before)), (_inc(cur, r.conversion.to_expr(made)),), ()))
        for i, g in enumerate(ledger.goals):
            if not g.reward:
                continue
            if g.event is not None:
                if label_matches(label, g.event):
                    pre.append(_inc(cur, A.IntLit(g.reward)))
                continue
            if not (written & goal_reads[i]):
                continue
            flag = f"_goal{i}_before"
            pre.append(A.LocalVar(flag, g.cond))
            met_now = A.Binary("&&", A.Unary("!", A.Name(flag)), g.cond)
            post.append(A.IfStmt(met_now, (_inc(cur, A.IntLit(g.reward)),), ()))
        if not pre and not post:
            return ev
        stmts = tuple(pre) + ev.program.stmts + tuple(post)
        return A.EventPrefix(ev.label, A.Program(stmts), ev.cont)

    procs = tuple(A.ProcDef(p.name, p.params, map_events(p.body, wire)) for p in model.procs)
    if findings:
        raise WiringError(findings)
    return A.Model(model.vars, model.defines, procs, model.assertions)


# ---------------------------------------------------------------- compatibility


@dataclass
class Compatible:
    witness: WitnessTrace
    stats: Stats = field(default_factory=Stats)
    compatible = True


@dataclass
class Incompatible:
    stats: Stats = field(default_factory=Stats)
    compatible = False


def check_compatible(model, entry, goals: list, options: Optional[SearchOptions] = None):
    """Is the conjunction of the goals' conditions reachable?"""
    if not goals:
        raise ValueError("goal set must be non-empty")
    res = check_reaches(model, entry, conjunction([g.cond for g in goals]), options)
    if isinstance(res, Reachable):
        return Compatible(res.witness, res.stats)
    return Incompatible(res.stats)


def find_muc(model, entry, goals: list, seed: Optional[int] = None, rng: Optional[random.Random] = None,
             options: Optional[SearchOptions] = None) -> list:
    """A minimal incompatible subset of ``goals`` by randomized divide and conquer.

    Returned in the input order.  Raises :class:`NotUnsatisfiable` when the
    whole set is compatible.
    """
    if not goals:
        raise ValueError("goal set must be non-empty")
    rng = rng or random.Random(seed)
    interp = as_interpreter(model)
    memo: dict = {}

    def sat(subset) -> bool:
        key = frozenset(subset)
        if key not in memo:
            chosen = [goals[i] for i in sorted(key)]
            memo[key] = not chosen or check_compatible(interp, entry, chosen, options).compatible
        return memo[key]

    if sat(range(len(goals))):
        raise NotUnsatisfiable("the goal set is compatible")

    def minimise(s: list, s0: list) -> list:
        if len(s) == 1:
            return s
        shuffled = list(s)
        rng.shuffle(shuffled)
        half = (len(shuffled) + 1) // 2
        s1, s2 = shuffled[:half], shuffled[half:]
        if not sat(s1 + s0):
            return minimise(s1, s0)
        if not sat(s2 + s0):
            return minimise(s2, s0)
        s1_min = minimise(s1, s0 + s2)
        s2_min = minimise(s2, s0 + s1_min)
        return s1_min + s2_min

    core = minimise(list(range(len(goals))), [])
    return [goals[i] for i in sorted(core)]


# ---------------------------------------------------------------- ledger files


def conversion_from_dict(d: dict) -> ConversionFn:
    kind = d["kind"]
    return ConversionFn(kind, **{k: d[k] for k in _PARAMS[kind] if k in d})


def ledger_from_dict(data: dict) -> CurrencyLedger:
    resources = [
        ResourceSpec(r["name"], r["variable"], conversion_from_dict(r["conversion"]),
                     tuple(r["events"]) if r.get("events") is not None else None)
        for r in data.get("resources", [])
    ]
    goals = [
        GoalSpec(g["name"], g["cond"], int(g.get("reward", 0)), bool(g.get("critical", False)), g.get("event"))
        for g in data.get("goals", [])
    ]
    return CurrencyLedger(data.get("currency", DEFAULT_CURRENCY), resources, goals)


def ledger_to_dict(ledger: CurrencyLedger) -> dict:
    return {
        "currency": ledger.currency,
        "resources": [
            {"name": r.name, "variable": r.variable,
             "conversion": {"kind": r.conversion.kind, **r.conversion.params()},
             **({"events": list(r.events)} if r.events is not None else {})}
            for r in ledger.resources
        ],
        "goals": [
            {"name": g.name, "cond": format_expr(g.cond), "reward": g.reward, "critical": g.critical,
             **({"event": g.event} if g.event else {})}
            for g in ledger.goals
        ],
    }


def load_ledger(path) -> CurrencyLedger:
    with open(path, encoding="utf-8") as f:
        return ledger_from_dict(json.load(f))

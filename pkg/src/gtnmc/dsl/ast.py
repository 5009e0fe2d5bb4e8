"""Syntax tree for the modelling language.

Every node is an immutable dataclass.  Nodes compare structurally and cache
their hash, so they can be used directly as dictionary keys by the state-space
search without re-hashing whole subtrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union


def node(cls):
    """Frozen dataclass whose structural hash is computed once."""
    cls = dataclass(frozen=True)(cls)
    generated = cls.__hash__

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = generated(self)
            object.__setattr__(self, "_hash", h)
            return h

    cls.__hash__ = __hash__
    return cls


# ---------------------------------------------------------------- expressions


@node
class IntLit:
    value: int


@node
class DecLit:
    """Decimal literal, kept exact as a rational."""

    value: Fraction
    text: str = field(compare=False, default="")


@node
class BoolLit:
    value: bool


@node
class Name:
    """Unresolved identifier: a variable, a process parameter or a bound index."""

    id: str


@node
class Index:
    """Array access ``base[i][j]``; fewer indices than dimensions yields a row."""

    name: str
    indices: tuple


@node
class Unary:
    op: str  # '-' or '!'
    operand: object


@node
class Binary:
    op: str
    left: object
    right: object


@node
class FuncCall:
    """Builtin function application (``floor``, ``dist``, ...)."""

    name: str
    args: tuple


@node
class Quant:
    """Bounded quantifier ``&& i:{lo..hi}@(body)`` (or ``||``)."""

    op: str  # '&&' or '||'
    var: str
    lo: object
    hi: object
    body: object


Expr = Union[IntLit, DecLit, BoolLit, Name, Index, Unary, Binary, FuncCall, Quant]


# ---------------------------------------------------------------- programs


@node
class Assign:
    target: object  # Name or Index
    op: str  # '=', '+=', '-=', '*=', '/=', '%='
    value: object


@node
class LocalVar:
    name: str
    value: object


@node
class IfStmt:
    cond: object
    then: tuple
    orelse: tuple


@node
class Program:
    stmts: tuple = ()


EMPTY_PROGRAM = Program(())


# ---------------------------------------------------------------- processes


@node
class Stop:
    pass


@node
class Skip:
    pass


STOP = Stop()
SKIP = Skip()


@node
class Label:
    """Event label ``name.i.j``; indices are expressions materialized at firing."""

    name: str
    indices: tuple = ()


@node
class EventPrefix:
    label: Label
    program: Program
    cont: object


@node
class Seq:
    left: object
    right: object


@node
class Parallel:
    left: object
    right: object


@node
class ExternalChoice:
    left: object
    right: object


@node
class InternalChoice:
    left: object
    right: object


@node
class IfElse:
    cond: object
    then: object
    orelse: object


@node
class Guarded:
    cond: object
    body: object


@node
class Call:
    name: str
    args: tuple = ()


ProcExpr = Union[
    Stop, Skip, EventPrefix, Seq, Parallel, ExternalChoice, InternalChoice, IfElse, Guarded, Call
]


# ---------------------------------------------------------------- top level


@node
class VarDecl:
    """``var name[d0][d1]:{lo..hi} = init;``

    ``dims`` is empty for a scalar.  ``lo``/``hi`` are ``None`` when the range
    is not annotated; the engine then applies its global default bound.
    ``init`` is a single expression (scalar, or broadcast to every element)
    or a tuple of ``(expr, repeat)`` pairs for a bracketed list.
    """

    name: str
    dims: tuple = ()
    lo: Optional[object] = None
    hi: Optional[object] = None
    init: object = None

    @property
    def is_array(self) -> bool:
        return bool(self.dims)


@node
class ProcDef:
    name: str
    params: tuple
    body: object


@node
class Reaches:
    process: Call
    goal: object


@node
class ReachesOptimal:
    process: Call
    goal: object
    objective: str
    direction: str  # 'max' or 'min'


@node
class GlobalSafety:
    process: Call
    cond: object


@node
class DeadlockFree:
    process: Call


Assertion = Union[Reaches, ReachesOptimal, GlobalSafety, DeadlockFree]


@node
class Model:
    vars: tuple = ()
    defines: tuple = ()  # ((name, expr), ...) in source order
    procs: tuple = ()
    assertions: tuple = ()

    def proc(self, name: str) -> Optional[ProcDef]:
        for p in self.procs:
            if p.name == name:
                return p
        return None

    def var(self, name: str) -> Optional[VarDecl]:
        for v in self.vars:
            if v.name == name:
                return v
        return None

    def define(self, name: str):
        for n, e in self.defines:
            if n == name:
                return e
        return None

"""Generic rewriting helpers over the syntax tree.

``rewrite_expr`` applies a name-substitution function bottom-up while
respecting binders (quantifier indices and program locals).  The process-level
helpers thread it through programs, guards, labels and call arguments.
"""

from __future__ import annotations

from typing import Callable, Optional

from gtnmc.dsl import ast as A

# subst(name, bound) -> replacement expression or None to keep the Name
Subst = Callable[[str, frozenset], Optional[object]]


def rewrite_expr(e, subst: Subst, bound: frozenset = frozenset()):
    t = type(e)
    if t is A.Name:
        if e.id in bound:
            return e
        r = subst(e.id, bound)
        return e if r is None else r
    if t in (A.IntLit, A.DecLit, A.BoolLit):
        return e
    if t is A.Index:
        idx = tuple(rewrite_expr(i, subst, bound) for i in e.indices)
        name = e.name
        if name not in bound:
            r = subst(name, bound)
            # an array name may only be replaced by another array name
            if isinstance(r, A.Name):
                name = r.id
        return A.Index(name, idx)
    if t is A.Unary:
        return A.Unary(e.op, rewrite_expr(e.operand, subst, bound))
    if t is A.Binary:
        return A.Binary(e.op, rewrite_expr(e.left, subst, bound), rewrite_expr(e.right, subst, bound))
    if t is A.FuncCall:
        return A.FuncCall(e.name, tuple(rewrite_expr(a, subst, bound) for a in e.args))
    if t is A.Quant:
        inner = bound | {e.var}
        return A.Quant(e.op, e.var, rewrite_expr(e.lo, subst, bound), rewrite_expr(e.hi, subst, bound),
                       rewrite_expr(e.body, subst, inner))
    raise TypeError(f"not an expression: {e!r}")


def rewrite_stmts(stmts: tuple, subst: Subst, bound: frozenset = frozenset()) -> tuple:
    out = []
    for s in stmts:
        t = type(s)
        if t is A.Assign:
            out.append(A.Assign(rewrite_expr(s.target, subst, bound), s.op, rewrite_expr(s.value, subst, bound)))
        elif t is A.LocalVar:
            out.append(A.LocalVar(s.name, rewrite_expr(s.value, subst, bound)))
            bound = bound | {s.name}
        elif t is A.IfStmt:
            out.append(A.IfStmt(rewrite_expr(s.cond, subst, bound), rewrite_stmts(s.then, subst, bound),
                                rewrite_stmts(s.orelse, subst, bound)))
        else:
            raise TypeError(f"not a statement: {s!r}")
    return tuple(out)


def rewrite_program(p: A.Program, subst: Subst) -> A.Program:
    if not p.stmts:
        return p
    return A.Program(rewrite_stmts(p.stmts, subst))


def rewrite_proc(p, subst: Subst):
    """Apply ``subst`` to every expression inside a process expression."""
    t = type(p)
    if t is A.Stop or t is A.Skip:
        return p
    if t is A.EventPrefix:
        label = p.label
        if label.indices:
            label = A.Label(label.name, tuple(rewrite_expr(i, subst) for i in label.indices))
        return A.EventPrefix(label, rewrite_program(p.program, subst), rewrite_proc(p.cont, subst))
    if t in (A.Seq, A.Parallel, A.ExternalChoice, A.InternalChoice):
        return t(rewrite_proc(p.left, subst), rewrite_proc(p.right, subst))
    if t is A.IfElse:
        return A.IfElse(rewrite_expr(p.cond, subst), rewrite_proc(p.then, subst), rewrite_proc(p.orelse, subst))
    if t is A.Guarded:
        return A.Guarded(rewrite_expr(p.cond, subst), rewrite_proc(p.body, subst))
    if t is A.Call:
        return A.Call(p.name, tuple(rewrite_expr(a, subst) for a in p.args))
    raise TypeError(f"not a process: {p!r}")


# ---------------------------------------------------------------- traversal


def iter_expr_names(e, bound: frozenset = frozenset()):
    """Yield ``(name, is_array_access, n_indices)`` for free identifiers."""
    t = type(e)
    if t is A.Name:
        if e.id not in bound:
            yield e.id, False, 0
    elif t is A.Index:
        if e.name not in bound:
            yield e.name, True, len(e.indices)
        for i in e.indices:
            yield from iter_expr_names(i, bound)
    elif t is A.Unary:
        yield from iter_expr_names(e.operand, bound)
    elif t is A.Binary:
        yield from iter_expr_names(e.left, bound)
        yield from iter_expr_names(e.right, bound)
    elif t is A.FuncCall:
        for a in e.args:
            yield from iter_expr_names(a, bound)
    elif t is A.Quant:
        yield from iter_expr_names(e.lo, bound)
        yield from iter_expr_names(e.hi, bound)
        yield from iter_expr_names(e.body, bound | {e.var})


def iter_stmt_exprs(stmts, bound: frozenset = frozenset()):
    """Yield ``(expr, bound)`` pairs for every expression in a statement list."""
    for s in stmts:
        t = type(s)
        if t is A.Assign:
            yield s.target, bound
            yield s.value, bound
        elif t is A.LocalVar:
            yield s.value, bound
            bound = bound | {s.name}
        elif t is A.IfStmt:
            yield s.cond, bound
            yield from iter_stmt_exprs(s.then, bound)
            yield from iter_stmt_exprs(s.orelse, bound)


def assigned_names(stmts) -> set:
    """Names of state variables written by a statement list (locals excluded)."""
    out: set = set()
    local: set = set()
    for s in stmts:
        t = type(s)
        if t is A.Assign:
            name = s.target.id if type(s.target) is A.Name else s.target.name
            if name not in local:
                out.add(name)
        elif t is A.LocalVar:
            local.add(s.name)
        elif t is A.IfStmt:
            out |= assigned_names(s.then) - local
            out |= assigned_names(s.orelse) - local
    return out


def iter_proc_parts(p):
    """Yield every sub-process, pre-order."""
    stack = [p]
    while stack:
        q = stack.pop()
        yield q
        t = type(q)
        if t is A.EventPrefix:
            stack.append(q.cont)
        elif t in (A.Seq, A.Parallel, A.ExternalChoice, A.InternalChoice):
            stack.append(q.right)
            stack.append(q.left)
        elif t is A.IfElse:
            stack.append(q.orelse)
            stack.append(q.then)
        elif t is A.Guarded:
            stack.append(q.body)


def map_events(p, fn):
    """Rebuild a process, replacing each EventPrefix ``e`` by ``fn(e)``.

    ``fn`` receives the prefix with its continuation already rewritten.
    """
    t = type(p)
    if t is A.EventPrefix:
        return fn(A.EventPrefix(p.label, p.program, map_events(p.cont, fn)))
    if t in (A.Seq, A.Parallel, A.ExternalChoice, A.InternalChoice):
        return t(map_events(p.left, fn), map_events(p.right, fn))
    if t is A.IfElse:
        return A.IfElse(p.cond, map_events(p.then, fn), map_events(p.orelse, fn))
    if t is A.Guarded:
        return A.Guarded(p.cond, map_events(p.body, fn))
    return p

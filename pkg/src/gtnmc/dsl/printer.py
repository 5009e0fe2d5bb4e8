"""Pretty-printer producing text that parses back to the same tree.

Binary expressions and process operators are fully parenthesized, which keeps
the round trip independent of precedence rules.
"""

from __future__ import annotations

from gtnmc.dsl import ast as A

_PROC_OPS = {A.Seq: ";", A.Parallel: "||", A.ExternalChoice: "[]", A.InternalChoice: "<>"}


def format_expr(e) -> str:
    t = type(e)
    if t is A.IntLit:
        return str(e.value) if e.value >= 0 else f"({e.value})"
    if t is A.DecLit:
        if e.text:
            return e.text
        return _fraction_text(e.value)
    if t is A.BoolLit:
        return "true" if e.value else "false"
    if t is A.Name:
        return e.id
    if t is A.Index:
        return e.name + "".join(f"[{format_expr(i)}]" for i in e.indices)
    if t is A.Unary:
        return f"({e.op}{_atom(e.operand)})"
    if t is A.Binary:
        return f"({format_expr(e.left)} {e.op} {format_expr(e.right)})"
    if t is A.FuncCall:
        return f"{e.name}({', '.join(format_expr(a) for a in e.args)})"
    if t is A.Quant:
        return f"({e.op} {e.var}:{{{format_expr(e.lo)}..{format_expr(e.hi)}}}@({format_expr(e.body)}))"
    raise TypeError(f"not an expression: {e!r}")


def _atom(e) -> str:
    s = format_expr(e)
    if type(e) in (A.Unary,):
        return f"({s})"
    return s


def _fraction_text(f) -> str:
    den = f.denominator
    d = den
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d != 1:
        raise ValueError(f"{f} has no finite decimal expansion")
    scale = 1
    while (10**scale) % den:
        scale += 1
    digits = abs(f.numerator) * 10**scale // den
    sign = "-" if f < 0 else ""
    s = str(digits).rjust(scale + 1, "0")
    return f"{sign}{s[:-scale]}.{s[-scale:]}"


def format_stmts(stmts, indent: str = "") -> list[str]:
    lines = []
    for s in stmts:
        t = type(s)
        if t is A.Assign:
            lines.append(f"{indent}{format_expr(s.target)} {s.op} {format_expr(s.value)};")
        elif t is A.LocalVar:
            lines.append(f"{indent}var {s.name} = {format_expr(s.value)};")
        elif t is A.IfStmt:
            lines.append(f"{indent}if ({format_expr(s.cond)}) {{")
            lines.extend(format_stmts(s.then, indent + "    "))
            if s.orelse:
                lines.append(f"{indent}}} else {{")
                lines.extend(format_stmts(s.orelse, indent + "    "))
            lines.append(f"{indent}}}")
    return lines


def format_program(p: A.Program) -> str:
    return " ".join(line.strip() for line in format_stmts(p.stmts))


def format_label(label: A.Label) -> str:
    parts = [label.name]
    for i in label.indices:
        if type(i) is A.IntLit and i.value >= 0:
            parts.append(str(i.value))
        elif type(i) is A.Name:
            parts.append(i.id)
        else:
            parts.append(f"({format_expr(i)})")
    return ".".join(parts)


def format_proc(p) -> str:
    t = type(p)
    if t is A.Stop:
        return "Stop"
    if t is A.Skip:
        return "Skip"
    if t is A.EventPrefix:
        prog = f"{{{format_program(p.program)}}}" if p.program.stmts else ""
        return f"{format_label(p.label)}{prog} -> {_proc_atom(p.cont)}"
    if t in _PROC_OPS:
        return f"({format_proc(p.left)} {_PROC_OPS[t]} {format_proc(p.right)})"
    if t is A.IfElse:
        return f"if ({format_expr(p.cond)}) {{ {format_proc(p.then)} }} else {{ {format_proc(p.orelse)} }}"
    if t is A.Guarded:
        return f"[{format_expr(p.cond)}] {_proc_atom(p.body)}"
    if t is A.Call:
        return f"{p.name}({', '.join(format_expr(a) for a in p.args)})"
    raise TypeError(f"not a process: {p!r}")


def _proc_atom(p) -> str:
    # prefix/guard bodies are single prefix terms; parenthesize anything wider
    s = format_proc(p)
    if type(p) in (A.EventPrefix, A.Guarded) and not s.startswith("("):
        return f"({s})"
    return s


def format_var(v: A.VarDecl) -> str:
    s = "var " + v.name + "".join(f"[{format_expr(d)}]" for d in v.dims)
    if v.lo is not None:
        s += f":{{{format_expr(v.lo)}..{format_expr(v.hi)}}}"
    if v.init is not None:
        if isinstance(v.init, tuple):
            items = []
            for e, rep in v.init:
                if type(rep) is A.IntLit and rep.value == 1:
                    items.append(format_expr(e))
                else:
                    items.append(f"{format_expr(e)}({format_expr(rep)})")
            s += " = [" + ", ".join(items) + "]"
        else:
            s += " = " + format_expr(v.init)
    return s + ";"


def format_assertion(a) -> str:
    head = f"#assert {format_proc(a.process)}"
    t = type(a)
    if t is A.Reaches:
        return f"{head} reaches {format_expr(a.goal)};"
    if t is A.ReachesOptimal:
        return f"{head} reaches {format_expr(a.goal)} with {a.direction}({a.objective});"
    if t is A.GlobalSafety:
        return f"{head} |= [] {format_expr(a.cond)};"
    return f"{head} deadlockfree;"


def format_model(m: A.Model) -> str:
    lines = [format_var(v) for v in m.vars]
    lines += [f"#define {n} {format_expr(e)};" for n, e in m.defines]
    for p in m.procs:
        lines.append(f"{p.name}({', '.join(p.params)}) = {format_proc(p.body)};")
    lines += [format_assertion(a) for a in m.assertions]
    return "\n".join(lines) + "\n"

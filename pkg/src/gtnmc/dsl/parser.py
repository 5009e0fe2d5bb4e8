"""Recursive-descent parser for the modelling language.

Grammar (informal)::

    unit    := item*
    item    := 'var' ID ('[' expr ']')* (':' '{' expr '..' expr '}')? ('=' init)? ';'
             | '#define' ID expr ';'
             | '#assert' call assertion ';'
             | ID '(' params ')' '=' proc ';'
    proc    := par (';' par)*
    par     := ichoice ('||' ichoice)*
    ichoice := echoice ('<>' echoice)*
    echoice := prefix ('[]' prefix)*
    prefix  := '[' expr ']' prefix | 'if' '(' expr ')' '{' proc '}' ('else' '{' proc '}')?
             | 'case' '{' (expr ':' proc)* 'default' ':' proc '}'
             | 'Skip' | 'Stop' | '(' proc ')' | ID '(' args ')'
             | label ('{' stmt* '}')? '->' prefix

``#define`` names are macro-expanded at their use sites once the whole unit
has been read, so definitions may appear in any order.
"""

from __future__ import annotations

from fractions import Fraction

from gtnmc.dsl import ast as A
from gtnmc.dsl.lexer import Token, tokenize
from gtnmc.dsl.walk import rewrite_expr, rewrite_proc, rewrite_stmts
from gtnmc.errors import ParseError

_BINARY_LEVELS = [
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
]
_ASSIGN_OPS = ("=", "+=", "-=", "*=", "/=", "%=")


class Parser:
    def __init__(self, source: str, filename: str = "<model>"):
        self.filename = filename
        self.toks = tokenize(source, filename)
        self.i = 0
        self._define_pos: dict = {}
        self._case_depth = 0

    # ------------------------------------------------------------ helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, message: str, expected=(), tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(message, tok.line, tok.col, expected, self.filename)

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("op", "kw") and t.text in texts

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            self.error(f"unexpected {found!r}", (text,))
        t = self.tok
        self.i += 1
        return t

    def expect_id(self) -> str:
        if self.tok.kind != "id":
            found = self.tok.text or "end of input"
            self.error(f"unexpected {found!r}", ("identifier",))
        t = self.tok
        self.i += 1
        return t.text

    def expect_end(self):
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}", ("end of input",))

    # ------------------------------------------------------------ unit
    def parse_model(self) -> A.Model:
        vars_, defines, procs, asserts = [], [], [], []
        seen: dict = {}

        def claim(kind: str, name: str, tok: Token):
            # variables and macros share one namespace, processes another
            key = ("proc" if kind == "proc" else "value", name)
            if key in seen:
                self.error(f"duplicate definition of {name!r}", tok=tok)
            seen[key] = tok

        while self.tok.kind != "eof":
            start = self.tok
            if self.at("var"):
                d = self.parse_var()
                claim("var", d.name, start)
                vars_.append(d)
            elif self.at("#define"):
                self.i += 1
                name_tok = self.tok
                name = self.expect_id()
                claim("define", name, name_tok)
                self._define_pos[name] = name_tok
                e = self.parse_expr()
                self.expect(";")
                defines.append((name, e))
            elif self.at("#assert"):
                self.i += 1
                asserts.append(self.parse_assertion())
                self.expect(";")
            elif self.tok.kind == "id":
                name = self.expect_id()
                claim("proc", name, start)
                self.expect("(")
                params = []
                if not self.at(")"):
                    params.append(self.expect_id())
                    while self.accept(","):
                        params.append(self.expect_id())
                self.expect(")")
                self.expect("=")
                body = self.parse_proc()
                self.expect(";")
                if len(set(params)) != len(params):
                    self.error(f"duplicate parameter in {name!r}", tok=start)
                procs.append(A.ProcDef(name, tuple(params), body))
            else:
                found = self.tok.text
                self.error(f"unexpected {found!r}", ("var", "#define", "#assert", "process definition"))
        model = A.Model(tuple(vars_), tuple(defines), tuple(procs), tuple(asserts))
        return self._expand_defines(model)

    def parse_var(self) -> A.VarDecl:
        self.expect("var")
        name = self.expect_id()
        dims = []
        while self.accept("["):
            dims.append(self.parse_expr())
            self.expect("]")
        lo = hi = None
        if self.accept(":"):
            self.expect("{")
            lo = self.parse_expr()
            self.expect("..")
            hi = self.parse_expr()
            self.expect("}")
        init = None
        if self.accept("="):
            if self.at("["):
                init = tuple(self._parse_init_list())
            else:
                init = self.parse_expr()
        self.expect(";")
        return A.VarDecl(name, tuple(dims), lo, hi, init)

    def _parse_init_list(self) -> list:
        self.expect("[")
        items = []
        if not self.at("]"):
            while True:
                if self.at("["):
                    items.extend(self._parse_init_list())
                else:
                    e = self.parse_expr()
                    rep = A.IntLit(1)
                    if self.accept("("):
                        rep = self.parse_expr()
                        self.expect(")")
                    items.append((e, rep))
                if not self.accept(","):
                    break
        self.expect("]")
        return items

    def parse_assertion(self):
        call = self.parse_call()
        if self.accept("reaches"):
            goal = self.parse_expr()
            if self.accept("with"):
                tok = self.tok
                direction = self.expect_id()
                if direction not in ("max", "min"):
                    self.error(f"unexpected {direction!r}", ("max", "min"), tok=tok)
                self.expect("(")
                objective = self.expect_id()
                self.expect(")")
                return A.ReachesOptimal(call, goal, objective, direction)
            return A.Reaches(call, goal)
        if self.accept("|="):
            self.expect("[]")
            return A.GlobalSafety(call, self.parse_expr())
        if self.accept("deadlockfree"):
            return A.DeadlockFree(call)
        self.error(f"unexpected {self.tok.text!r}", ("reaches", "|=", "deadlockfree"))

    def parse_call(self) -> A.Call:
        name = self.expect_id()
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.parse_expr())
            while self.accept(","):
                args.append(self.parse_expr())
        self.expect(")")
        return A.Call(name, tuple(args))

    # ------------------------------------------------------------ processes
    def _at_definition(self) -> bool:
        """True when the cursor sits on ``ID ( ... ) =``, the start of a new item."""
        if self.tok.kind != "id" or not (self.peek().kind == "op" and self.peek().text == "("):
            return False
        depth, k = 0, self.i + 1
        while k < len(self.toks):
            t = self.toks[k]
            if t.kind == "op" and t.text == "(":
                depth += 1
            elif t.kind == "op" and t.text == ")":
                depth -= 1
                if depth == 0:
                    nxt = self.toks[k + 1]
                    return nxt.kind == "op" and nxt.text == "="
            elif t.kind == "eof":
                return False
            k += 1
        return False

    def _at_case_arm(self) -> bool:
        # "cond: P" inside case braces; a ':' before any '->', '{', ';' or '}' at bracket depth 0
        if self.tok.kind == "kw" and self.tok.text == "default":
            return True
        depth = 0
        for t in self.toks[self.i:]:
            if t.kind == "eof" or (t.kind == "kw" and t.text == "default"):
                return False
            if t.kind != "op":
                continue
            if t.text in ("(", "["):
                depth += 1
            elif t.text in (")", "]"):
                depth -= 1
            elif depth == 0 and t.text == ":":
                return True
            elif depth == 0 and t.text in ("->", "{", ";", "}"):
                return False
        return False

    def _starts_process(self) -> bool:
        t = self.tok
        if t.kind == "id":
            return not self._at_definition()
        if t.kind == "kw":
            return t.text in ("Skip", "Stop", "if", "case")
        return t.kind == "op" and t.text in ("[", "(")

    def parse_proc(self):
        left = self._parse_par()
        while self.at(";"):
            save = self.i
            self.i += 1
            if not self._starts_process() or (self._case_depth and self._at_case_arm()):
                self.i = save
                break
            left = A.Seq(left, self._parse_par())
        return left

    def _parse_par(self):
        left = self._parse_ichoice()
        while self.accept("||"):
            left = A.Parallel(left, self._parse_ichoice())
        return left

    def _parse_ichoice(self):
        left = self._parse_echoice()
        while self.accept("<>"):
            left = A.InternalChoice(left, self._parse_echoice())
        return left

    def _parse_echoice(self):
        left = self._parse_prefix()
        while self.accept("[]"):
            left = A.ExternalChoice(left, self._parse_prefix())
        return left

    def _parse_prefix(self):
        t = self.tok
        if self.accept("["):
            cond = self.parse_expr()
            self.expect("]")
            return A.Guarded(cond, self._parse_prefix())
        if self.accept("Skip"):
            self._skip_empty_parens()
            return A.SKIP
        if self.accept("Stop"):
            self._skip_empty_parens()
            return A.STOP
        if self.accept("if"):
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            self.expect("{")
            then = self.parse_proc()
            self.expect("}")
            orelse = A.SKIP
            if self.accept("else"):
                if self.at("if"):
                    orelse = self._parse_prefix()
                else:
                    self.expect("{")
                    orelse = self.parse_proc()
                    self.expect("}")
            return A.IfElse(cond, then, orelse)
        if self.accept("case"):
            return self._parse_case()
        if self.accept("("):
            p = self.parse_proc()
            self.expect(")")
            return p
        if t.kind == "id":
            if self.peek().kind == "op" and self.peek().text == "(":
                return self.parse_call()
            label = self._parse_label()
            program = A.EMPTY_PROGRAM
            if self.accept("{"):
                program = A.Program(self._parse_stmts_until("}"))
                self.expect("}")
            self.expect("->")
            return A.EventPrefix(label, program, self._parse_prefix())
        found = t.text or "end of input"
        self.error(f"unexpected {found!r}", ("process expression", "Skip", "Stop", "[", "(", "if", "case"))

    def _skip_empty_parens(self):
        if self.at("(") and self.peek().kind == "op" and self.peek().text == ")":
            self.i += 2

    def _parse_case(self):
        self.expect("{")
        self._case_depth += 1
        try:
            return self._parse_case_arms()
        finally:
            self._case_depth -= 1

    def _parse_case_arms(self):
        arms = []
        default = A.SKIP
        while not self.accept("}"):
            if self.accept("default"):
                self.expect(":")
                default = self.parse_proc()
                self.accept(";")
                self.expect("}")
                break
            cond = self.parse_expr()
            self.expect(":")
            arms.append((cond, self.parse_proc()))
            self.accept(";")
        result = default
        for cond, body in reversed(arms):
            result = A.IfElse(cond, body, result)
        return result

    def _parse_label(self) -> A.Label:
        name = self.expect_id()
        parts = []
        while self.accept("."):
            t = self.tok
            if t.kind == "int":
                self.i += 1
                parts.append(A.IntLit(int(t.text)))
            elif t.kind == "id":
                self.i += 1
                parts.append(A.Name(t.text))
            elif self.accept("("):
                parts.append(self.parse_expr())
                self.expect(")")
            else:
                self.error(f"unexpected {t.text!r}", ("label index",))
        return A.Label(name, tuple(parts))

    # ------------------------------------------------------------ programs
    def parse_program_text(self) -> A.Program:
        stmts = self._parse_stmts_until(None)
        self.expect_end()
        return A.Program(stmts)

    def _parse_stmts_until(self, closer) -> tuple:
        out = []
        while not (self.tok.kind == "eof" or (closer and self.at(closer))):
            if self.accept(";"):
                continue
            out.append(self._parse_stmt(closer))
        return tuple(out)

    def _parse_block(self, closer) -> tuple:
        if self.accept("{"):
            stmts = self._parse_stmts_until("}")
            self.expect("}")
            return stmts
        return (self._parse_stmt(closer),)

    def _parse_stmt(self, closer):
        if self.accept("var"):
            name = self.expect_id()
            self.expect("=")
            value = self.parse_expr()
            self._end_stmt(closer)
            return A.LocalVar(name, value)
        if self.accept("if"):
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            then = self._parse_block(closer)
            orelse = ()
            if self.accept("else"):
                orelse = self._parse_block(closer)
            return A.IfStmt(cond, then, orelse)
        name = self.expect_id()
        target = A.Name(name)
        if self.at("["):
            idx = []
            while self.accept("["):
                idx.append(self.parse_expr())
                self.expect("]")
            target = A.Index(name, tuple(idx))
        if not self.at(*_ASSIGN_OPS):
            self.error(f"unexpected {self.tok.text!r}", _ASSIGN_OPS)
        op = self.tok.text
        self.i += 1
        value = self.parse_expr()
        self._end_stmt(closer)
        return A.Assign(target, op, value)

    def _end_stmt(self, closer):
        if self.accept(";"):
            return
        if (closer and self.at(closer)) or self.tok.kind == "eof":
            return
        self.error(f"unexpected {self.tok.text!r}", (";",))

    # ------------------------------------------------------------ expressions
    def parse_expr(self, level: int = 0):
        if level == len(_BINARY_LEVELS):
            return self._parse_unary()
        ops = _BINARY_LEVELS[level]
        left = self.parse_expr(level + 1)
        while self.tok.kind == "op" and self.tok.text in ops:
            # '&&'/'||' followed by 'ID :' starts a quantifier, not a binary op
            if self.tok.text in ("&&", "||") and self._at_quantifier():
                break
            op = self.tok.text
            self.i += 1
            left = A.Binary(op, left, self.parse_expr(level + 1))
        return left

    def _at_quantifier(self) -> bool:
        return self.peek().kind == "id" and self.peek(2).kind == "op" and self.peek(2).text == ":"

    def _parse_unary(self):
        if self.at("-", "!"):
            op = self.tok.text
            self.i += 1
            operand = self._parse_unary()
            if op == "-" and type(operand) is A.IntLit:
                return A.IntLit(-operand.value)
            if op == "-" and type(operand) is A.DecLit:
                return A.DecLit(-operand.value, "-" + operand.text)
            return A.Unary(op, operand)
        return self._parse_power()

    def _parse_power(self):
        base = self._parse_primary()
        if self.accept("^"):
            return A.Binary("^", base, self._parse_unary())
        return base

    def _parse_primary(self):
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return A.IntLit(int(t.text))
        if t.kind == "dec":
            self.i += 1
            return A.DecLit(Fraction(t.text), t.text)
        if self.accept("true"):
            return A.BoolLit(True)
        if self.accept("false"):
            return A.BoolLit(False)
        if self.accept("("):
            e = self.parse_expr()
            self.expect(")")
            return e
        if self.at("&&", "||") and self._at_quantifier():
            op = t.text
            self.i += 1
            var = self.expect_id()
            self.expect(":")
            self.expect("{")
            lo = self.parse_expr()
            self.expect("..")
            hi = self.parse_expr()
            self.expect("}")
            self.expect("@")
            self.expect("(")
            body = self.parse_expr()
            self.expect(")")
            return A.Quant(op, var, lo, hi, body)
        if t.kind == "id":
            self.i += 1
            if self.accept("("):
                args = []
                if not self.at(")"):
                    args.append(self.parse_expr())
                    while self.accept(","):
                        args.append(self.parse_expr())
                self.expect(")")
                return A.FuncCall(t.text, tuple(args))
            if self.at("["):
                idx = []
                while self.accept("["):
                    idx.append(self.parse_expr())
                    self.expect("]")
                return A.Index(t.text, tuple(idx))
            return A.Name(t.text)
        found = t.text or "end of input"
        self.error(f"unexpected {found!r}", ("expression",))

    # ------------------------------------------------------------ #define
    def _expand_defines(self, model: A.Model) -> A.Model:
        raw = dict(model.defines)
        done: dict = {}

        def resolve(name: str, stack: tuple):
            if name in done:
                return done[name]
            if name in stack:
                self.error(f"recursive #define {name!r}", tok=self._define_pos[name])
            e = rewrite_expr(raw[name], lambda n, b: resolve(n, stack + (name,)) if n in raw else None)
            done[name] = e
            return e

        for name in raw:
            resolve(name, ())
        if not done:
            return model

        def subst_outside(shadow: frozenset):
            return lambda n, b: done.get(n) if n not in shadow else None

        top = subst_outside(frozenset())
        vars_ = tuple(_rewrite_var(v, top) for v in model.vars)
        procs = tuple(
            A.ProcDef(p.name, p.params, rewrite_proc(p.body, subst_outside(frozenset(p.params))))
            for p in model.procs
        )
        asserts = tuple(_rewrite_assertion(a, top) for a in model.assertions)
        defines = tuple((n, done[n]) for n, _ in model.defines)
        return A.Model(vars_, defines, procs, asserts)


def _rewrite_var(v: A.VarDecl, subst) -> A.VarDecl:
    def rw(e):
        return None if e is None else rewrite_expr(e, subst)

    init = v.init
    if isinstance(init, tuple):
        init = tuple((rw(e), rw(r)) for e, r in init)
    else:
        init = rw(init)
    return A.VarDecl(v.name, tuple(rw(d) for d in v.dims), rw(v.lo), rw(v.hi), init)


def _rewrite_assertion(a, subst):
    call = A.Call(a.process.name, tuple(rewrite_expr(x, subst) for x in a.process.args))
    if type(a) is A.Reaches:
        return A.Reaches(call, rewrite_expr(a.goal, subst))
    if type(a) is A.ReachesOptimal:
        return A.ReachesOptimal(call, rewrite_expr(a.goal, subst), a.objective, a.direction)
    if type(a) is A.GlobalSafety:
        return A.GlobalSafety(call, rewrite_expr(a.cond, subst))
    return A.DeadlockFree(call)


# ---------------------------------------------------------------- public API


def parse_model(source: str, filename: str = "<model>") -> A.Model:
    """Parse a complete model unit."""
    return Parser(source, filename).parse_model()


def parse_expr(text: str, defines=None):
    """Parse a standalone condition or integer expression.

    ``defines`` (a model or a ``{name: expr}`` mapping) supplies macros to expand.
    """
    p = Parser(text, "<expr>")
    e = p.parse_expr()
    p.expect_end()
    return expand_with(e, defines)


def parse_program(text: str, defines=None) -> A.Program:
    """Parse a statement list such as ``x = x + 1; visited[i] = 1;``."""
    p = Parser(text, "<program>")
    prog = p.parse_program_text()
    table = _define_table(defines)
    if table:
        prog = A.Program(rewrite_stmts(prog.stmts, lambda n, b: table.get(n)))
    return prog


def parse_proc(text: str):
    p = Parser(text, "<process>")
    proc = p.parse_proc()
    p.expect_end()
    return proc


def expand_with(e, defines):
    table = _define_table(defines)
    if not table:
        return e
    return rewrite_expr(e, lambda n, b: table.get(n))


def _define_table(defines) -> dict:
    if defines is None:
        return {}
    if isinstance(defines, A.Model):
        return dict(defines.defines)
    return dict(defines)

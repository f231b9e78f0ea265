"""Reader and printer for the S-expression form of kernel programs."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .ir import (
    Branch, Call, Case, Cons, ConsDecl, ConsPattern, CoreProgram, DataDecl,
    DefaultPattern, FAILED, Failed, Free, FuncDecl, IRError, Let, Lit,
    LitPattern, Literal, Or, TCon, TVar, Var,
)

RESERVED = {"failed", "module", "import", "data", "func", "external", "rule",
            "lit", "cons", "call", "or", "free", "let", "case", "default",
            "public", "private"}


class ParseError(IRError):
    """One or more diagnostics collected while reading a program."""

    def __init__(self, diagnostics: list):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0]
        super().__init__(first.message, first.line, first.column)

    def __str__(self) -> str:
        return "\n".join(str(d) for d in self.diagnostics)


@dataclass(frozen=True)
class Diagnostic:
    message: str
    line: int = 0
    column: int = 0

    def __str__(self) -> str:
        if not self.line:
            return self.message
        return f"{self.line}:{self.column}: {self.message}"


# ---------------------------------------------------------------- reader

@dataclass
class Atom:
    value: Union[str, int]
    is_string: bool
    line: int
    column: int


@dataclass
class SList:
    items: list
    line: int
    column: int


_TOKEN = re.compile(r"""
    (?P<ws>\s+|;[^\n]*)
  | (?P<open>\()
  | (?P<close>\))
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<atom>[^\s()";]+)
""", re.VERBOSE)

_INT = re.compile(r"-?\d+$")
_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", '"': '"', "'": "'"}


def _unescape(body: str) -> str:
    return re.sub(r"\\(.)", lambda m: _ESCAPES.get(m.group(1), m.group(1)), body)


def read_sexprs(text: str) -> list:
    stack = [SList([], 1, 1)]
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError([Diagnostic(f"unexpected character {text[pos]!r}", line, col)])
        kind = m.lastgroup
        tok = m.group(kind)
        if kind == "open":
            stack.append(SList([], line, col))
        elif kind == "close":
            if len(stack) == 1:
                raise ParseError([Diagnostic("unbalanced ')'", line, col)])
            done = stack.pop()
            stack[-1].items.append(done)
        elif kind == "string":
            stack[-1].items.append(Atom(_unescape(tok[1:-1]), True, line, col))
        elif kind == "atom":
            value = int(tok) if _INT.match(tok) else tok
            stack[-1].items.append(Atom(value, False, line, col))
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            line_start = pos + tok.rindex("\n") + 1
        pos = m.end()
    if len(stack) != 1:
        open_list = stack[-1]
        raise ParseError([Diagnostic("unclosed '('", open_list.line, open_list.column)])
    return stack[0].items


# ---------------------------------------------------------------- conversion

class _Reader:
    def __init__(self):
        self.diagnostics: list = []
        self.scrutinees = 0

    def error(self, node, message: str):
        raise ParseError([Diagnostic(message, node.line, node.column)])

    def symbol(self, node, what: str = "name") -> str:
        if not isinstance(node, Atom) or node.is_string or not isinstance(node.value, str):
            self.error(node, f"expected {what}")
        return node.value

    def integer(self, node, what: str = "integer") -> int:
        if not isinstance(node, Atom) or not isinstance(node.value, int):
            self.error(node, f"expected {what}")
        return node.value

    def variable(self, node) -> str:
        name = self.symbol(node, "variable")
        if name in RESERVED:
            self.error(node, f"reserved word {name} used as variable")
        return name

    def head(self, node) -> str:
        if isinstance(node, SList) and node.items and isinstance(node.items[0], Atom):
            v = node.items[0].value
            return v if isinstance(v, str) else ""
        return ""

    # -- program
    def program(self, nodes: list) -> CoreProgram:
        if len(nodes) != 1:
            where = nodes[1] if len(nodes) > 1 else Atom("", False, 1, 1)
            self.error(where, "expected exactly one (module ...) form")
        node = nodes[0]
        if self.head(node) != "module" or len(node.items) < 2:
            self.error(node, "expected (module NAME ...)")
        module = self.symbol(node.items[1], "module name")
        imports, datas, funcs = [], [], []
        for item in node.items[2:]:
            h = self.head(item)
            if h == "import":
                if len(item.items) != 2:
                    self.error(item, "expected (import NAME)")
                imports.append(self.symbol(item.items[1], "module name"))
            elif h == "data":
                datas.append(self.data(item))
            elif h == "func":
                funcs.append(self.func(item))
            elif h == "external":
                funcs.append(self.external(item))
            else:
                self.error(item, "expected import, data, func or external declaration")
        return CoreProgram(module, tuple(imports), tuple(datas), tuple(funcs))

    def data(self, node) -> DataDecl:
        if len(node.items) < 3:
            self.error(node, "data declaration needs at least one constructor")
        spec = node.items[1]
        if isinstance(spec, SList):
            if not spec.items:
                self.error(spec, "expected type name")
            name = self.symbol(spec.items[0], "type name")
            tyvars = tuple(self.symbol(v, "type variable") for v in spec.items[1:])
        else:
            name, tyvars = self.symbol(spec, "type name"), ()
        cons = []
        for c in node.items[2:]:
            if not isinstance(c, SList) or len(c.items) < 2:
                self.error(c, "expected (CNAME ARITY field-type*)")
            cname = self.symbol(c.items[0], "constructor name")
            arity = self.integer(c.items[1], "constructor arity")
            if arity < 0:
                self.error(c.items[1], "negative arity")
            fields = None
            if len(c.items) > 2:
                fields = tuple(self.type_expr(t, tyvars) for t in c.items[2:])
                if len(fields) != arity:
                    self.error(c, f"constructor {cname} declares {arity} fields but lists {len(fields)} field types")
            elif arity == 0:
                fields = ()
            cons.append(ConsDecl(cname, arity, fields))
        return DataDecl(name, tuple(cons), tyvars)

    def type_expr(self, node, tyvars):
        if isinstance(node, Atom):
            name = self.symbol(node, "type")
            if name in tyvars:
                return TVar(name)
            if name[:1].islower():
                self.error(node, f"unbound type variable {name}")
            return TCon(name)
        if not node.items:
            self.error(node, "empty type")
        name = self.symbol(node.items[0], "type constructor")
        return TCon(name, tuple(self.type_expr(t, tyvars) for t in node.items[1:]))

    def func(self, node) -> FuncDecl:
        items = node.items
        if len(items) not in (4, 5):
            self.error(node, "expected (func NAME ARITY VIS? (rule (VAR*) expr))")
        name = self.symbol(items[1], "function name")
        arity = self.integer(items[2], "arity")
        public = True
        if len(items) == 5:
            vis = self.symbol(items[3], "visibility")
            if vis not in ("public", "private"):
                self.error(items[3], "visibility must be public or private")
            public = vis == "public"
        rule = items[-1]
        if self.head(rule) != "rule" or len(rule.items) != 3 or not isinstance(rule.items[1], SList):
            self.error(rule, "expected (rule (VAR*) expr)")
        params = tuple(self.variable(v) for v in rule.items[1].items)
        if len(params) != arity:
            self.error(rule, f"function {name} has arity {arity} but {len(params)} parameters")
        body = self.expr(rule.items[2])
        return FuncDecl(name, params, body, public)

    def external(self, node) -> FuncDecl:
        if len(node.items) != 3:
            self.error(node, "expected (external NAME ARITY)")
        name = self.symbol(node.items[1], "external name")
        arity = self.integer(node.items[2], "arity")
        params = tuple(f"_x{i}" for i in range(arity))
        return FuncDecl(name, params, None, True, external=name)

    def literal(self, node) -> Literal:
        items = node.items
        if len(items) != 3:
            self.error(node, "expected (lit int N) or (lit char \"c\")")
        kind = self.symbol(items[1], "literal kind")
        if kind == "int":
            return Literal("int", self.integer(items[2]))
        if kind == "char":
            v = items[2]
            if not (isinstance(v, Atom) and v.is_string and len(v.value) == 1):
                self.error(v, "expected one-character string")
            return Literal("char", v.value)
        self.error(items[1], f"unknown literal kind {kind}")

    def expr(self, node):
        if isinstance(node, Atom):
            if node.value == "failed":
                return FAILED
            return Var(self.variable(node))
        h = self.head(node)
        items = node.items
        if h == "lit":
            return Lit(self.literal(node))
        if h in ("cons", "call"):
            if len(items) < 2:
                self.error(node, f"expected ({h} NAME arg*)")
            name = self.symbol(items[1])
            args = tuple(self.expr(a) for a in items[2:])
            return Cons(name, args) if h == "cons" else Call(name, args)
        if h == "or":
            if len(items) != 3:
                self.error(node, "expected (or expr expr)")
            return Or(self.expr(items[1]), self.expr(items[2]))
        if h == "free":
            if len(items) != 3 or not isinstance(items[1], SList) or not items[1].items:
                self.error(node, "expected (free (VAR+) expr)")
            return Free(tuple(self.variable(v) for v in items[1].items), self.expr(items[2]))
        if h == "let":
            if len(items) != 4:
                self.error(node, "expected (let VAR expr expr)")
            return Let(self.variable(items[1]), self.expr(items[2]), self.expr(items[3]))
        if h == "case":
            if len(items) < 3:
                self.error(node, "expected (case VAR branch+)")
            branches = tuple(self.branch(b) for b in items[2:])
            if isinstance(items[1], Atom):
                return Case(self.variable(items[1]), branches)
            # (case EXPR ...) abbreviates a let-bound scrutinee
            self.scrutinees += 1
            var = f"case#{self.scrutinees}"
            return Let(var, self.expr(items[1]), Case(var, branches))
        self.error(node, "malformed expression")

    def branch(self, node) -> Branch:
        if self.head(node) == "default":
            if len(node.items) != 2:
                self.error(node, "expected (default expr)")
            return Branch(DefaultPattern(), self.expr(node.items[1]))
        if not isinstance(node, SList) or len(node.items) != 2 or not isinstance(node.items[0], SList):
            self.error(node, "expected (pattern expr)")
        pat = node.items[0]
        if self.head(pat) == "lit":
            pattern = LitPattern(self.literal(pat))
        else:
            if not pat.items:
                self.error(pat, "empty pattern")
            pattern = ConsPattern(self.symbol(pat.items[0], "constructor"),
                                  tuple(self.variable(v) for v in pat.items[1:]))
        return Branch(pattern, self.expr(node.items[1]))


def parse_program(text: str, validate: bool = True) -> CoreProgram:
    """Parse IR source text; raises :class:`ParseError` with diagnostics."""
    reader = _Reader()
    program = reader.program(read_sexprs(text))
    if validate:
        diagnostics = check_program(program)
        if diagnostics:
            raise ParseError(diagnostics)
    return program


def parse_expr(text: str):
    nodes = read_sexprs(text)
    if len(nodes) != 1:
        raise ParseError([Diagnostic("expected one expression", 1, 1)])
    return _Reader().expr(nodes[0])


# ---------------------------------------------------------------- validation

def check_program(program: CoreProgram, known_functions: dict = None) -> list:
    """Scope and arity diagnostics.

    ``known_functions`` maps imported operation names to arities; when a
    module has imports whose interfaces are not supplied, unknown names are
    left for resolution at load time.
    """
    diags = []
    seen_types, seen_cons, seen_funcs = set(), set(), set()
    for d in program.datas:
        if d.name in seen_types or d.name == "Bool":
            diags.append(Diagnostic(f"duplicate type {d.name}"))
        seen_types.add(d.name)
        for c in d.constructors:
            if c.name in seen_cons or c.name in ("True", "False"):
                diags.append(Diagnostic(f"duplicate constructor {c.name}"))
            seen_cons.add(c.name)
    for f in program.funcs:
        if f.name in seen_funcs:
            diags.append(Diagnostic(f"duplicate function {f.name}"))
        seen_funcs.add(f.name)
    arities = {f.name: f.arity for f in program.funcs}
    if known_functions:
        arities = {**known_functions, **arities}
    open_world = bool(program.imports) and known_functions is None

    def visit(e, scope, fname):
        if isinstance(e, Var):
            if e.name not in scope:
                diags.append(Diagnostic(f"unbound variable {e.name} in {fname}"))
        elif isinstance(e, Cons):
            if program.has_constructor(e.name):
                arity = program.constructor(e.name).arity
                if arity != len(e.args):
                    diags.append(Diagnostic(f"constructor {e.name} expects {arity} arguments, got {len(e.args)}"))
            elif not open_world:
                diags.append(Diagnostic(f"unknown constructor {e.name} in {fname}"))
            for a in e.args:
                visit(a, scope, fname)
        elif isinstance(e, Call):
            if e.name in arities:
                if len(e.args) > arities[e.name]:
                    diags.append(Diagnostic(f"{e.name} has arity {arities[e.name]} but is applied to {len(e.args)} arguments"))
            elif not open_world:
                diags.append(Diagnostic(f"unknown function {e.name} in {fname}"))
            for a in e.args:
                visit(a, scope, fname)
        elif isinstance(e, Or):
            visit(e.left, scope, fname)
            visit(e.right, scope, fname)
        elif isinstance(e, Free):
            visit(e.body, scope | set(e.vars), fname)
        elif isinstance(e, Let):
            visit(e.bound, scope, fname)
            visit(e.body, scope | {e.var}, fname)
        elif isinstance(e, Case):
            if e.scrutinee not in scope:
                diags.append(Diagnostic(f"unbound variable {e.scrutinee} in {fname}"))
            for b in e.branches:
                extra = set()
                p = b.pattern
                if isinstance(p, ConsPattern):
                    if program.has_constructor(p.name):
                        arity = program.constructor(p.name).arity
                        if arity != len(p.vars):
                            diags.append(Diagnostic(f"pattern {p.name} expects {arity} variables, got {len(p.vars)}"))
                    elif not open_world:
                        diags.append(Diagnostic(f"unknown constructor {p.name} in {fname}"))
                    if len(set(p.vars)) != len(p.vars):
                        diags.append(Diagnostic(f"repeated pattern variable in {fname}"))
                    extra = set(p.vars)
                visit(b.body, scope | extra, fname)

    for f in program.funcs:
        if len(set(f.params)) != len(f.params):
            diags.append(Diagnostic(f"repeated parameter in {f.name}"))
        if f.body is not None:
            visit(f.body, set(f.params), f.name)
    return diags


# ---------------------------------------------------------------- printer

def _quote(ch: str) -> str:
    return '"' + ch.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t") + '"'


def show_literal(lit: Literal) -> str:
    if lit.kind == "int":
        return f"(lit int {lit.value})"
    return f"(lit char {_quote(lit.value)})"


def show_type(t) -> str:
    if isinstance(t, TVar) or not t.args:
        return str(t.name)
    return "(" + " ".join([t.name] + [show_type(a) for a in t.args]) + ")"


def show_expr(e) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Failed):
        return "failed"
    if isinstance(e, Lit):
        return show_literal(e.value)
    if isinstance(e, (Cons, Call)):
        kw = "cons" if isinstance(e, Cons) else "call"
        return "(" + " ".join([kw, e.name] + [show_expr(a) for a in e.args]) + ")"
    if isinstance(e, Or):
        return f"(or {show_expr(e.left)} {show_expr(e.right)})"
    if isinstance(e, Free):
        return f"(free ({' '.join(e.vars)}) {show_expr(e.body)})"
    if isinstance(e, Let):
        return f"(let {e.var} {show_expr(e.bound)} {show_expr(e.body)})"
    if isinstance(e, Case):
        return f"(case {e.scrutinee} " + " ".join(show_branch(b) for b in e.branches) + ")"
    raise TypeError(e)


def show_branch(b: Branch) -> str:
    p = b.pattern
    if isinstance(p, DefaultPattern):
        return f"(default {show_expr(b.body)})"
    if isinstance(p, LitPattern):
        return f"({show_literal(p.value)} {show_expr(b.body)})"
    return "((" + " ".join((p.name,) + tuple(p.vars)) + f") {show_expr(b.body)})"


def show_data(d: DataDecl) -> str:
    head = d.name if not d.tyvars else "(" + " ".join((d.name,) + tuple(d.tyvars)) + ")"
    parts = []
    for c in d.constructors:
        fields = "" if not c.fields else " " + " ".join(show_type(t) for t in c.fields)
        parts.append(f"({c.name} {c.arity}{fields})")
    return f"(data {head} " + " ".join(parts) + ")"


def show_program(program: CoreProgram) -> str:
    lines = [f"(module {program.module}"]
    lines += [f"  (import {m})" for m in program.imports]
    lines += ["  " + show_data(d) for d in program.datas]
    for f in program.funcs:
        if f.external is not None:
            lines.append(f"  (external {f.name} {f.arity})")
        else:
            vis = "public" if f.public else "private"
            lines.append(f"  (func {f.name} {f.arity} {vis} (rule ({' '.join(f.params)}) {show_expr(f.body)}))")
    return "\n".join(lines) + ")\n"

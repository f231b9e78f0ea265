"""Ground data terms and bounded, type-directed term enumeration."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Callable, Iterable, Optional, Union

from .ir import CoreProgram, Literal, TCon, TVar

DEFAULT_INTS = tuple(range(-2, 4))
DEFAULT_CHARS = ("a", "b")

# type variables left open after inference are instantiated with this type
DEFAULT_TYPE = TCon("Bool")


@dataclass(frozen=True)
class Term:
    con: Union[str, Literal]
    args: tuple = ()

    def __str__(self) -> str:
        if isinstance(self.con, Literal):
            return str(self.con)
        if not self.args:
            return self.con
        return f"{self.con}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class PartialApp:
    """A function value: an operation applied to fewer arguments than its arity."""
    name: str
    args: tuple = ()
    missing: int = 1

    def __str__(self) -> str:
        inner = " ".join([self.name] + [str(a) for a in self.args])
        return f"({inner})" if self.args else self.name


Value = Union[Term, PartialApp]


def term_size(t) -> int:
    if isinstance(t, PartialApp):
        return 1 + sum(term_size(a) for a in t.args)
    return 1 + sum(term_size(a) for a in t.args)


def show_term(t) -> str:
    """Render a term in IR syntax."""
    if isinstance(t, PartialApp):
        return "(call " + " ".join([t.name] + [show_term(a) for a in t.args]) + ")"
    if isinstance(t.con, Literal):
        if t.con.kind == "int":
            return f"(lit int {t.con.value})"
        return f'(lit char "{t.con.value}")'
    return "(cons " + " ".join([t.con] + [show_term(a) for a in t.args]) + ")"


def literal_pool(program: Optional[CoreProgram] = None) -> tuple:
    pool = {Literal("int", i) for i in DEFAULT_INTS} | {Literal("char", c) for c in DEFAULT_CHARS}
    if program is not None:
        pool |= program.literals()
    return tuple(sorted(pool, key=lambda l: (l.kind, str(type(l.value)), l.value)))


def subst_type(t, mapping: dict):
    if isinstance(t, TVar):
        return mapping.get(t.name, DEFAULT_TYPE)
    return TCon(t.name, tuple(subst_type(a, mapping) for a in t.args))


def default_type_of_constructor(program: CoreProgram, con) -> TCon:
    """Type of a constructor's result with all parameters instantiated by default."""
    if isinstance(con, Literal):
        return TCon(con.type_name)
    d = program.data(program.type_of_constructor(con))
    return TCon(d.name, tuple(DEFAULT_TYPE for _ in d.tyvars))


class Universe:
    """All ground values of a program's types, enumerated by size."""

    def __init__(self, program: CoreProgram, pool: Optional[Iterable[Literal]] = None,
                 function_values: Optional[Callable[[TCon], list]] = None):
        self.program = program
        self.pool = tuple(pool) if pool is not None else literal_pool(program)
        self.function_values = function_values
        self._exact = lru_cache(maxsize=None)(self._terms_exact)

    def field_types(self, con: str, typ: TCon) -> tuple:
        d = self.program.data(self.program.type_of_constructor(con))
        c = d.constructor(con)
        mapping = dict(zip(d.tyvars, typ.args))
        if c.fields is None:
            return tuple(DEFAULT_TYPE for _ in range(c.arity))
        return tuple(subst_type(f, mapping) for f in c.fields)

    def _terms_exact(self, typ: TCon, size: int) -> tuple:
        if size < 1:
            return ()
        if typ.name in ("Int", "Char"):
            kind = "int" if typ.name == "Int" else "char"
            return tuple(Term(l) for l in self.pool if l.kind == kind) if size == 1 else ()
        if typ.name == "->":
            if self.function_values is None:
                return ()
            return tuple(v for v in self.function_values(typ) if term_size(v) == size)
        out = []
        for c in self.program.constructors_of(typ.name):
            if c.arity == 0:
                if size == 1:
                    out.append(Term(c.name))
                continue
            fields = self.field_types(c.name, typ)
            for split in _compositions(size - 1, c.arity):
                choices = [self._exact(ft, s) for ft, s in zip(fields, split)]
                for combo in product(*choices):
                    out.append(Term(c.name, combo))
        return tuple(out)

    def terms(self, typ: TCon, max_size: int) -> list:
        out = []
        for s in range(1, max_size + 1):
            out.extend(self._exact(typ, s))
        return out


def _compositions(total: int, parts: int):
    """Ordered splits of ``total`` into ``parts`` positive integers."""
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest

"""Kernel intermediate language: data declarations, rules and expressions.

Every operation is defined by a single rule whose right-hand side is built
from variables, literals, constructor and function applications to
variables, disjunctions, free-variable and let bindings, case selections
and the reserved ``failed`` expression.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Union


class IRError(Exception):
    """Raised for malformed or ill-scoped programs."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True, order=True)
class Literal:
    kind: str  # "int" | "char"
    value: Union[int, str]

    @property
    def type_name(self) -> str:
        return "Int" if self.kind == "int" else "Char"

    def __str__(self) -> str:
        if self.kind == "int":
            return str(self.value)
        return "'" + str(self.value) + "'"


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class TCon:
    name: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return "(" + " ".join([self.name] + [str(a) for a in self.args]) + ")"


@dataclass(frozen=True)
class TVar:
    name: str

    def __str__(self) -> str:
        return self.name


TypeExpr = Union[TCon, TVar]


# ---------------------------------------------------------------- declarations

@dataclass(frozen=True)
class ConsDecl:
    name: str
    arity: int
    fields: Optional[tuple] = None  # field types, when declared


@dataclass(frozen=True)
class DataDecl:
    name: str
    constructors: tuple
    tyvars: tuple = ()

    def constructor(self, name: str) -> ConsDecl:
        for c in self.constructors:
            if c.name == name:
                return c
        raise KeyError(name)


BOOL = DataDecl("Bool", (ConsDecl("False", 0, ()), ConsDecl("True", 0, ())))
BUILTIN_DATA = (BOOL,)
LITERAL_TYPES = ("Int", "Char")


# ---------------------------------------------------------------- expressions

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lit:
    value: Literal


@dataclass(frozen=True)
class Cons:
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class Or:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Free:
    vars: tuple
    body: "Expr"


@dataclass(frozen=True)
class Let:
    var: str
    bound: "Expr"
    body: "Expr"


@dataclass(frozen=True)
class ConsPattern:
    name: str
    vars: tuple = ()


@dataclass(frozen=True)
class LitPattern:
    value: Literal


@dataclass(frozen=True)
class DefaultPattern:
    pass


Pattern = Union[ConsPattern, LitPattern, DefaultPattern]


@dataclass(frozen=True)
class Branch:
    pattern: Pattern
    body: "Expr"


@dataclass(frozen=True)
class Case:
    scrutinee: str
    branches: tuple


@dataclass(frozen=True)
class Failed:
    pass


Expr = Union[Var, Lit, Cons, Call, Or, Free, Let, Case, Failed]

FAILED = Failed()


@dataclass(frozen=True)
class FuncDecl:
    name: str
    params: tuple
    body: Optional[Expr]
    public: bool = True
    external: Optional[str] = None

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class CoreProgram:
    module: str
    imports: tuple = ()
    datas: tuple = ()
    funcs: tuple = ()
    # data declarations made visible by imported modules
    imported_datas: tuple = ()

    @cached_property
    def _data_by_name(self) -> dict:
        table = {}
        for d in BUILTIN_DATA + self.imported_datas + self.datas:
            table[d.name] = d
        return table

    @cached_property
    def _cons_index(self) -> dict:
        table = {}
        for d in BUILTIN_DATA + self.imported_datas + self.datas:
            for c in d.constructors:
                table[c.name] = (d, c)
        return table

    @cached_property
    def _func_by_name(self) -> dict:
        return {f.name: f for f in self.funcs}

    def function(self, name: str) -> FuncDecl:
        return self._func_by_name[name]

    def has_function(self, name: str) -> bool:
        return name in self._func_by_name

    def all_datas(self) -> tuple:
        return tuple(self._data_by_name.values())

    def data(self, name: str) -> DataDecl:
        try:
            return self._data_by_name[name]
        except KeyError:
            raise IRError(f"unknown type {name}") from None

    def has_constructor(self, name: str) -> bool:
        return name in self._cons_index

    def constructor(self, name: str) -> ConsDecl:
        try:
            return self._cons_index[name][1]
        except KeyError:
            raise IRError(f"unknown constructor {name}") from None

    def type_of_constructor(self, name: str) -> str:
        try:
            return self._cons_index[name][0].name
        except KeyError:
            raise IRError(f"unknown constructor {name}") from None

    def constructors_of(self, type_name: str) -> list:
        """Constructors of a declared type, in declaration order."""
        return list(self.data(type_name).constructors)

    def siblings(self, con_name: str) -> list:
        """All constructors of the type that ``con_name`` belongs to."""
        return list(self._cons_index[con_name][0].constructors)

    def literals(self) -> set:
        found = set()
        for f in self.funcs:
            if f.body is not None:
                for e in subexprs(f.body):
                    if isinstance(e, Lit):
                        found.add(e.value)
                    elif isinstance(e, Case):
                        for b in e.branches:
                            if isinstance(b.pattern, LitPattern):
                                found.add(b.pattern.value)
        return found


def subexprs(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal of an expression."""
    yield e
    if isinstance(e, Or):
        yield from subexprs(e.left)
        yield from subexprs(e.right)
    elif isinstance(e, Free):
        yield from subexprs(e.body)
    elif isinstance(e, Let):
        yield from subexprs(e.bound)
        yield from subexprs(e.body)
    elif isinstance(e, Case):
        for b in e.branches:
            yield from subexprs(b.body)
    elif isinstance(e, (Call, Cons)):
        for a in e.args:
            yield from subexprs(a)


def called_functions(e: Expr) -> set:
    return {s.name for s in subexprs(e) if isinstance(s, Call)}


def is_failed(e: Expr) -> bool:
    return isinstance(e, Failed)

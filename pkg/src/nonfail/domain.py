"""Depth-k abstract types.

An abstract value is ``BOTTOM`` (no terms), ``ANY`` (all terms) or a set of
constructor shapes of one type.  Each shape carries one abstract value per
argument; below depth k every argument is ``ANY``.  Literals are 0-ary
constructors of the open types Int and Char.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .ir import BUILTIN_DATA, CoreProgram, IRError, Literal

ConKey = Union[str, Literal]


class AbstractValue:
    __slots__ = ()


class _Bottom(AbstractValue):
    __slots__ = ()

    def __repr__(self) -> str:
        return "BOTTOM"

    def __reduce__(self):
        return "BOTTOM"


class _Any(AbstractValue):
    __slots__ = ()

    def __repr__(self) -> str:
        return "ANY"

    def __reduce__(self):
        return "ANY"


BOTTOM = _Bottom()
ANY = _Any()


def con_sort_key(c: ConKey) -> tuple:
    if isinstance(c, Literal):
        return (1, c.kind, str(type(c.value)), c.value)
    return (0, c)


@dataclass(frozen=True)
class Shapes(AbstractValue):
    """Nonempty set of shapes, sorted, at most one per constructor."""
    items: tuple  # of (ConKey, tuple of AbstractValue)

    def cons(self) -> tuple:
        return tuple(c for c, _ in self.items)

    def children(self, con: ConKey) -> Optional[tuple]:
        for c, kids in self.items:
            if c == con:
                return kids
        return None

    def __repr__(self) -> str:
        return render(self)


def make_shapes(pairs) -> AbstractValue:
    """Canonical value from (constructor, children) pairs (already merged)."""
    pairs = [(c, tuple(k)) for c, k in pairs if not any(x is BOTTOM for x in k)]
    if not pairs:
        return BOTTOM
    pairs.sort(key=lambda p: con_sort_key(p[0]))
    return Shapes(tuple(pairs))


@dataclass(frozen=True)
class DomainConfig:
    depth: int = 1
    literal_widen_cap: int = 16

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        if self.literal_widen_cap < 1:
            raise ValueError("literal_widen_cap must be at least 1")


class Signature:
    """Constructor arities and owning types, as needed by the lattice."""

    def __init__(self, datas=()):
        self.arity: dict = {}
        self.owner: dict = {}
        self.by_type: dict = {}
        for d in tuple(BUILTIN_DATA) + tuple(datas):
            self.by_type[d.name] = tuple(c.name for c in d.constructors)
            for c in d.constructors:
                self.arity[c.name] = c.arity
                self.owner[c.name] = d.name

    @classmethod
    def of(cls, program: CoreProgram) -> "Signature":
        return cls(program.imported_datas + program.datas)

    def arity_of(self, c: ConKey) -> int:
        if isinstance(c, Literal):
            return 0
        try:
            return self.arity[c]
        except KeyError:
            raise IRError(f"unknown constructor {c}") from None

    def type_of(self, c: ConKey) -> str:
        if isinstance(c, Literal):
            return c.type_name
        try:
            return self.owner[c]
        except KeyError:
            raise IRError(f"unknown constructor {c}") from None


class DepthK:
    """The lattice of depth-k abstract types over one signature.

    The analyses only use ``bottom``, ``top``, ``leq``, ``lub``, ``glb``,
    ``cons`` and ``member``, so another finite domain can be plugged in
    by providing the same methods.
    """

    def __init__(self, signature: Signature, config: DomainConfig = DomainConfig()):
        self.sig = signature
        self.config = config
        self.k = config.depth

    # -- basics
    def bottom(self) -> AbstractValue:
        return BOTTOM

    def top(self) -> AbstractValue:
        return ANY

    def is_empty(self, a: AbstractValue) -> bool:
        return a is BOTTOM

    def type_of(self, a: AbstractValue) -> Optional[str]:
        if isinstance(a, Shapes):
            return self.sig.type_of(a.items[0][0])
        return None

    # -- order
    def leq(self, a: AbstractValue, b: AbstractValue) -> bool:
        if a is BOTTOM or b is ANY:
            return True
        if a is ANY or b is BOTTOM:
            return False
        for c, kids in a.items:
            other = b.children(c)
            if other is None or not all(self.leq(x, y) for x, y in zip(kids, other)):
                return False
        return True

    def lub(self, a: AbstractValue, b: AbstractValue) -> AbstractValue:
        if a is BOTTOM:
            return b
        if b is BOTTOM or a == b:
            return a
        if a is ANY or b is ANY:
            return ANY
        if self.type_of(a) != self.type_of(b):
            return ANY
        merged = dict(a.items)
        for c, kids in b.items:
            if c in merged:
                merged[c] = tuple(self.lub(x, y) for x, y in zip(merged[c], kids))
            else:
                merged[c] = kids
        return self.widen_literals(make_shapes(merged.items()))

    def glb(self, a: AbstractValue, b: AbstractValue) -> AbstractValue:
        if a is ANY:
            return b
        if b is ANY or a == b:
            return a
        if a is BOTTOM or b is BOTTOM:
            return BOTTOM
        out = []
        for c, kids in a.items:
            other = b.children(c)
            if other is not None:
                out.append((c, tuple(self.glb(x, y) for x, y in zip(kids, other))))
        return make_shapes(out)

    def lub_all(self, values) -> AbstractValue:
        out = BOTTOM
        for v in values:
            out = self.lub(out, v)
        return out

    # -- construction
    def cut(self, a: AbstractValue, depth: int) -> AbstractValue:
        """Truncate to the given nesting depth."""
        if not isinstance(a, Shapes):
            return a
        if depth <= 0:
            return ANY
        return make_shapes((c, tuple(self.cut(x, depth - 1) for x in kids)) for c, kids in a.items)

    def cons(self, c: ConKey, args=None) -> AbstractValue:
        """Abstract constructor application; ``args`` default to ANY."""
        n = self.sig.arity_of(c)
        if args is None:
            args = (ANY,) * n
        if len(args) != n:
            raise IRError(f"constructor {c} expects {n} arguments, got {len(args)}")
        if any(a is BOTTOM for a in args):
            return BOTTOM
        return Shapes(((c, tuple(self.cut(a, self.k - 1) for a in args)),))

    def widen_literals(self, a: AbstractValue) -> AbstractValue:
        if isinstance(a, Shapes) and isinstance(a.items[0][0], Literal):
            if len(a.items) > self.config.literal_widen_cap:
                return ANY
        return a

    # -- concretization
    def member(self, t, a: AbstractValue) -> bool:
        """Decide whether the ground term ``t`` lies in the concretization of ``a``."""
        if a is ANY:
            return True
        if a is BOTTOM:
            return False
        con = getattr(t, "con", None)
        if con is None:
            return False
        kids = a.children(con)
        if kids is None or len(kids) != len(t.args):
            return False
        return all(self.member(x, y) for x, y in zip(t.args, kids))

    def is_trivial(self, a: AbstractValue) -> bool:
        return a is ANY


# ---------------------------------------------------------------- rendering

def render(a: AbstractValue) -> str:
    if a is ANY:
        return "_"
    if a is BOTTOM:
        return "{}"
    parts = []
    for c, kids in a.items:
        name = str(c)
        if kids:
            name += "(" + ",".join(render(k) for k in kids) + ")"
        parts.append(name)
    return "{" + ",".join(sorted(parts)) + "}"


_ABS_TOKEN = re.compile(r"\s*('(?:\\.|[^'])'|-?\d+|[A-Za-z_][\w']*|[{}(),]|\S)")


def parse_value(text: str, sig: Signature) -> AbstractValue:
    """Inverse of :func:`render`."""
    tokens = _ABS_TOKEN.findall(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise ValueError(f"bad abstract value {text!r}")
        pos += 1
        return tok

    def value():
        tok = take()
        if tok == "_":
            return ANY
        if tok != "{":
            raise ValueError(f"bad abstract value {text!r}")
        pairs = []
        if peek() == "}":
            take()
            return BOTTOM
        while True:
            name = take()
            if name.startswith("'"):
                con = Literal("char", name[1:-1].encode().decode("unicode_escape"))
            elif re.fullmatch(r"-?\d+", name):
                con = Literal("int", int(name))
            else:
                con = name
            kids = []
            if peek() == "(":
                take()
                kids.append(value())
                while peek() == ",":
                    take()
                    kids.append(value())
                take(")")
            if not kids and sig.arity_of(con) > 0:
                kids = [ANY] * sig.arity_of(con)
            pairs.append((con, tuple(kids)))
            if peek() == ",":
                take()
                continue
            take("}")
            return make_shapes(pairs)

    result = value()
    if pos != len(tokens):
        raise ValueError(f"trailing input in abstract value {text!r}")
    return result


def enumerate_terms(a: AbstractValue, program: CoreProgram, max_size: int, typ=None,
                    universe=None) -> list:
    """All terms of size at most ``max_size`` in the concretization of ``a``.

    The enumeration is over the values of ``typ``; when omitted, the type is
    taken from the constructors in ``a`` with type parameters set to Bool.
    """
    from .terms import Universe, default_type_of_constructor

    if a is BOTTOM:
        return []
    if typ is None:
        if not isinstance(a, Shapes):
            raise ValueError("enumerating ANY needs an explicit type")
        typ = default_type_of_constructor(program, a.items[0][0])
    universe = universe or Universe(program)
    dom = DepthK(Signature.of(program), DomainConfig(depth=max(1, _depth(a))))
    return [t for t in universe.terms(typ, max_size) if dom.member(t, a)]


def _depth(a: AbstractValue) -> int:
    if not isinstance(a, Shapes):
        return 0
    return 1 + max((_depth(k) for _, kids in a.items for k in kids), default=0)

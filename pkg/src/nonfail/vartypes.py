"""Sets of variable types used while checking call types.

A variable type ``(z, io, x1 ... xn)`` states that ``z`` has a value of type
``a`` for some entry ``a1 ... an -> a`` of ``io`` and that, in this case,
each ``xi`` has a value of type ``ai``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .domain import ANY, BOTTOM, DepthK, render
from .inout import IOEntry, entry_key


@dataclass(frozen=True)
class VarTriple:
    subject: str
    io: tuple
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args and len(self.io) == 1 and not self.io[0].args:
            return f"{self.subject} :: {render(self.io[0].result)}"
        io = "{" + ", ".join(str(e) for e in self.io) + "}"
        return f"({self.subject}, {io}, {' '.join(self.args) or 'ε'})"


def definite(x: str, a) -> VarTriple:
    """The triple ``x :: a``."""
    return VarTriple(x, (IOEntry((), a),), ())


class VarTypes:
    """Immutable set of variable types, indexed by subject."""

    __slots__ = ("dom", "_by_subject")

    def __init__(self, dom: DepthK, triples=()):
        self.dom = dom
        index: dict = {}
        for t in triples:
            bucket = index.setdefault(t.subject, [])
            if t not in bucket:
                bucket.append(t)
        self._by_subject = {k: tuple(v) for k, v in index.items()}

    @classmethod
    def _from_index(cls, dom, index) -> "VarTypes":
        vt = cls.__new__(cls)
        vt.dom = dom
        vt._by_subject = index
        return vt

    def triples(self) -> list:
        return [t for ts in self._by_subject.values() for t in ts]

    def triples_of(self, x: str) -> tuple:
        return self._by_subject.get(x, ())

    def __contains__(self, x: str) -> bool:
        return x in self._by_subject

    def __eq__(self, other) -> bool:
        return isinstance(other, VarTypes) and self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def canonical(self) -> tuple:
        out = []
        for s in sorted(self._by_subject):
            for t in self._by_subject[s]:
                out.append((s, tuple(sorted(entry_key(e) for e in t.io)), t.args))
        return tuple(sorted(out))

    def __str__(self) -> str:
        return "{" + ", ".join(str(t) for t in self.triples()) + "}"

    def __repr__(self) -> str:
        return f"VarTypes({self})"

    # -- queries
    def value(self, x: str):
        """Least upper bound of all result types recorded for ``x``."""
        if x not in self._by_subject:
            raise KeyError(f"no variable type for {x}")
        return self.dom.lub_all(e.result for t in self._by_subject[x] for e in t.io)

    # -- updates
    def union(self, triples) -> "VarTypes":
        if isinstance(triples, VarTypes):
            triples = triples.triples()
        return VarTypes(self.dom, self.triples() + list(triples))

    def _meet(self, index: dict, x: str, a) -> bool:
        """Restrict every result type of ``x`` by ``a`` in place; report change."""
        if a is ANY or x not in index:
            return False
        changed = False
        new = []
        for t in index[x]:
            entries = []
            for e in t.io:
                r = self.dom.glb(e.result, a)
                if r is not BOTTOM:
                    entries.append(IOEntry(e.args, r) if r != e.result else e)
            if len(entries) != len(t.io) or any(n is not o for n, o in zip(entries, t.io)):
                changed = True
                t = VarTriple(t.subject, tuple(entries), t.args)
            if t not in new:
                new.append(t)
        index[x] = tuple(new)
        return changed

    def meet(self, x: str, a) -> "VarTypes":
        index = dict(self._by_subject)
        if self._meet(index, x, a):
            return VarTypes._from_index(self.dom, index).propagate()
        return self

    def meet_cons(self, x: str, con) -> "VarTypes":
        """Definite binding of ``x`` to the constructor (or literal) ``con``."""
        return self.meet(x, self.dom.cons(con))

    def propagate(self) -> "VarTypes":
        """Transfer definite bindings to argument variables until stable."""
        index = dict(self._by_subject)
        changed = True
        while changed:
            changed = False
            for s in list(index):
                ts = index[s]
                if len(ts) != 1 or len(ts[0].io) != 1:
                    continue
                t, entry = ts[0], ts[0].io[0]
                for x, a in zip(t.args, entry.args):
                    if x != s and self._meet(index, x, a):
                        changed = True
        return VarTypes._from_index(self.dom, index)


def delta_value(delta: VarTypes, x: str):
    return delta.value(x)


def delta_meet_cons(delta: VarTypes, x: str, con) -> VarTypes:
    return delta.meet_cons(x, con)


def propagate_definite(delta: VarTypes) -> VarTypes:
    return delta.propagate()

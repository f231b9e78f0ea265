"""Random abstract values and the lattice laws checked against them.

Shared by the unit tests (driven by hypothesis) and the acceptance run
(driven by a seeded ``random.Random`` for a fixed number of cases).
"""
import itertools
import random

from nonfail.domain import ANY, BOTTOM, DepthK, DomainConfig, Signature, make_shapes
from nonfail.ir import Literal, TCon
from nonfail.pipeline import load_corpus
from nonfail.terms import Term, Universe

PROGRAM = load_corpus("Prelude")
SIG = Signature.of(PROGRAM)
UNIVERSE = Universe(PROGRAM)

BOOL = TCon("Bool")
INT = TCon("Int")
LIST_BOOL = TCon("List", (BOOL,))
TYPES = [BOOL, INT, LIST_BOOL, TCon("List", (LIST_BOOL,)), TCon("Maybe", (BOOL,)),
         TCon("Pair", (BOOL, LIST_BOOL))]
INTS = [Literal("int", i) for i in range(-2, 4)]


def random_value(rng, typ, depth):
    roll = rng.random()
    if depth == 0 or roll < 0.15:
        return ANY
    if roll < 0.25:
        return BOTTOM
    if typ == INT:
        return make_shapes((lit, ()) for lit in rng.sample(INTS, rng.randint(1, 3)))
    cons = PROGRAM.constructors_of(typ.name)
    chosen = [c for c in cons if rng.random() < 0.6] or [rng.choice(cons)]
    pairs = []
    for c in chosen:
        fields = UNIVERSE.field_types(c.name, typ)
        pairs.append((c.name, tuple(random_value(rng, ft, depth - 1) for ft in fields)))
    return make_shapes(pairs)


def random_case(rng, n=3):
    """A depth, a type and ``n`` values of that type (sometimes of another type)."""
    k = rng.choice([1, 2, 3])
    typ = rng.choice(TYPES)
    values = []
    for _ in range(n):
        t = typ if rng.random() < 0.9 else rng.choice(TYPES)
        values.append(random_value(rng, t, k))
    return DepthK(SIG, DomainConfig(depth=k)), typ, values


def terms_of(typ, size=4):
    return UNIVERSE.terms(typ, size)


# each law takes (dom, typ, [a, b, c]) and returns True when it holds

def law_reflexive(dom, typ, v):
    return dom.leq(v[0], v[0])


def law_antisymmetric(dom, typ, v):
    a, b = v[0], v[1]
    return not (dom.leq(a, b) and dom.leq(b, a)) or a == b


def law_transitive(dom, typ, v):
    a, b, c = v
    b2, c2 = dom.lub(a, b), dom.lub(dom.lub(a, b), c)
    return dom.leq(a, b2) and dom.leq(b2, c2) and dom.leq(a, c2)


def law_transitive_glb(dom, typ, v):
    a, b, c = v
    x, y = dom.glb(dom.glb(a, b), c), dom.glb(a, b)
    return dom.leq(x, y) and dom.leq(y, a) and dom.leq(x, a)


def law_lub_commutative(dom, typ, v):
    return dom.lub(v[0], v[1]) == dom.lub(v[1], v[0])


def law_glb_commutative(dom, typ, v):
    return dom.glb(v[0], v[1]) == dom.glb(v[1], v[0])


def law_lub_associative(dom, typ, v):
    a, b, c = v
    return dom.lub(a, dom.lub(b, c)) == dom.lub(dom.lub(a, b), c)


def law_glb_associative(dom, typ, v):
    a, b, c = v
    return dom.glb(a, dom.glb(b, c)) == dom.glb(dom.glb(a, b), c)


def law_idempotent(dom, typ, v):
    a = v[0]
    return dom.lub(a, a) == a and dom.glb(a, a) == a


def law_bounds(dom, typ, v):
    a, b = v[0], v[1]
    return (dom.leq(a, dom.lub(a, b)) and dom.leq(b, dom.lub(a, b))
            and dom.leq(dom.glb(a, b), a) and dom.leq(dom.glb(a, b), b))


def law_absorption(dom, typ, v):
    a, b = v[0], v[1]
    return dom.lub(a, dom.glb(a, b)) == a and dom.glb(a, dom.lub(a, b)) == a


def law_membership(dom, typ, v):
    """leq, lub and glb agree with the concretization on small terms."""
    a, b = v[0], v[1]
    up, down = dom.lub(a, b), dom.glb(a, b)
    for t in terms_of(typ, 4):
        ma, mb = dom.member(t, a), dom.member(t, b)
        if dom.leq(a, b) and ma and not mb:
            return False
        if (ma or mb) and not dom.member(t, up):
            return False
        if dom.member(t, down) and not (ma and mb):
            return False
    return True


def law_cons_sound(dom, typ, v):
    """Every constructor application of member terms is a member of abstract_cons."""
    if typ == INT:
        typ = LIST_BOOL
    rng = random.Random(repr((typ, v)))
    c = rng.choice(PROGRAM.constructors_of(typ.name))
    fields = UNIVERSE.field_types(c.name, typ)
    args = [random_value(rng, ft, dom.k) for ft in fields]
    result = dom.cons(c.name, args)
    choices = [[t for t in terms_of(ft, 3) if dom.member(t, a)] for ft, a in zip(fields, args)]
    return all(dom.member(Term(c.name, combo), result) for combo in itertools.product(*choices))


LAWS = {
    "leq reflexive": law_reflexive,
    "leq antisymmetric": law_antisymmetric,
    "leq transitive (lub chain)": law_transitive,
    "leq transitive (glb chain)": law_transitive_glb,
    "lub commutative": law_lub_commutative,
    "glb commutative": law_glb_commutative,
    "lub associative": law_lub_associative,
    "glb associative": law_glb_associative,
    "lub/glb idempotent": law_idempotent,
    "lub upper bound, glb lower bound": law_bounds,
    "absorption": law_absorption,
    "concretization agrees": law_membership,
    "abstract_cons sound": law_cons_sound,
}

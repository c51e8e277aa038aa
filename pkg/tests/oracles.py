"""Independent reference implementations shared by the tests."""

from infogain_prolog.terms import Compound, Var

ANCESTOR = """\
ancestor(A, B) :- parent(A, B).
ancestor(A, B) :- parent(A, X), ancestor(X, B).
"""


def closure_oracle(n, edges):
    """Transitive closure by repeated squaring of the boolean adjacency matrix."""
    r = [[False] * n for _ in range(n)]
    for a, b in edges:
        r[a][b] = True
    while True:
        sq = [[r[i][j] or any(r[i][k] and r[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        if sq == r:
            return r
        r = sq


def random_dag(rng, n):
    p = rng.uniform(0.05, 0.3)
    return [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]


def facts(edges):
    return "".join(f"parent(n{a}, n{b}).\n" for a, b in edges)


def walk(t, sub):
    while type(t) is Var and t.id in sub:
        t = sub[t.id]
    return t


def occurs(v, t, sub):
    t = walk(t, sub)
    if t == v:
        return True
    return type(t) is Compound and any(occurs(v, a, sub) for a in t.args)


def robinson(a, b):
    """Reference unifier with occurs check: (status, substitution)."""
    sub, todo = {}, [(a, b)]
    while todo:
        x, y = todo.pop()
        x, y = walk(x, sub), walk(y, sub)
        if x == y:
            continue
        if type(x) is Var or type(y) is Var:
            v, t = (x, y) if type(x) is Var else (y, x)
            if occurs(v, t, sub):
                return "cycle", None
            sub[v.id] = t
        elif type(x) is Compound and type(y) is Compound and x.functor == y.functor and len(x.args) == len(y.args):
            todo.extend(zip(x.args, y.args))
        else:
            return "clash", None
    return "ok", sub


def apply(t, sub):
    t = walk(t, sub)
    if type(t) is Compound:
        return Compound(t.functor, tuple(apply(a, sub) for a in t.args))
    return t


def variant(s, t, m=None):
    m = {} if m is None else m
    if type(s) is Var and type(t) is Var:
        return m.setdefault(("l", s.id), t.id) == t.id and m.setdefault(("r", t.id), s.id) == s.id
    if type(s) is Compound and type(t) is Compound:
        return s.functor == t.functor and len(s.args) == len(t.args) and all(
            variant(x, y, m) for x, y in zip(s.args, t.args)
        )
    return s == t

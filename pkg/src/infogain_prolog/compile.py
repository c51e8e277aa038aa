"""Clause specialization.

Each clause is turned into a Python function
``resolve(args, store, base) -> body | None`` that unifies the clause head
with the goal arguments ``args`` and, on success, returns the renamed body
as a tuple of goals.  Head variables in argument position bind directly to
the goal's argument terms, so the common case allocates only the body.
On failure the caller must undo ``store`` to its own checkpoint.
"""

from __future__ import annotations

from .terms import Atom, Clause, Compound, IfThenElse, Int, Var, is_ground

_BUILTINS = {("is", 2), (">", 2), ("true", 0), ("fail", 0)}


def _split_conj(t) -> list:
    out = []
    while type(t) is Compound and t.functor == "," and len(t.args) == 2:
        out.append(t.args[0])
        t = t.args[1]
    out.append(t)
    return out


def _ite_parts(t):
    """``(cond, then, else)`` goal lists if ``t`` is an if-then-else, else None."""
    if type(t) is Compound and t.functor == ";" and len(t.args) == 2:
        ite = t.args[0]
        if type(ite) is Compound and ite.functor == "->" and len(ite.args) == 2:
            return _split_conj(ite.args[0]), _split_conj(ite.args[1]), _split_conj(t.args[1])
    return None


def _is_builtin(g) -> bool:
    if type(g) is Atom:
        return (g.name, 0) in _BUILTINS
    return type(g) is Compound and (g.functor, len(g.args)) in _BUILTINS


def compile_goals(goals) -> tuple:
    """Rewrite if-then-else terms in ``goals`` into :class:`IfThenElse` goals."""
    out = []
    for g in goals:
        parts = _ite_parts(g)
        if parts is None:
            out.append(g)
            continue
        cond, then, orelse = (compile_goals(p) for p in parts)
        out.append(IfThenElse(cond, then, orelse, all(_is_builtin(c) for c in cond)))
    return tuple(out)


def _goals_expr(goals, consts: list, known: set) -> str:
    items = []
    for g in goals:
        parts = _ite_parts(g)
        if parts is None:
            items.append(_body_expr(g, consts, known))
            continue
        simple = all(_is_builtin(c) for c in parts[0])
        inner = ", ".join(_goals_expr(p, consts, known) for p in parts)
        items.append(f"IfThenElse({inner}, {simple})")
    return "(" + "".join(f"{x}, " for x in items) + ")"


def _body_expr(t, consts: list, known: set) -> str:
    tp = type(t)
    if tp is Var:
        return f"v{t.id}"
    if tp is Compound and not is_ground(t):
        inner = ", ".join(_body_expr(a, consts, known) for a in t.args)
        consts.append(t.functor)
        return f"Compound(c{len(consts) - 1}, ({inner},))"
    consts.append(t)
    return f"c{len(consts) - 1}"


def _collect_vars(t, out: dict):
    tp = type(t)
    if tp is Var:
        out.setdefault(t.id, t)
    elif tp is Compound:
        for a in t.args:
            _collect_vars(a, out)


def compile_clause(clause: Clause):
    head = clause.head
    hargs = head.args if type(head) is Compound else ()
    consts: list = []
    lines = ["def resolve(args, store, base):"]
    bound: set = set()
    direct: list = []
    deferred: list = []

    # first pass: direct var bindings, so later positions can refer to them
    for i, h in enumerate(hargs):
        if type(h) is Var and h.id not in bound:
            bound.add(h.id)
            direct.append((i, h))
        else:
            deferred.append((i, h))
    for i, h in direct:
        lines.append(f"    v{h.id} = args[{i}]")

    all_vars: dict = {}
    _collect_vars(head, all_vars)
    for b in clause.body:
        _collect_vars(b, all_vars)
    for vid, v in sorted(all_vars.items()):
        if vid not in bound:
            consts.append(v.name)
            lines.append(f"    v{vid} = Var(c{len(consts) - 1}, base + {vid})")

    for i, h in deferred:
        tp = type(h)
        if tp is Atom or tp is Int:
            consts.append(h)
            c = f"c{len(consts) - 1}"
            lines += [
                f"    x = args[{i}]",
                "    while type(x) is Var:",
                "        y = bindings.get(x.id)",
                "        if y is None:",
                f"            bindings[x.id] = {c}",
                "            trail.append(x.id)",
                "            break",
                "        x = y",
                "    else:",
                f"        if x != {c}:",
                "            return None",
            ]
        else:
            expr = _body_expr(h, consts, bound)
            lines.append(f"    if not unify({expr}, args[{i}], store):")
            lines.append("        return None")
    if deferred:
        lines.insert(1, "    bindings = store.bindings; trail = store.trail")
    lines.append(f"    return {_goals_expr(clause.body, consts, bound)}")

    from .engine import unify

    ns = {"Var": Var, "Compound": Compound, "IfThenElse": IfThenElse, "unify": unify}
    ns.update({f"c{k}": c for k, c in enumerate(consts)})
    src = "\n".join(lines)
    exec(compile(src, f"<clause {clause.indicator}>", "exec"), ns)
    fn = ns["resolve"]
    fn.source = src
    return fn


def resolver(clause: Clause):
    fn = clause.__dict__.get("_resolver")
    if fn is None:
        fn = clause.__dict__["_resolver"] = compile_clause(clause)
    return fn

"""Reader and printer for the Prolog subset.

Supported: facts and rules, conjunction, ``( Cond -> Then ; Else )``,
``is/2``, ``>/2``, ``true``, ``fail``, integer arithmetic with ``+ - * //``,
and ``%`` line comments.  Everything else (cut, negation, lists, strings,
floats, other builtins) is rejected with a :class:`ParseError`.
"""

from __future__ import annotations

import re

from .terms import Atom, Clause, Compound, IfThenElse, Int, Program, Term, Var

__all__ = [
    "ParseError",
    "parse_program",
    "parse_query",
    "parse_term",
    "format_term",
    "format_clause",
    "format_program",
]


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


# name -> (precedence, type)
INFIX = {
    ":-": (1200, "xfx"),
    ";": (1100, "xfy"),
    "->": (1050, "xfy"),
    ",": (1000, "xfy"),
    "is": (700, "xfx"),
    ">": (700, "xfx"),
    "+": (500, "yfx"),
    "-": (500, "yfx"),
    "*": (400, "yfx"),
    "//": (400, "yfx"),
}
PREFIX_MINUS = 200
ARG_PREC = 999

BUILTINS = {("is", 2), (">", 2), ("true", 0), ("fail", 0)}
CONTROL = {(",", 2), (";", 2), ("->", 2)}
ARITH = {("+", 2), ("-", 2), ("*", 2), ("//", 2), ("-", 1)}
# Well-known Prolog builtins outside the subset; calling one is an error
# rather than a silent call to an undefined user predicate.
UNSUPPORTED = {
    "!", "\\+", "=", "\\=", "==", "\\==", "<", ">=", "=<", "=:=", "=\\=",
    "@<", "@>", "@=<", "@>=", "=..", "not", "call", "findall", "bagof",
    "setof", "assert", "asserta", "assertz", "retract", "write", "writeln",
    "print", "nl", "halt", "var", "nonvar", "atom", "number", "integer",
    "functor", "arg", "copy_term", "once", "forall", "between", "succ",
    "length", "append", "member", "format", "read", "catch", "throw",
}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<float>\d+\.\d+)
  | (?P<int>\d+)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<name>[a-z][A-Za-z0-9_]*)
  | (?P<end>\.(?=\s|%|$))
  | (?P<punct>[(),;|\[\]{}!"'`])
  | (?P<sym>[-+*/\\^<>=~:.?@#&$]+)
    """,
    re.VERBOSE,
)


class _Tok:
    __slots__ = ("kind", "text", "line", "col", "glued")

    def __init__(self, kind, text, line, col, glued):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col
        self.glued = glued  # next token is '(' with no whitespace between

    def __repr__(self):
        return f"<{self.kind} {self.text!r} @{self.line}:{self.col}>"


def _tokenize(src: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    n = len(src)
    while pos < n:
        m = _TOKEN.match(src, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, col)
        kind = m.lastgroup
        text = m.group(kind)
        if kind == "ws":
            pass
        elif kind == "float":
            raise ParseError(f"floats are not supported: {text}", line, col)
        elif kind == "punct" and text not in "(),;":
            raise ParseError(f"unsupported syntax {text!r}", line, col)
        else:
            glued = m.end() < n and src[m.end()] == "("
            toks.append(_Tok(kind, text, line, col, glued))
        nl = text.count("\n")
        if nl:
            line += nl
            line_start = m.start() + text.rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1, False))
    return toks


class _Reader:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0
        self.varmap: dict[str, Var] = {}
        self.nvars = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text):
        if self.tok.text != text or self.tok.kind == "eof":
            raise self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def reset_scope(self):
        self.varmap = {}
        self.nvars = 0

    def new_var(self, name: str) -> Var:
        if name != "_" and name in self.varmap:
            return self.varmap[name]
        v = Var(name, self.nvars)
        self.nvars += 1
        if name != "_":
            self.varmap[name] = v
        return v

    def infix_op(self, tok: _Tok):
        if tok.kind in ("name", "sym", "punct") and tok.text in INFIX:
            return INFIX[tok.text]
        return None

    def parse(self, max_prec: int) -> tuple[Term, int]:
        left, left_prec = self.parse_primary(max_prec)
        while True:
            tok = self.tok
            if tok.kind == "sym" and tok.text in UNSUPPORTED:
                raise self.error(f"unsupported builtin {tok.text!r}")
            op = self.infix_op(tok)
            if op is None:
                break
            prec, typ = op
            if prec > max_prec:
                break
            left_max = prec if typ == "yfx" else prec - 1
            right_max = prec if typ == "xfy" else prec - 1
            if left_prec > left_max:
                break
            self.advance()
            right, _ = self.parse(right_max)
            left, left_prec = Compound(tok.text, (left, right)), prec
        return left, left_prec

    def parse_args(self) -> tuple:
        self.expect("(")
        args = [self.parse(ARG_PREC)[0]]
        while self.tok.text == ",":
            self.advance()
            args.append(self.parse(ARG_PREC)[0])
        self.expect(")")
        return tuple(args)

    def parse_primary(self, max_prec: int) -> tuple[Term, int]:
        tok = self.tok
        kind = tok.kind
        if kind == "int":
            self.advance()
            return Int(int(tok.text)), 0
        if kind == "var":
            self.advance()
            return self.new_var(tok.text), 0
        if kind == "punct" and tok.text == "(":
            self.advance()
            t, _ = self.parse(1200)
            self.expect(")")
            return t, 0
        if kind in ("name", "sym"):
            if tok.text in UNSUPPORTED:
                raise self.error(f"unsupported builtin {tok.text!r}")
            self.advance()
            if tok.glued:
                return Compound(tok.text, self.parse_args()), 0
            if tok.text == "-":
                nxt = self.tok
                if nxt.kind == "int" and nxt.col == tok.col + 1 and nxt.line == tok.line:
                    self.advance()
                    return Int(-int(nxt.text)), 0
                arg, _ = self.parse(PREFIX_MINUS)
                return Compound("-", (arg,)), PREFIX_MINUS
            if kind == "sym" and tok.text not in INFIX:
                raise self.error(f"unsupported operator {tok.text!r}", tok)
            return Atom(tok.text), (INFIX[tok.text][0] if tok.text in INFIX else 0)
        if kind == "end" or kind == "eof":
            raise self.error("unexpected end of clause")
        raise self.error(f"unexpected token {tok.text!r}")

    def read_clause_term(self) -> tuple[Term, _Tok]:
        self.reset_scope()
        start = self.tok
        t, _ = self.parse(1200)
        if self.tok.kind != "end":
            raise self.error(f"expected '.', found {self.tok.text or 'end of input'!r}")
        self.advance()
        return t, start


def _check_goal(goal: Term, rd: _Reader, tok: _Tok) -> None:
    tp = type(goal)
    if tp is Var:
        raise rd.error("variable goals (call/1) are not supported", tok)
    if tp is Int:
        raise rd.error(f"integer {goal.value} is not a callable goal", tok)
    if tp is Atom:
        if goal.name in UNSUPPORTED:
            raise rd.error(f"unsupported builtin {goal.name!r}", tok)
        return
    key = (goal.functor, len(goal.args))
    if goal.functor in UNSUPPORTED:
        raise rd.error(f"unsupported builtin {goal.functor}/{len(goal.args)}", tok)
    if key == (",", 2):
        _check_goal(goal.args[0], rd, tok)
        _check_goal(goal.args[1], rd, tok)
    elif key == (";", 2):
        cond = goal.args[0]
        if not (type(cond) is Compound and cond.functor == "->" and len(cond.args) == 2):
            raise rd.error("plain disjunction is not supported; use ( C -> T ; E )", tok)
        _check_goal(cond.args[0], rd, tok)
        _check_goal(cond.args[1], rd, tok)
        _check_goal(goal.args[1], rd, tok)
    elif key == ("->", 2):
        raise rd.error("if-then without else is not supported", tok)
    elif key == (":-", 2):
        raise rd.error("nested ':-'", tok)
    elif key in ARITH:
        raise rd.error(f"arithmetic term {goal.functor}/{len(goal.args)} used as a goal", tok)


def flatten_conj(t: Term) -> list[Term]:
    out = []
    stack = [t]
    while stack:
        g = stack.pop()
        if type(g) is Compound and g.functor == "," and len(g.args) == 2:
            stack.append(g.args[1])
            stack.append(g.args[0])
        else:
            out.append(g)
    return out


def _make_clause(t: Term, rd: _Reader, tok: _Tok) -> Clause:
    if type(t) is Compound and t.functor == ":-" and len(t.args) == 2:
        head, body_term = t.args
        body = flatten_conj(body_term)
    else:
        head, body = t, []
    if type(head) not in (Atom, Compound):
        raise rd.error("clause head must be an atom or compound term", tok)
    name = head.name if type(head) is Atom else head.functor
    arity = 0 if type(head) is Atom else len(head.args)
    if (name, arity) in BUILTINS or (name, arity) in CONTROL or name in UNSUPPORTED:
        raise rd.error(f"cannot redefine builtin {name}/{arity}", tok)
    for g in body:
        _check_goal(g, rd, tok)
    return Clause(head, body, rd.nvars)


def parse_program(source: str) -> Program:
    rd = _Reader(source)
    prog = Program()
    while rd.tok.kind != "eof":
        t, tok = rd.read_clause_term()
        prog.add(_make_clause(t, rd, tok))
    return prog


def parse_query(source: str) -> list[Term]:
    """Parse ``goal, goal, ... .`` (an optional leading ``?-`` is accepted)."""
    src = source.strip()
    if src.startswith("?-"):
        src = src[2:]
    if not src.endswith("."):
        src = src + "."
    rd = _Reader(src)
    t, tok = rd.read_clause_term()
    if rd.tok.kind != "eof":
        raise rd.error("a query must be a single goal sequence")
    goals = flatten_conj(t)
    for g in goals:
        _check_goal(g, rd, tok)
    return goals


def parse_term(source: str) -> Term:
    rd = _Reader(source.strip().rstrip(".") + " .")
    t, _ = rd.read_clause_term()
    return t


def format_term(t: Term) -> str:
    tp = type(t)
    if tp is Atom:
        return t.name
    if tp is Int:
        return str(t.value)
    if tp is Var:
        return f"_G{t.id}" if t.name == "_" else t.name
    if tp is IfThenElse:
        return format_term(t.as_term())
    if len(t.args) == 2 and t.functor in INFIX:
        left, right = (format_term(a) for a in t.args)
        if t.functor == ",":
            return f"({left}, {right})"
        return f"({left} {t.functor} {right})"
    return f"{t.functor}({', '.join(format_term(a) for a in t.args)})"


def format_clause(c: Clause) -> str:
    head = format_term(c.head)
    if not c.body:
        return f"{head}."
    return f"{head} :- {', '.join(format_term(g) for g in c.body)}."


def format_program(p: Program) -> str:
    return "".join(format_clause(c) + "\n" for c in p)

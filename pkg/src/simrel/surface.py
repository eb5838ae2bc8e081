"""Plain-text surface syntax: parsers and printers for the three term
languages and the value/computation types.

The printers emit a canonical form the parsers accept, and parse-print
round trips are structurally exact.  Binders are named in the source and
elaborated to de Bruijn indices; a free variable is written #k, counting
the ambient context from its innermost end.  Hole markers print as [.]
(context labels only; the parsers do not accept them).

Combinator languages: `S K I` applies left to right, primed forms are
`S'(t)`, `K'(t)`, `S''(t, s)`.  The fine-grain language adds `[v]` for the
returning computation, `fix(t)`, and the four applications `t . s`,
`v .> s`, `t <. v`, `v o w`, all one precedence level, left-associative.

CBPV terms: `star`, `thunk t`, `force v`, `prod v`, `lam (x:phi). t`,
`t @ v`, `t (+) s`, `s to x in t`, `case v of {inl x -> s | inr y -> r}`,
`pm v as (x,y) in t`, `fold[mu a. k] t`, `unfold t`, `fst t`, `snd t`,
`pair(a,b)`, `inl[phi (+) psi] v`, `inr[phi (+) psi] v`.  The bracketed
annotations carry what the term nodes store.  Types: `unit`, `U k`,
`F phi`, `phi -> k` (right-associative), `phi1 (+) phi2`, `phi1 (*) phi2`,
`k1 (x) k2`, `mu a. k`.  Keywords are reserved; binder bodies extend as
far as possible, so a choice inside one needs parentheses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import fgcbv as fg
from . import xcl
from .cbpv_syntax import (
    AppC,
    Arrow,
    Case,
    CbpvComp,
    CbpvTerm,
    CbpvValue,
    Choice,
    CompType,
    F,
    FoldC,
    Force,
    Fst,
    HoleC,
    HoleV,
    Inl,
    Inr,
    Lam,
    Mu,
    PairC,
    PairV,
    Pm,
    ProdC,
    ProdT,
    Snd,
    Star,
    SumT,
    Tensor,
    Thunk,
    ThunkV,
    ToIn,
    TyVar,
    Type,
    UNIT,
    Unit,
    UnfoldC,
    ValType,
    Var,
)


class ParseError(ValueError):
    """Lexical or syntax error with a source position."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = f" at {line}:{col}" if line is not None else ""
        super().__init__(message + where)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def _scan(src: str, spec, keywords: frozenset = frozenset()) -> list[Token]:
    out: list[Token] = []
    pos, line, col = 0, 1, 1
    n = len(src)
    while pos < n:
        ch = src[pos]
        if ch == "\n":
            pos += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            pos += 1
            col += 1
            continue
        for kind, rx in spec:
            m = rx.match(src, pos)
            if m:
                text = m.group()
                k = text if kind == "ident" and text in keywords else kind
                out.append(Token(k, text, line, col))
                pos = m.end()
                col += len(text)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    out.append(Token("eof", "", line, col))
    return out


class _P:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, kind: str) -> bool:
        return self.toks[self.i].kind == kind

    def expect(self, kind: str) -> Token:
        t = self.toks[self.i]
        if t.kind != kind:
            shown = t.text or "end of input"
            raise ParseError(f"expected {kind!r}, found {shown!r}", t.line, t.col)
        self.i += 1
        return t

    def err(self, message: str):
        t = self.toks[self.i]
        raise ParseError(message, t.line, t.col)


def _rx(*pairs):
    return [(kind, re.compile(pattern)) for kind, pattern in pairs]


# ---------------------------------------------------------------------------
# combinatory terms

_XCL_SPEC = _rx(
    ("S''", r"S''"),
    ("S'", r"S'"),
    ("K'", r"K'"),
    ("S", r"S"),
    ("K", r"K"),
    ("I", r"I"),
    ("(", r"\("),
    (")", r"\)"),
    (",", r","),
)

_XCL_STARTS = frozenset(("S''", "S'", "K'", "S", "K", "I", "("))


def parse_xcl(src: str) -> xcl.XclTerm:
    p = _P(_scan(src, _XCL_SPEC))
    t = _xcl_term(p)
    p.expect("eof")
    return t


def _xcl_term(p: _P) -> xcl.XclTerm:
    t = _xcl_atom(p)
    while p.peek().kind in _XCL_STARTS:
        t = xcl.App(t, _xcl_atom(p))
    return t


def _xcl_atom(p: _P) -> xcl.XclTerm:
    tok = p.next()
    match tok.kind:
        case "S" | "K" | "I":
            return xcl.Atom(tok.kind)
        case "S'" | "K'":
            p.expect("(")
            arg = _xcl_term(p)
            p.expect(")")
            return xcl.Sp(arg) if tok.kind == "S'" else xcl.Kp(arg)
        case "S''":
            p.expect("(")
            first = _xcl_term(p)
            p.expect(",")
            second = _xcl_term(p)
            p.expect(")")
            return xcl.Spp(first, second)
        case "(":
            t = _xcl_term(p)
            p.expect(")")
            return t
    raise ParseError(f"expected a term, found {tok.text or 'end of input'!r}",
                     tok.line, tok.col)


def print_xcl(t: xcl.XclTerm) -> str:
    match t:
        case xcl.Atom(name):
            return name
        case xcl.Sp(a):
            return f"S'({print_xcl(a)})"
        case xcl.Kp(a):
            return f"K'({print_xcl(a)})"
        case xcl.Spp(a, b):
            return f"S''({print_xcl(a)}, {print_xcl(b)})"
        case xcl.App(f, x):
            xs = print_xcl(x)
            if isinstance(x, xcl.App):
                xs = f"({xs})"
            return f"{print_xcl(f)} {xs}"
        case xcl.Hole():
            return "[.]"
    raise TypeError(f"not a combinatory term: {t!r}")


# ---------------------------------------------------------------------------
# fine-grain terms

_FG_SPEC = _rx(
    ("S''", r"S''"),
    ("S'", r"S'"),
    ("K'", r"K'"),
    (".>", r"\.>"),
    ("<.", r"<\."),
    ("fix", r"fix"),
    ("S", r"S"),
    ("K", r"K"),
    ("I", r"I"),
    ("o", r"o"),
    ("[", r"\["),
    ("]", r"\]"),
    ("(", r"\("),
    (")", r"\)"),
    (",", r","),
    (".", r"\."),
)

_FG_OPS = {
    ".": ("computation", "computation", fg.AppCC),
    ".>": ("value", "computation", fg.AppVC),
    "<.": ("computation", "value", fg.AppCV),
    "o": ("value", "value", fg.AppVV),
}


def _fg_sort(t) -> str:
    return "value" if isinstance(t, fg.FgValue) else "computation"


def parse_fgcbv(src: str):
    """Either sort; the operators fix which sorts they accept."""
    p = _P(_scan(src, _FG_SPEC))
    t = _fg_term(p)
    p.expect("eof")
    return t


def _fg_term(p: _P):
    left = _fg_operand(p)
    while p.peek().kind in _FG_OPS:
        op = p.next()
        want_l, want_r, ctor = _FG_OPS[op.kind]
        right = _fg_operand(p)
        if _fg_sort(left) != want_l:
            raise ParseError(
                f"operator {op.kind!r} wants a {want_l} on the left",
                op.line, op.col,
            )
        if _fg_sort(right) != want_r:
            raise ParseError(
                f"operator {op.kind!r} wants a {want_r} on the right",
                op.line, op.col,
            )
        left = ctor(left, right)
    return left


def _fg_operand(p: _P):
    tok = p.next()
    match tok.kind:
        case "S" | "K" | "I":
            return fg.VAtom(tok.kind)
        case "S'" | "K'":
            p.expect("(")
            arg = _fg_comp_arg(p, tok)
            p.expect(")")
            return fg.Sp(arg) if tok.kind == "S'" else fg.Kp(arg)
        case "S''":
            p.expect("(")
            first = _fg_comp_arg(p, tok)
            p.expect(",")
            second = _fg_comp_arg(p, tok)
            p.expect(")")
            return fg.Spp(first, second)
        case "fix":
            p.expect("(")
            body = _fg_comp_arg(p, tok)
            p.expect(")")
            return fg.Fix(body)
        case "[":
            inner = _fg_term(p)
            if not isinstance(inner, fg.FgValue):
                raise ParseError("brackets return a value", tok.line, tok.col)
            p.expect("]")
            return fg.Ret(inner)
        case "(":
            t = _fg_term(p)
            p.expect(")")
            return t
    raise ParseError(f"expected a term, found {tok.text or 'end of input'!r}",
                     tok.line, tok.col)


def _fg_comp_arg(p: _P, opener: Token):
    arg = _fg_term(p)
    if not isinstance(arg, fg.FgComp):
        raise ParseError(
            f"{opener.text!r} takes computation operands", opener.line, opener.col
        )
    return arg


_FG_PRINT_OPS = {fg.AppCC: ".", fg.AppVC: ".>", fg.AppCV: "<.", fg.AppVV: "o"}
_FG_APPS = (fg.AppCC, fg.AppVC, fg.AppCV, fg.AppVV)


def print_fgcbv(t) -> str:
    match t:
        case fg.VAtom(name):
            return name
        case fg.Sp(a):
            return f"S'({print_fgcbv(a)})"
        case fg.Kp(a):
            return f"K'({print_fgcbv(a)})"
        case fg.Spp(a, b):
            return f"S''({print_fgcbv(a)}, {print_fgcbv(b)})"
        case fg.Ret(v):
            return f"[{print_fgcbv(v)}]"
        case fg.Fix(b):
            return f"fix({print_fgcbv(b)})"
        case fg.HoleV() | fg.HoleC():
            return "[.]"
    if isinstance(t, _FG_APPS):
        ls = print_fgcbv(t.fun)  # left-associative: the fun side stays bare
        rs = print_fgcbv(t.arg)
        if isinstance(t.arg, _FG_APPS):
            rs = f"({rs})"
        return f"{ls} {_FG_PRINT_OPS[type(t)]} {rs}"
    raise TypeError(f"not a fine-grain term: {t!r}")


# ---------------------------------------------------------------------------
# cbpv

_CBPV_KEYWORDS = frozenset(
    "thunk force prod lam to in case of inl inr pm as fold unfold "
    "fst snd pair star unit mu U F".split()
)

_CBPV_SPEC = _rx(
    ("(+)", r"\(\+\)"),
    ("(x)", r"\(x\)"),
    ("(*)", r"\(\*\)"),
    ("->", r"->"),
    ("#", r"#\d+"),
    ("ident", r"[A-Za-z_][A-Za-z0-9_']*"),
    ("(", r"\("),
    (")", r"\)"),
    ("{", r"\{"),
    ("}", r"\}"),
    ("[", r"\["),
    ("]", r"\]"),
    ("@", r"@"),
    (".", r"\."),
    (",", r","),
    (":", r":"),
    ("|-", r"\|-"),
    ("|", r"\|"),
)


def _is_value(t: CbpvTerm) -> bool:
    return isinstance(t, CbpvValue)


def _want(p_tok: Token, t: CbpvTerm, value: bool, what: str):
    if _is_value(t) != value:
        got = "value" if _is_value(t) else "computation"
        need = "value" if value else "computation"
        raise ParseError(f"{what} wants a {need}, got a {got}",
                         p_tok.line, p_tok.col)
    return t


def parse_cbpv(src: str, free_vars: int | None = None) -> CbpvTerm:
    """Terms of either sort.  ``free_vars`` bounds the #k indices when the
    ambient context length is known."""
    p = _P(_scan(src, _CBPV_SPEC, _CBPV_KEYWORDS))
    t = _cv_term(p, [], free_vars)
    p.expect("eof")
    return t


def _cv_term(p: _P, env: list, free: int | None) -> CbpvTerm:
    left = _cv_seq(p, env, free)
    while p.at("(+)"):
        tok = p.next()
        right = _cv_seq(p, env, free)
        _want(tok, left, False, "choice")
        _want(tok, right, False, "choice")
        left = Choice(left, right)
    return left


def _cv_seq(p: _P, env: list, free: int | None) -> CbpvTerm:
    source = _cv_app(p, env, free)
    if p.at("to"):
        tok = p.next()
        _want(tok, source, False, "the to-source")
        name = p.expect("ident").text
        p.expect("in")
        body = _cv_seq(p, env + [name], free)
        _want(tok, body, False, "the to-body")
        return ToIn(source, body)
    return source


def _cv_app(p: _P, env: list, free: int | None) -> CbpvTerm:
    t = _cv_unary(p, env, free)
    while p.at("@"):
        tok = p.next()
        arg = _cv_unary(p, env, free)
        _want(tok, t, False, "application")
        _want(tok, arg, True, "the application argument")
        t = AppC(t, arg)
    return t


def _cv_annotation(p: _P) -> Type:
    p.expect("[")
    ty = _ty(p, [])
    p.expect("]")
    return ty


def _cv_unary(p: _P, env: list, free: int | None) -> CbpvTerm:
    tok = p.peek()
    match tok.kind:
        case "thunk":
            p.next()
            return ThunkV(_want(tok, _cv_unary(p, env, free), False, "thunk"))
        case "force":
            p.next()
            return Force(_want(tok, _cv_unary(p, env, free), True, "force"))
        case "prod":
            p.next()
            return ProdC(_want(tok, _cv_unary(p, env, free), True, "prod"))
        case "fst":
            p.next()
            return Fst(_want(tok, _cv_unary(p, env, free), False, "fst"))
        case "snd":
            p.next()
            return Snd(_want(tok, _cv_unary(p, env, free), False, "snd"))
        case "unfold":
            p.next()
            return UnfoldC(_want(tok, _cv_unary(p, env, free), False, "unfold"))
        case "inl" | "inr":
            p.next()
            ty = _cv_annotation(p)
            if not isinstance(ty, SumT):
                raise ParseError("the inl/inr annotation must be a sum type",
                                 tok.line, tok.col)
            v = _want(tok, _cv_unary(p, env, free), True, tok.kind)
            return Inl(v, ty) if tok.kind == "inl" else Inr(v, ty)
        case "fold":
            p.next()
            ty = _cv_annotation(p)
            if not isinstance(ty, Mu):
                raise ParseError("the fold annotation must be a mu type",
                                 tok.line, tok.col)
            c = _want(tok, _cv_unary(p, env, free), False, "fold")
            return FoldC(c, ty.body)
    return _cv_atom(p, env, free)


def _cv_var(name: str, env: list, tok: Token) -> Var:
    for j in range(len(env)):
        if env[len(env) - 1 - j] == name:
            return Var(j)
    raise ParseError(f"unbound variable {name!r}", tok.line, tok.col)


def _cv_atom(p: _P, env: list, free: int | None) -> CbpvTerm:
    tok = p.next()
    match tok.kind:
        case "star":
            return Star()
        case "ident":
            return _cv_var(tok.text, env, tok)
        case "(x)":
            # the tensor token doubles as a parenthesized variable named x
            return _cv_var("x", env, tok)
        case "#":
            k = int(tok.text[1:])
            if free is not None and k >= free:
                raise ParseError(
                    f"free index #{k} outside the declared context",
                    tok.line, tok.col,
                )
            return Var(k + len(env))
        case "(":
            t = _cv_term(p, env, free)
            p.expect(")")
            return t
        case "lam":
            p.expect("(")
            name = p.expect("ident").text
            p.expect(":")
            ty = _ty(p, [])
            if not isinstance(ty, ValType):
                raise ParseError("a binder annotation must be a value type",
                                 tok.line, tok.col)
            p.expect(")")
            p.expect(".")
            body = _cv_seq(p, env + [name], free)
            _want(tok, body, False, "the lam body")
            return Lam(body, ty)
        case "case":
            scrut = _want(tok, _cv_unary(p, env, free), True, "case")
            p.expect("of")
            p.expect("{")
            p.expect("inl")
            xn = p.expect("ident").text
            p.expect("->")
            left = _cv_term(p, env + [xn], free)
            p.expect("|")
            p.expect("inr")
            yn = p.expect("ident").text
            p.expect("->")
            right = _cv_term(p, env + [yn], free)
            p.expect("}")
            _want(tok, left, False, "a case arm")
            _want(tok, right, False, "a case arm")
            return Case(scrut, left, right)
        case "pm":
            scrut = _want(tok, _cv_unary(p, env, free), True, "pm")
            p.expect("as")
            p.expect("(")
            xn = p.expect("ident").text
            p.expect(",")
            yn = p.expect("ident").text
            p.expect(")")
            p.expect("in")
            body = _cv_seq(p, env + [xn, yn], free)
            _want(tok, body, False, "the pm body")
            return Pm(scrut, body)
        case "pair":
            p.expect("(")
            a = _cv_term(p, env, free)
            p.expect(",")
            b = _cv_term(p, env, free)
            p.expect(")")
            if _is_value(a) != _is_value(b):
                raise ParseError("pair components must share a sort",
                                 tok.line, tok.col)
            return PairV(a, b) if _is_value(a) else PairC(a, b)
    raise ParseError(f"expected a term, found {tok.text or 'end of input'!r}",
                     tok.line, tok.col)


# types: arrow 0 < infix 1 < prefix 2 < atom 3; mu bodies span maximally


def parse_cbpv_type(src: str) -> Type:
    p = _P(_scan(src, _CBPV_SPEC, _CBPV_KEYWORDS))
    ty = _ty(p, [])
    p.expect("eof")
    return ty


def _ty(p: _P, env: list) -> Type:
    left = _ty_infix(p, env)
    if p.at("->"):
        tok = p.next()
        right = _ty(p, env)
        if not isinstance(left, ValType):
            raise ParseError("an arrow domain must be a value type",
                             tok.line, tok.col)
        if not isinstance(right, CompType):
            raise ParseError("an arrow codomain must be a computation type",
                             tok.line, tok.col)
        return Arrow(left, right)
    return left


_TY_OPS = {
    "(+)": (True, SumT),
    "(*)": (True, ProdT),
    "(x)": (False, Tensor),
}


def _ty_infix(p: _P, env: list) -> Type:
    left = _ty_prefix(p, env)
    while p.peek().kind in _TY_OPS:
        op = p.next()
        values, ctor = _TY_OPS[op.kind]
        right = _ty_prefix(p, env)
        for side in (left, right):
            if isinstance(side, ValType) != values:
                want = "value" if values else "computation"
                raise ParseError(f"operator {op.kind} combines {want} types",
                                 op.line, op.col)
        left = ctor(left, right)
    return left


def _ty_prefix(p: _P, env: list) -> Type:
    tok = p.peek()
    match tok.kind:
        case "U":
            p.next()
            inner = _ty_prefix(p, env)
            if not isinstance(inner, CompType):
                raise ParseError("U wants a computation type", tok.line, tok.col)
            return Thunk(inner)
        case "F":
            p.next()
            inner = _ty_prefix(p, env)
            if not isinstance(inner, ValType):
                raise ParseError("F wants a value type", tok.line, tok.col)
            return F(inner)
        case "mu":
            p.next()
            name = p.expect("ident").text
            p.expect(".")
            body = _ty(p, env + [name])
            if not isinstance(body, CompType):
                raise ParseError("a mu body must be a computation type",
                                 tok.line, tok.col)
            return Mu(body)
    return _ty_atom(p, env)


def _ty_var(name: str, env: list, tok: Token) -> TyVar:
    for j in range(len(env)):
        if env[len(env) - 1 - j] == name:
            return TyVar(j)
    raise ParseError(f"unbound type variable {name!r}", tok.line, tok.col)


def _ty_atom(p: _P, env: list) -> Type:
    tok = p.next()
    match tok.kind:
        case "unit":
            return UNIT
        case "ident":
            return _ty_var(tok.text, env, tok)
        case "(x)":
            return _ty_var("x", env, tok)
        case "(":
            ty = _ty(p, env)
            p.expect(")")
            return ty
    raise ParseError(f"expected a type, found {tok.text or 'end of input'!r}",
                     tok.line, tok.col)


def parse_cbpv_index(src: str) -> tuple[Type, tuple]:
    """A relation-slot index: ``type`` or ``phi1, phi2 |- type``.  The
    context lists outermost first, so #0 refers to the last entry."""
    p = _P(_scan(src, _CBPV_SPEC, _CBPV_KEYWORDS))
    first = _ty(p, [])
    ctx: list = []
    while p.at(","):
        p.next()
        ctx.append(_ty(p, []))
    if p.at("|-"):
        tok = p.next()
        ctx.insert(0, first)
        for phi in ctx:
            if not isinstance(phi, ValType):
                raise ParseError("context entries must be value types",
                                 tok.line, tok.col)
        ty = _ty(p, [])
        p.expect("eof")
        return ty, tuple(ctx)
    if ctx:
        p.err("a bare index is a single type; contexts end with |-")
    p.expect("eof")
    return first, ()


def print_cbpv_index(ty: Type, ctx: tuple) -> str:
    tys = print_cbpv_type(ty)
    if not ctx:
        return tys
    return ", ".join(print_cbpv_type(phi) for phi in ctx) + " |- " + tys


def print_cbpv_type(ty: Type) -> str:
    return _pt(ty, 0, 0)


def _pt(ty: Type, need: int, depth: int) -> str:
    match ty:
        case Unit():
            s, lvl = "unit", 3
        case TyVar(i):
            s = f"a{depth - 1 - i}" if i < depth else f"#{i - depth}"
            lvl = 3
        case Thunk(k):
            s, lvl = f"U {_pt(k, 3, depth)}", 2
        case F(phi):
            s, lvl = f"F {_pt(phi, 3, depth)}", 2
        case SumT(a, b):
            s, lvl = f"{_pt(a, 2, depth)} (+) {_pt(b, 2, depth)}", 1
        case ProdT(a, b):
            s, lvl = f"{_pt(a, 2, depth)} (*) {_pt(b, 2, depth)}", 1
        case Tensor(a, b):
            s, lvl = f"{_pt(a, 2, depth)} (x) {_pt(b, 2, depth)}", 1
        case Arrow(a, b):
            s, lvl = f"{_pt(a, 1, depth)} -> {_pt(b, 0, depth)}", 0
        case Mu(body):
            s, lvl = f"mu a{depth}. {_pt(body, 0, depth + 1)}", 0
        case _:
            raise TypeError(f"not a cbpv type: {ty!r}")
    return f"({s})" if lvl < need else s


# term levels: choice 0 < spanning binders 1 < application 2 < unary 3 < atom 4


def print_cbpv(t: CbpvTerm) -> str:
    return _pc(t, 0, 0)


def _pc(t: CbpvTerm, need: int, depth: int) -> str:
    match t:
        case Star():
            s, lvl = "star", 4
        case Var(i):
            s = f"x{depth - 1 - i}" if i < depth else f"#{i - depth}"
            lvl = 4
        case HoleV() | HoleC():
            s, lvl = "[.]", 4
        case ThunkV(c):
            s, lvl = f"thunk {_pc(c, 3, depth)}", 3
        case Force(v):
            s, lvl = f"force {_pc(v, 3, depth)}", 3
        case ProdC(v):
            s, lvl = f"prod {_pc(v, 3, depth)}", 3
        case Fst(c):
            s, lvl = f"fst {_pc(c, 3, depth)}", 3
        case Snd(c):
            s, lvl = f"snd {_pc(c, 3, depth)}", 3
        case UnfoldC(c):
            s, lvl = f"unfold {_pc(c, 3, depth)}", 3
        case Inl(v, st):
            s, lvl = f"inl[{print_cbpv_type(st)}] {_pc(v, 3, depth)}", 3
        case Inr(v, st):
            s, lvl = f"inr[{print_cbpv_type(st)}] {_pc(v, 3, depth)}", 3
        case FoldC(c, body):
            s = f"fold[{print_cbpv_type(Mu(body))}] {_pc(c, 3, depth)}"
            lvl = 3
        case PairV(a, b) | PairC(a, b):
            s, lvl = f"pair({_pc(a, 0, depth)}, {_pc(b, 0, depth)})", 4
        case AppC(f, v):
            s, lvl = f"{_pc(f, 2, depth)} @ {_pc(v, 3, depth)}", 2
        case Choice(a, b):
            s, lvl = f"{_pc(a, 0, depth)} (+) {_pc(b, 1, depth)}", 0
        case ToIn(src, b):
            s = f"{_pc(src, 2, depth)} to x{depth} in {_pc(b, 1, depth + 1)}"
            lvl = 1
        case Lam(b, phi):
            s = f"lam (x{depth}:{print_cbpv_type(phi)}). {_pc(b, 1, depth + 1)}"
            lvl = 1
        case Case(v, l, r):
            s = (
                f"case {_pc(v, 3, depth)} of "
                f"{{inl x{depth} -> {_pc(l, 0, depth + 1)} | "
                f"inr x{depth} -> {_pc(r, 0, depth + 1)}}}"
            )
            lvl = 4
        case Pm(v, b):
            s = (
                f"pm {_pc(v, 3, depth)} as (x{depth}, x{depth + 1}) "
                f"in {_pc(b, 1, depth + 2)}"
            )
            lvl = 1
        case _:
            raise TypeError(f"not a cbpv term: {t!r}")
    return f"({s})" if lvl < need else s

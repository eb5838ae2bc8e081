"""Call-by-push-value syntax: types, terms, typing, substitution.

Value types: U k (thunks), unit, sums, value products.  Computation types:
type variables (de Bruijn, bound by mu), producers F phi, functions
phi -> k, computation pairs k1 (x) k2, and recursive types mu a. k.

Terms use de Bruijn indices for term variables (Var(0) is the innermost
binder) and carry exactly the type annotations that keep checking
syntax-directed: inl/inr carry their full sum type, fold its recursive type
body, lam its argument type.  Everything else is recomputed by the checker;
nothing is inferred.

A value is, a computation does: the two sorts are separate Python class
hierarchies and the typechecker assigns value types to values, computation
types to computations.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Iterator


class TypecheckError(TypeError):
    """A typing rule failed; the message names the first failing rule."""


# ---------------------------------------------------------------------------
# types


class ValType:
    __slots__ = ()


class CompType:
    __slots__ = ()


Type = ValType | CompType


@dataclass(frozen=True)
class Unit(ValType):
    pass


@dataclass(frozen=True)
class Thunk(ValType):
    comp: CompType


@dataclass(frozen=True)
class SumT(ValType):
    left: ValType
    right: ValType


@dataclass(frozen=True)
class ProdT(ValType):
    left: ValType
    right: ValType


@dataclass(frozen=True)
class TyVar(CompType):
    index: int  # de Bruijn index into enclosing mu binders


@dataclass(frozen=True)
class F(CompType):
    value: ValType


@dataclass(frozen=True)
class Arrow(CompType):
    arg: ValType
    result: CompType


@dataclass(frozen=True)
class Tensor(CompType):
    left: CompType
    right: CompType


@dataclass(frozen=True)
class Mu(CompType):
    body: CompType  # TyVar(0) is the recursion variable


UNIT = Unit()


def _ty_sub(ty: Type, repl: CompType, depth: int) -> Type:
    match ty:
        case Unit():
            return ty
        case Thunk(k):
            return Thunk(_ty_sub(k, repl, depth))
        case SumT(a, b):
            return SumT(_ty_sub(a, repl, depth), _ty_sub(b, repl, depth))
        case ProdT(a, b):
            return ProdT(_ty_sub(a, repl, depth), _ty_sub(b, repl, depth))
        case TyVar(i):
            if i == depth:
                return _ty_shift(repl, depth)
            return TyVar(i - 1) if i > depth else ty
        case F(phi):
            return F(_ty_sub(phi, repl, depth))
        case Arrow(a, k):
            return Arrow(_ty_sub(a, repl, depth), _ty_sub(k, repl, depth))
        case Tensor(a, b):
            return Tensor(_ty_sub(a, repl, depth), _ty_sub(b, repl, depth))
        case Mu(body):
            return Mu(_ty_sub(body, repl, depth + 1))
    raise TypeError(f"not a type: {ty!r}")


def _ty_shift(ty: Type, by: int, cut: int = 0) -> Type:
    if by == 0:
        return ty
    match ty:
        case Unit():
            return ty
        case Thunk(k):
            return Thunk(_ty_shift(k, by, cut))
        case SumT(a, b):
            return SumT(_ty_shift(a, by, cut), _ty_shift(b, by, cut))
        case ProdT(a, b):
            return ProdT(_ty_shift(a, by, cut), _ty_shift(b, by, cut))
        case TyVar(i):
            return TyVar(i + by) if i >= cut else ty
        case F(phi):
            return F(_ty_shift(phi, by, cut))
        case Arrow(a, k):
            return Arrow(_ty_shift(a, by, cut), _ty_shift(k, by, cut))
        case Tensor(a, b):
            return Tensor(_ty_shift(a, by, cut), _ty_shift(b, by, cut))
        case Mu(body):
            return Mu(_ty_shift(body, by, cut + 1))
    raise TypeError(f"not a type: {ty!r}")


def type_subst(kappa: CompType, mu_body: CompType) -> CompType:
    """kappa with mu a. mu_body substituted for its outermost free TyVar.

    ``type_subst(mu.body, mu.body)`` is the one-level unfolding of ``mu``.
    """
    return _ty_sub(kappa, Mu(mu_body), 0)


def unfold_type(mu: Mu) -> CompType:
    return type_subst(mu.body, mu.body)


def type_closed(ty: Type, depth: int = 0) -> bool:
    match ty:
        case Unit():
            return True
        case Thunk(k) | F(k):
            return type_closed(k, depth)
        case SumT(a, b) | ProdT(a, b) | Arrow(a, b) | Tensor(a, b):
            return type_closed(a, depth) and type_closed(b, depth)
        case TyVar(i):
            return i < depth
        case Mu(body):
            return type_closed(body, depth + 1)
    raise TypeError(f"not a type: {ty!r}")


# ---------------------------------------------------------------------------
# terms


class CbpvTerm:
    __slots__ = ()


class CbpvValue(CbpvTerm):
    __slots__ = ()


class CbpvComp(CbpvTerm):
    __slots__ = ()


@dataclass(frozen=True)
class Var(CbpvValue):
    index: int


@dataclass(frozen=True)
class Star(CbpvValue):
    pass


@dataclass(frozen=True)
class Inl(CbpvValue):
    value: CbpvValue
    sum_type: SumT


@dataclass(frozen=True)
class Inr(CbpvValue):
    value: CbpvValue
    sum_type: SumT


@dataclass(frozen=True)
class PairV(CbpvValue):
    left: CbpvValue
    right: CbpvValue


@dataclass(frozen=True)
class ThunkV(CbpvValue):
    comp: CbpvComp


@dataclass(frozen=True)
class ProdC(CbpvComp):
    """prod v : F phi, the producer returning v."""

    value: CbpvValue


@dataclass(frozen=True)
class Force(CbpvComp):
    value: CbpvValue


@dataclass(frozen=True)
class Lam(CbpvComp):
    body: CbpvComp  # binds Var(0)
    arg_type: ValType


@dataclass(frozen=True)
class AppC(CbpvComp):
    fun: CbpvComp
    arg: CbpvValue


@dataclass(frozen=True)
class ToIn(CbpvComp):
    """source to x in body; body binds Var(0)."""

    source: CbpvComp
    body: CbpvComp


@dataclass(frozen=True)
class Choice(CbpvComp):
    """Binary nondeterministic choice."""

    left: CbpvComp
    right: CbpvComp


@dataclass(frozen=True)
class Case(CbpvComp):
    scrutinee: CbpvValue
    left: CbpvComp  # binds Var(0)
    right: CbpvComp  # binds Var(0)


@dataclass(frozen=True)
class Pm(CbpvComp):
    """pm v as (x,y) in body; body binds x=Var(1), y=Var(0)."""

    scrutinee: CbpvValue
    body: CbpvComp


@dataclass(frozen=True)
class Fst(CbpvComp):
    comp: CbpvComp


@dataclass(frozen=True)
class Snd(CbpvComp):
    comp: CbpvComp


@dataclass(frozen=True)
class PairC(CbpvComp):
    left: CbpvComp
    right: CbpvComp


@dataclass(frozen=True)
class FoldC(CbpvComp):
    comp: CbpvComp
    mu_body: CompType  # the whole term has type Mu(mu_body)


@dataclass(frozen=True)
class UnfoldC(CbpvComp):
    comp: CbpvComp


@dataclass(frozen=True)
class HoleV(CbpvValue):
    """Value-sorted hole marker for one-hole context templates."""


@dataclass(frozen=True)
class HoleC(CbpvComp):
    """Computation-sorted hole marker for one-hole context templates."""


STAR = Star()

Ctx = tuple  # tuple[ValType, ...]; Var(i) refers to ctx[len(ctx)-1-i]


def fill(template: CbpvTerm, t: CbpvTerm) -> CbpvTerm:
    """Plug t into the template's hole, literally (capturing: variables of t
    are bound by whatever binders enclose the hole)."""
    match template:
        case HoleV() | HoleC():
            return t
        case Var(_) | Star():
            return template
        case Inl(v, st):
            return Inl(fill(v, t), st)
        case Inr(v, st):
            return Inr(fill(v, t), st)
        case PairV(a, b):
            return PairV(fill(a, t), fill(b, t))
        case ThunkV(c):
            return ThunkV(fill(c, t))
        case ProdC(v):
            return ProdC(fill(v, t))
        case Force(v):
            return Force(fill(v, t))
        case Lam(b, phi):
            return Lam(fill(b, t), phi)
        case AppC(f, v):
            return AppC(fill(f, t), fill(v, t))
        case ToIn(s, b):
            return ToIn(fill(s, t), fill(b, t))
        case Choice(a, b):
            return Choice(fill(a, t), fill(b, t))
        case Case(v, l, r):
            return Case(fill(v, t), fill(l, t), fill(r, t))
        case Pm(v, b):
            return Pm(fill(v, t), fill(b, t))
        case Fst(c):
            return Fst(fill(c, t))
        case Snd(c):
            return Snd(fill(c, t))
        case PairC(a, b):
            return PairC(fill(a, t), fill(b, t))
        case FoldC(c, body):
            return FoldC(fill(c, t), body)
        case UnfoldC(c):
            return UnfoldC(fill(c, t))
    raise TypeError(f"not a cbpv term: {template!r}")


def term_size(t: CbpvTerm) -> int:
    match t:
        case Var(_) | Star():
            return 1
        case Inl(v, _) | Inr(v, _):
            return 1 + term_size(v)
        case PairV(a, b):
            return 1 + term_size(a) + term_size(b)
        case ThunkV(c):
            return 1 + term_size(c)
        case ProdC(v) | Force(v):
            return 1 + term_size(v)
        case Lam(b, _):
            return 1 + term_size(b)
        case AppC(f, v):
            return 1 + term_size(f) + term_size(v)
        case ToIn(s, b) | Choice(s, b) | PairC(s, b):
            return 1 + term_size(s) + term_size(b)
        case Case(v, l, r):
            return 1 + term_size(v) + term_size(l) + term_size(r)
        case Pm(v, b):
            return 1 + term_size(v) + term_size(b)
        case Fst(c) | Snd(c) | UnfoldC(c):
            return 1 + term_size(c)
        case FoldC(c, _):
            return 1 + term_size(c)
    raise TypeError(f"not a cbpv term: {t!r}")


# ---------------------------------------------------------------------------
# typing


def lookup(ctx: Ctx, index: int) -> ValType:
    if 0 <= index < len(ctx):
        return ctx[len(ctx) - 1 - index]
    raise TypecheckError(f"var: unbound de Bruijn index {index} in context of size {len(ctx)}")


def typecheck(ctx: Ctx, t: CbpvTerm) -> Type:
    """Syntax-directed typing; raises TypecheckError naming the failed rule."""
    match t:
        case Var(i):
            return lookup(ctx, i)
        case Star():
            return UNIT
        case Inl(v, st):
            got = typecheck(ctx, v)
            if got != st.left:
                raise TypecheckError(f"inl: payload has type {got!r}, annotation wants {st.left!r}")
            return st
        case Inr(v, st):
            got = typecheck(ctx, v)
            if got != st.right:
                raise TypecheckError(f"inr: payload has type {got!r}, annotation wants {st.right!r}")
            return st
        case PairV(a, b):
            return ProdT(typecheck(ctx, a), typecheck(ctx, b))
        case ThunkV(c):
            k = typecheck(ctx, c)
            return Thunk(k)
        case ProdC(v):
            return F(typecheck(ctx, v))
        case Force(v):
            got = typecheck(ctx, v)
            if not isinstance(got, Thunk):
                raise TypecheckError(f"force: operand has non-thunk type {got!r}")
            return got.comp
        case Lam(body, phi):
            return Arrow(phi, typecheck(ctx + (phi,), body))
        case AppC(f, v):
            kf = typecheck(ctx, f)
            if not isinstance(kf, Arrow):
                raise TypecheckError(f"app: function has non-arrow type {kf!r}")
            got = typecheck(ctx, v)
            if got != kf.arg:
                raise TypecheckError(f"app: argument has type {got!r}, arrow wants {kf.arg!r}")
            return kf.result
        case ToIn(s, body):
            ks = typecheck(ctx, s)
            if not isinstance(ks, F):
                raise TypecheckError(f"to: source has non-producer type {ks!r}")
            return typecheck(ctx + (ks.value,), body)
        case Choice(a, b):
            ka = typecheck(ctx, a)
            kb = typecheck(ctx, b)
            if ka != kb:
                raise TypecheckError(f"choice: branch types differ: {ka!r} vs {kb!r}")
            return ka
        case Case(v, l, r):
            sv = typecheck(ctx, v)
            if not isinstance(sv, SumT):
                raise TypecheckError(f"case: scrutinee has non-sum type {sv!r}")
            kl = typecheck(ctx + (sv.left,), l)
            kr = typecheck(ctx + (sv.right,), r)
            if kl != kr:
                raise TypecheckError(f"case: arm types differ: {kl!r} vs {kr!r}")
            return kl
        case Pm(v, body):
            pv = typecheck(ctx, v)
            if not isinstance(pv, ProdT):
                raise TypecheckError(f"pm: scrutinee has non-product type {pv!r}")
            return typecheck(ctx + (pv.left, pv.right), body)
        case Fst(c):
            kc = typecheck(ctx, c)
            if not isinstance(kc, Tensor):
                raise TypecheckError(f"fst: operand has non-tensor type {kc!r}")
            return kc.left
        case Snd(c):
            kc = typecheck(ctx, c)
            if not isinstance(kc, Tensor):
                raise TypecheckError(f"snd: operand has non-tensor type {kc!r}")
            return kc.right
        case PairC(a, b):
            return Tensor(typecheck(ctx, a), typecheck(ctx, b))
        case FoldC(c, body):
            want = type_subst(body, body)
            got = typecheck(ctx, c)
            if got != want:
                raise TypecheckError(
                    f"fold: operand has type {got!r}, unfolding wants {want!r}"
                )
            return Mu(body)
        case UnfoldC(c):
            kc = typecheck(ctx, c)
            if not isinstance(kc, Mu):
                raise TypecheckError(f"unfold: operand has non-recursive type {kc!r}")
            return unfold_type(kc)
    raise TypecheckError(f"not a cbpv term: {t!r}")


# ---------------------------------------------------------------------------
# renaming and substitution


def rename(t: CbpvTerm, f: Callable[[int], int]) -> CbpvTerm:
    """Apply an index renaming to the free variables of t."""
    return _ren(t, f, 0)


def _ren(t: CbpvTerm, f: Callable[[int], int], cut: int) -> CbpvTerm:
    match t:
        case Var(i):
            return Var(i) if i < cut else Var(f(i - cut) + cut)
        case Star():
            return t
        case Inl(v, st):
            return Inl(_ren(v, f, cut), st)
        case Inr(v, st):
            return Inr(_ren(v, f, cut), st)
        case PairV(a, b):
            return PairV(_ren(a, f, cut), _ren(b, f, cut))
        case ThunkV(c):
            return ThunkV(_ren(c, f, cut))
        case ProdC(v):
            return ProdC(_ren(v, f, cut))
        case Force(v):
            return Force(_ren(v, f, cut))
        case Lam(b, phi):
            return Lam(_ren(b, f, cut + 1), phi)
        case AppC(fn, v):
            return AppC(_ren(fn, f, cut), _ren(v, f, cut))
        case ToIn(s, b):
            return ToIn(_ren(s, f, cut), _ren(b, f, cut + 1))
        case Choice(a, b):
            return Choice(_ren(a, f, cut), _ren(b, f, cut))
        case Case(v, l, r):
            return Case(_ren(v, f, cut), _ren(l, f, cut + 1), _ren(r, f, cut + 1))
        case Pm(v, b):
            return Pm(_ren(v, f, cut), _ren(b, f, cut + 2))
        case Fst(c):
            return Fst(_ren(c, f, cut))
        case Snd(c):
            return Snd(_ren(c, f, cut))
        case PairC(a, b):
            return PairC(_ren(a, f, cut), _ren(b, f, cut))
        case FoldC(c, body):
            return FoldC(_ren(c, f, cut), body)
        case UnfoldC(c):
            return UnfoldC(_ren(c, f, cut))
    raise TypeError(f"not a cbpv term: {t!r}")


def shift(t: CbpvTerm, by: int) -> CbpvTerm:
    if by == 0:
        return t
    return rename(t, lambda i: i + by)


def subst_sim(t: CbpvTerm, us: Iterable[CbpvValue]) -> CbpvTerm:
    """Simultaneous substitution.  ``us`` is ordered like the context it
    replaces: us[0] substitutes the outermost variable, us[-1] gets Var(0).
    The result lives in whatever context the ``us`` themselves inhabit.
    """
    return _sub(t, tuple(us))


def _sub(t: CbpvTerm, us: tuple) -> CbpvTerm:
    match t:
        case Var(i):
            if 0 <= i < len(us):
                return us[len(us) - 1 - i]
            raise TypecheckError(
                f"substitution: index {i} out of range for a {len(us)}-entry tuple"
            )
        case Star():
            return t
        case Inl(v, st):
            return Inl(_sub(v, us), st)
        case Inr(v, st):
            return Inr(_sub(v, us), st)
        case PairV(a, b):
            return PairV(_sub(a, us), _sub(b, us))
        case ThunkV(c):
            return ThunkV(_sub(c, us))
        case ProdC(v):
            return ProdC(_sub(v, us))
        case Force(v):
            return Force(_sub(v, us))
        case Lam(b, phi):
            return Lam(_sub(b, _extend(us, 1)), phi)
        case AppC(fn, v):
            return AppC(_sub(fn, us), _sub(v, us))
        case ToIn(s, b):
            return ToIn(_sub(s, us), _sub(b, _extend(us, 1)))
        case Choice(a, b):
            return Choice(_sub(a, us), _sub(b, us))
        case Case(v, l, r):
            ext = _extend(us, 1)
            return Case(_sub(v, us), _sub(l, ext), _sub(r, ext))
        case Pm(v, b):
            return Pm(_sub(v, us), _sub(b, _extend(us, 2)))
        case Fst(c):
            return Fst(_sub(c, us))
        case Snd(c):
            return Snd(_sub(c, us))
        case PairC(a, b):
            return PairC(_sub(a, us), _sub(b, us))
        case FoldC(c, body):
            return FoldC(_sub(c, us), body)
        case UnfoldC(c):
            return UnfoldC(_sub(c, us))
    raise TypeError(f"not a cbpv term: {t!r}")


def _extend(us: tuple, by: int) -> tuple:
    """Push ``by`` fresh binders: shift every entry, append the new vars."""
    shifted = tuple(shift(u, by) for u in us)
    return shifted + tuple(Var(by - 1 - k) for k in range(by))


def identity_subst(n: int) -> tuple:
    """The identity substitution for an n-entry context."""
    return tuple(Var(n - 1 - k) for k in range(n))


def subst_single(t: CbpvTerm, v: CbpvValue) -> CbpvTerm:
    """Substitute v for Var(0) and lower the remaining free indices.

    Classic one-variable substitution, written directly; agrees with
    ``subst_sim`` against the identity-extended tuple.
    """
    return _sub1(t, v, 0)


def _sub1(t: CbpvTerm, v: CbpvValue, depth: int) -> CbpvTerm:
    match t:
        case Var(i):
            if i == depth:
                return shift(v, depth)
            return Var(i - 1) if i > depth else t
        case Star():
            return t
        case Inl(w, st):
            return Inl(_sub1(w, v, depth), st)
        case Inr(w, st):
            return Inr(_sub1(w, v, depth), st)
        case PairV(a, b):
            return PairV(_sub1(a, v, depth), _sub1(b, v, depth))
        case ThunkV(c):
            return ThunkV(_sub1(c, v, depth))
        case ProdC(w):
            return ProdC(_sub1(w, v, depth))
        case Force(w):
            return Force(_sub1(w, v, depth))
        case Lam(b, phi):
            return Lam(_sub1(b, v, depth + 1), phi)
        case AppC(fn, w):
            return AppC(_sub1(fn, v, depth), _sub1(w, v, depth))
        case ToIn(s, b):
            return ToIn(_sub1(s, v, depth), _sub1(b, v, depth + 1))
        case Choice(a, b):
            return Choice(_sub1(a, v, depth), _sub1(b, v, depth))
        case Case(w, l, r):
            return Case(
                _sub1(w, v, depth), _sub1(l, v, depth + 1), _sub1(r, v, depth + 1)
            )
        case Pm(w, b):
            return Pm(_sub1(w, v, depth), _sub1(b, v, depth + 2))
        case Fst(c):
            return Fst(_sub1(c, v, depth))
        case Snd(c):
            return Snd(_sub1(c, v, depth))
        case PairC(a, b):
            return PairC(_sub1(a, v, depth), _sub1(b, v, depth))
        case FoldC(c, body):
            return FoldC(_sub1(c, v, depth), body)
        case UnfoldC(c):
            return UnfoldC(_sub1(c, v, depth))
    raise TypeError(f"not a cbpv term: {t!r}")


# ---------------------------------------------------------------------------
# type pools and enumeration

# Auxiliary/annotation types for elimination forms are drawn from a finite
# pool; with unconstrained annotations even tiny term sets would be infinite.

DEFAULT_VALUE_POOL: tuple[ValType, ...] = (
    UNIT,
    SumT(UNIT, UNIT),
    ProdT(UNIT, UNIT),
    Thunk(F(UNIT)),
)
DEFAULT_COMP_POOL: tuple[CompType, ...] = (
    F(UNIT),
    Arrow(UNIT, F(UNIT)),
    Tensor(F(UNIT), F(UNIT)),
    Mu(F(UNIT)),
)


@dataclass(frozen=True)
class TypePool:
    values: tuple[ValType, ...] = DEFAULT_VALUE_POOL
    comps: tuple[CompType, ...] = DEFAULT_COMP_POOL


DEFAULT_POOL = TypePool()


@lru_cache(maxsize=None)
def _enum_values_cached(phi, ctx, n, pool, elim) -> tuple:
    if n <= 0:
        return ()
    out: list[CbpvValue] = []
    if n >= 1:
        for i, ty in enumerate(reversed(ctx)):
            if ty == phi:
                out.append(Var(i))
    match phi:
        case Unit():
            if n >= 1:
                out.append(STAR)
        case SumT(a, b):
            for v in _enum_values_cached(a, ctx, n - 1, pool, elim):
                out.append(Inl(v, phi))
            for v in _enum_values_cached(b, ctx, n - 1, pool, elim):
                out.append(Inr(v, phi))
        case ProdT(a, b):
            for i in range(1, n - 1):
                for va in _enum_values_cached(a, ctx, i, pool, elim):
                    for vb in _enum_values_cached(b, ctx, n - 1 - i, pool, elim):
                        out.append(PairV(va, vb))
        case Thunk(k):
            for c in _enum_comps_cached(k, ctx, n - 1, pool, elim):
                out.append(ThunkV(c))
    return tuple(out)


@lru_cache(maxsize=None)
def _enum_comps_cached(kappa, ctx, n, pool, elim) -> tuple:
    if n <= 0:
        return ()
    out: list[CbpvComp] = []
    match kappa:
        case F(phi):
            for v in _enum_values_cached(phi, ctx, n - 1, pool, elim):
                out.append(ProdC(v))
        case Arrow(phi, k):
            for b in _enum_comps_cached(k, ctx + (phi,), n - 1, pool, elim):
                out.append(Lam(b, phi))
        case Tensor(k1, k2):
            for i in range(1, n - 1):
                for a in _enum_comps_cached(k1, ctx, i, pool, elim):
                    for b in _enum_comps_cached(k2, ctx, n - 1 - i, pool, elim):
                        out.append(PairC(a, b))
        case Mu(body):
            unf = type_subst(body, body)
            for c in _enum_comps_cached(unf, ctx, n - 1, pool, elim):
                out.append(FoldC(c, body))
    # sort-uniform forms
    for i in range(1, n):
        for a in _enum_comps_cached(kappa, ctx, i, pool, elim):
            for b in _enum_comps_cached(kappa, ctx, n - 1 - i, pool, elim):
                out.append(Choice(a, b))
    if elim:
        for v in _enum_values_cached(Thunk(kappa), ctx, n - 1, pool, elim):
            out.append(Force(v))
        for phi in pool.values:
            # app
            for i in range(1, n - 1):
                for f in _enum_comps_cached(Arrow(phi, kappa), ctx, i, pool, elim):
                    for v in _enum_values_cached(phi, ctx, n - 1 - i, pool, elim):
                        out.append(AppC(f, v))
            # to
            for i in range(1, n - 1):
                for s in _enum_comps_cached(F(phi), ctx, i, pool, elim):
                    for b in _enum_comps_cached(kappa, ctx + (phi,), n - 1 - i, pool, elim):
                        out.append(ToIn(s, b))
        for k2 in pool.comps:
            for c in _enum_comps_cached(Tensor(kappa, k2), ctx, n - 1, pool, elim):
                out.append(Fst(c))
            for c in _enum_comps_cached(Tensor(k2, kappa), ctx, n - 1, pool, elim):
                out.append(Snd(c))
        for phi in pool.values:
            if isinstance(phi, SumT):
                for i in range(1, n - 2):
                    for v in _enum_values_cached(phi, ctx, i, pool, elim):
                        for j in range(1, n - 1 - i):
                            for l in _enum_comps_cached(
                                kappa, ctx + (phi.left,), j, pool, elim
                            ):
                                for r in _enum_comps_cached(
                                    kappa, ctx + (phi.right,), n - 1 - i - j, pool, elim
                                ):
                                    out.append(Case(v, l, r))
            if isinstance(phi, ProdT):
                for i in range(1, n - 1):
                    for v in _enum_values_cached(phi, ctx, i, pool, elim):
                        for b in _enum_comps_cached(
                            kappa, ctx + (phi.left, phi.right), n - 1 - i, pool, elim
                        ):
                            out.append(Pm(v, b))
        # unfold whose operand folds back to kappa: only when kappa is the
        # unfolding of a pool mu type
        for mk in pool.comps:
            if isinstance(mk, Mu) and type_subst(mk.body, mk.body) == kappa:
                for c in _enum_comps_cached(mk, ctx, n - 1, pool, elim):
                    out.append(UnfoldC(c))
    return tuple(out)


def enumerate_values(
    phi: ValType,
    max_size: int,
    ctx: Ctx = (),
    pool: TypePool = DEFAULT_POOL,
    elim: bool = False,
) -> Iterator[CbpvValue]:
    """Closed-over-ctx values of type phi, size <= max_size.

    Values are elimination-free unless ``elim``; with ``elim`` the thunked
    computations inside may use elimination forms with pool-typed auxiliaries.
    """
    for n in range(1, max_size + 1):
        yield from _enum_values_cached(phi, tuple(ctx), n, pool, elim)


def enumerate_comps(
    kappa: CompType,
    max_size: int,
    ctx: Ctx = (),
    pool: TypePool = DEFAULT_POOL,
    elim: bool = True,
) -> Iterator[CbpvComp]:
    for n in range(1, max_size + 1):
        yield from _enum_comps_cached(kappa, tuple(ctx), n, pool, elim)


def count_values(phi: ValType, max_size: int, ctx: Ctx = (), pool: TypePool = DEFAULT_POOL) -> int:
    """Counting oracle mirroring enumerate_values (elim-free)."""

    @lru_cache(maxsize=None)
    def cv(phi, ctx, n) -> int:
        if n <= 0:
            return 0
        total = sum(1 for ty in ctx if ty == phi)
        match phi:
            case Unit():
                total += 1
            case SumT(a, b):
                total += cv(a, ctx, n - 1) + cv(b, ctx, n - 1)
            case ProdT(a, b):
                total += sum(
                    cv(a, ctx, i) * cv(b, ctx, n - 1 - i) for i in range(1, n - 1)
                )
            case Thunk(k):
                total += ck(k, ctx, n - 1)
        return total

    @lru_cache(maxsize=None)
    def ck(kappa, ctx, n) -> int:
        if n <= 0:
            return 0
        total = 0
        match kappa:
            case F(phi2):
                total += cv(phi2, ctx, n - 1)
            case Arrow(phi2, k):
                total += ck(k, ctx + (phi2,), n - 1)
            case Tensor(k1, k2):
                total += sum(
                    ck(k1, ctx, i) * ck(k2, ctx, n - 1 - i) for i in range(1, n - 1)
                )
            case Mu(body):
                total += ck(type_subst(body, body), ctx, n - 1)
        total += sum(
            ck(kappa, ctx, i) * ck(kappa, ctx, n - 1 - i) for i in range(1, n)
        )
        return total

    return sum(cv(phi, tuple(ctx), n) for n in range(1, max_size + 1))


def min_inhabitant(ty: Type, ctx: Ctx = (), _depth: int = 0):
    """A smallest inhabitant of a type, or None when the search recurses
    (degenerate recursive types like mu a. a are uninhabited at desk scale)."""
    if _depth > 24:
        return None
    match ty:
        case Unit():
            return STAR
        case SumT(a, b):
            va = min_inhabitant(a, ctx, _depth + 1)
            if va is not None:
                return Inl(va, ty)
            vb = min_inhabitant(b, ctx, _depth + 1)
            return Inr(vb, ty) if vb is not None else None
        case ProdT(a, b):
            va = min_inhabitant(a, ctx, _depth + 1)
            vb = min_inhabitant(b, ctx, _depth + 1)
            return PairV(va, vb) if va is not None and vb is not None else None
        case Thunk(k):
            c = min_inhabitant(k, ctx, _depth + 1)
            return ThunkV(c) if c is not None else None
        case F(phi):
            v = min_inhabitant(phi, ctx, _depth + 1)
            return ProdC(v) if v is not None else None
        case Arrow(phi, k):
            c = min_inhabitant(k, ctx, _depth + 1)
            return Lam(shift(c, 1), phi) if c is not None else None
        case Tensor(k1, k2):
            a = min_inhabitant(k1, ctx, _depth + 1)
            b = min_inhabitant(k2, ctx, _depth + 1)
            return PairC(a, b) if a is not None and b is not None else None
        case Mu(body):
            c = min_inhabitant(type_subst(body, body), ctx, _depth + 1)
            return FoldC(c, body) if c is not None else None
        case TyVar(_):
            return None
    raise TypeError(f"not a type: {ty!r}")


# ---------------------------------------------------------------------------
# random generation (type-directed)


def random_value(rng, phi: ValType, max_size: int, ctx: Ctx = (), pool: TypePool = DEFAULT_POOL):
    """Random well-typed value of type phi; falls back to the minimal
    inhabitant when the budget runs out."""
    if max_size <= 1:
        for i, ty in enumerate(reversed(ctx)):
            if ty == phi and rng.random() < 0.5:
                return Var(i)
        v = min_inhabitant(phi, ctx)
        if v is None:
            raise ValueError(f"uninhabited type {phi!r}")
        return v
    vars_here = [Var(i) for i, ty in enumerate(reversed(ctx)) if ty == phi]
    if vars_here and rng.random() < 0.3:
        return rng.choice(vars_here)
    match phi:
        case Unit():
            return STAR
        case SumT(a, b):
            if rng.random() < 0.5 and min_inhabitant(a, ctx) is not None:
                return Inl(random_value(rng, a, max_size - 1, ctx, pool), phi)
            if min_inhabitant(b, ctx) is not None:
                return Inr(random_value(rng, b, max_size - 1, ctx, pool), phi)
            return Inl(random_value(rng, a, max_size - 1, ctx, pool), phi)
        case ProdT(a, b):
            half = max(1, (max_size - 1) // 2)
            return PairV(
                random_value(rng, a, half, ctx, pool),
                random_value(rng, b, half, ctx, pool),
            )
        case Thunk(k):
            return ThunkV(random_comp(rng, k, max_size - 1, ctx, pool))
    raise TypeError(f"not a value type: {phi!r}")


def random_comp(rng, kappa: CompType, max_size: int, ctx: Ctx = (), pool: TypePool = DEFAULT_POOL):
    """Random well-typed computation of type kappa, exercising both
    introduction and elimination forms."""
    if max_size <= 1:
        c = min_inhabitant(kappa, ctx)
        if c is None:
            raise ValueError(f"uninhabited type {kappa!r}")
        return c
    elim_budget = max_size >= 3
    choices = ["intro", "choice"]
    if elim_budget:
        choices += ["force", "app", "to", "fst", "snd", "case", "pm", "unfold"]
    pick = rng.choice(choices)
    half = max(1, (max_size - 1) // 2)
    if pick == "choice":
        return Choice(
            random_comp(rng, kappa, half, ctx, pool),
            random_comp(rng, kappa, half, ctx, pool),
        )
    if pick == "force":
        return Force(random_value(rng, Thunk(kappa), max_size - 1, ctx, pool))
    if pick == "app":
        phi = rng.choice(pool.values)
        return AppC(
            random_comp(rng, Arrow(phi, kappa), half, ctx, pool),
            random_value(rng, phi, half, ctx, pool),
        )
    if pick == "to":
        phi = rng.choice(pool.values)
        return ToIn(
            random_comp(rng, F(phi), half, ctx, pool),
            random_comp(rng, kappa, half, ctx + (phi,), pool),
        )
    if pick == "fst":
        k2 = rng.choice(pool.comps)
        return Fst(random_comp(rng, Tensor(kappa, k2), max_size - 1, ctx, pool))
    if pick == "snd":
        k2 = rng.choice(pool.comps)
        return Snd(random_comp(rng, Tensor(k2, kappa), max_size - 1, ctx, pool))
    if pick == "case":
        sums = [p for p in pool.values if isinstance(p, SumT)]
        if sums:
            phi = rng.choice(sums)
            third = max(1, (max_size - 1) // 3)
            return Case(
                random_value(rng, phi, third, ctx, pool),
                random_comp(rng, kappa, third, ctx + (phi.left,), pool),
                random_comp(rng, kappa, third, ctx + (phi.right,), pool),
            )
    if pick == "pm":
        prods = [p for p in pool.values if isinstance(p, ProdT)]
        if prods:
            phi = rng.choice(prods)
            return Pm(
                random_value(rng, phi, half, ctx, pool),
                random_comp(rng, kappa, half, ctx + (phi.left, phi.right), pool),
            )
    if pick == "unfold":
        mus = [m for m in pool.comps if isinstance(m, Mu) and type_subst(m.body, m.body) == kappa]
        if mus:
            mk = rng.choice(mus)
            return UnfoldC(random_comp(rng, mk, max_size - 1, ctx, pool))
    # intro (default fallback)
    match kappa:
        case F(phi):
            return ProdC(random_value(rng, phi, max_size - 1, ctx, pool))
        case Arrow(phi, k):
            return Lam(random_comp(rng, k, max_size - 1, ctx + (phi,), pool), phi)
        case Tensor(k1, k2):
            return PairC(
                random_comp(rng, k1, half, ctx, pool),
                random_comp(rng, k2, half, ctx, pool),
            )
        case Mu(body):
            return FoldC(
                random_comp(rng, type_subst(body, body), max_size - 1, ctx, pool), body
            )
    c = min_inhabitant(kappa, ctx)
    if c is None:
        raise ValueError(f"uninhabited type {kappa!r}")
    return c

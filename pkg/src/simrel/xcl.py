"""Untyped extended combinatory logic.

Terms are S, K, I, the partially applied forms S'(t), K'(t), S''(t,s), and
application.  The semantics is deterministic: a term either makes one
unlabeled reduction step or is terminal, and terminal terms react to any
argument term ("label") with a labeled transition.

    S   --t-->  S'(t)          K  --t-->  K'(t)       I --t--> t
    S'(p) --t--> S''(p,t)      K'(p) --t--> p
    S''(p,q) --t--> (p t)(q t)
    p q  -->  p' q   when p --> p'
    p q  -->  p'     when p --t--> p' with t = q

Two independent step paths exist: :func:`step` (direct rules) and
:func:`gsos_step` (a clause-table transcription of the same rules in
higher-order-GSOS style); they agree extensionally and the test suite pins
that down.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Iterator

from . import kernel
from .kernel import (
    Context,
    ContextLanguage,
    IndexedRelation,
    SemanticsInterface,
    SemTools,
    Verdict,
    Witness,
)

SORT = "term"


# ---------------------------------------------------------------------------
# terms


class XclTerm:
    """Base class; subclasses are frozen dataclasses compared structurally."""

    __slots__ = ()


@dataclass(frozen=True)
class Atom(XclTerm):
    name: str  # "S" | "K" | "I"


@dataclass(frozen=True)
class Sp(XclTerm):
    """S'(t): S applied to one argument."""

    arg: XclTerm


@dataclass(frozen=True)
class Kp(XclTerm):
    """K'(t): K applied to one argument."""

    arg: XclTerm


@dataclass(frozen=True)
class Spp(XclTerm):
    """S''(t,s): S applied to two arguments."""

    first: XclTerm
    second: XclTerm


@dataclass(frozen=True)
class App(XclTerm):
    fun: XclTerm
    arg: XclTerm


S = Atom("S")
K = Atom("K")
I = Atom("I")


def term_size(t: XclTerm) -> int:
    match t:
        case Atom(_):
            return 1
        case Sp(a) | Kp(a):
            return 1 + term_size(a)
        case Spp(a, b) | App(a, b):
            return 1 + term_size(a) + term_size(b)
    raise TypeError(f"not an xcl term: {t!r}")


# ---------------------------------------------------------------------------
# one-step semantics


@dataclass(frozen=True)
class Reduces:
    target: XclTerm


@dataclass(frozen=True)
class Terminal:
    pass


TERMINAL = Terminal()
XclStep = Reduces | Terminal


def step(p: XclTerm) -> XclStep:
    """One deterministic step: Reduces(target) or Terminal."""
    match p:
        case App(fun, arg):
            s = step(fun)
            if isinstance(s, Reduces):
                return Reduces(App(s.target, arg))
            return Reduces(apply_label(fun, arg))
        case Atom(_) | Sp(_) | Kp(_) | Spp(_, _):
            return TERMINAL
    raise TypeError(f"not an xcl term: {p!r}")


def apply_label(p: XclTerm, t: XclTerm) -> XclTerm:
    """Labeled transition p --t--> result; p must be terminal."""
    match p:
        case Atom("S"):
            return Sp(t)
        case Atom("K"):
            return Kp(t)
        case Atom("I"):
            return t
        case Sp(q):
            return Spp(q, t)
        case Kp(q):
            return q
        case Spp(q, r):
            return App(App(q, t), App(r, t))
    raise ValueError(f"labeled transition undefined: {p!r} is not terminal")


def is_terminal(p: XclTerm) -> bool:
    return not isinstance(p, App)


def successors(p: XclTerm) -> tuple[XclTerm, ...]:
    s = step(p)
    return (s.target,) if isinstance(s, Reduces) else ()


def trace(p: XclTerm, label: XclTerm | None = None, fuel: int = kernel.DEFAULT_FUEL):
    """Reduction trace as [(arrow, term), ...]; the first arrow is ''.

    Reduces to the first terminal; if a label is supplied, performs the
    labeled transition there (arrow '--t-->') and keeps reducing to the next
    terminal.  Stops early when fuel runs out.
    """
    out = [("", p)]
    cur = p

    def reduce_out(cur):
        nonlocal fuel
        while fuel > 0:
            s = step(cur)
            if isinstance(s, Terminal):
                return cur, True
            fuel -= 1
            cur = s.target
            out.append(("-->", cur))
        return cur, isinstance(step(cur), Terminal)

    cur, done = reduce_out(cur)
    if label is not None and done:
        cur = apply_label(cur, label)
        out.append(("--label-->", cur))
        cur, _ = reduce_out(cur)
    return out


# ---------------------------------------------------------------------------
# second step path: the GSOS clause table

# Behaviour of a term: ("red", target) for a reducing term, ("fun", f) for a
# terminal one, where f maps an argument term to the transition result.  The
# table below is data: one entry per operator, taking the (term, behaviour)
# pairs of the operands.  Results are built over operand *sources* (variables
# x) and operand *behaviours* (y or f), then flattened into plain terms.

Behaviour = tuple


def _rule_atom_S(ops):
    return ("fun", lambda x: Sp(x))


def _rule_atom_K(ops):
    return ("fun", lambda x: Kp(x))


def _rule_atom_I(ops):
    return ("fun", lambda x: x)


def _rule_sp(ops):
    (x, _b) = ops[0]
    return ("fun", lambda x2: Spp(x, x2))


def _rule_kp(ops):
    (x, _b) = ops[0]
    return ("fun", lambda _x2: x)


def _rule_spp(ops):
    (x, _bx) = ops[0]
    (x2, _bx2) = ops[1]
    return ("fun", lambda x3: App(App(x, x3), App(x2, x3)))


def _rule_app(ops):
    (_x, b) = ops[0]
    (x2, _b2) = ops[1]
    kind, payload = b
    if kind == "red":
        return ("red", App(payload, x2))
    return ("red", payload(x2))


_GSOS_TABLE: dict[str, Callable] = {
    "S": _rule_atom_S,
    "K": _rule_atom_K,
    "I": _rule_atom_I,
    "Sp": _rule_sp,
    "Kp": _rule_kp,
    "Spp": _rule_spp,
    "App": _rule_app,
}


def gsos_behaviour(p: XclTerm) -> Behaviour:
    """Behaviour of p computed by structural recursion through the table."""
    match p:
        case Atom(name):
            return _GSOS_TABLE[name](())
        case Sp(a):
            return _GSOS_TABLE["Sp"](((a, gsos_behaviour(a)),))
        case Kp(a):
            return _GSOS_TABLE["Kp"](((a, gsos_behaviour(a)),))
        case Spp(a, b):
            return _GSOS_TABLE["Spp"](((a, gsos_behaviour(a)), (b, gsos_behaviour(b))))
        case App(f, a):
            return _GSOS_TABLE["App"](((f, gsos_behaviour(f)), (a, gsos_behaviour(a))))
    raise TypeError(f"not an xcl term: {p!r}")


def gsos_step(p: XclTerm) -> XclStep:
    kind, payload = gsos_behaviour(p)
    if kind == "red":
        return Reduces(payload)
    return TERMINAL


# ---------------------------------------------------------------------------
# kernel plumbing


@dataclass(frozen=True)
class ApplyObs:
    """Observation of a terminal term: its labeled-transition behaviour."""

    owner: XclTerm


def _observe(t: XclTerm) -> tuple:
    return (ApplyObs(t),) if is_terminal(t) else ()


def sim_semantics(labels: Iterable[XclTerm]) -> SemanticsInterface:
    """Applicative-simulation semantics: same label on both sides, with the
    diagonal shortcut (structurally equal terminals match all labels)."""
    labels = tuple(labels)

    def obs_match(idx, o1: ApplyObs, o2: ApplyObs, query) -> bool:
        if o1.owner == o2.owner:
            return True
        return all(
            query(SORT, apply_label(o1.owner, t), apply_label(o2.owner, t))
            for t in labels
        )

    return SemanticsInterface(
        successors=successors,
        observe=_observe,
        obs_match=obs_match,
        index_of=lambda t: SORT,
    )


def logrel_semantics(inputs: Iterable[XclTerm]) -> SemanticsInterface:
    """Logical-relation semantics: quantifies over *related* label pairs."""
    inputs = tuple(dict.fromkeys(inputs))

    def obs_match(idx, o1: ApplyObs, o2: ApplyObs, query) -> bool:
        for d in inputs:
            for e in inputs:
                if query(SORT, d, e) and not query(
                    SORT, apply_label(o1.owner, d), apply_label(o2.owner, e)
                ):
                    return False
        return True

    return SemanticsInterface(
        successors=successors,
        observe=_observe,
        obs_match=obs_match,
        index_of=lambda t: SORT,
    )


def _sim_clause_verdict(
    pair: tuple, rel: IndexedRelation, tools: SemTools, labels: tuple
) -> tuple[str, str | None]:
    """One-pair simulation clauses. Returns (status, failing clause)."""
    p, q = pair
    cq = tools.closure(q)
    s = step(p)
    if isinstance(s, Reduces):
        p2 = s.target
        if any(rel.has(SORT, p2, q2) for q2 in cq.reachable):
            return ("holds", None)
        return (("fails" if cq.frontier_exhausted else "unknown"), "reduction")
    # terminal: labeled clause, with the diagonal shortcut
    if p == q:
        return ("holds", None)
    qbar = next((u for u in cq.reachable if is_terminal(u)), None)
    if qbar is None:
        return (("fails" if cq.frontier_exhausted else "unknown"), "labeled")
    for t in labels:
        if not rel.has(SORT, apply_label(p, t), apply_label(qbar, t)):
            return ("fails", f"labeled:{t!r}")
    return ("holds", None)


def check_applicative_simulation(
    rel: IndexedRelation,
    labels: Iterable[XclTerm],
    fuel: int = kernel.DEFAULT_FUEL,
) -> Verdict:
    """Verify that an explicit relation is an applicative simulation.

    Only explicit pairs are checked; an implicit diagonal (the DELTA flag on
    the relation) is sound by itself, since the identity relation is a
    simulation for this deterministic system.
    """
    labels = tuple(labels)
    tools = SemTools(sim_semantics(labels), fuel)
    unknowns = []
    for (p, q) in sorted(rel.pairs(SORT), key=repr):
        status, clause = _sim_clause_verdict((p, q), rel, tools, labels)
        if status == "fails":
            return Verdict.fail(Witness(index=SORT, pair=(p, q), clause=clause))
        if status == "unknown":
            unknowns.append((p, q, clause))
    if unknowns:
        return Verdict.dunno(f"undecided_pairs={len(unknowns)}")
    return Verdict.ok(f"pairs_checked={len(rel.pairs(SORT))}")


def greatest_simulation(
    universe: Iterable[XclTerm],
    labels: Iterable[XclTerm],
    fuel: int = kernel.DEFAULT_FUEL,
) -> IndexedRelation:
    """Greatest applicative simulation within the universe (plus implicit
    diagonal).  Pairs undecidable within fuel are dropped."""
    labels = tuple(labels)
    sem = sim_semantics(labels)

    def clause(idx, pair, rel, tools):
        return _sim_clause_verdict(pair, rel, tools, labels)[0] == "holds"

    return kernel.simulation_fixpoint(sem, {SORT: tuple(universe)}, clause, fuel)


def logrel_xcl(
    universe: Iterable[XclTerm],
    labels: Iterable[XclTerm],
    depth: int,
    fuel: int = kernel.DEFAULT_FUEL,
) -> list[IndexedRelation]:
    """Step-indexed logical-relation chain L^0 .. L^depth on the universe.

    Label pairs for the termination clause range over ``labels`` plus the
    universe itself, as related by the previous level.
    """
    universe = tuple(dict.fromkeys(universe))
    inputs = tuple(dict.fromkeys(itertools.chain(labels, universe)))
    sem = logrel_semantics(inputs)
    return kernel.stepindex_chain(sem, {SORT: universe}, depth, fuel)


# ---------------------------------------------------------------------------
# lax-bialgebra desk check: weak-premise versions of the two app rules


def lax_bialgebra_check(
    universe: Iterable[XclTerm],
    labels: Iterable[XclTerm] = (),
    fuel: int = kernel.DEFAULT_FUEL,
) -> Verdict:
    """Check the weak-rule soundness conditions on every application in the
    universe: if p => p' then p q => p' q, and if p => p'' terminal then
    p q => apply(p'', q).  Premise-free rules hold trivially and are skipped.
    """
    sem = sim_semantics(())
    tools = SemTools(sem, fuel)
    checked = 0
    undecided = 0
    for u in sorted(set(universe), key=repr):
        if not isinstance(u, App):
            continue
        p, q = u.fun, u.arg
        cu = tools.closure(u)
        cp = tools.closure(p)
        for p2 in cp.reachable:
            checked += 1
            want = App(p2, q)
            if want not in cu.reachable:
                if cu.frontier_exhausted:
                    return Verdict.fail(
                        Witness(index=SORT, pair=(u, want), clause="app-cong-weak")
                    )
                undecided += 1
            if is_terminal(p2):
                fired = apply_label(p2, q)
                if fired not in cu.reachable:
                    if cu.frontier_exhausted:
                        return Verdict.fail(
                            Witness(index=SORT, pair=(u, fired), clause="app-fire-weak")
                        )
                    undecided += 1
    if undecided:
        return Verdict.dunno(f"undecided={undecided}", f"checked={checked}")
    return Verdict.ok(f"checked={checked}")


# ---------------------------------------------------------------------------
# enumeration: terms and one-hole contexts


@lru_cache(maxsize=None)
def terms_of_size(n: int) -> tuple[XclTerm, ...]:
    """All terms of exactly size n, deterministic order."""
    if n <= 0:
        return ()
    if n == 1:
        return (S, K, I)
    out: list[XclTerm] = []
    for a in terms_of_size(n - 1):
        out.append(Sp(a))
        out.append(Kp(a))
    for i in range(1, n - 1):
        for a in terms_of_size(i):
            for b in terms_of_size(n - 1 - i):
                out.append(Spp(a, b))
                out.append(App(a, b))
    return tuple(out)


def enumerate_terms(max_size: int) -> Iterator[XclTerm]:
    for n in range(1, max_size + 1):
        yield from terms_of_size(n)


def count_terms(max_size: int) -> int:
    """Independent counting oracle for the enumerator."""

    @lru_cache(maxsize=None)
    def c(n: int) -> int:
        if n <= 0:
            return 0
        if n == 1:
            return 3
        binary = sum(c(i) * c(n - 1 - i) for i in range(1, n - 1))
        return 2 * c(n - 1) + 2 * binary

    return sum(c(n) for n in range(1, max_size + 1))


@dataclass(frozen=True)
class Hole(XclTerm):
    """The hole of a one-hole context; never reduced, only filled."""


HOLE = Hole()


def fill(template: XclTerm, t: XclTerm) -> XclTerm:
    match template:
        case Hole():
            return t
        case Atom(_):
            return template
        case Sp(a):
            return Sp(fill(a, t))
        case Kp(a):
            return Kp(fill(a, t))
        case Spp(a, b):
            return Spp(fill(a, t), fill(b, t))
        case App(a, b):
            return App(fill(a, t), fill(b, t))
    raise TypeError(f"not an xcl template: {template!r}")


@lru_cache(maxsize=None)
def _contexts_of_size(n: int) -> tuple[XclTerm, ...]:
    if n <= 0:
        return ()
    if n == 1:
        return (HOLE,)
    out: list[XclTerm] = []
    for c in _contexts_of_size(n - 1):
        out.append(Sp(c))
        out.append(Kp(c))
    for i in range(1, n - 1):
        j = n - 1 - i
        for c in _contexts_of_size(i):
            for t in terms_of_size(j):
                out.append(Spp(c, t))
                out.append(App(c, t))
        for t in terms_of_size(i):
            for c in _contexts_of_size(j):
                out.append(Spp(t, c))
                out.append(App(t, c))
    return tuple(out)


def enumerate_contexts(max_size: int) -> Iterator[Context]:
    """All one-hole contexts up to max_size (hole counts as size 1)."""
    from .surface import print_xcl  # local import: surface depends on us

    for n in range(1, max_size + 1):
        for template in _contexts_of_size(n):
            yield Context(
                fill=lambda t, template=template: fill(template, t),
                label=print_xcl(template),
            )


def count_contexts(max_size: int) -> int:
    """Counting oracle for the context enumerator."""

    @lru_cache(maxsize=None)
    def tc(n: int) -> int:
        return len(terms_of_size(n))

    @lru_cache(maxsize=None)
    def cc(n: int) -> int:
        if n <= 0:
            return 0
        if n == 1:
            return 1
        unary = 2 * cc(n - 1)
        binary = 2 * sum(
            cc(i) * tc(n - 1 - i) + tc(i) * cc(n - 1 - i) for i in range(1, n - 1)
        )
        return unary + binary

    return sum(cc(n) for n in range(1, max_size + 1))


def context_language() -> ContextLanguage:
    sem = sim_semantics(())
    return ContextLanguage(
        sem=sem,
        contexts=lambda max_size, idx: enumerate_contexts(max_size),
        index_of=lambda t: SORT,
    )


def context_oracle(
    p: XclTerm,
    q: XclTerm,
    max_ctx_size: int,
    fuel: int = kernel.DEFAULT_FUEL,
) -> Verdict:
    return kernel.context_oracle(context_language(), p, q, max_ctx_size, fuel)


# ---------------------------------------------------------------------------
# random terms


def random_term(rng, max_size: int) -> XclTerm:
    """Uniform-ish random term of size <= max_size (at least 1)."""
    if max_size <= 1:
        return rng.choice((S, K, I))
    shape = rng.randrange(4)
    if shape == 0:
        return rng.choice((S, K, I))
    if shape == 1:
        return Sp(random_term(rng, max_size - 1))
    if shape == 2:
        return Kp(random_term(rng, max_size - 1))
    left = random_term(rng, (max_size - 1) // 2 or 1)
    right = random_term(rng, (max_size - 1) // 2 or 1)
    return rng.choice((Spp, App))(left, right)

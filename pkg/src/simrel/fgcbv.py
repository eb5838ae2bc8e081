"""Fine-grain call-by-value combinatory logic.

Two-sorted: values (I, K, S and the partial applications K'(t), S'(t),
S''(s,t), whose operands are computations) and computations (returned values
[v], and four application forms pairing a computation/value function with a
computation/value argument, written t . s, v .> s, t <. v, v o w).  Values
are inert; every computation makes exactly one deterministic step, whose
target is a value (termination) or another computation:

    [v] --> v
    t . s  --> t' . s     or  v .> s     (as t steps to t' / to v)
    t <. v --> t' <. v    or  w o v
    v .> s --> v .> s'    or  v o w
    v o w  --> t          where v --w--> t  (labeled value transitions below)

    I --v--> [v]     K --v--> [K'([v])]      S --v--> [S'([v])]
    K'(t) --v--> t   S'(t) --v--> [S''(t,[v])]
    S''(t,s) --v--> (t <. v) . (s <. v)

The optional fixpoint operator steps fix(t) --> t <. S''(K o I, fix(t)); it
is feature-flagged out of default enumeration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

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

VAL = "v"
COMP = "c"


class FgValue:
    __slots__ = ()


class FgComp:
    __slots__ = ()


FgTerm = FgValue | FgComp


@dataclass(frozen=True)
class VAtom(FgValue):
    name: str  # "I" | "K" | "S"


@dataclass(frozen=True)
class Kp(FgValue):
    arg: FgComp


@dataclass(frozen=True)
class Sp(FgValue):
    arg: FgComp


@dataclass(frozen=True)
class Spp(FgValue):
    first: FgComp
    second: FgComp


@dataclass(frozen=True)
class Ret(FgComp):
    """[v]: the computation returning v."""

    value: FgValue


@dataclass(frozen=True)
class AppCC(FgComp):
    """t . s"""

    fun: FgComp
    arg: FgComp


@dataclass(frozen=True)
class AppVC(FgComp):
    """v .> s"""

    fun: FgValue
    arg: FgComp


@dataclass(frozen=True)
class AppCV(FgComp):
    """t <. v"""

    fun: FgComp
    arg: FgValue


@dataclass(frozen=True)
class AppVV(FgComp):
    """v o w"""

    fun: FgValue
    arg: FgValue


@dataclass(frozen=True)
class Fix(FgComp):
    body: FgComp


VI = VAtom("I")
VK = VAtom("K")
VS = VAtom("S")


def sort_of(t: FgTerm) -> str:
    if isinstance(t, FgValue):
        return VAL
    if isinstance(t, FgComp):
        return COMP
    raise TypeError(f"not an fgcbv term: {t!r}")


def term_size(t: FgTerm) -> int:
    match t:
        case VAtom(_):
            return 1
        case Kp(a) | Sp(a) | Ret(a) | Fix(a):
            return 1 + term_size(a)
        case Spp(a, b) | AppCC(a, b) | AppVC(a, b) | AppCV(a, b) | AppVV(a, b):
            return 1 + term_size(a) + term_size(b)
    raise TypeError(f"not an fgcbv term: {t!r}")


# ---------------------------------------------------------------------------
# one-step semantics


@dataclass(frozen=True)
class Reduces:
    """The unique step of a computation; target is a value or a computation."""

    target: FgTerm


def fg_apply_label(v: FgValue, w: FgValue) -> FgComp:
    """Labeled transition v --w--> t (total on values)."""
    match v:
        case VAtom("I"):
            return Ret(w)
        case VAtom("K"):
            return Ret(Kp(Ret(w)))
        case VAtom("S"):
            return Ret(Sp(Ret(w)))
        case Kp(t):
            return t
        case Sp(t):
            return Ret(Spp(t, Ret(w)))
        case Spp(s, t):
            return AppCC(AppCV(s, w), AppCV(t, w))
    raise TypeError(f"not an fgcbv value: {v!r}")


def fg_step(t: FgComp) -> Reduces:
    """The single deterministic step of a computation."""
    match t:
        case Ret(v):
            return Reduces(v)
        case AppCC(f, s):
            r = fg_step(f).target
            if isinstance(r, FgValue):
                return Reduces(AppVC(r, s))
            return Reduces(AppCC(r, s))
        case AppCV(f, v):
            r = fg_step(f).target
            if isinstance(r, FgValue):
                return Reduces(AppVV(r, v))
            return Reduces(AppCV(r, v))
        case AppVC(v, s):
            r = fg_step(s).target
            if isinstance(r, FgValue):
                return Reduces(AppVV(v, r))
            return Reduces(AppVC(v, r))
        case AppVV(v, w):
            return Reduces(fg_apply_label(v, w))
        case Fix(b):
            return Reduces(AppCV(b, Spp(AppVV(VK, VI), Fix(b))))
    raise TypeError(f"not an fgcbv computation: {t!r}")


def successors(t: FgTerm) -> tuple[FgTerm, ...]:
    if isinstance(t, FgValue):
        return ()
    return (fg_step(t).target,)


# ---------------------------------------------------------------------------
# kernel plumbing


@dataclass(frozen=True)
class ApplyObs:
    """Observation of a value: its labeled-transition behaviour."""

    owner: FgValue


def _observe(t: FgTerm) -> tuple:
    return (ApplyObs(t),) if isinstance(t, FgValue) else ()


def sim_semantics(labels: Iterable[FgValue]) -> SemanticsInterface:
    """Applicative-simulation semantics: one shared label per clause check,
    with the diagonal shortcut on structurally equal values."""
    labels = tuple(labels)

    def obs_match(idx, o1: ApplyObs, o2: ApplyObs, query) -> bool:
        if o1.owner == o2.owner:
            return True
        return all(
            query(COMP, fg_apply_label(o1.owner, u), fg_apply_label(o2.owner, u))
            for u in labels
        )

    return SemanticsInterface(
        successors=successors,
        observe=_observe,
        obs_match=obs_match,
        index_of=sort_of,
    )


@lru_cache(maxsize=None)
def _red_line(t: FgComp, steps: int = 64) -> tuple[FgTerm, ...]:
    """The (deterministic) reduction line of a computation, capped; ends at
    the first value, revisit, or the step bound."""
    out = [t]
    seen = {t}
    cur: FgTerm = t
    for _ in range(steps):
        if isinstance(cur, FgValue):
            break
        cur = fg_step(cur).target
        if cur in seen:
            break
        seen.add(cur)
        out.append(cur)
    return tuple(out)


class StepIndexed:
    """By-need evaluator for the step-indexed relation.

    Level 0 relates everything of the same sort; level n+1 keeps a pair
    when it was at level n and the clause holds with every query answered
    at level n.  Queries are memoized and not confined to any universe, so
    obligations may pass through arbitrary closed terms.  The value clause
    quantifies over input pairs drawn from ``inputs`` related at the
    previous level; application results are compared along their (finite,
    deterministic) reduction lines."""

    def __init__(self, inputs: Iterable[FgValue], fuel: int = 256):
        self.inputs = tuple(dict.fromkeys(inputs))
        self.steps = max(1, min(fuel, 256))
        self._memo: dict = {}

    def rel(self, n: int, idx: str, a: FgTerm, b: FgTerm) -> bool:
        if a == b:
            return True
        if n <= 0:
            return True
        key = (n, idx, a, b)
        got = self._memo.get(key)
        if got is None:
            got = self.rel(n - 1, idx, a, b) and self._clause(n - 1, idx, a, b)
            self._memo[key] = got
        return got

    def _lines_related(self, n: int, t1: FgComp, t2: FgComp) -> bool:
        for x1 in _red_line(t1, self.steps):
            s1 = sort_of(x1)
            for x2 in _red_line(t2, self.steps):
                if sort_of(x2) == s1 and self.rel(n, s1, x1, x2):
                    return True
        return False

    def _clause(self, n: int, idx: str, a: FgTerm, b: FgTerm) -> bool:
        if idx == VAL:
            for w1 in self.inputs:
                for w2 in self.inputs:
                    if self.rel(n, VAL, w1, w2) and not self._lines_related(
                        n, fg_apply_label(a, w1), fg_apply_label(b, w2)
                    ):
                        return False
            return True
        a2 = fg_step(a).target
        i2 = sort_of(a2)
        return any(
            sort_of(x) == i2 and self.rel(n, i2, a2, x)
            for x in _red_line(b, self.steps)
        )


def _sim_clause_verdict(
    idx: str, pair: tuple, rel: IndexedRelation, tools: SemTools, labels: tuple
) -> tuple[str, str | None]:
    """Three simulation clauses (value pairs; computation-to-value;
    computation-to-computation).  Returns (status, failing clause)."""
    p, q = pair
    if idx == VAL:
        if p == q:
            return ("holds", None)
        for u in labels:
            if not rel.has(COMP, fg_apply_label(p, u), fg_apply_label(q, u)):
                return ("fails", f"value:{u!r}")
        return ("holds", None)
    # computation pair
    tgt = fg_step(p).target
    cq = tools.closure(q)
    want = sort_of(tgt)
    if any(sort_of(x) == want and rel.has(want, tgt, x) for x in cq.reachable):
        return ("holds", None)
    status = "fails" if cq.frontier_exhausted else "unknown"
    return (status, "comp-to-value" if want == VAL else "comp-to-comp")


def fg_check_simulation(
    rel: IndexedRelation,
    labels: Iterable[FgValue],
    fuel: int = kernel.DEFAULT_FUEL,
) -> Verdict:
    """Verify the explicit pairs of a two-sorted relation against the
    applicative-simulation clauses.  An implicit diagonal (DELTA flag) is
    sound on its own: the identity is a simulation for this system."""
    labels = tuple(labels)
    tools = SemTools(sim_semantics(labels), fuel)
    undecided = 0
    for idx in (VAL, COMP):
        for (p, q) in sorted(rel.pairs(idx), key=repr):
            status, clause = _sim_clause_verdict(idx, (p, q), rel, tools, labels)
            if status == "fails":
                return Verdict.fail(Witness(index=idx, pair=(p, q), clause=clause))
            if status == "unknown":
                undecided += 1
    if undecided:
        return Verdict.dunno(f"undecided_pairs={undecided}")
    return Verdict.ok(f"pairs_checked={rel.size()}")


def greatest_simulation(
    universe_values: Iterable[FgValue],
    universe_comps: Iterable[FgComp],
    labels: Iterable[FgValue],
    fuel: int = kernel.DEFAULT_FUEL,
) -> IndexedRelation:
    labels = tuple(labels)
    sem = sim_semantics(labels)

    def clause(idx, pair, rel, tools):
        return _sim_clause_verdict(idx, pair, rel, tools, labels)[0] == "holds"

    return kernel.simulation_fixpoint(
        sem,
        {VAL: tuple(universe_values), COMP: tuple(universe_comps)},
        clause,
        fuel,
    )


def fg_logrel(
    universe_values: Iterable[FgValue],
    universe_comps: Iterable[FgComp],
    labels: Iterable[FgValue],
    depth: int,
    fuel: int = kernel.DEFAULT_FUEL,
) -> list[IndexedRelation]:
    """Step-indexed logical-relation chain, restricted to a universe.

    Levels are computed by the StepIndexed evaluator (which quantifies the
    value clause over ``labels`` and answers queries beyond the universe);
    the returned IndexedRelations are its levels on the given terms.  As in
    the kernel chain, once two consecutive levels agree the rest are
    copies."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    universe_values = tuple(dict.fromkeys(universe_values))
    universe_comps = tuple(dict.fromkeys(universe_comps))
    ev = StepIndexed(labels, fuel)
    chain: list[IndexedRelation] = []
    stable = False
    for n in range(depth + 1):
        if stable:
            chain.append(chain[-1])
            continue
        level = IndexedRelation(
            {
                VAL: {
                    (a, b)
                    for a in universe_values
                    for b in universe_values
                    if ev.rel(n, VAL, a, b)
                },
                COMP: {
                    (a, b)
                    for a in universe_comps
                    for b in universe_comps
                    if ev.rel(n, COMP, a, b)
                },
            },
            diagonal=True,
        )
        if chain and level == chain[-1]:
            stable = True
        chain.append(level)
    return chain


# ---------------------------------------------------------------------------
# universe closure helper


def closure_universe(
    seed_values: Iterable[FgValue],
    seed_comps: Iterable[FgComp],
    labels: Iterable[FgValue],
    apply_rounds: int = 1,
    fuel: int = kernel.DEFAULT_FUEL,
    size_cap: int = 80,
) -> tuple[tuple[FgValue, ...], tuple[FgComp, ...]]:
    """Close seeds under reduction and (a bounded number of rounds of) label
    application; used to build logical-relation universes that contain the
    reducts their own clauses mention."""
    labels = tuple(labels)
    tools = SemTools(sim_semantics(()), fuel)
    values: dict[FgValue, None] = {}
    comps: dict[FgComp, None] = {}

    def add(t: FgTerm) -> None:
        if term_size(t) > size_cap:
            return
        if isinstance(t, FgValue):
            values.setdefault(t, None)
        else:
            comps.setdefault(t, None)

    def close_steps(roots: Iterable[FgTerm]) -> None:
        for r in roots:
            add(r)
            if isinstance(r, FgComp):
                for x in tools.weak_terms(r):
                    add(x)

    close_steps(itertools.chain(seed_values, seed_comps, labels))
    for _ in range(apply_rounds):
        new_comps = [
            fg_apply_label(v, u) for v in tuple(values) for u in labels
        ]
        close_steps(new_comps)
    return tuple(values), tuple(comps)


# ---------------------------------------------------------------------------
# lax-bialgebra desk check


def lax_bialgebra_check(
    universe_comps: Iterable[FgComp],
    fuel: int = kernel.DEFAULT_FUEL,
) -> Verdict:
    """Weak-rule soundness for the three congruence-bearing application
    forms: whenever the operand computation weakly reaches t'/v, the whole
    computation weakly reaches the corresponding recombination.  Rules
    without computation premises ([v], v o w, fix) hold trivially."""
    tools = SemTools(sim_semantics(()), fuel)
    checked = 0
    undecided = 0
    for u in sorted(set(universe_comps), key=repr):
        match u:
            case AppCC(f, s):
                rebuilt = lambda x: AppVC(x, s) if isinstance(x, FgValue) else AppCC(x, s)
                operand = f
            case AppCV(f, v):
                rebuilt = lambda x: AppVV(x, v) if isinstance(x, FgValue) else AppCV(x, v)
                operand = f
            case AppVC(v, s):
                rebuilt = lambda x: AppVV(v, x) if isinstance(x, FgValue) else AppVC(v, x)
                operand = s
            case _:
                continue
        cu = tools.closure(u)
        for x in tools.closure(operand).reachable:
            checked += 1
            want = rebuilt(x)
            if want not in cu.reachable:
                if cu.frontier_exhausted:
                    return Verdict.fail(
                        Witness(index=COMP, pair=(u, want), clause="weak-congruence")
                    )
                undecided += 1
    if undecided:
        return Verdict.dunno(f"undecided={undecided}", f"checked={checked}")
    return Verdict.ok(f"checked={checked}")


# ---------------------------------------------------------------------------
# enumeration


@lru_cache(maxsize=None)
def values_of_size(n: int, with_fix: bool = False) -> tuple[FgValue, ...]:
    if n <= 0:
        return ()
    if n == 1:
        return (VI, VK, VS)
    out: list[FgValue] = []
    for c in comps_of_size(n - 1, with_fix):
        out.append(Kp(c))
        out.append(Sp(c))
    for i in range(1, n - 1):
        for a in comps_of_size(i, with_fix):
            for b in comps_of_size(n - 1 - i, with_fix):
                out.append(Spp(a, b))
    return tuple(out)


@lru_cache(maxsize=None)
def comps_of_size(n: int, with_fix: bool = False) -> tuple[FgComp, ...]:
    if n <= 1:
        return ()
    out: list[FgComp] = []
    for v in values_of_size(n - 1, with_fix):
        out.append(Ret(v))
    if with_fix:
        for c in comps_of_size(n - 1, with_fix):
            out.append(Fix(c))
    for i in range(1, n - 1):
        j = n - 1 - i
        for a in comps_of_size(i, with_fix):
            for b in comps_of_size(j, with_fix):
                out.append(AppCC(a, b))
        for v in values_of_size(i, with_fix):
            for b in comps_of_size(j, with_fix):
                out.append(AppVC(v, b))
        for a in comps_of_size(i, with_fix):
            for w in values_of_size(j, with_fix):
                out.append(AppCV(a, w))
        for v in values_of_size(i, with_fix):
            for w in values_of_size(j, with_fix):
                out.append(AppVV(v, w))
    return tuple(out)


def enumerate_values(max_size: int, with_fix: bool = False) -> Iterator[FgValue]:
    for n in range(1, max_size + 1):
        yield from values_of_size(n, with_fix)


def enumerate_comps(max_size: int, with_fix: bool = False) -> Iterator[FgComp]:
    for n in range(1, max_size + 1):
        yield from comps_of_size(n, with_fix)


def count_terms(max_size: int, with_fix: bool = False) -> tuple[int, int]:
    """(value count, computation count) oracle, independent recursion."""

    @lru_cache(maxsize=None)
    def cv(n: int) -> int:
        if n <= 0:
            return 0
        if n == 1:
            return 3
        unary = 2 * cc(n - 1)
        return unary + sum(cc(i) * cc(n - 1 - i) for i in range(1, n - 1))

    @lru_cache(maxsize=None)
    def cc(n: int) -> int:
        if n <= 1:
            return 0
        total = cv(n - 1)
        if with_fix:
            total += cc(n - 1)
        for i in range(1, n - 1):
            j = n - 1 - i
            total += cc(i) * cc(j) + cv(i) * cc(j) + cc(i) * cv(j) + cv(i) * cv(j)
        return total

    return (
        sum(cv(n) for n in range(1, max_size + 1)),
        sum(cc(n) for n in range(1, max_size + 1)),
    )


# -- one-hole contexts -------------------------------------------------------


@dataclass(frozen=True)
class HoleV(FgValue):
    pass


@dataclass(frozen=True)
class HoleC(FgComp):
    pass


HOLE_V = HoleV()
HOLE_C = HoleC()


def fill(template: FgTerm, t: FgTerm) -> FgTerm:
    match template:
        case HoleV() | HoleC():
            return t
        case VAtom(_):
            return template
        case Kp(a):
            return Kp(fill(a, t))
        case Sp(a):
            return Sp(fill(a, t))
        case Spp(a, b):
            return Spp(fill(a, t), fill(b, t))
        case Ret(a):
            return Ret(fill(a, t))
        case AppCC(a, b):
            return AppCC(fill(a, t), fill(b, t))
        case AppVC(a, b):
            return AppVC(fill(a, t), fill(b, t))
        case AppCV(a, b):
            return AppCV(fill(a, t), fill(b, t))
        case AppVV(a, b):
            return AppVV(fill(a, t), fill(b, t))
        case Fix(a):
            return Fix(fill(a, t))
    raise TypeError(f"not an fgcbv template: {template!r}")


@lru_cache(maxsize=None)
def _ctx_values(n: int, hole: str, with_fix: bool) -> tuple[FgValue, ...]:
    """Value-sorted one-hole context templates of exactly size n."""
    if n <= 0:
        return ()
    if n == 1:
        return (HOLE_V,) if hole == VAL else ()
    out: list[FgValue] = []
    for c in _ctx_comps(n - 1, hole, with_fix):
        out.append(Kp(c))
        out.append(Sp(c))
    for i in range(1, n - 1):
        j = n - 1 - i
        for a in _ctx_comps(i, hole, with_fix):
            for b in comps_of_size(j, with_fix):
                out.append(Spp(a, b))
        for a in comps_of_size(i, with_fix):
            for b in _ctx_comps(j, hole, with_fix):
                out.append(Spp(a, b))
    return tuple(out)


@lru_cache(maxsize=None)
def _ctx_comps(n: int, hole: str, with_fix: bool) -> tuple[FgComp, ...]:
    if n <= 0:
        return ()
    if n == 1:
        return (HOLE_C,) if hole == COMP else ()
    out: list[FgComp] = []
    for v in _ctx_values(n - 1, hole, with_fix):
        out.append(Ret(v))
    if with_fix:
        for c in _ctx_comps(n - 1, hole, with_fix):
            out.append(Fix(c))
    combos = (
        (AppCC, _ctx_comps, comps_of_size, _ctx_comps, comps_of_size),
        (AppVC, _ctx_values, values_of_size, _ctx_comps, comps_of_size),
        (AppCV, _ctx_comps, comps_of_size, _ctx_values, values_of_size),
        (AppVV, _ctx_values, values_of_size, _ctx_values, values_of_size),
    )
    for i in range(1, n - 1):
        j = n - 1 - i
        for op, lctx, lterm, rctx, rterm in combos:
            for a in lctx(i, hole, with_fix):
                for b in rterm(j, with_fix):
                    out.append(op(a, b))
            for a in lterm(i, with_fix):
                for b in rctx(j, hole, with_fix):
                    out.append(op(a, b))
    return tuple(out)


def enumerate_contexts(
    max_size: int, hole_sort: str, with_fix: bool = False
) -> Iterator[Context]:
    """One-hole contexts of both result sorts, hole of the given sort."""
    from .surface import print_fgcbv

    for n in range(1, max_size + 1):
        for template in _ctx_values(n, hole_sort, with_fix) + _ctx_comps(
            n, hole_sort, with_fix
        ):
            yield Context(
                fill=lambda t, template=template: fill(template, t),
                label=print_fgcbv(template),
            )


def context_language(with_fix: bool = False) -> ContextLanguage:
    sem = sim_semantics(())
    return ContextLanguage(
        sem=sem,
        contexts=lambda max_size, idx: enumerate_contexts(max_size, idx, with_fix),
        index_of=sort_of,
    )


def context_oracle(
    p: FgTerm,
    q: FgTerm,
    max_ctx_size: int,
    fuel: int = kernel.DEFAULT_FUEL,
    with_fix: bool = False,
) -> Verdict:
    return kernel.context_oracle(context_language(with_fix), p, q, max_ctx_size, fuel)


# ---------------------------------------------------------------------------
# random terms


def random_value(rng, max_size: int, with_fix: bool = False) -> FgValue:
    if max_size <= 2:
        return rng.choice((VI, VK, VS))
    shape = rng.randrange(4)
    if shape == 0:
        return rng.choice((VI, VK, VS))
    if shape == 1:
        return Kp(random_comp(rng, max_size - 1, with_fix))
    if shape == 2:
        return Sp(random_comp(rng, max_size - 1, with_fix))
    half = max(2, (max_size - 1) // 2)
    return Spp(random_comp(rng, half, with_fix), random_comp(rng, half, with_fix))


def random_comp(rng, max_size: int, with_fix: bool = False) -> FgComp:
    if max_size <= 2:
        return Ret(rng.choice((VI, VK, VS)))
    shape = rng.randrange(6 if with_fix else 5)
    if shape == 0:
        return Ret(random_value(rng, max_size - 1, with_fix))
    if shape == 5:
        return Fix(random_comp(rng, max_size - 1, with_fix))
    half = max(2, (max_size - 1) // 2)
    vhalf = max(1, (max_size - 1) // 2)
    if shape == 1:
        return AppCC(random_comp(rng, half, with_fix), random_comp(rng, half, with_fix))
    if shape == 2:
        return AppVC(random_value(rng, vhalf, with_fix), random_comp(rng, half, with_fix))
    if shape == 3:
        return AppCV(random_comp(rng, half, with_fix), random_value(rng, vhalf, with_fix))
    return AppVV(random_value(rng, vhalf, with_fix), random_value(rng, vhalf, with_fix))

"""CBPV dynamics and equivalence checkers.

Small-step rules over closed-or-open computations, head observations,
weak-simulation and step-indexed logical-relation checking with eleven
clauses, a congruence checker, a second transcription of the substitution
and dynamics tables (rho1/rho2) used as cross-checks, typed one-hole
context enumeration for the contextual-preorder oracle, and tri-state
may-termination.

Reduction never goes under binders, so every redex fired while reducing a
closed term is itself closed.  Open terms are supported too: the handful of
rules that must invent a type annotation (the to/case/pm administrative
redexes) typecheck the relevant subterm, so callers pass the ambient
context when stepping open terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Callable, Iterable, Iterator, Mapping

from . import kernel
from .kernel import (
    DEFAULT_FUEL,
    IndexedRelation,
    SemTools,
    SortMismatchError,
    Verdict,
    Witness,
)
from .cbpv_syntax import (
    AppC,
    Arrow,
    Case,
    CbpvComp,
    CbpvTerm,
    CbpvValue,
    Choice,
    CompType,
    Ctx,
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
    TypePool,
    DEFAULT_POOL,
    Type,
    TyVar,
    UNIT,
    Unit,
    UnfoldC,
    ValType,
    Var,
    enumerate_comps,
    enumerate_values,
    fill,
    identity_subst,
    min_inhabitant,
    rename,
    shift,
    subst_single,
    term_size,
    type_subst,
    typecheck,
    unfold_type,
    _enum_comps_cached,
    _enum_values_cached,
)

SimIndex = tuple  # (Type, Ctx): the (type, context) tag of a relation slot


# ---------------------------------------------------------------------------
# observations


class Observation:
    __slots__ = ()


@dataclass(frozen=True)
class UnitObs(Observation):
    pass


@dataclass(frozen=True)
class SumObs(Observation):
    side: str  # "left" | "right"
    value: CbpvValue


@dataclass(frozen=True)
class ProdValObs(Observation):
    left: CbpvValue
    right: CbpvValue


@dataclass(frozen=True)
class ThunkObs(Observation):
    comp: CbpvComp


@dataclass(frozen=True)
class ProducerObs(Observation):
    value: CbpvValue


@dataclass(frozen=True)
class FunObs(Observation):
    body: CbpvComp  # open in one extra variable
    arg_type: ValType


@dataclass(frozen=True)
class TensorObs(Observation):
    left: CbpvComp
    right: CbpvComp


@dataclass(frozen=True)
class FoldObs(Observation):
    comp: CbpvComp


UNIT_OBS = UnitObs()


def observe(t: CbpvTerm) -> Observation | None:
    """Head observation of a term, or None.

    Every closed value has exactly one observation; a computation has one
    iff its head is lam, prod, pair or fold; variable-headed terms have
    none.
    """
    match t:
        case Star():
            return UNIT_OBS
        case Inl(v, _):
            return SumObs("left", v)
        case Inr(v, _):
            return SumObs("right", v)
        case PairV(a, b):
            return ProdValObs(a, b)
        case ThunkV(c):
            return ThunkObs(c)
        case ProdC(v):
            return ProducerObs(v)
        case Lam(body, phi):
            return FunObs(body, phi)
        case PairC(a, b):
            return TensorObs(a, b)
        case FoldC(c, _):
            return FoldObs(c)
    return None


def observations(t: CbpvTerm) -> tuple:
    o = observe(t)
    return () if o is None else (o,)


def apply_value(t: CbpvComp, v: CbpvValue) -> CbpvComp:
    """The labeled transition of a lambda: its body with v for the binder."""
    if not isinstance(t, Lam):
        raise SortMismatchError(f"apply_value wants a lam head, got {t!r}")
    return subst_single(t.body, v)


def apply_fun_obs(obs: FunObs, v: CbpvValue, ctx: Ctx = ()) -> CbpvComp:
    """Apply a function observation: the body under the identity tuple
    extended with v (same operation as apply_value, routed through the
    tuple-substitution transcription)."""
    return rho1_subst(obs.body, identity_subst(len(ctx)) + (v,))


# ---------------------------------------------------------------------------
# one-step reduction


def _swap01(i: int) -> int:
    return 1 if i == 0 else (0 if i == 1 else i)


def successors_with_rules(
    t: CbpvTerm, ctx: Ctx = (), literal_to: bool = False
) -> tuple:
    """(rule name, reduct) pairs for one step.  Values and terminal heads
    (lam, prod, pair, fold) return ().

    ``literal_to`` switches the to-expression to the one-step-lookahead
    rule: to(s, x.t) fires only when s itself steps to a producer, which
    leaves to(prod(v), x.t) stuck.  The default fires when the source IS a
    producer, plus the usual congruence step.
    """
    match t:
        case Force(ThunkV(c)):
            return (("force-beta", c),)
        case Force(_):
            return ()
        case AppC(Lam(body, _), v):
            return (("app-beta", subst_single(body, v)),)
        case AppC(f, v):
            return tuple(
                ("app-cong", AppC(f2, v))
                for _, f2 in successors_with_rules(f, ctx, literal_to)
            )
        case ToIn(s, b):
            out = []
            if literal_to:
                for _, s2 in successors_with_rules(s, ctx, literal_to):
                    out.append(("to-cong", ToIn(s2, b)))
                    if isinstance(s2, ProdC):
                        phi = typecheck(ctx, s2.value)
                        out.append(("to-beta-lookahead", AppC(Lam(b, phi), s2.value)))
            elif isinstance(s, ProdC):
                phi = typecheck(ctx, s.value)
                out.append(("to-beta", AppC(Lam(b, phi), s.value)))
            else:
                for _, s2 in successors_with_rules(s, ctx, literal_to):
                    out.append(("to-cong", ToIn(s2, b)))
            return tuple(out)
        case Choice(a, b):
            return (("choice-left", a), ("choice-right", b))
        case Case(Inl(v, st), left, _):
            return (("case-left", AppC(Lam(left, st.left), v)),)
        case Case(Inr(v, st), _, right):
            return (("case-right", AppC(Lam(right, st.right), v)),)
        case Case(_, _, _):
            return ()
        case Pm(PairV(v, w), body):
            phi1 = typecheck(ctx, v)
            phi2 = typecheck(ctx, w)
            inner = AppC(Lam(rename(body, _swap01), phi1), shift(v, 1))
            return (("pm-beta", AppC(Lam(inner, phi2), w)),)
        case Pm(_, _):
            return ()
        case Fst(PairC(a, _)):
            return (("fst-beta", a),)
        case Fst(c):
            return tuple(
                ("fst-cong", Fst(c2))
                for _, c2 in successors_with_rules(c, ctx, literal_to)
            )
        case Snd(PairC(_, b)):
            return (("snd-beta", b),)
        case Snd(c):
            return tuple(
                ("snd-cong", Snd(c2))
                for _, c2 in successors_with_rules(c, ctx, literal_to)
            )
        case UnfoldC(FoldC(c, _)):
            return (("unfold-beta", c),)
        case UnfoldC(c):
            return tuple(
                ("unfold-cong", UnfoldC(c2))
                for _, c2 in successors_with_rules(c, ctx, literal_to)
            )
    return ()


@lru_cache(maxsize=None)
def successors(t: CbpvTerm, ctx: Ctx = (), literal_to: bool = False) -> tuple:
    """One-step reducts.  Binary choice contributes both branches, in order,
    without deduplication."""
    return tuple(t2 for _, t2 in successors_with_rules(t, ctx, literal_to))


@dataclass(frozen=True)
class CbpvStep:
    """Flattened one-step behaviour: reducts plus the optional head
    observation."""

    successors: tuple
    observation: Observation | None


def trace_records(
    t: CbpvComp, fuel: int = DEFAULT_FUEL, literal_to: bool = False
) -> tuple:
    """A deterministic run: (rule, term) records, following the first listed
    reduct at every step (choice takes its left branch).  Stops at a terminal,
    on a revisited term, or when fuel runs out."""
    records = []
    seen = {t}
    cur = t
    for _ in range(fuel):
        steps = successors_with_rules(cur, (), literal_to)
        if not steps:
            break
        rule, cur = steps[0]
        records.append((rule, cur))
        if cur in seen:
            break
        seen.add(cur)
    return tuple(records)


def step_semantics(literal_to: bool = False) -> kernel.SemanticsInterface:
    """Closed-term semantics adapter for the kernel drivers."""
    return kernel.SemanticsInterface(
        successors=lambda t: successors(t, (), literal_to),
        observe=observations,
        obs_match=lambda idx, o1, o2, query: o1 == o2,
        index_of=lambda t: (typecheck((), t), ()),
    )


def may_terminates(
    t: CbpvComp, fuel: int = DEFAULT_FUEL, literal_to: bool = False
) -> kernel.MayTerminate:
    """Tri-state may-termination of a closed computation: Yes with a normal
    form, No when the whole reachable region was explored without one (every
    path loops), Unknown on fuel exhaustion."""
    tools = SemTools(step_semantics(literal_to), fuel)
    return kernel.may_terminate(tools, t)


@lru_cache(maxsize=None)
def _weak_reach(
    t: CbpvComp, ctx: Ctx, fuel: int, literal_to: bool
) -> tuple[frozenset, bool]:
    """Weakly reachable terms of t and whether the frontier was exhausted."""
    seen = {t}
    frontier = [t]
    depth = 0
    while frontier and depth < fuel:
        nxt = []
        for u in frontier:
            for v in successors(u, ctx, literal_to):
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
        depth += 1
    exhausted = all(
        v in seen for u in frontier for v in successors(u, ctx, literal_to)
    )
    return frozenset(seen), exhausted


# ---------------------------------------------------------------------------
# the eleven simulation / logical-relation clauses

_CLAUSES = {
    1: "clause 1 (substitution)",
    2: "clause 2 (reduction)",
    3: "clause 3 (star)",
    4: "clause 4 (thunk)",
    5: "clause 5 (inl)",
    6: "clause 6 (inr)",
    7: "clause 7 (value pair)",
    8: "clause 8 (computation pair)",
    9: "clause 9 (fold)",
    10: "clause 10 (lam)",
    11: "clause 11 (prod)",
}


def _candidates(phi: ValType, ctx: Ctx, pool_values: tuple) -> tuple:
    """Closed pool values of type phi plus the ctx variables of that type."""
    vars_here = tuple(Var(i) for i, ty in enumerate(reversed(ctx)) if ty == phi)
    return vars_here + pool_values


def _clause_verdict(
    idx: SimIndex,
    pair: tuple,
    rel: IndexedRelation,
    *,
    mode: str,  # "sim" | "logrel"
    pool_of: Callable[[ValType], tuple],
    fuel: int,
    testing_weakening: bool,
    literal_to: bool,
) -> tuple[str, str | None]:
    """Check one related pair against all clauses.

    Returns ("holds", None) or (status, clause label) where status is
    "fails" for a definite violation and "unknown" when the only obstacle
    was an unexhausted weak closure.
    """
    tau, ctx = idx
    t, s = pair

    # 1: closure under substitutions (into the empty context)
    if ctx:
        slots = [pool_of(phi) for phi in ctx]
        if all(slots):
            if mode == "sim":
                for combo in product(*slots):
                    if not rel.has(
                        (tau, ()), rho1_or_subst(t, combo), rho1_or_subst(s, combo)
                    ):
                        return "fails", _CLAUSES[1]
            else:
                rel_slots = []
                for phi, pool in zip(ctx, slots):
                    rel_slots.append(
                        tuple(
                            (v, w)
                            for v in pool
                            for w in pool
                            if rel.has((phi, ()), v, w)
                        )
                    )
                for combo in product(*rel_slots):
                    vs = tuple(p[0] for p in combo)
                    ws = tuple(p[1] for p in combo)
                    if not rel.has(
                        (tau, ()), rho1_or_subst(t, vs), rho1_or_subst(s, ws)
                    ):
                        return "fails", _CLAUSES[1]

    # 2: reduction matching, left-to-right Egli-Milner
    if isinstance(tau, CompType):
        succ_t = successors(t, ctx, literal_to)
        if succ_t:
            reach, exhausted = _weak_reach(s, ctx, fuel, literal_to)
            for t2 in succ_t:
                if not any(rel.has(idx, t2, s2) for s2 in reach):
                    return ("fails" if exhausted else "unknown"), _CLAUSES[2]

    # 3-7: value heads, matched immediately
    match t:
        case Star():
            if s != t:
                return "fails", _CLAUSES[3]
        case ThunkV(t1):
            kappa = tau.comp
            rhs = []
            if isinstance(s, ThunkV):
                rhs.append(s.comp)
            if testing_weakening:
                rhs.append(Force(s))
            if not any(rel.has((kappa, ctx), t1, c) for c in rhs):
                return "fails", _CLAUSES[4]
        case Inl(v, st):
            if not (
                isinstance(s, Inl)
                and s.sum_type == st
                and rel.has((st.left, ctx), v, s.value)
            ):
                return "fails", _CLAUSES[5]
        case Inr(v, st):
            if not (
                isinstance(s, Inr)
                and s.sum_type == st
                and rel.has((st.right, ctx), v, s.value)
            ):
                return "fails", _CLAUSES[6]
        case PairV(v1, v2):
            if not (
                isinstance(s, PairV)
                and rel.has((tau.left, ctx), v1, s.left)
                and rel.has((tau.right, ctx), v2, s.right)
            ):
                return "fails", _CLAUSES[7]

    # 8-11: terminal computation heads, matched weakly
    head_clause = None
    match t:
        case PairC(_, _):
            head_clause = 8
        case FoldC(_, _):
            head_clause = 9
        case Lam(_, _):
            head_clause = 10
        case ProdC(_):
            head_clause = 11
    if head_clause is not None:
        reach, exhausted = _weak_reach(s, ctx, fuel, literal_to)
        matched = False
        for s2 in reach:
            if type(s2) is not type(t):
                continue
            if head_clause == 8:
                if rel.has((tau.left, ctx), t.left, s2.left) and rel.has(
                    (tau.right, ctx), t.right, s2.right
                ):
                    matched = True
            elif head_clause == 9:
                if s2.mu_body == t.mu_body and rel.has(
                    (unfold_type(tau), ctx), t.comp, s2.comp
                ):
                    matched = True
            elif head_clause == 10:
                if s2.arg_type == t.arg_type:
                    phi, kappa = tau.arg, tau.result
                    cands = _candidates(phi, ctx, pool_of(phi))
                    if mode == "sim":
                        matched = all(
                            rel.has(
                                (kappa, ctx),
                                subst_single(t.body, v),
                                subst_single(s2.body, v),
                            )
                            for v in cands
                        )
                    else:
                        matched = all(
                            rel.has(
                                (kappa, ctx),
                                subst_single(t.body, v),
                                subst_single(s2.body, w),
                            )
                            for v in cands
                            for w in cands
                            if rel.has((phi, ctx), v, w)
                        )
            else:
                if rel.has((tau.value, ctx), t.value, s2.value):
                    matched = True
            if matched:
                break
        if not matched:
            return ("fails" if exhausted else "unknown"), _CLAUSES[head_clause]

    return "holds", None


def rho1_or_subst(t: CbpvTerm, us: tuple) -> CbpvTerm:
    """Substitution entry point used by the clause checks; the table
    transcription and the primary definition agree (tested), so this simply
    routes to the table one for closed tuples."""
    return rho1_subst(t, us)


def _pool_fn(value_size: int, pool: TypePool) -> Callable[[ValType], tuple]:
    @lru_cache(maxsize=None)
    def pool_of(phi: ValType) -> tuple:
        return tuple(enumerate_values(phi, value_size, (), pool))

    return pool_of


def _validate_indexed(rel: IndexedRelation) -> None:
    for idx, pairs in rel.items():
        if not (isinstance(idx, tuple) and len(idx) == 2 and isinstance(idx[1], tuple)):
            raise SortMismatchError(f"relation index {idx!r} is not (type, context)")
        tau, ctx = idx
        for (a, b) in pairs:
            for side, term in (("left", a), ("right", b)):
                got = typecheck(ctx, term)
                if got != tau:
                    raise SortMismatchError(
                        f"{side} term of pair at {idx!r} has type {got!r}"
                    )


def check_weak_simulation(
    rel: IndexedRelation,
    subst_value_size: int = 2,
    fuel: int = DEFAULT_FUEL,
    testing_weakening: bool = False,
    literal_to: bool = False,
    pool: TypePool = DEFAULT_POOL,
) -> Verdict:
    """Is the given (type, context)-indexed relation a weak simulation?

    All eleven clauses are verified for every explicit pair.  Substitutions
    and lam-clause arguments are drawn from the closed values of size up to
    ``subst_value_size`` (plus context variables for the lam clause).
    Ill-typed pairs raise; fuel exhaustion during a weak closure downgrades
    a failing clause to Unknown.
    """
    _validate_indexed(rel)
    pool_of = _pool_fn(subst_value_size, pool)
    unknowns = []
    checked = 0
    for idx in sorted(rel.indices(), key=repr):
        for pair in sorted(rel.pairs(idx), key=repr):
            checked += 1
            status, clause = _clause_verdict(
                idx,
                pair,
                rel,
                mode="sim",
                pool_of=pool_of,
                fuel=fuel,
                testing_weakening=testing_weakening,
                literal_to=literal_to,
            )
            if status == "fails":
                return Verdict.fail(
                    Witness(index=idx, pair=pair, clause=clause),
                    f"pairs_checked={checked}",
                )
            if status == "unknown":
                unknowns.append((idx, pair, clause))
    if unknowns:
        idx, pair, clause = unknowns[0]
        return Verdict.dunno(
            f"pairs_checked={checked}",
            f"first_unknown={clause} at index={idx!r} pair={pair!r}",
        )
    return Verdict.ok(f"pairs_checked={checked}")


def greatest_weak_simulation(
    universe: Mapping[SimIndex, Iterable[CbpvTerm]],
    subst_value_size: int = 2,
    fuel: int = DEFAULT_FUEL,
    testing_weakening: bool = False,
    literal_to: bool = False,
    pool: TypePool = DEFAULT_POOL,
) -> IndexedRelation:
    """Largest weak simulation within universe x universe (pairs whose
    clauses cannot be settled within fuel are dropped)."""
    pool_of = _pool_fn(subst_value_size, pool)

    def clause(idx, pair, rel, tools) -> bool:
        status, _ = _clause_verdict(
            idx,
            pair,
            rel,
            mode="sim",
            pool_of=pool_of,
            fuel=fuel,
            testing_weakening=testing_weakening,
            literal_to=literal_to,
        )
        return status == "holds"

    return kernel.simulation_fixpoint(
        step_semantics(literal_to), universe, clause, fuel=fuel
    )


def logrel_cbpv(
    universe: Mapping[SimIndex, Iterable[CbpvTerm]],
    depth: int,
    fuel: int = DEFAULT_FUEL,
    subst_value_size: int = 2,
    testing_weakening: bool = False,
    literal_to: bool = False,
    pool: TypePool = DEFAULT_POOL,
) -> list[IndexedRelation]:
    """Step-indexed chain L^0 >= L^1 >= ... >= L^depth over the universe.

    L^0 is the full relation per index; level n+1 keeps the pairs whose
    clauses hold against level n, with the function clause quantifying over
    related argument pairs and the substitution clause over pairs of
    pointwise-related tuples.  Membership of out-of-universe pairs falls
    back to structural equality (the relation is reflexive).
    """
    pool_of = _pool_fn(subst_value_size, pool)

    def clause(idx, pair, rel, tools) -> bool:
        status, _ = _clause_verdict(
            idx,
            pair,
            rel,
            mode="logrel",
            pool_of=pool_of,
            fuel=fuel,
            testing_weakening=testing_weakening,
            literal_to=literal_to,
        )
        return status == "holds"

    return kernel.stepindex_chain(
        step_semantics(literal_to), universe, depth, fuel=fuel, clause=clause
    )


def closure_universe(
    seeds: Iterable[tuple[SimIndex, CbpvTerm]],
    rounds: int = 2,
    fuel: int = 64,
    size_cap: int = 120,
    pool: TypePool = DEFAULT_POOL,
    subst_value_size: int = 0,
) -> dict:
    """Universe builder: close seed terms under reduction, head-observation
    payloads and (for open seeds) closed substitution instances.

    Returns a dict mapping (type, context) to a sorted tuple of terms.  A
    size cap keeps runaway reducts out; this is a working universe for the
    desk checkers, not a complete one.
    """
    pool_of = _pool_fn(subst_value_size, pool) if subst_value_size else None
    universe: dict = {}
    frontier = list(seeds)
    for (idx, t) in frontier:
        universe.setdefault(idx, set()).add(t)

    for _ in range(rounds):
        new: list = []
        for idx, t in frontier:
            tau, ctx = idx
            if isinstance(tau, CompType):
                reach, _ = _weak_reach(t, ctx, fuel, False)
                for r in reach:
                    if term_size(r) <= size_cap:
                        new.append((idx, r))
            match t:
                case ThunkV(c):
                    new.append(((tau.comp, ctx), c))
                case ProdC(v):
                    new.append(((tau.value, ctx), v))
                case Inl(v, st):
                    new.append(((st.left, ctx), v))
                case Inr(v, st):
                    new.append(((st.right, ctx), v))
                case PairV(a, b):
                    new.append(((tau.left, ctx), a))
                    new.append(((tau.right, ctx), b))
                case PairC(a, b):
                    new.append(((tau.left, ctx), a))
                    new.append(((tau.right, ctx), b))
                case FoldC(c, _):
                    new.append(((unfold_type(tau), ctx), c))
            if ctx and pool_of is not None:
                slots = [pool_of(phi) for phi in ctx]
                if all(slots):
                    for combo in product(*slots):
                        inst = rho1_subst(t, combo)
                        if term_size(inst) <= size_cap:
                            new.append(((tau, ()), inst))
        frontier = []
        for idx, t in new:
            bucket = universe.setdefault(idx, set())
            if t not in bucket:
                bucket.add(t)
                frontier.append((idx, t))
        if not frontier:
            break
    return {idx: tuple(sorted(ts, key=repr)) for idx, ts in universe.items()}


# ---------------------------------------------------------------------------
# congruence checking


def _operand_obligations(idx: SimIndex, a: CbpvTerm, b: CbpvTerm):
    """Same-head decomposition: the operand pairs (with indices) whose
    relatedness obliges relatedness of (a, b).  None when the heads or
    annotations differ (not an instance of one operator)."""
    tau, ctx = idx
    match a, b:
        case (Star(), Star()):
            return []
        case (Var(i), Var(j)):
            return [] if i == j else None
        case (Inl(v1, st1), Inl(v2, st2)):
            return [((st1.left, ctx), v1, v2)] if st1 == st2 else None
        case (Inr(v1, st1), Inr(v2, st2)):
            return [((st1.right, ctx), v1, v2)] if st1 == st2 else None
        case (PairV(x1, y1), PairV(x2, y2)):
            return [((tau.left, ctx), x1, x2), ((tau.right, ctx), y1, y2)]
        case (ThunkV(c1), ThunkV(c2)):
            return [((tau.comp, ctx), c1, c2)]
        case (ProdC(v1), ProdC(v2)):
            return [((tau.value, ctx), v1, v2)]
        case (Force(v1), Force(v2)):
            return [((Thunk(tau), ctx), v1, v2)]
        case (Lam(m1, p1), Lam(m2, p2)):
            return [((tau.result, ctx + (p1,)), m1, m2)] if p1 == p2 else None
        case (AppC(f1, v1), AppC(f2, v2)):
            k1 = typecheck(ctx, f1)
            k2 = typecheck(ctx, f2)
            if k1 != k2:
                return None
            return [((k1, ctx), f1, f2), ((k1.arg, ctx), v1, v2)]
        case (ToIn(s1, b1), ToIn(s2, b2)):
            k1 = typecheck(ctx, s1)
            k2 = typecheck(ctx, s2)
            if k1 != k2:
                return None
            return [((k1, ctx), s1, s2), ((tau, ctx + (k1.value,)), b1, b2)]
        case (Choice(x1, y1), Choice(x2, y2)):
            return [((tau, ctx), x1, x2), ((tau, ctx), y1, y2)]
        case (Case(v1, l1, r1), Case(v2, l2, r2)):
            s1 = typecheck(ctx, v1)
            s2 = typecheck(ctx, v2)
            if s1 != s2:
                return None
            return [
                ((s1, ctx), v1, v2),
                ((tau, ctx + (s1.left,)), l1, l2),
                ((tau, ctx + (s1.right,)), r1, r2),
            ]
        case (Pm(v1, b1), Pm(v2, b2)):
            s1 = typecheck(ctx, v1)
            s2 = typecheck(ctx, v2)
            if s1 != s2:
                return None
            return [
                ((s1, ctx), v1, v2),
                ((tau, ctx + (s1.left, s1.right)), b1, b2),
            ]
        case (Fst(c1), Fst(c2)):
            k1 = typecheck(ctx, c1)
            k2 = typecheck(ctx, c2)
            return [((k1, ctx), c1, c2)] if k1 == k2 else None
        case (Snd(c1), Snd(c2)):
            k1 = typecheck(ctx, c1)
            k2 = typecheck(ctx, c2)
            return [((k1, ctx), c1, c2)] if k1 == k2 else None
        case (PairC(x1, y1), PairC(x2, y2)):
            return [((tau.left, ctx), x1, x2), ((tau.right, ctx), y1, y2)]
        case (FoldC(c1, m1), FoldC(c2, m2)):
            return [((unfold_type(tau), ctx), c1, c2)] if m1 == m2 else None
        case (UnfoldC(c1), UnfoldC(c2)):
            k1 = typecheck(ctx, c1)
            k2 = typecheck(ctx, c2)
            return [((k1, ctx), c1, c2)] if k1 == k2 else None
    return None


_HEAD_NAMES = {
    Star: "star",
    Var: "var",
    Inl: "inl",
    Inr: "inr",
    PairV: "pair-value",
    ThunkV: "thunk",
    ProdC: "prod",
    Force: "force",
    Lam: "lam",
    AppC: "app",
    ToIn: "to",
    Choice: "choice",
    Case: "case",
    Pm: "pm",
    Fst: "fst",
    Snd: "snd",
    PairC: "pair-comp",
    FoldC: "fold",
    UnfoldC: "unfold",
}


def congruence_check(
    rel: IndexedRelation,
    universe: Mapping[SimIndex, Iterable[CbpvTerm]],
    arity_bound: int | None = None,
) -> Verdict:
    """Is the relation a congruence on the given universe?

    For every two same-index universe terms built by the same operator
    (same annotations), if all operand pairs are related then the combined
    pair must be related too.  Instances whose results leave the universe
    are out of scope by construction.  ``arity_bound`` caps the number of
    instances examined per operator and index (deterministic order).
    """
    checked = 0
    for idx in sorted(universe, key=repr):
        terms = sorted(set(universe[idx]), key=repr)
        by_head: dict = {}
        for t in terms:
            by_head.setdefault(type(t), []).append(t)
        for head, group in sorted(by_head.items(), key=lambda kv: kv[0].__name__):
            seen = 0
            for a in group:
                for b in group:
                    if arity_bound is not None and seen >= arity_bound:
                        break
                    obligations = _operand_obligations(idx, a, b)
                    if obligations is None:
                        continue
                    seen += 1
                    checked += 1
                    if all(rel.has(i, x, y) for i, x, y in obligations):
                        if not rel.has(idx, a, b):
                            return Verdict.fail(
                                Witness(
                                    index=idx,
                                    pair=(a, b),
                                    clause=_HEAD_NAMES[head],
                                    detail="operands related, combination missing",
                                ),
                                f"instances_checked={checked}",
                            )
    return Verdict.ok(f"instances_checked={checked}")


# ---------------------------------------------------------------------------
# second transcriptions: tuple substitution and one-step behaviour tables


def _up_tuple(us: tuple, by: int) -> tuple:
    """Weaken every tuple entry under ``by`` fresh binders and append the
    fresh variables, innermost last."""
    return tuple(shift(u, by) for u in us) + tuple(Var(by - 1 - k) for k in range(by))


def rho1_subst(t: CbpvTerm, us: tuple) -> CbpvTerm:
    """Clause-table transcription of simultaneous substitution.

    Agrees with ``subst_sim`` (tested on random well-typed inputs); binders
    extend the tuple with the freshly bound variable.
    """
    us = tuple(us)
    match t:
        case Var(i):
            return us[len(us) - 1 - i]
        case Star():
            return t
        case AppC(f, g):
            return AppC(rho1_subst(f, us), rho1_subst(g, us))
        case Choice(f, g):
            return Choice(rho1_subst(f, us), rho1_subst(g, us))
        case Force(f):
            return Force(rho1_subst(f, us))
        case ThunkV(f):
            return ThunkV(rho1_subst(f, us))
        case ProdC(f):
            return ProdC(rho1_subst(f, us))
        case Inl(f, st):
            return Inl(rho1_subst(f, us), st)
        case Inr(f, st):
            return Inr(rho1_subst(f, us), st)
        case PairV(f, g):
            return PairV(rho1_subst(f, us), rho1_subst(g, us))
        case PairC(f, g):
            return PairC(rho1_subst(f, us), rho1_subst(g, us))
        case Fst(f):
            return Fst(rho1_subst(f, us))
        case Snd(f):
            return Snd(rho1_subst(f, us))
        case FoldC(f, body):
            return FoldC(rho1_subst(f, us), body)
        case UnfoldC(f):
            return UnfoldC(rho1_subst(f, us))
        case Lam(f, phi):
            return Lam(rho1_subst(f, _up_tuple(us, 1)), phi)
        case ToIn(g, f):
            return ToIn(rho1_subst(g, us), rho1_subst(f, _up_tuple(us, 1)))
        case Case(f, g, h):
            ext = _up_tuple(us, 1)
            return Case(rho1_subst(f, us), rho1_subst(g, ext), rho1_subst(h, ext))
        case Pm(f, g):
            return Pm(rho1_subst(f, us), rho1_subst(g, _up_tuple(us, 2)))
    raise TypeError(f"not a cbpv term: {t!r}")


def _behaviours(t: CbpvTerm, ctx: Ctx) -> tuple:
    """Strong one-step behaviours of an operand: tagged reducts and the
    optional head observation."""
    items: list = [("r", t2) for t2 in successors(t, ctx)]
    o = observe(t)
    if o is not None:
        items.append(("o", o))
    return tuple(items)


def rho2_step(t: CbpvTerm, ctx: Ctx = ()) -> CbpvStep:
    """One-step behaviour computed by transcribing the per-operator clause
    table over the operands' own behaviours.

    The unfold clause consumes only the operand's fold observation, so
    congruence steps under unfold are deliberately absent here; the
    agreement checker flags exactly those edges.
    """
    succ: list = []
    obs: Observation | None = None
    match t:
        case Var(_):
            pass
        case Star():
            obs = UNIT_OBS
        case Inl(v, _):
            obs = SumObs("left", v)
        case Inr(v, _):
            obs = SumObs("right", v)
        case ThunkV(c):
            obs = ThunkObs(c)
        case PairV(v, w):
            obs = ProdValObs(v, w)
        case FoldC(c, _):
            obs = FoldObs(c)
        case UnfoldC(c):
            for tag, item in _behaviours(c, ctx):
                if tag == "o" and isinstance(item, FoldObs):
                    succ.append(item.comp)
        case Lam(body, phi):
            obs = FunObs(body, phi)
        case Choice(a, b):
            succ.extend((a, b))
        case Case(scrut, left, right):
            for tag, item in _behaviours(scrut, ctx):
                if tag == "o" and isinstance(item, SumObs):
                    st = scrut.sum_type
                    if item.side == "left":
                        succ.append(AppC(Lam(left, st.left), item.value))
                    else:
                        succ.append(AppC(Lam(right, st.right), item.value))
        case Fst(c):
            for tag, item in _behaviours(c, ctx):
                if tag == "r":
                    succ.append(Fst(item))
                elif isinstance(item, TensorObs):
                    succ.append(item.left)
        case Snd(c):
            for tag, item in _behaviours(c, ctx):
                if tag == "r":
                    succ.append(Snd(item))
                elif isinstance(item, TensorObs):
                    succ.append(item.right)
        case PairC(a, b):
            obs = TensorObs(a, b)
        case AppC(f, v):
            for tag, item in _behaviours(f, ctx):
                if tag == "r":
                    succ.append(AppC(item, v))
                elif isinstance(item, FunObs):
                    succ.append(apply_fun_obs(item, v, ctx))
        case ToIn(s, body):
            for tag, item in _behaviours(s, ctx):
                if tag == "r":
                    succ.append(ToIn(item, body))
                elif isinstance(item, ProducerObs):
                    phi = typecheck(ctx, item.value)
                    succ.append(AppC(Lam(body, phi), item.value))
        case Force(v):
            for tag, item in _behaviours(v, ctx):
                if tag == "o" and isinstance(item, ThunkObs):
                    succ.append(item.comp)
        case ProdC(v):
            obs = ProducerObs(v)
        case Pm(scrut, body):
            for tag, item in _behaviours(scrut, ctx):
                if tag == "o" and isinstance(item, ProdValObs):
                    phi1 = typecheck(ctx, item.left)
                    phi2 = typecheck(ctx, item.right)
                    inner = AppC(
                        Lam(rename(body, _swap01), phi1), shift(item.left, 1)
                    )
                    succ.append(AppC(Lam(inner, phi2), item.right))
        case _:
            raise TypeError(f"not a cbpv term: {t!r}")
    return CbpvStep(tuple(succ), obs)


@dataclass(frozen=True)
class Rho2Agreement:
    """Comparison of the clause-table behaviour against the rule engine.
    ``flagged`` holds the expected unfold-congruence edges the table lacks;
    anything in ``unexplained`` is a real disagreement."""

    agrees: bool
    flagged: tuple
    unexplained: tuple
    observation_match: bool


def rho2_agreement(t: CbpvTerm, ctx: Ctx = ()) -> Rho2Agreement:
    step = rho2_step(t, ctx)
    direct = set(successors(t, ctx))
    table = set(step.successors)
    obs_ok = step.observation == observe(t)
    missing = direct - table
    extra = table - direct
    flagged = []
    unexplained = list(extra)
    if isinstance(t, UnfoldC):
        cong = {UnfoldC(c2) for c2 in successors(t.comp, ctx)}
        for edge in sorted(missing, key=repr):
            (flagged if edge in cong else unexplained).append(edge)
    else:
        unexplained.extend(missing)
    agrees = obs_ok and not unexplained
    return Rho2Agreement(
        agrees, tuple(sorted(flagged, key=repr)),
        tuple(sorted(unexplained, key=repr)), obs_ok,
    )


# ---------------------------------------------------------------------------
# lax bialgebra desk check: weak versions of the premise-bearing rules


def lax_check(
    universe: Mapping[SimIndex, Iterable[CbpvTerm]],
    fuel: int = DEFAULT_FUEL,
    pool: TypePool = DEFAULT_POOL,
) -> Verdict:
    """Weak-rule soundness for the operators with premises.

    For closed operands drawn from the universe, checks that each rule
    stays valid when its premise and conclusion transitions are replaced by
    weak ones, e.g. c => pair(a, b) implies fst(c) => a.
    """
    checked = 0

    def reach(u: CbpvComp) -> frozenset:
        return _weak_reach(u, (), fuel, False)[0]

    for idx in sorted(universe, key=repr):
        tau, ctx = idx
        if ctx or not isinstance(tau, CompType):
            continue
        for t in sorted(set(universe[idx]), key=repr):
            r_t = reach(t)
            cases: list[tuple[str, CbpvComp, list]] = []
            if isinstance(tau, Tensor):
                want = [(u2, Fst(u2)) for u2 in r_t]
                beta = [(u2.left,) for u2 in r_t if isinstance(u2, PairC)]
                cases.append(("fst-weak-cong", Fst(t), [Fst(u2) for u2 in r_t]))
                cases.append(("fst-weak-beta", Fst(t), [b[0] for b in beta]))
                cases.append(("snd-weak-cong", Snd(t), [Snd(u2) for u2 in r_t]))
                cases.append(
                    ("snd-weak-beta", Snd(t),
                     [u2.right for u2 in r_t if isinstance(u2, PairC)])
                )
            elif isinstance(tau, Arrow):
                v = min_inhabitant(tau.arg)
                if v is not None:
                    app = AppC(t, v)
                    cases.append(("app-weak-cong", app, [AppC(u2, v) for u2 in r_t]))
                    cases.append(
                        ("app-weak-beta", app,
                         [subst_single(u2.body, v) for u2 in r_t
                          if isinstance(u2, Lam)])
                    )
            elif isinstance(tau, F):
                body = ProdC(Var(0))
                to = ToIn(t, body)
                cases.append(("to-weak-cong", to, [ToIn(u2, body) for u2 in r_t]))
                cases.append(
                    ("to-weak-beta", to,
                     [AppC(Lam(body, typecheck((), u2.value)), u2.value)
                      for u2 in r_t if isinstance(u2, ProdC)])
                )
            elif isinstance(tau, Mu):
                unf = UnfoldC(t)
                cases.append(
                    ("unfold-weak-cong", unf, [UnfoldC(u2) for u2 in r_t])
                )
                cases.append(
                    ("unfold-weak-beta", unf,
                     [u2.comp for u2 in r_t if isinstance(u2, FoldC)])
                )
            for rule, composite, wanted in cases:
                if not wanted:
                    continue
                r_comp = reach(composite)
                checked += 1
                for target in wanted:
                    if target not in r_comp:
                        return Verdict.fail(
                            Witness(
                                index=idx,
                                pair=(composite, target),
                                clause=rule,
                                detail="weak conclusion unreachable",
                            ),
                            f"rules_checked={checked}",
                        )
    return Verdict.ok(f"rules_checked={checked}")


# ---------------------------------------------------------------------------
# typed one-hole contexts


def _suffix_of(ctx: Ctx, hole_ctx: Ctx) -> bool:
    n = len(hole_ctx)
    return n == 0 or ctx[len(ctx) - n :] == hole_ctx


@lru_cache(maxsize=None)
def _ctx_v(phi, ctx, n, hole, pool) -> tuple:
    """Value templates of type phi with exactly one hole; ``hole`` is the
    (hole type, hole context) pair."""
    if n <= 0:
        return ()
    hole_type, hole_ctx = hole
    out: list = []
    if n == 1 and isinstance(hole_type, ValType) and phi == hole_type and _suffix_of(ctx, hole_ctx):
        out.append(HoleV())
    match phi:
        case SumT(a, b):
            for tpl in _ctx_v(a, ctx, n - 1, hole, pool):
                out.append(Inl(tpl, phi))
            for tpl in _ctx_v(b, ctx, n - 1, hole, pool):
                out.append(Inr(tpl, phi))
        case ProdT(a, b):
            for i in range(1, n - 1):
                for tpl in _ctx_v(a, ctx, i, hole, pool):
                    for w in _enum_values_cached(b, ctx, n - 1 - i, pool, False):
                        out.append(PairV(tpl, w))
                for v in _enum_values_cached(a, ctx, i, pool, False):
                    for tpl in _ctx_v(b, ctx, n - 1 - i, hole, pool):
                        out.append(PairV(v, tpl))
        case Thunk(k):
            for tpl in _ctx_c(k, ctx, n - 1, hole, pool):
                out.append(ThunkV(tpl))
    return tuple(out)


@lru_cache(maxsize=None)
def _ctx_c(kappa, ctx, n, hole, pool) -> tuple:
    """Computation templates of type kappa with exactly one hole."""
    if n <= 0:
        return ()
    hole_type, hole_ctx = hole
    out: list = []
    if (
        n == 1
        and isinstance(hole_type, CompType)
        and kappa == hole_type
        and _suffix_of(ctx, hole_ctx)
    ):
        out.append(HoleC())
    match kappa:
        case F(phi):
            for tpl in _ctx_v(phi, ctx, n - 1, hole, pool):
                out.append(ProdC(tpl))
        case Arrow(phi, k):
            for tpl in _ctx_c(k, ctx + (phi,), n - 1, hole, pool):
                out.append(Lam(tpl, phi))
        case Tensor(k1, k2):
            for i in range(1, n - 1):
                for tpl in _ctx_c(k1, ctx, i, hole, pool):
                    for s in _enum_comps_cached(k2, ctx, n - 1 - i, pool, True):
                        out.append(PairC(tpl, s))
                for s in _enum_comps_cached(k1, ctx, i, pool, True):
                    for tpl in _ctx_c(k2, ctx, n - 1 - i, hole, pool):
                        out.append(PairC(s, tpl))
        case Mu(body):
            unf = type_subst(body, body)
            for tpl in _ctx_c(unf, ctx, n - 1, hole, pool):
                out.append(FoldC(tpl, body))
    for i in range(1, n):
        for tpl in _ctx_c(kappa, ctx, i, hole, pool):
            for s in _enum_comps_cached(kappa, ctx, n - 1 - i, pool, True):
                out.append(Choice(tpl, s))
        for s in _enum_comps_cached(kappa, ctx, i, pool, True):
            for tpl in _ctx_c(kappa, ctx, n - 1 - i, hole, pool):
                out.append(Choice(s, tpl))
    for tpl in _ctx_v(Thunk(kappa), ctx, n - 1, hole, pool):
        out.append(Force(tpl))
    for phi in pool.values:
        for i in range(1, n - 1):
            for tpl in _ctx_c(Arrow(phi, kappa), ctx, i, hole, pool):
                for v in _enum_values_cached(phi, ctx, n - 1 - i, pool, False):
                    out.append(AppC(tpl, v))
            for f in _enum_comps_cached(Arrow(phi, kappa), ctx, i, pool, True):
                for tpl in _ctx_v(phi, ctx, n - 1 - i, hole, pool):
                    out.append(AppC(f, tpl))
            for tpl in _ctx_c(F(phi), ctx, i, hole, pool):
                for b in _enum_comps_cached(kappa, ctx + (phi,), n - 1 - i, pool, True):
                    out.append(ToIn(tpl, b))
            for s in _enum_comps_cached(F(phi), ctx, i, pool, True):
                for tpl in _ctx_c(kappa, ctx + (phi,), n - 1 - i, hole, pool):
                    out.append(ToIn(s, tpl))
    for k2 in pool.comps:
        for tpl in _ctx_c(Tensor(kappa, k2), ctx, n - 1, hole, pool):
            out.append(Fst(tpl))
        for tpl in _ctx_c(Tensor(k2, kappa), ctx, n - 1, hole, pool):
            out.append(Snd(tpl))
    for phi in pool.values:
        if isinstance(phi, SumT):
            for i in range(1, n - 2):
                for j in range(1, n - 1 - i):
                    k_ = n - 1 - i - j
                    for tpl in _ctx_v(phi, ctx, i, hole, pool):
                        for l in _enum_comps_cached(kappa, ctx + (phi.left,), j, pool, True):
                            for r in _enum_comps_cached(kappa, ctx + (phi.right,), k_, pool, True):
                                out.append(Case(tpl, l, r))
                    for v in _enum_values_cached(phi, ctx, i, pool, False):
                        for tpl in _ctx_c(kappa, ctx + (phi.left,), j, hole, pool):
                            for r in _enum_comps_cached(kappa, ctx + (phi.right,), k_, pool, True):
                                out.append(Case(v, tpl, r))
                        for l in _enum_comps_cached(kappa, ctx + (phi.left,), j, pool, True):
                            for tpl in _ctx_c(kappa, ctx + (phi.right,), k_, hole, pool):
                                out.append(Case(v, l, tpl))
        if isinstance(phi, ProdT):
            for i in range(1, n - 1):
                for tpl in _ctx_v(phi, ctx, i, hole, pool):
                    for b in _enum_comps_cached(
                        kappa, ctx + (phi.left, phi.right), n - 1 - i, pool, True
                    ):
                        out.append(Pm(tpl, b))
                for v in _enum_values_cached(phi, ctx, i, pool, False):
                    for tpl in _ctx_c(
                        kappa, ctx + (phi.left, phi.right), n - 1 - i, hole, pool
                    ):
                        out.append(Pm(v, tpl))
    for mk in pool.comps:
        if isinstance(mk, Mu) and type_subst(mk.body, mk.body) == kappa:
            for tpl in _ctx_c(mk, ctx, n - 1, hole, pool):
                out.append(UnfoldC(tpl))
    return tuple(out)


def enumerate_contexts_cbpv(
    hole_type: Type,
    hole_ctx: Ctx,
    result_type: CompType,
    max_size: int,
    pool: TypePool = DEFAULT_POOL,
) -> Iterator[CbpvComp]:
    """Well-typed one-hole context templates: closed computations of the
    result type whose single hole expects a term of the hole type under
    (a suffix matching) the hole context.  Filling is capturing, which is
    what contextual testing wants."""
    hole = (hole_type, tuple(hole_ctx))
    for n in range(1, max_size + 1):
        yield from _ctx_c(result_type, (), n, hole, pool)


def count_contexts(
    hole_type: Type,
    hole_ctx: Ctx,
    result_type: CompType,
    max_size: int,
    pool: TypePool = DEFAULT_POOL,
) -> int:
    """Type-directed counting oracle for the context enumerator.

    Counts hole placements production by production, using the term
    enumerators only for hole-free operands.
    """
    hole = (hole_type, tuple(hole_ctx))

    @lru_cache(maxsize=None)
    def cv(phi, ctx, n) -> int:
        if n <= 0:
            return 0
        total = 0
        if n == 1 and isinstance(hole[0], ValType) and phi == hole[0] and _suffix_of(ctx, hole[1]):
            total += 1
        match phi:
            case SumT(a, b):
                total += cv(a, ctx, n - 1) + cv(b, ctx, n - 1)
            case ProdT(a, b):
                for i in range(1, n - 1):
                    total += cv(a, ctx, i) * len(
                        _enum_values_cached(b, ctx, n - 1 - i, pool, False)
                    )
                    total += (
                        len(_enum_values_cached(a, ctx, i, pool, False))
                        * cv(b, ctx, n - 1 - i)
                    )
            case Thunk(k):
                total += cc(k, ctx, n - 1)
        return total

    @lru_cache(maxsize=None)
    def cc(kappa, ctx, n) -> int:
        if n <= 0:
            return 0
        total = 0
        if (
            n == 1
            and isinstance(hole[0], CompType)
            and kappa == hole[0]
            and _suffix_of(ctx, hole[1])
        ):
            total += 1
        match kappa:
            case F(phi):
                total += cv(phi, ctx, n - 1)
            case Arrow(phi, k):
                total += cc(k, ctx + (phi,), n - 1)
            case Tensor(k1, k2):
                for i in range(1, n - 1):
                    total += cc(k1, ctx, i) * len(
                        _enum_comps_cached(k2, ctx, n - 1 - i, pool, True)
                    )
                    total += (
                        len(_enum_comps_cached(k1, ctx, i, pool, True))
                        * cc(k2, ctx, n - 1 - i)
                    )
            case Mu(body):
                total += cc(type_subst(body, body), ctx, n - 1)
        for i in range(1, n):
            total += cc(kappa, ctx, i) * len(
                _enum_comps_cached(kappa, ctx, n - 1 - i, pool, True)
            )
            total += (
                len(_enum_comps_cached(kappa, ctx, i, pool, True))
                * cc(kappa, ctx, n - 1 - i)
            )
        total += cv(Thunk(kappa), ctx, n - 1)
        for phi in pool.values:
            for i in range(1, n - 1):
                total += cc(Arrow(phi, kappa), ctx, i) * len(
                    _enum_values_cached(phi, ctx, n - 1 - i, pool, False)
                )
                total += len(
                    _enum_comps_cached(Arrow(phi, kappa), ctx, i, pool, True)
                ) * cv(phi, ctx, n - 1 - i)
                total += cc(F(phi), ctx, i) * len(
                    _enum_comps_cached(kappa, ctx + (phi,), n - 1 - i, pool, True)
                )
                total += len(_enum_comps_cached(F(phi), ctx, i, pool, True)) * cc(
                    kappa, ctx + (phi,), n - 1 - i
                )
        for k2 in pool.comps:
            total += cc(Tensor(kappa, k2), ctx, n - 1)
            total += cc(Tensor(k2, kappa), ctx, n - 1)
        for phi in pool.values:
            if isinstance(phi, SumT):
                for i in range(1, n - 2):
                    for j in range(1, n - 1 - i):
                        k_ = n - 1 - i - j
                        nl = len(_enum_comps_cached(kappa, ctx + (phi.left,), j, pool, True))
                        nr = len(_enum_comps_cached(kappa, ctx + (phi.right,), k_, pool, True))
                        nv = len(_enum_values_cached(phi, ctx, i, pool, False))
                        total += cv(phi, ctx, i) * nl * nr
                        total += nv * cc(kappa, ctx + (phi.left,), j) * nr
                        total += nv * nl * cc(kappa, ctx + (phi.right,), k_)
            if isinstance(phi, ProdT):
                ext = ctx + (phi.left, phi.right)
                for i in range(1, n - 1):
                    total += cv(phi, ctx, i) * len(
                        _enum_comps_cached(kappa, ext, n - 1 - i, pool, True)
                    )
                    total += (
                        len(_enum_values_cached(phi, ctx, i, pool, False))
                        * cc(kappa, ext, n - 1 - i)
                    )
        for mk in pool.comps:
            if isinstance(mk, Mu) and type_subst(mk.body, mk.body) == kappa:
                total += cc(mk, ctx, n - 1)
        return total

    return sum(cc(result_type, (), n) for n in range(1, max_size + 1))


def context_language(
    result_types: tuple[CompType, ...] | None = None,
    pool: TypePool = DEFAULT_POOL,
    literal_to: bool = False,
) -> kernel.ContextLanguage:
    """Context enumeration adapter for the kernel preorder oracle.  The hole
    index is the filled term's (type, context) pair; results range over the
    pool's computation types."""
    results = result_types if result_types is not None else pool.comps

    def contexts(max_size: int, idx) -> Iterator[kernel.Context]:
        hole_type, hole_ctx = idx
        from .surface import print_cbpv

        for res in results:
            for tpl in enumerate_contexts_cbpv(hole_type, hole_ctx, res, max_size, pool):
                yield kernel.Context(
                    fill=lambda t, _tpl=tpl: fill(_tpl, t),
                    label=print_cbpv(tpl),
                )

    return kernel.ContextLanguage(
        sem=step_semantics(literal_to),
        contexts=contexts,
        index_of=lambda t: (typecheck((), t), ()),
    )


def context_oracle(
    p: CbpvTerm,
    q: CbpvTerm,
    max_ctx_size: int = 5,
    fuel: int = DEFAULT_FUEL,
    result_types: tuple[CompType, ...] | None = None,
    pool: TypePool = DEFAULT_POOL,
) -> Verdict:
    """Brute-force contextual-preorder check for closed same-typed terms."""
    return kernel.context_oracle(
        context_language(result_types, pool), p, q, max_ctx_size, fuel
    )


# ---------------------------------------------------------------------------
# a canonical non-terminating producer


def looping_parts() -> tuple[CbpvComp, CbpvComp, CbpvValue]:
    """A producer of F unit that cycles forever, with its pieces.

    Returns (omega, delta, tied): delta consumes a thunked copy of its own
    recursive type and reapplies it; tied is that thunked copy; omega is
    the closed application, which revisits itself after three steps.
    """
    loop_ty = Mu(Arrow(Thunk(TyVar(0)), F(UNIT)))
    arg_ty = Thunk(loop_ty)
    delta = Lam(AppC(UnfoldC(Force(Var(0))), Var(0)), arg_ty)
    tied = ThunkV(FoldC(delta, Arrow(Thunk(TyVar(0)), F(UNIT))))
    omega = AppC(delta, tied)
    return omega, delta, tied


def looping_producer() -> CbpvComp:
    return looping_parts()[0]

"""Language-agnostic checking machinery.

The kernel knows nothing about any particular calculus.  A language plugs in
through :class:`SemanticsInterface` (one-step successors, terminal
observations, observation matching) and gets back weak closures, greatest
simulations, step-indexed relation chains and a contextual-preorder oracle.

Conventions shared by every driver here:

* terms are hashable immutable values compared structurally;
* relations are indexed by a sort/type tag so multi-sorted languages fit;
* fuel bounds every transitive-closure computation, and running out of fuel
  surfaces as an Unknown verdict, never as a silent wrong answer.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping

Index = Hashable
Term = Hashable
Pair = tuple
RelQuery = Callable[[Index, Term, Term], bool]

DEFAULT_FUEL = 1000


class SortMismatchError(ValueError):
    """Raised when a checker is handed terms of different sorts/types."""


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class Witness:
    """Counterexample payload for a failing verdict."""

    index: Index | None = None
    pair: tuple | None = None
    clause: str | None = None
    context: Any = None
    trace: tuple = ()
    detail: str | None = None

    def render(self) -> str:
        bits = []
        if self.clause:
            bits.append(f"clause={self.clause}")
        if self.index is not None:
            bits.append(f"index={self.index!r}")
        if self.pair is not None:
            bits.append(f"pair={self.pair!r}")
        if self.context is not None:
            bits.append(f"context={self.context!r}")
        if self.detail:
            bits.append(self.detail)
        return "; ".join(bits)


@dataclass(frozen=True)
class Verdict:
    """Tri-state check outcome: Holds, Fails (with witness), or Unknown."""

    status: str  # "holds" | "fails" | "unknown"
    witness: Witness | None = None
    diagnostics: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.status not in ("holds", "fails", "unknown"):
            raise ValueError(f"bad verdict status {self.status!r}")
        if self.status == "fails" and self.witness is None:
            raise ValueError("a failing verdict must carry a witness")

    @property
    def holds(self) -> bool:
        return self.status == "holds"

    @property
    def fails(self) -> bool:
        return self.status == "fails"

    @property
    def unknown(self) -> bool:
        return self.status == "unknown"

    @staticmethod
    def ok(*diagnostics: str) -> "Verdict":
        return Verdict("holds", None, tuple(diagnostics))

    @staticmethod
    def fail(witness: Witness, *diagnostics: str) -> "Verdict":
        return Verdict("fails", witness, tuple(diagnostics))

    @staticmethod
    def dunno(*diagnostics: str) -> "Verdict":
        return Verdict("unknown", None, tuple(diagnostics))


# ---------------------------------------------------------------------------
# indexed relations


_EMPTY: frozenset = frozenset()


class IndexedRelation:
    """A finite family of term-pair sets keyed by a sort/type index.

    ``diagonal`` marks indices whose relation implicitly contains every
    structurally equal pair (``True`` means: at every index).  Computed
    logical-relation chains and greatest simulations use the full diagonal:
    the identity relation is a simulation for each language here, and the
    logical relation is reflexive, so structurally equal pairs that fall
    outside the finite universe are sound to accept.
    """

    __slots__ = ("_entries", "_diagonal")

    def __init__(
        self,
        entries: Mapping[Index, Iterable[Pair]] | None = None,
        diagonal: bool | Iterable[Index] = (),
    ) -> None:
        norm = {}
        for idx, pairs in (entries or {}).items():
            ps = frozenset(tuple(p) for p in pairs)
            if ps:
                norm[idx] = ps
        self._entries: dict = norm
        self._diagonal = True if diagonal is True else frozenset(diagonal)

    # -- queries ------------------------------------------------------------

    def has_diagonal(self, index: Index) -> bool:
        return self._diagonal is True or index in self._diagonal

    def has(self, index: Index, lhs: Term, rhs: Term) -> bool:
        if lhs == rhs and self.has_diagonal(index):
            return True
        return (lhs, rhs) in self._entries.get(index, _EMPTY)

    def pairs(self, index: Index) -> frozenset:
        return self._entries.get(index, _EMPTY)

    def indices(self) -> tuple:
        return tuple(self._entries.keys())

    def size(self) -> int:
        return sum(len(ps) for ps in self._entries.values())

    @property
    def diagonal(self):
        return self._diagonal

    def items(self) -> Iterator[tuple[Index, frozenset]]:
        return iter(self._entries.items())

    # -- algebra ------------------------------------------------------------

    def filtered(self, keep: Callable[[Index, Pair], bool]) -> "IndexedRelation":
        return IndexedRelation(
            {i: {p for p in ps if keep(i, p)} for i, ps in self._entries.items()},
            diagonal=self._diagonal,
        )

    def union(self, other: "IndexedRelation") -> "IndexedRelation":
        entries: dict = {i: set(ps) for i, ps in self._entries.items()}
        for i, ps in other.items():
            entries.setdefault(i, set()).update(ps)
        if self._diagonal is True or other._diagonal is True:
            diag: bool | frozenset = True
        else:
            diag = self._diagonal | other._diagonal
        return IndexedRelation(entries, diagonal=diag)

    def contains(self, other: "IndexedRelation") -> bool:
        """True when every explicit pair of `other` is accepted by `self`."""
        return all(
            self.has(i, a, b) for i, ps in other.items() for (a, b) in ps
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IndexedRelation):
            return NotImplemented
        return self._entries == other._entries and self._diagonal == other._diagonal

    def __hash__(self) -> int:
        return hash(
            (frozenset(self._entries.items()), self._diagonal)
        )

    def __repr__(self) -> str:
        sizes = {i: len(ps) for i, ps in self._entries.items()}
        return f"IndexedRelation(sizes={sizes}, diagonal={self._diagonal!r})"

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def full(
        universe: Mapping[Index, Iterable[Term]],
        diagonal: bool | Iterable[Index] = True,
    ) -> "IndexedRelation":
        return IndexedRelation(
            {
                i: {(a, b) for a in ts for b in ts}
                for i, ts in ((i, tuple(ts)) for i, ts in universe.items())
            },
            diagonal=diagonal,
        )

    @staticmethod
    def diagonal_of(universe: Mapping[Index, Iterable[Term]]) -> "IndexedRelation":
        return IndexedRelation(
            {i: {(t, t) for t in ts} for i, ts in universe.items()},
            diagonal=(),
        )


# ---------------------------------------------------------------------------
# semantics plug-in


@dataclass(frozen=True)
class SemanticsInterface:
    """One-step behaviour of a language, as pure callables.

    ``successors(t)``   -- unlabeled one-step reducts (empty for terminals).
    ``observe(t)``      -- tuple of terminal observations of ``t`` (strong
                           side; empty when ``t`` is not observable).
    ``observe_rhs(t)``  -- observations used on the *right* of a pair; equal
                           to ``observe`` unless a weakening (e.g. testing
                           weakening) widens the right side.
    ``obs_match(idx, o1, o2, query)`` -- whether observation ``o2`` matches
                           ``o1`` at pair index ``idx``, consulting ``query``
                           (an indexed membership test) for the components.
    ``index_of(t)``     -- the sort/type index of ``t``.
    """

    successors: Callable[[Term], Iterable[Term]]
    observe: Callable[[Term], tuple]
    obs_match: Callable[[Index, Any, Any, RelQuery], bool]
    index_of: Callable[[Term], Index] = lambda t: "term"
    observe_rhs: Callable[[Term], tuple] | None = None

    def rhs_observations(self, t: Term) -> tuple:
        fn = self.observe_rhs or self.observe
        return fn(t)


class SemTools:
    """Cached successor/closure queries against one semantics at fixed fuel."""

    def __init__(self, sem: SemanticsInterface, fuel: int = DEFAULT_FUEL) -> None:
        self.sem = sem
        self.fuel = fuel
        self._succ: dict = {}
        self._closure: dict = {}

    def successors(self, t: Term) -> tuple:
        got = self._succ.get(t)
        if got is None:
            got = tuple(self.sem.successors(t))
            self._succ[t] = got
        return got

    def closure(self, t: Term) -> "WeakClosure":
        got = self._closure.get(t)
        if got is None:
            got = weak_closure(self.sem, t, self.fuel, _succ=self.successors)
            self._closure[t] = got
        return got

    def weak_terms(self, t: Term) -> frozenset:
        return self.closure(t).reachable


# ---------------------------------------------------------------------------
# weak transitive closure


@dataclass(frozen=True)
class WeakClosure:
    """Everything reachable from ``source`` in at most ``fuel_used`` steps.

    ``frontier_exhausted`` is True when no unexplored reduct remained, i.e.
    the reachable set is complete (every successor of every reachable term
    was already visited when exploration stopped).
    """

    source: Term
    reachable: frozenset
    frontier_exhausted: bool
    fuel_used: int


def weak_closure(
    sem: SemanticsInterface,
    t: Term,
    fuel: int,
    _succ: Callable[[Term], Iterable[Term]] | None = None,
) -> WeakClosure:
    """Terms reachable from ``t`` by at most ``fuel`` reduction steps (BFS)."""
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    succ = _succ or (lambda u: tuple(sem.successors(u)))
    seen = {t}
    frontier = [t]
    depth = 0
    while frontier and depth < fuel:
        nxt = []
        for u in frontier:
            for v in succ(u):
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        if not nxt:
            frontier = []
            break
        frontier = nxt
        depth += 1
    exhausted = all(v in seen for u in frontier for v in succ(u))
    return WeakClosure(t, frozenset(seen), exhausted, depth)


# ---------------------------------------------------------------------------
# Egli-Milner matching


def egli_milner_match(left: Iterable, right: Iterable, rel: Callable[[Any, Any], bool]) -> bool:
    """Left-to-right Egli-Milner lifting: every element of ``left`` has a
    related element in ``right``.  (Up-closed on the right by construction:
    enlarging ``right`` never turns True into False.)"""
    rs = tuple(right)
    return all(any(rel(a, b) for b in rs) for a in left)


# ---------------------------------------------------------------------------
# greatest simulation / step-indexed chains

ClauseCheck = Callable[[Index, Pair, IndexedRelation, SemTools], bool]


def simulation_fixpoint(
    sem: SemanticsInterface,
    universe: Mapping[Index, Iterable[Term]],
    clause_check: ClauseCheck,
    fuel: int = DEFAULT_FUEL,
    diagonal: bool | Iterable[Index] = True,
) -> IndexedRelation:
    """Greatest relation inside universe x universe closed under the clauses.

    Jacobi iteration: start from the full relation and repeatedly drop every
    pair whose clause fails against the current candidate, until stable.  The
    result contains any caller relation over the same universe that satisfies
    ``clause_check`` (greatest-fixpoint property).  Pairs whose clause cannot
    be established within ``fuel`` are dropped, so the output is a sound
    under-approximation at desk scale.
    """
    tools = SemTools(sem, fuel)
    rel = IndexedRelation.full(universe, diagonal=diagonal)
    while True:
        kept = {
            i: {p for p in rel.pairs(i) if clause_check(i, p, rel, tools)}
            for i in rel.indices()
        }
        new = IndexedRelation(kept, diagonal=rel.diagonal)
        if new == rel:
            return rel
        rel = new


def behaviour_clause(
    sem: SemanticsInterface,
    idx: Index,
    pair: Pair,
    rel: IndexedRelation,
    tools: SemTools,
) -> bool:
    """Generic one-pair clause: reducts match weakly (left-to-right
    Egli-Milner) and every strong observation is matched by some weakly
    reachable observable on the right."""
    p, q = pair
    q_weak = None  # computed lazily; many pairs fail fast on the first reduct
    for p2 in tools.successors(p):
        i2 = sem.index_of(p2)
        if q_weak is None:
            q_weak = tools.weak_terms(q)
        if not any(
            sem.index_of(q2) == i2 and rel.has(i2, p2, q2) for q2 in q_weak
        ):
            return False
    for obs in sem.observe(p):
        if q_weak is None:
            q_weak = tools.weak_terms(q)
        matched = False
        for qbar in q_weak:
            for ob in sem.rhs_observations(qbar):
                if sem.obs_match(idx, obs, ob, rel.has):
                    matched = True
                    break
            if matched:
                break
        if not matched:
            return False
    return True


def stepindex_chain(
    sem: SemanticsInterface,
    universe: Mapping[Index, Iterable[Term]],
    depth: int,
    fuel: int = DEFAULT_FUEL,
    clause: ClauseCheck | None = None,
) -> list[IndexedRelation]:
    """Finite approximants ``[L^0, ..., L^depth]`` of a step-indexed relation.

    ``L^0`` is the full relation on the universe; each next level keeps the
    pairs whose clause holds against the previous level.  The chain is
    antitone by construction and stabilizes once two consecutive levels agree
    (remaining levels are then copies).
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    tools = SemTools(sem, fuel)
    check = clause or (lambda i, p, r, t: behaviour_clause(sem, i, p, r, t))
    chain = [IndexedRelation.full(universe, diagonal=True)]
    stable = False
    for _ in range(depth):
        prev = chain[-1]
        if stable:
            chain.append(prev)
            continue
        kept = {
            i: {p for p in prev.pairs(i) if check(i, p, prev, tools)}
            for i in prev.indices()
        }
        new = IndexedRelation(kept, diagonal=True)
        if new == prev:
            stable = True
        chain.append(new)
    return chain


def stabilization_point(chain: list[IndexedRelation]) -> int | None:
    """First k with chain[k] == chain[k+1], or None if never within the list."""
    for k in range(len(chain) - 1):
        if chain[k] == chain[k + 1]:
            return k
    return None


# ---------------------------------------------------------------------------
# may-termination and the contextual-preorder oracle

MAY_YES = "yes"
MAY_NO = "no"
MAY_UNKNOWN = "unknown"


@dataclass(frozen=True)
class MayTerminate:
    """Tri-state may-termination: Yes carries a reachable normal form; No
    means the whole reachable region was explored and contains no terminal
    (provable divergence: every path loops); Unknown means fuel ran out."""

    status: str
    normal_form: Term | None = None
    explored: int = 0

    def __bool__(self) -> bool:  # pragma: no cover - guard against misuse
        raise TypeError("MayTerminate is tri-state; test .status explicitly")


def may_terminate(tools: SemTools, t: Term, fuel: int | None = None) -> MayTerminate:
    """Breadth-first may-termination with cycle detection via a visited set.

    Deterministic iteration order makes verdicts reproducible run to run.
    """
    budget = tools.fuel if fuel is None else fuel
    seen = {t}
    queue = deque([t])
    expanded = 0
    while queue:
        if expanded >= budget:
            return MayTerminate(MAY_UNKNOWN, None, expanded)
        u = queue.popleft()
        succs = tools.successors(u)
        if not succs:
            return MayTerminate(MAY_YES, u, expanded)
        expanded += 1
        for v in succs:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    # frontier exhausted without ever reaching a terminal: provably divergent
    return MayTerminate(MAY_NO, None, expanded)


@dataclass(frozen=True, eq=False)
class Context:
    """A one-hole context: ``fill`` plugs a term, ``label`` prints it."""

    fill: Callable[[Term], Term]
    label: str

    def __repr__(self) -> str:
        return self.label


@dataclass(frozen=True, eq=False)
class ContextLanguage:
    """What the oracle needs from a language: its semantics, an enumerator of
    one-hole contexts (by max size and hole index), and the sort of terms."""

    sem: SemanticsInterface
    contexts: Callable[[int, Index], Iterable[Context]]
    index_of: Callable[[Term], Index]


def context_oracle(
    lang_enumerator: ContextLanguage,
    p: Term,
    q: Term,
    max_ctx_size: int,
    fuel: int = DEFAULT_FUEL,
) -> Verdict:
    """Brute-force contextual-preorder check.

    Enumerates every context up to ``max_ctx_size``; Fails (with the witness
    context) as soon as C[p] may-terminates while C[q] provably diverges
    (cycle detected, whole region explored); Unknown when some performed run
    hit the fuel bound without a decision; Holds otherwise.
    """
    ip = lang_enumerator.index_of(p)
    iq = lang_enumerator.index_of(q)
    if ip != iq:
        raise SortMismatchError(f"cannot compare terms of sorts {ip!r} and {iq!r}")
    tools = SemTools(lang_enumerator.sem, fuel)
    verdicts: dict = {}

    def run(t: Term) -> MayTerminate:
        got = verdicts.get(t)
        if got is None:
            got = may_terminate(tools, t)
            verdicts[t] = got
        return got

    if p == q:
        return Verdict.ok("identical terms")
    contexts_tried = 0
    unknown_seen = False
    for ctx in lang_enumerator.contexts(max_ctx_size, ip):
        contexts_tried += 1
        left = run(ctx.fill(p))
        if left.status == MAY_UNKNOWN:
            unknown_seen = True
            continue
        if left.status == MAY_NO:
            continue
        right = run(ctx.fill(q))
        if right.status == MAY_NO:
            return Verdict.fail(
                Witness(index=ip, pair=(p, q), context=ctx.label,
                        detail="left run terminates, right run provably diverges"),
                f"contexts_tried={contexts_tried}",
            )
        if right.status == MAY_UNKNOWN:
            unknown_seen = True
    if unknown_seen:
        return Verdict.dunno(f"contexts_tried={contexts_tried}")
    return Verdict.ok(f"contexts_tried={contexts_tried}")

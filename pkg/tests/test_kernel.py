"""Language-agnostic checker machinery, exercised on small synthetic graphs.

Terms are plain integers; a semantics is a successor dict plus terminal
observations.  This keeps every property isolated from the calculi built on
top of the kernel.
"""

from __future__ import annotations

import random

import pytest

from simrel import kernel
from simrel.kernel import (
    Context,
    ContextLanguage,
    IndexedRelation,
    SemanticsInterface,
    SemTools,
    Witness,
    behaviour_clause,
    context_oracle,
    egli_milner_match,
    may_terminate,
    simulation_fixpoint,
    stabilization_point,
    stepindex_chain,
    weak_closure,
)

NODE = "node"


def _graph_sem(edges: dict, obs: dict | None = None) -> SemanticsInterface:
    obs = obs or {}
    return SemanticsInterface(
        successors=lambda t: edges.get(t, ()),
        observe=lambda t: obs.get(t, ()),
        obs_match=lambda idx, o1, o2, query: o1 == o2,
        index_of=lambda t: NODE,
    )


def _random_graph(rng: random.Random, n: int, density: float = 0.3) -> dict:
    edges: dict = {}
    for u in range(n):
        outs = tuple(v for v in range(n) if rng.random() < density)
        if outs:
            edges[u] = outs
    return edges


def _terminal_obs(edges: dict, n: int) -> dict:
    return {u: (("halt", u % 2),) for u in range(n) if not edges.get(u)}


def test_weak_closure_reachable_set_grows_with_fuel(rng):
    for trial in range(30):
        n = rng.randrange(3, 12)
        edges = _random_graph(rng, n)
        sem = _graph_sem(edges)
        start = rng.randrange(n)
        prev = frozenset()
        for fuel in range(0, 7):
            wc = weak_closure(sem, start, fuel)
            assert prev <= wc.reachable
            assert start in wc.reachable
            prev = wc.reachable
        full = weak_closure(sem, start, n + 1)
        assert full.frontier_exhausted
        again = weak_closure(sem, start, 10 * n)
        assert again.reachable == full.reachable


def test_weak_closure_rejects_negative_fuel():
    sem = _graph_sem({})
    with pytest.raises(ValueError):
        weak_closure(sem, 0, -1)


def _filter_until_stable(sem, rel, fuel=50):
    tools = SemTools(sem, fuel)
    while True:
        kept = {
            i: {p for p in rel.pairs(i) if behaviour_clause(sem, i, p, rel, tools)}
            for i in rel.indices()
        }
        new = IndexedRelation(kept, diagonal=rel.diagonal)
        if new == rel:
            return rel
        rel = new


def test_simulation_fixpoint_contains_every_verified_relation(rng):
    for trial in range(20):
        n = rng.randrange(3, 10)
        edges = _random_graph(rng, n)
        sem = _graph_sem(edges, _terminal_obs(edges, n))
        universe = {NODE: tuple(range(n))}
        clause = lambda i, p, r, t: behaviour_clause(sem, i, p, r, t)
        gfp = simulation_fixpoint(sem, universe, clause, fuel=50)
        # any relation stable under the one-step filter must sit inside
        seed_pairs = {
            (a, b) for a in range(n) for b in range(n) if rng.random() < 0.5
        }
        candidate = IndexedRelation({NODE: seed_pairs}, diagonal=True)
        stable = _filter_until_stable(sem, candidate)
        assert gfp.contains(stable)
        # and the fixpoint itself is stable: one more filter pass is a no-op
        assert _filter_until_stable(sem, gfp) == gfp


def test_stepindex_chain_is_antitone_and_stabilizes(rng):
    for trial in range(20):
        n = rng.randrange(2, 9)
        edges = _random_graph(rng, n)
        sem = _graph_sem(edges, _terminal_obs(edges, n))
        universe = {NODE: tuple(range(n))}
        depth = n * n + 1
        chain = stepindex_chain(sem, universe, depth, fuel=50)
        assert len(chain) == depth + 1
        for lo, hi in zip(chain[1:], chain):
            for i in hi.indices():
                assert lo.pairs(i) <= hi.pairs(i)
        k = stabilization_point(chain)
        assert k is not None
        assert k <= n * n
        assert chain[k] == chain[-1]


def test_stepindex_chain_rejects_negative_depth():
    sem = _graph_sem({})
    with pytest.raises(ValueError):
        stepindex_chain(sem, {NODE: (0,)}, -1)


def test_egli_milner_match_survives_any_right_extension(rng):
    rel = lambda a, b: (a + b) % 3 == 0
    for trial in range(200):
        left = [rng.randrange(12) for _ in range(rng.randrange(0, 5))]
        right = [rng.randrange(12) for _ in range(rng.randrange(0, 5))]
        if not egli_milner_match(left, right, rel):
            continue
        extra = right + [rng.randrange(50) for _ in range(3)]
        assert egli_milner_match(left, extra, rel)


def test_egli_milner_match_on_empty_left_is_vacuous():
    assert egli_milner_match((), (), lambda a, b: False)
    assert not egli_milner_match((1,), (), lambda a, b: True)


# counting-down language: positive ints step to n-1, zero is terminal,
# negative ints self-loop forever
_COUNT_EDGES = lambda t: ((t - 1,) if t > 0 else ((t,) if t < 0 else ()))


def _count_language() -> ContextLanguage:
    sem = SemanticsInterface(
        successors=_COUNT_EDGES,
        observe=lambda t: (("done",),) if t == 0 else (),
        obs_match=lambda idx, o1, o2, query: o1 == o2,
        index_of=lambda t: NODE,
    )

    def contexts(max_size: int, idx):
        yield Context(lambda t: t, "hole")
        for k in range(1, max_size + 1):
            yield Context(lambda t, k=k: t + k, f"hole+{k}")

    return ContextLanguage(sem=sem, contexts=contexts, index_of=lambda t: NODE)


def test_may_terminate_is_tri_state_and_deterministic():
    tools = SemTools(_count_language().sem, fuel=20)
    runs = [may_terminate(tools, 4) for _ in range(5)]
    assert all(r == runs[0] for r in runs)
    assert runs[0].status == kernel.MAY_YES
    assert runs[0].normal_form == 0
    spin = may_terminate(tools, -3)
    assert spin.status == kernel.MAY_NO
    assert spin.normal_form is None
    deep = may_terminate(SemTools(_count_language().sem, fuel=3), 100)
    assert deep.status == kernel.MAY_UNKNOWN


def test_may_terminate_refuses_boolean_coercion():
    tools = SemTools(_count_language().sem, fuel=5)
    with pytest.raises(TypeError):
        bool(may_terminate(tools, 0))


def test_context_oracle_never_fails_a_term_against_itself():
    lang = _count_language()
    for t in (-2, 0, 3):
        verdict = context_oracle(lang, t, t, max_ctx_size=4, fuel=30)
        assert verdict.holds


def test_context_oracle_fails_exactly_on_observable_divergence_gaps():
    lang = _count_language()
    # left terminates under the identity context, right provably diverges
    bad = context_oracle(lang, 0, -1, max_ctx_size=2, fuel=30)
    assert bad.fails
    assert bad.witness is not None and bad.witness.context == "hole"
    # a divergent left side can never be separated this way
    ok = context_oracle(lang, -1, 0, max_ctx_size=2, fuel=30)
    assert ok.holds
    # fuel too small for the right side: honest Unknown, not Fails
    shy = context_oracle(lang, 0, 50, max_ctx_size=2, fuel=10)
    assert shy.unknown


def test_indexed_relation_diagonal_union_and_containment():
    r1 = IndexedRelation({NODE: {(1, 2)}}, diagonal=True)
    assert r1.has(NODE, 1, 2)
    assert r1.has(NODE, 7, 7)
    assert not r1.has(NODE, 2, 1)
    r2 = IndexedRelation({NODE: {(2, 1)}}, diagonal=(NODE,))
    merged = r1.union(r2)
    assert merged.has(NODE, 1, 2) and merged.has(NODE, 2, 1)
    assert merged.contains(r1) and merged.contains(r2)
    only_left = merged.filtered(lambda i, p: p == (1, 2))
    assert only_left.has(NODE, 1, 2) and not only_left.has(NODE, 2, 1)
    full = IndexedRelation.full({NODE: (1, 2, 3)})
    assert full.size() == 9


def test_verdict_shapes_are_guarded():
    with pytest.raises(ValueError):
        kernel.Verdict("maybe")
    with pytest.raises(ValueError):
        kernel.Verdict("fails")
    v = kernel.Verdict.fail(Witness(index=NODE, pair=(1, 2), clause="reduction"))
    assert v.fails and "reduction" in v.witness.render()

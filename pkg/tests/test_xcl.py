"""Extended combinatory logic: reduction, labeled application, the clause
table second path, applicative simulations and the context oracle."""

from __future__ import annotations

from simrel import xcl
from simrel.kernel import IndexedRelation
from simrel.surface import print_xcl
from simrel.xcl import (
    App,
    I,
    K,
    Kp,
    Reduces,
    S,
    Sp,
    Spp,
    Terminal,
    apply_label,
    check_applicative_simulation,
    context_oracle,
    enumerate_terms,
    greatest_simulation,
    gsos_behaviour,
    gsos_step,
    is_terminal,
    lax_bialgebra_check,
    logrel_xcl,
    random_term,
    step,
    successors,
    trace,
)

LABELS = (S, K, I)


def test_every_term_is_exactly_reducing_or_terminal(rng):
    pool = list(enumerate_terms(5)) + [random_term(rng, 9) for _ in range(500)]
    for t in pool:
        s = step(t)
        assert isinstance(s, (Reduces, Terminal))
        assert is_terminal(t) == isinstance(s, Terminal)
        succ = successors(t)
        if isinstance(s, Reduces):
            assert succ == (s.target,)
        else:
            assert succ == ()


def test_trace_reproduces_the_shared_argument_run():
    t = App(App(S, K), I)
    got = [(arrow, print_xcl(u)) for arrow, u in trace(t, label=I, fuel=50)]
    assert got == [
        ("", "S K I"),
        ("-->", "S'(K) I"),
        ("-->", "S''(K, I)"),
        ("--label-->", "K I (I I)"),
        ("-->", "K'(I) (I I)"),
        ("-->", "I"),
    ]


def test_trace_without_label_stops_at_the_first_terminal():
    got = trace(App(K, I), fuel=50)
    assert got[0] == ("", App(K, I))
    assert got[-1] == ("-->", Kp(I))
    assert is_terminal(got[-1][1])


def test_apply_label_table_spot_values():
    assert apply_label(I, K) == K
    assert apply_label(K, S) == Kp(S)
    assert apply_label(S, I) == Sp(I)
    assert apply_label(Kp(S), I) == S
    assert apply_label(Sp(K), I) == Spp(K, I)
    assert apply_label(Spp(K, I), K) == App(App(K, K), App(I, K))


def test_clause_table_path_agrees_with_direct_reduction(rng):
    small_labels = tuple(enumerate_terms(3))

    def check(t):
        direct = step(t)
        tabled = gsos_step(t)
        assert type(direct) is type(tabled)
        if isinstance(direct, Reduces):
            assert direct.target == tabled.target
        else:
            tag, fn = gsos_behaviour(t)
            assert tag == "fun"
            for u in small_labels:
                assert fn(u) == apply_label(t, u)

    for t in enumerate_terms(6):
        check(t)
    for _ in range(10000):
        check(random_term(rng, 12))


def test_verified_relations_sit_inside_the_greatest_simulation():
    # K I K reduces through K'(I) K down to I; listing the whole line against
    # I forms a simulation
    line = IndexedRelation(
        {xcl.SORT: {(App(App(K, I), K), I), (App(Kp(I), K), I)}},
        diagonal=True,
    )
    assert check_applicative_simulation(line, LABELS, fuel=100).holds
    universe = tuple(enumerate_terms(4))
    gfp = greatest_simulation(universe, LABELS, fuel=200)
    # containment applies to the pairs living inside the universe
    in_universe = line.filtered(
        lambda i, p: p[0] in set(universe) and p[1] in set(universe)
    )
    assert in_universe.size() > 0
    assert gfp.contains(in_universe)
    # the fixpoint verifies against itself: it is a simulation
    assert check_applicative_simulation(gfp, LABELS, fuel=200).holds


def test_relating_a_terminal_to_a_diverger_is_refused():
    omega = App(App(App(S, I), I), App(App(S, I), I))
    bad = IndexedRelation({xcl.SORT: {(I, omega)}}, diagonal=True)
    verdict = check_applicative_simulation(bad, LABELS, fuel=60)
    assert not verdict.holds


def test_retained_simulation_pairs_pass_the_context_oracle():
    universe = tuple(enumerate_terms(3))
    gfp = greatest_simulation(universe, LABELS, fuel=200)
    pairs = sorted(
        ((p, q) for (p, q) in gfp.pairs(xcl.SORT) if p != q), key=repr
    )[:12]
    assert pairs
    for p, q in pairs:
        assert not context_oracle(p, q, max_ctx_size=3, fuel=200).fails


def test_logrel_chain_keeps_reduction_lines_and_drops_junk():
    kik = App(App(K, I), K)
    universe = (I, K, kik, App(Kp(I), K))
    chain = logrel_xcl(universe, LABELS, depth=8, fuel=100)
    last = chain[-1]
    assert last.has(xcl.SORT, kik, I)
    assert last.has(xcl.SORT, I, kik)
    assert not last.has(xcl.SORT, K, I)
    for lo, hi in zip(chain[1:], chain):
        assert lo.pairs(xcl.SORT) <= hi.pairs(xcl.SORT)


def test_weak_rule_soundness_on_small_terms():
    assert lax_bialgebra_check(enumerate_terms(4), fuel=300).holds


def test_term_enumeration_counts_match_the_stream():
    for n in range(1, 6):
        assert xcl.count_terms(n) == sum(1 for _ in enumerate_terms(n))
    sizes = {xcl.term_size(t) for t in enumerate_terms(4)}
    assert sizes == {1, 2, 3, 4}

"""Fine-grain call-by-value layer: two-sorted reduction, labeled application,
beta/eta laws through simulations and the step-indexed relation."""

from __future__ import annotations

import itertools

from simrel import fgcbv
from simrel.fgcbv import (
    COMP,
    VAL,
    AppCC,
    AppCV,
    AppVC,
    AppVV,
    Fix,
    FgComp,
    FgValue,
    Kp,
    Reduces,
    Ret,
    Sp,
    Spp,
    StepIndexed,
    VI,
    VK,
    VS,
    closure_universe,
    context_oracle,
    enumerate_comps,
    enumerate_values,
    fg_apply_label,
    fg_check_simulation,
    fg_logrel,
    fg_step,
    greatest_simulation,
    lax_bialgebra_check,
    random_comp,
    random_value,
    sort_of,
    successors,
)
from simrel.kernel import IndexedRelation

LABELS = (VI, VK, VS)


def _eta_expansion(v: FgValue) -> FgValue:
    return Spp(Ret(Kp(Ret(VI))), Ret(v))


def test_steps_stay_inside_the_two_sorts(rng):
    pool = list(enumerate_comps(5, with_fix=True))
    pool += [random_comp(rng, 9, with_fix=bool(i % 2)) for i in range(500)]
    for t in pool:
        r = fg_step(t)
        assert isinstance(r, Reduces)
        assert isinstance(r.target, (FgValue, FgComp))
        assert sort_of(r.target) in (VAL, COMP)
        assert successors(t) == (r.target,)
    for v in enumerate_values(4):
        assert successors(v) == ()
        for w in LABELS:
            assert isinstance(fg_apply_label(v, w), FgComp)


def test_labeled_application_table_spot_values():
    assert fg_apply_label(VI, VK) == Ret(VK)
    assert fg_apply_label(VK, VI) == Ret(Kp(Ret(VI)))
    assert fg_apply_label(VS, VK) == Ret(Sp(Ret(VK)))
    assert fg_apply_label(Kp(Ret(VS)), VI) == Ret(VS)
    assert fg_apply_label(Sp(Ret(VK)), VI) == Ret(Spp(Ret(VK), Ret(VI)))
    shared = fg_apply_label(Spp(Ret(VK), Ret(VI)), VS)
    assert shared == AppCC(AppCV(Ret(VK), VS), AppCV(Ret(VI), VS))


def test_return_hands_the_value_across_the_sort_boundary():
    assert fg_step(Ret(VK)) == Reduces(VK)
    assert fg_step(AppVV(VI, VK)) == Reduces(Ret(VK))


def test_recursion_unrolls_in_exactly_one_step():
    for body in (Ret(VK), AppVV(VS, VI)):
        unrolled = AppCV(body, Spp(AppVV(VK, VI), Fix(body)))
        assert fg_step(Fix(body)) == Reduces(unrolled)


def test_beta_pairs_verify_as_simulations_in_both_directions():
    insts = itertools.islice(
        ((v, w) for v in enumerate_values(4) for w in LABELS), 6
    )
    for v, w in insts:
        t = fg_apply_label(v, w)
        fwd = IndexedRelation({COMP: {(AppVV(v, w), t)}}, diagonal=True)
        rev = IndexedRelation({COMP: {(t, AppVV(v, w))}}, diagonal=True)
        assert fg_check_simulation(fwd, LABELS, fuel=200).holds
        assert fg_check_simulation(rev, LABELS, fuel=200).holds


def test_unrelated_values_are_refused_by_the_checker():
    bad = IndexedRelation({VAL: {(VK, VI)}}, diagonal=True)
    assert not fg_check_simulation(bad, LABELS, fuel=100).holds


def test_eta_expansion_survives_the_deep_relation_both_ways():
    v = VK
    eta = _eta_expansion(v)
    chain = fg_logrel([v, eta], [], LABELS, depth=8, fuel=200)
    last = chain[-1]
    assert last.has(VAL, v, eta)
    assert last.has(VAL, eta, v)
    for lo, hi in zip(chain[1:], chain):
        for i in (VAL, COMP):
            assert lo.pairs(i) <= hi.pairs(i)


def test_return_after_composition_matches_direct_return():
    # [v] against (S applied to K o I) applied to v, which funnels v through
    # an identity built from the combinators
    v = Kp(Ret(VS))
    lhs = Ret(v)
    rhs = AppCV(AppVC(VS, AppVV(VK, VI)), v)
    chain = fg_logrel([], [lhs, rhs], LABELS, depth=16, fuel=200)
    assert chain[-1].has(COMP, lhs, rhs)
    assert chain[-1].has(COMP, rhs, lhs)


def test_backward_steps_preserve_deep_relatedness(rng):
    ev = StepIndexed(LABELS)
    checked = 0
    while checked < 200:
        t = random_comp(rng, rng.randrange(2, 7))
        q = t
        for _ in range(rng.randrange(0, 3)):
            nxt = fg_step(q).target
            if not isinstance(nxt, FgComp):
                break
            q = nxt
        n = rng.randrange(1, 9)
        if not ev.rel(n, COMP, t, q):
            continue
        checked += 1
        w = LABELS[rng.randrange(3)]
        # prefixing a discarded-argument application is a one-step ancestor
        assert ev.rel(n, COMP, AppVV(Kp(t), w), q)
        assert ev.rel(n, COMP, t, AppVV(Kp(q), w))


def test_weak_rule_soundness_with_and_without_recursion():
    assert lax_bialgebra_check(enumerate_comps(4), fuel=300).holds
    assert lax_bialgebra_check(enumerate_comps(4, with_fix=True), fuel=300).holds


def test_closure_universe_keeps_seeds_and_their_reducts():
    seed = AppVV(VK, VI)
    values, comps = closure_universe([], [seed], LABELS, fuel=100)
    assert seed in comps
    assert fg_step(seed).target in comps


def test_retained_simulation_pairs_pass_the_context_oracle():
    gfp = greatest_simulation(
        enumerate_values(3), enumerate_comps(3), LABELS, fuel=200
    )
    pairs = sorted(
        ((i, p, q) for i in (VAL, COMP) for (p, q) in gfp.pairs(i) if p != q),
        key=repr,
    )[:10]
    assert pairs
    for i, p, q in pairs:
        assert not context_oracle(p, q, max_ctx_size=3, fuel=200).fails


def test_enumeration_counts_match_the_streams():
    for with_fix in (False, True):
        nv, nc = fgcbv.count_terms(4, with_fix=with_fix)
        assert nv == sum(1 for _ in enumerate_values(4, with_fix=with_fix))
        assert nc == sum(1 for _ in enumerate_comps(4, with_fix=with_fix))


def test_random_terms_land_in_the_right_sort(rng):
    for i in range(300):
        v = random_value(rng, 8, with_fix=bool(i % 3))
        c = random_comp(rng, 8, with_fix=bool(i % 3))
        assert isinstance(v, FgValue) and sort_of(v) == VAL
        assert isinstance(c, FgComp) and sort_of(c) == COMP

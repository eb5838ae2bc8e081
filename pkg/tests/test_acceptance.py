"""Whole-workbench acceptance runs.

One test per advertised guarantee, with wall-clock budgets pinned where a
guarantee carries one.  Each test prints a single PASS line when it gets
through, so a -rP run reads as a checklist.
"""

from __future__ import annotations

import itertools
import random
import time

from simrel import cbpv_sem, cbpv_syntax as cx, fgcbv, kernel, xcl
from simrel.cbpv_syntax import (
    DEFAULT_POOL,
    STAR,
    UNIT,
    Choice,
    F,
    Force,
    ProdC,
    Thunk,
    ThunkV,
    Var,
    typecheck,
)
from simrel.fgcbv import (
    COMP,
    VAL,
    AppCV,
    AppVC,
    AppVV,
    FgComp,
    Kp,
    Ret,
    Spp,
    StepIndexed,
    VI,
    VK,
    VS,
)
from simrel.kernel import IndexedRelation
from simrel.surface import print_xcl

SEED = 20260819
FG_LABELS = (VI, VK, VS)


def test_trace_golden_shared_argument_run():
    t0 = time.perf_counter()
    term = xcl.App(xcl.App(xcl.S, xcl.K), xcl.I)
    got = [(a, print_xcl(u)) for a, u in xcl.trace(term, label=xcl.I, fuel=50)]
    assert got == [
        ("", "S K I"),
        ("-->", "S'(K) I"),
        ("-->", "S''(K, I)"),
        ("--label-->", "K I (I I)"),
        ("-->", "K'(I) (I I)"),
        ("-->", "I"),
    ]
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    print(f"PASS trace golden ({elapsed:.3f}s < 1s)")


def test_beta_law_relations_are_applicative_simulations():
    t0 = time.perf_counter()
    instances = list(itertools.islice(
        ((v, w, fgcbv.fg_apply_label(v, w))
         for v in fgcbv.enumerate_values(4) for w in FG_LABELS),
        20,
    ))
    assert len(instances) == 20
    for v, w, t in instances:
        app = AppVV(v, w)
        fwd = IndexedRelation({COMP: {(app, t)}}, diagonal=True)
        rev = IndexedRelation({COMP: {(t, app)}}, diagonal=True)
        assert fgcbv.fg_check_simulation(fwd, FG_LABELS, fuel=500).holds
        assert fgcbv.fg_check_simulation(rev, FG_LABELS, fuel=500).holds
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    print(f"PASS beta-law simulations, 20 instances ({elapsed:.2f}s < 10s)")


def test_eta_law_pairs_survive_the_deep_relation():
    t0 = time.perf_counter()
    values = list(itertools.islice(fgcbv.enumerate_values(5), 10))
    assert len(values) == 10
    for v in values:
        eta = Spp(Ret(Kp(Ret(VI))), Ret(v))
        lhs = Ret(v)
        rhs = AppCV(AppVC(VS, AppVV(VK, VI)), v)
        chain = fgcbv.fg_logrel([v, eta], [lhs, rhs], FG_LABELS, depth=16)
        last = chain[-1]
        assert last.has(VAL, v, eta) and last.has(VAL, eta, v)
        assert last.has(COMP, lhs, rhs) and last.has(COMP, rhs, lhs)
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    print(f"PASS eta-law pairs at depth 16, 10 values ({elapsed:.2f}s < 60s)")


def test_backward_steps_preserve_the_indexed_relation():
    rng = random.Random(SEED)
    ev = StepIndexed(FG_LABELS)
    checked = 0
    while checked < 1000:
        t = fgcbv.random_comp(rng, rng.randrange(2, 7))
        q = t
        for _ in range(rng.randrange(0, 3)):
            nxt = fgcbv.fg_step(q).target
            if not isinstance(nxt, FgComp):
                break
            q = nxt
        p = t
        for _ in range(rng.randrange(0, 2)):
            p = AppVV(Kp(p), FG_LABELS[rng.randrange(3)])
        n = rng.randrange(1, 9)
        if not ev.rel(n, COMP, p, q):
            continue
        checked += 1
        w = FG_LABELS[rng.randrange(3)]
        assert ev.rel(n, COMP, AppVV(Kp(p), w), q)
        assert ev.rel(n, COMP, p, AppVV(Kp(q), w))
    print("PASS backward steps, 1000 related pairs, both sides")


def test_thunk_beta_eta_pairs_survive_the_deep_chain():
    t0 = time.perf_counter()
    rng = random.Random(SEED)
    instances = []
    seen = set()
    while len(instances) < 20:
        kappa = DEFAULT_POOL.comps[rng.randrange(4)]
        t = cx.random_comp(rng, kappa, max_size=6)
        if (kappa, t) not in seen:
            seen.add((kappa, t))
            instances.append((kappa, t))
    for kappa, t in instances:
        ft = Force(ThunkV(t))
        v = ThunkV(t)
        ci = (kappa, ())
        vi = (Thunk(kappa), ())
        seeds = [(ci, t), (ci, ft), (vi, v), (vi, ThunkV(Force(v)))]
        uni = cbpv_sem.closure_universe(seeds, subst_value_size=2)
        last = cbpv_sem.logrel_cbpv(uni, depth=16, subst_value_size=2)[-1]
        assert last.has(ci, t, ft)
        assert last.has(ci, ft, t)
        assert last.has(vi, v, ThunkV(Force(v)))
    # widening the tests on the right lets the one-sided eta pair through
    vty = Thunk(F(UNIT))
    oi = (vty, (vty,))
    rev = (ThunkV(Force(Var(0))), Var(0))
    uni = cbpv_sem.closure_universe(
        [(oi, rev[0]), (oi, rev[1])], subst_value_size=2
    )
    widened = cbpv_sem.logrel_cbpv(
        uni, depth=16, subst_value_size=2, testing_weakening=True
    )
    assert widened[-1].has(oi, *rev)
    elapsed = time.perf_counter() - t0
    assert elapsed < 120.0
    print(f"PASS thunk beta/eta at depth 16, 20 instances ({elapsed:.2f}s < 120s)")


def test_substitution_and_clause_table_paths_agree():
    rng = random.Random(SEED)
    for _ in range(1000):
        nctx = rng.randrange(1, 3)
        ctx = tuple(DEFAULT_POOL.values[rng.randrange(4)] for _ in range(nctx))
        kappa = DEFAULT_POOL.comps[rng.randrange(4)]
        t = cx.random_comp(rng, kappa, 7, ctx=ctx)
        us = tuple(cx.random_value(rng, phi, 5) for phi in ctx)
        assert cbpv_sem.rho1_subst(t, us) == cx.subst_sim(t, us)
    unflagged = 0
    for kappa in DEFAULT_POOL.comps:
        for t in cx.enumerate_comps(kappa, 5):
            ag = cbpv_sem.rho2_agreement(t)
            if ag.unexplained or not ag.observation_match:
                unflagged += 1
    for _ in range(1000):
        kappa = DEFAULT_POOL.comps[rng.randrange(4)]
        t = cx.random_comp(rng, kappa, max_size=9)
        ag = cbpv_sem.rho2_agreement(t)
        if ag.unexplained or not ag.observation_match:
            unflagged += 1
    assert unflagged == 0
    print("PASS substitution and clause-table paths agree, 0 unflagged")


def test_weak_rules_stay_sound_across_languages():
    assert xcl.lax_bialgebra_check(xcl.enumerate_terms(5), fuel=500).holds
    assert fgcbv.lax_bialgebra_check(
        fgcbv.enumerate_comps(5, with_fix=True), fuel=500
    ).holds
    uni = {(k, ()): tuple(cx.enumerate_comps(k, 5)) for k in DEFAULT_POOL.comps}
    assert cbpv_sem.lax_check(uni, fuel=500).holds
    print("PASS weak-rule soundness on all size-5 terms, three languages")


def test_retained_simulation_pairs_never_fail_the_context_oracle():
    t0 = time.perf_counter()
    fails = 0

    gfp = xcl.greatest_simulation(xcl.enumerate_terms(4), (xcl.S, xcl.K, xcl.I),
                                  fuel=500)
    xcl_pairs = [(p, q) for (p, q) in gfp.pairs(xcl.SORT) if p != q]
    for p, q in xcl_pairs:
        if xcl.context_oracle(p, q, max_ctx_size=5, fuel=500).fails:
            fails += 1

    gfp = fgcbv.greatest_simulation(
        fgcbv.enumerate_values(4), fgcbv.enumerate_comps(4), FG_LABELS, fuel=500
    )
    fg_pairs = [(i, p, q) for i in (VAL, COMP)
                for (p, q) in gfp.pairs(i) if p != q]
    for _, p, q in fg_pairs:
        if fgcbv.context_oracle(p, q, max_ctx_size=5, fuel=500).fails:
            fails += 1

    # closed producers of ground type form the richest small universe
    kappa = F(UNIT)
    idx = (kappa, ())
    uni = {idx: tuple(cx.enumerate_comps(kappa, 4))}
    gfp = cbpv_sem.greatest_weak_simulation(uni, subst_value_size=2, fuel=500)
    cb_pairs = [(p, q) for (p, q) in gfp.pairs(idx) if p != q]
    for p, q in cb_pairs:
        if cbpv_sem.context_oracle(p, q, max_ctx_size=5, fuel=500).fails:
            fails += 1

    assert fails == 0
    total = len(xcl_pairs) + len(fg_pairs) + len(cb_pairs)
    elapsed = time.perf_counter() - t0
    assert elapsed < 600.0
    print(f"PASS context oracle on {total} retained pairs, 0 fails "
          f"({elapsed:.1f}s < 600s)")


def test_may_termination_on_choice_and_divergence():
    omega = cbpv_sem.looping_producer()
    saved = Choice(omega, ProdC(STAR))
    runs = [
        (cbpv_sem.may_terminates(saved, fuel=200),
         cbpv_sem.may_terminates(omega, fuel=200))
        for _ in range(10)
    ]
    assert all(r == runs[0] for r in runs)
    yes, no = runs[0]
    assert yes.status == kernel.MAY_YES and yes.normal_form == ProdC(STAR)
    assert no.status == kernel.MAY_NO and no.normal_form is None
    assert no.explored == 3  # the cycle closes after three expansions
    print("PASS may-termination verdicts, deterministic across 10 runs")


def test_subject_reduction_progress_and_chain_shape():
    rng = random.Random(SEED)
    for kappa in DEFAULT_POOL.comps:
        for t in cx.enumerate_comps(kappa, 5):
            for t2 in cbpv_sem.successors(t):
                assert typecheck((), t2) == kappa
            assert cbpv_sem.successors(t) or cbpv_sem.observe(t) is not None
    for _ in range(10000):
        kappa = DEFAULT_POOL.comps[rng.randrange(4)]
        t = cx.random_comp(rng, kappa, max_size=8)
        for t2 in cbpv_sem.successors(t):
            assert typecheck((), t2) == kappa
        assert cbpv_sem.successors(t) or cbpv_sem.observe(t) is not None

    def antitone_and_stabilizing(chain, indices):
        for lo, hi in zip(chain[1:], chain):
            for i in indices:
                assert lo.pairs(i) <= hi.pairs(i)
        assert kernel.stabilization_point(chain) is not None

    chain = xcl.logrel_xcl(tuple(xcl.enumerate_terms(3)),
                           (xcl.S, xcl.K, xcl.I), depth=10, fuel=200)
    antitone_and_stabilizing(chain, (xcl.SORT,))
    values = tuple(fgcbv.enumerate_values(2))
    chain = fgcbv.fg_logrel(values, tuple(Ret(v) for v in values),
                            FG_LABELS, depth=10, fuel=200)
    antitone_and_stabilizing(chain, (VAL, COMP))
    seeds = [((F(UNIT), ()), Force(ThunkV(ProdC(STAR))))]
    uni = cbpv_sem.closure_universe(seeds, subst_value_size=2)
    chain = cbpv_sem.logrel_cbpv(uni, depth=10, subst_value_size=2)
    antitone_and_stabilizing(chain, tuple(uni))
    print("PASS subject reduction, progress and chain shape, 0 violations")

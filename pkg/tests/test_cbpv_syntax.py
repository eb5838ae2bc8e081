"""Typed term layer: typechecking, de Bruijn renaming and simultaneous
substitution, recursive-type unfolding and the typed enumerators."""

from __future__ import annotations

import pytest

from simrel import cbpv_syntax as cx
from simrel.cbpv_syntax import (
    DEFAULT_POOL,
    STAR,
    UNIT,
    AppC,
    Arrow,
    F,
    FoldC,
    Force,
    Fst,
    Lam,
    Mu,
    ProdC,
    Thunk,
    ThunkV,
    TyVar,
    TypecheckError,
    UnfoldC,
    Var,
    enumerate_comps,
    enumerate_values,
    identity_subst,
    min_inhabitant,
    random_comp,
    random_value,
    rename,
    shift,
    subst_sim,
    subst_single,
    type_closed,
    typecheck,
    unfold_type,
)


def _random_ctx(rng, n):
    return tuple(DEFAULT_POOL.values[rng.randrange(4)] for _ in range(n))


def _random_typed_comp(rng, ctx, max_size=7):
    kappa = DEFAULT_POOL.comps[rng.randrange(4)]
    return random_comp(rng, kappa, max_size, ctx=ctx), kappa


def test_generated_terms_typecheck_at_the_requested_type(rng):
    for i in range(300):
        ctx = _random_ctx(rng, rng.randrange(0, 3))
        phi = DEFAULT_POOL.values[rng.randrange(4)]
        v = random_value(rng, phi, 6, ctx=ctx)
        assert typecheck(ctx, v) == phi
        t, kappa = _random_typed_comp(rng, ctx)
        assert typecheck(ctx, t) == kappa


def test_enumerated_terms_typecheck_at_the_requested_type():
    for phi in DEFAULT_POOL.values:
        for v in enumerate_values(phi, 4):
            assert typecheck((), v) == phi
    for kappa in DEFAULT_POOL.comps:
        for t in enumerate_comps(kappa, 4):
            assert typecheck((), t) == kappa


def test_ill_typed_terms_are_rejected():
    with pytest.raises(TypecheckError):
        typecheck((), Force(STAR))  # forcing a non-thunk
    with pytest.raises(TypecheckError):
        typecheck((), AppC(ProdC(STAR), STAR))  # applying a producer
    with pytest.raises(TypecheckError):
        typecheck((), Fst(ProdC(STAR)))  # projecting a non-pair
    with pytest.raises(TypecheckError):
        typecheck((), Var(0))  # free variable outside the context
    with pytest.raises(TypecheckError):
        typecheck((), UnfoldC(ProdC(STAR)))  # unfolding a non-recursive type
    with pytest.raises(TypecheckError):
        # fold body must match the annotation's unfolding
        typecheck((), FoldC(Lam(ProdC(STAR), UNIT), F(UNIT)))


def test_substitutions_compose(rng):
    for trial in range(200):
        ctx1 = _random_ctx(rng, rng.randrange(1, 3))
        ctx2 = _random_ctx(rng, rng.randrange(1, 3))
        t, _ = _random_typed_comp(rng, ctx1)
        us = tuple(random_value(rng, phi, 5, ctx=ctx2) for phi in ctx1)
        ws = tuple(random_value(rng, phi, 5) for phi in ctx2)
        fused = tuple(subst_sim(u, ws) for u in us)
        assert subst_sim(subst_sim(t, us), ws) == subst_sim(t, fused)


def test_renaming_commutes_with_substitution(rng):
    swap = lambda i: {0: 1, 1: 0}.get(i, i)
    for trial in range(200):
        ctx = _random_ctx(rng, 2)
        t, _ = _random_typed_comp(rng, ctx)
        us = tuple(random_value(rng, phi, 5) for phi in ctx)
        # swapping variables then substituting equals substituting swapped
        assert subst_sim(rename(t, swap), (us[1], us[0])) == subst_sim(t, us)
        # shifting by two makes room for two extra innermost entries
        pad = tuple(random_value(rng, p, 4) for p in _random_ctx(rng, 2))
        assert subst_sim(shift(t, 2), us + pad) == subst_sim(t, us)


def test_substitution_preserves_types(rng):
    for trial in range(200):
        ctx1 = _random_ctx(rng, rng.randrange(1, 3))
        ctx2 = _random_ctx(rng, rng.randrange(0, 2))
        t, kappa = _random_typed_comp(rng, ctx1)
        us = tuple(random_value(rng, phi, 5, ctx=ctx2) for phi in ctx1)
        assert typecheck(ctx2, subst_sim(t, us)) == kappa


def test_single_substitution_is_the_unary_case(rng):
    for trial in range(100):
        ctx = _random_ctx(rng, 1)
        t, _ = _random_typed_comp(rng, ctx)
        v = random_value(rng, ctx[0], 5)
        assert subst_single(t, v) == subst_sim(t, (v,))


def test_identity_substitution_is_a_no_op(rng):
    for trial in range(100):
        ctx = _random_ctx(rng, rng.randrange(1, 4))
        t, _ = _random_typed_comp(rng, ctx)
        assert subst_sim(t, identity_subst(len(ctx))) == t


def test_recursive_type_unfolds_by_self_substitution():
    loop = Mu(Arrow(Thunk(TyVar(0)), F(UNIT)))
    assert unfold_type(loop) == Arrow(Thunk(loop), F(UNIT))
    plain = Mu(F(UNIT))
    assert unfold_type(plain) == F(UNIT)
    assert type_closed(loop)
    assert not type_closed(TyVar(0))
    assert type_closed(TyVar(0), depth=1)


def test_typecheck_spot_goldens():
    assert typecheck((), ThunkV(ProdC(STAR))) == Thunk(F(UNIT))
    idc = Lam(ProdC(Var(0)), UNIT)
    assert typecheck((), idc) == Arrow(UNIT, F(UNIT))
    assert typecheck((UNIT,), ProdC(Var(0))) == F(UNIT)
    loop = Mu(F(UNIT))
    assert typecheck((), FoldC(ProdC(STAR), F(UNIT))) == loop
    assert typecheck((), UnfoldC(FoldC(ProdC(STAR), F(UNIT)))) == F(UNIT)


def test_every_pool_type_is_inhabited():
    for ty in DEFAULT_POOL.values + DEFAULT_POOL.comps:
        witness = min_inhabitant(ty)
        assert witness is not None
        assert typecheck((), witness) == ty


def test_counting_oracle_matches_value_enumeration():
    for phi in DEFAULT_POOL.values:
        n = cx.count_values(phi, 5)
        assert n == sum(1 for _ in enumerate_values(phi, 5))

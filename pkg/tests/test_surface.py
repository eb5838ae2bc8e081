"""Concrete syntax: parsers and printers round-trip for all three languages,
printed forms are stable, and syntax errors carry source positions."""

from __future__ import annotations

import pytest

from simrel import cbpv_syntax as cx
from simrel import fgcbv, xcl
from simrel.cbpv_syntax import DEFAULT_POOL
from simrel.surface import (
    ParseError,
    parse_cbpv,
    parse_cbpv_index,
    parse_cbpv_type,
    parse_fgcbv,
    parse_xcl,
    print_cbpv,
    print_cbpv_index,
    print_cbpv_type,
    print_fgcbv,
    print_xcl,
)

ROUNDS = 10000


def test_xcl_round_trip(rng):
    for _ in range(ROUNDS):
        t = xcl.random_term(rng, 7)
        assert parse_xcl(print_xcl(t)) == t


def test_fgcbv_round_trip(rng):
    for i in range(ROUNDS):
        with_fix = bool(i % 3)
        if i % 2:
            t = fgcbv.random_value(rng, 7, with_fix=with_fix)
        else:
            t = fgcbv.random_comp(rng, 7, with_fix=with_fix)
        assert parse_fgcbv(print_fgcbv(t)) == t


def test_cbpv_round_trip(rng):
    for i in range(ROUNDS):
        nctx = rng.randrange(0, 3)
        ctx = tuple(DEFAULT_POOL.values[rng.randrange(4)] for _ in range(nctx))
        if i % 2:
            phi = DEFAULT_POOL.values[rng.randrange(4)]
            t = cx.random_value(rng, phi, 7, ctx=ctx)
        else:
            kappa = DEFAULT_POOL.comps[rng.randrange(4)]
            t = cx.random_comp(rng, kappa, 7, ctx=ctx)
        assert parse_cbpv(print_cbpv(t), free_vars=nctx) == t


def test_cbpv_type_round_trip(rng):
    seen = set()
    for kappa in DEFAULT_POOL.comps:
        for t in cx.enumerate_comps(kappa, 5):
            ty = cx.typecheck((), t)
            seen.add(ty)
    assert len(seen) >= 4
    for ty in seen:
        assert parse_cbpv_type(print_cbpv_type(ty)) == ty


def test_printed_forms_are_stable():
    fixed_points = [
        (parse_xcl, print_xcl, "S K I"),
        (parse_xcl, print_xcl, "S''(K, I)"),
        (parse_xcl, print_xcl, "K'(I) (I I)"),
        (parse_xcl, print_xcl, "S (K I)"),
        (parse_fgcbv, print_fgcbv, "[K]"),
        (parse_fgcbv, print_fgcbv, "K o I"),
        (parse_fgcbv, print_fgcbv, "[K] <. K . ([I] <. K)"),
        (parse_fgcbv, print_fgcbv, "K .> [I]"),
        (parse_fgcbv, print_fgcbv, "fix([K])"),
        (parse_fgcbv, print_fgcbv, "S''([K'([I])], [K])"),
        (parse_cbpv, print_cbpv, "force thunk prod star"),
        (parse_cbpv, print_cbpv, "prod star to x0 in prod x0"),
        (parse_cbpv, print_cbpv, "lam (x0:unit). prod x0"),
        (parse_cbpv, print_cbpv, "pm pair(star, star) as (x0, x1) in prod x1"),
        (parse_cbpv, print_cbpv, "fold[mu a0. F unit] prod star"),
        (parse_cbpv, print_cbpv, "unfold fold[mu a0. F unit] prod star"),
        (parse_cbpv, print_cbpv, "fst pair(prod star, prod star)"),
        (parse_cbpv, print_cbpv, "prod star (+) prod star"),
        (parse_cbpv, print_cbpv,
         "case inl[unit (+) unit] star of {inl x0 -> prod x0 | inr x0 -> prod x0}"),
        (parse_cbpv_type, print_cbpv_type, "unit"),
        (parse_cbpv_type, print_cbpv_type, "U (F unit)"),
        (parse_cbpv_type, print_cbpv_type, "unit -> F unit"),
        (parse_cbpv_type, print_cbpv_type, "F unit (x) F unit"),
        (parse_cbpv_type, print_cbpv_type, "mu a0. U a0 -> F unit"),
        (parse_cbpv_type, print_cbpv_type, "unit (+) unit"),
        (parse_cbpv_type, print_cbpv_type, "unit (*) unit"),
    ]
    for parse, render, src in fixed_points:
        assert render(parse(src)) == src


def test_sugared_names_normalize_to_indexed_ones():
    assert print_cbpv(parse_cbpv("lam (x:unit). prod x")) == "lam (x0:unit). prod x0"
    assert print_cbpv(parse_cbpv("prod star to y in prod y")) == "prod star to x0 in prod x0"
    assert print_cbpv_type(parse_cbpv_type("mu a. F unit")) == "mu a0. F unit"


def test_index_notation_round_trips():
    for src in ("F unit", "U F unit |- U F unit", "unit, unit |- F unit"):
        ty, ctx = parse_cbpv_index(src)
        again = parse_cbpv_index(print_cbpv_index(ty, ctx))
        assert again == (ty, ctx)


def test_parse_errors_carry_positions():
    bad = [
        (parse_xcl, "S )"),
        (parse_xcl, "S'("),
        (parse_fgcbv, "[K"),
        (parse_fgcbv, "K o"),
        (parse_cbpv, "lam x. prod x"),
        (parse_cbpv, "force"),
        (parse_cbpv_type, "U ->"),
        (parse_cbpv_type, "mu . F unit"),
    ]
    for parse, src in bad:
        with pytest.raises(ParseError) as err:
            parse(src)
        assert err.value.line is not None
        assert err.value.col is not None
        assert "at 1:" in str(err.value)


def test_free_variable_budget_is_enforced_when_declared():
    # without a declared context, any index parses
    assert parse_cbpv("force #2") == cx.Force(cx.Var(2))
    assert parse_cbpv("force #0", free_vars=1) == cx.Force(cx.Var(0))
    with pytest.raises(ParseError):
        parse_cbpv("force #1", free_vars=1)
    with pytest.raises(ParseError):
        parse_cbpv("force x")  # names must be bound by a binder

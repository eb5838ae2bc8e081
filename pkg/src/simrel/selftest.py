"""Golden corpus runner.

Each file in goldens/ is one frozen expectation in a line-oriented
``key: value`` format (repeated keys accumulate, ``#`` starts a comment
line).  Dispatch is on the ``kind`` key; the runner recomputes the fact
and compares against the file, so corrupting a single file produces
exactly one failure.  After the corpus it runs a few seeded property
mini-suites (parser round-trips, subject reduction, progress, chain
shape) at small bounds.
"""

from __future__ import annotations

import random
from pathlib import Path

from . import cbpv_sem, cbpv_syntax as cx, fgcbv, kernel, xcl
from .cli import RunConfig, check_sim_verdict, logrel_chain, parse_relation
from .kernel import SemTools
from .surface import (
    parse_cbpv,
    parse_cbpv_type,
    parse_fgcbv,
    parse_xcl,
    print_cbpv,
    print_cbpv_type,
    print_fgcbv,
    print_xcl,
)

GOLDENS_DIR = Path(__file__).parent / "goldens"


class GoldenError(ValueError):
    pass


def _parse_fields(text: str) -> dict[str, list[str]]:
    fields: dict[str, list[str]] = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip()
        if not line or line.lstrip().startswith("#"):
            continue
        if ":" not in line:
            raise GoldenError(f"line {ln}: expected 'key: value'")
        key, val = line.split(":", 1)
        fields.setdefault(key.strip(), []).append(val.strip())
    return fields


def _one(fields: dict, key: str, default: str | None = None) -> str:
    vals = fields.get(key)
    if not vals:
        if default is not None:
            return default
        raise GoldenError(f"missing key {key!r}")
    if len(vals) > 1:
        raise GoldenError(f"key {key!r} given twice")
    return vals[0]


def _many(fields: dict, key: str) -> list[str]:
    return fields.get(key, [])


def _parse(language: str, text: str, free: int | None = None):
    if language == "xcl":
        return parse_xcl(text)
    if language == "fgcbv":
        return parse_fgcbv(text)
    return parse_cbpv(text, free_vars=free)


def _pr(language: str, t) -> str:
    if language == "xcl":
        return print_xcl(t)
    if language == "fgcbv":
        return print_fgcbv(t)
    return print_cbpv(t)


def _obs_str(obs) -> str:
    if obs is None:
        return "absent"
    if isinstance(obs, cbpv_sem.UnitObs):
        return "unit"
    if isinstance(obs, cbpv_sem.ProducerObs):
        return f"producer {print_cbpv(obs.value)}"
    if isinstance(obs, cbpv_sem.ThunkObs):
        return f"thunk {print_cbpv(obs.comp)}"
    return type(obs).__name__


def _ctx_of(fields: dict) -> tuple:
    text = _one(fields, "ctx", "")
    if not text:
        return ()
    return tuple(parse_cbpv_type(part) for part in text.split(","))


def _config(fields: dict, fuel: int) -> RunConfig:
    return RunConfig(
        language=_one(fields, "language"),
        command="selftest",
        fuel=int(_one(fields, "fuel", str(fuel))),
        depth=int(_one(fields, "depth", "16")),
        label_size=int(_one(fields, "labels", "3")),
        value_size=int(_one(fields, "value-size", "3")),
        flags=frozenset(_many(fields, "flag")),
    )


def _expect_eq(got, want) -> tuple[bool, str]:
    return got == want, "" if got == want else f"got {got!r}, want {want!r}"


def _run_golden(fields: dict, fuel: int) -> tuple[bool, str]:
    language = _one(fields, "language")
    kind = _one(fields, "kind")

    if kind == "trace":
        t = parse_xcl(_one(fields, "term"))
        label_text = _one(fields, "label", "")
        label = parse_xcl(label_text) if label_text else None
        got = [f"{a}|{print_xcl(x)}" for a, x in xcl.trace(t, label, fuel=fuel)]
        return _expect_eq(got, _many(fields, "expect"))

    if kind == "weak-closure":
        t = parse_xcl(_one(fields, "term"))
        bound = int(_one(fields, "fuel"))
        c = SemTools(xcl.sim_semantics(()), bound).closure(t)
        got = sorted(print_xcl(x) for x in c.reachable)
        ok1, d1 = _expect_eq(got, sorted(_many(fields, "expect")))
        want_ex = _one(fields, "exhausted") == "true"
        ok2, d2 = _expect_eq(c.frontier_exhausted, want_ex)
        return ok1 and ok2, d1 or d2

    if kind == "step":
        t = _parse(language, _one(fields, "term"))
        tgt = xcl.step(t).target if language == "xcl" else fgcbv.fg_step(t).target
        return _expect_eq(_pr(language, tgt), _one(fields, "expect"))

    if kind == "apply-label":
        t = _parse(language, _one(fields, "term"))
        u = _parse(language, _one(fields, "label"))
        if language == "xcl":
            got = xcl.apply_label(t, u)
        else:
            got = fgcbv.fg_apply_label(t, u)
        return _expect_eq(_pr(language, got), _one(fields, "expect"))

    if kind == "gsos-step":
        r = xcl.gsos_step(parse_xcl(_one(fields, "term")))
        got = f"reduces|{print_xcl(r.target)}" if isinstance(r, xcl.Reduces) else "terminal"
        return _expect_eq(got, _one(fields, "expect"))

    if kind == "gsos-fun":
        b = xcl.gsos_behaviour(parse_xcl(_one(fields, "term")))
        if b[0] != "fun":
            return False, f"behaviour tag {b[0]!r}, want 'fun'"
        got = print_xcl(b[1](parse_xcl(_one(fields, "label"))))
        return _expect_eq(got, _one(fields, "expect"))

    if kind == "typecheck":
        ctx = _ctx_of(fields)
        t = parse_cbpv(_one(fields, "term"), free_vars=len(ctx))
        got = cx.typecheck(ctx, t)
        return _expect_eq(got, parse_cbpv_type(_one(fields, "type")))

    if kind == "subst":
        ctx = _ctx_of(fields)
        t = parse_cbpv(_one(fields, "term"), free_vars=len(ctx))
        us = tuple(parse_cbpv(v) for v in _many(fields, "value"))
        if len(us) != len(ctx):
            raise GoldenError("one value per ctx entry, innermost first")
        got = cbpv_sem.rho1_subst(t, us)
        return _expect_eq(print_cbpv(got), _one(fields, "expect"))

    if kind == "successors":
        t = parse_cbpv(_one(fields, "term"))
        got = sorted(print_cbpv(s) for s in cbpv_sem.successors(t, (), False))
        return _expect_eq(got, sorted(_many(fields, "expect")))

    if kind == "rho2":
        t = parse_cbpv(_one(fields, "term"))
        got = sorted(print_cbpv(s) for s in cbpv_sem.rho2_step(t).successors)
        return _expect_eq(got, sorted(_many(fields, "expect")))

    if kind == "observe":
        ctx = _ctx_of(fields)
        t = parse_cbpv(_one(fields, "term"), free_vars=len(ctx))
        return _expect_eq(_obs_str(cbpv_sem.observe(t)), _one(fields, "expect"))

    if kind == "check-sim":
        cfg = _config(fields, fuel)
        rel, _ = parse_relation(_many(fields, "rel"), language, str(GOLDENS_DIR))
        v = check_sim_verdict(cfg, rel)
        return _expect_eq(v.status, _one(fields, "verdict"))

    if kind == "logrel":
        cfg = _config(fields, fuel)
        rel, extras = parse_relation(_many(fields, "rel"), language, str(GOLDENS_DIR))
        pair_rows, chain = logrel_chain(cfg, rel, extras)
        dropped = sum(0 if chain[-1].has(i, a, b) else 1 for i, a, b in pair_rows)
        got = "holds" if dropped == 0 else "fails"
        return _expect_eq(got, _one(fields, "verdict"))

    if kind == "may-terminate":
        t = parse_cbpv(_one(fields, "term"))
        bound = int(_one(fields, "fuel", str(fuel)))
        mt = cbpv_sem.may_terminates(t, bound)
        ok1, d1 = _expect_eq(mt.status, _one(fields, "status"))
        want_nf = _one(fields, "normal-form", "")
        if ok1 and want_nf:
            return _expect_eq(print_cbpv(mt.normal_form), want_nf)
        return ok1, d1

    raise GoldenError(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# property mini-suites


def _suite_roundtrip(language: str, seed: int, count: int) -> tuple[bool, str, int]:
    rng = random.Random(seed)
    for i in range(count):
        if language == "xcl":
            t = xcl.random_term(rng, 7)
        elif language == "fgcbv":
            t = (fgcbv.random_value if i % 2 else fgcbv.random_comp)(
                rng, 7, with_fix=bool(i % 3)
            )
        else:
            if i % 2:
                t = cx.random_comp(rng, rng.choice(cx.DEFAULT_POOL.comps), 7)
            else:
                t = cx.random_value(rng, rng.choice(cx.DEFAULT_POOL.values), 7)
        back = _parse(language, _pr(language, t))
        if back != t:
            return False, f"round-trip broke on {_pr(language, t)!r}", i
    return True, "", count


def _suite_subject_reduction(seed: int, count: int) -> tuple[bool, str, int]:
    rng = random.Random(seed)
    for _ in range(count):
        ty = rng.choice(cx.DEFAULT_POOL.comps)
        t = cx.random_comp(rng, ty, 7)
        for s in cbpv_sem.successors(t, (), False):
            got = cx.typecheck((), s)
            if got != ty:
                return False, f"type changed under reduction on {print_cbpv(t)!r}", 0
    return True, "", count


def _suite_progress(seed: int, count: int) -> tuple[bool, str, int]:
    rng = random.Random(seed)
    for _ in range(count):
        ty = rng.choice(cx.DEFAULT_POOL.comps)
        t = cx.random_comp(rng, ty, 7)
        if not cbpv_sem.successors(t, (), False) and not cbpv_sem.observations(t):
            return False, f"stuck closed computation {print_cbpv(t)!r}", 0
    return True, "", count


def _suite_chain_shape(fuel: int) -> tuple[bool, str, int]:
    checked = 0
    chains = []
    u_x = tuple(xcl.enumerate_terms(3))
    chains.append(xcl.logrel_xcl(u_x, u_x, 6, fuel=fuel))
    labs = tuple(fgcbv.enumerate_values(2))
    chains.append(fgcbv.fg_logrel(labs, [fgcbv.Ret(v) for v in labs], labs, 6, fuel=fuel))
    seeds = [((cx.F(cx.UNIT), ()), parse_cbpv("force thunk prod star"))]
    chains.append(cbpv_sem.logrel_cbpv(cbpv_sem.closure_universe(seeds), 6, fuel=fuel))
    for chain in chains:
        for a, b in zip(chain, chain[1:]):
            for idx in a.indices():
                if not set(b.pairs(idx)) <= set(a.pairs(idx)):
                    return False, "chain not antitone", checked
        if kernel.stabilization_point(chain) is None:
            return False, "chain did not stabilize within depth 6", checked
        checked += 1
    return True, "", checked


def run_selftest(seed: int = 0, fuel: int = 200) -> tuple[list[dict], dict]:
    """Run every golden plus the property mini-suites.

    Returns (results, stats); each result is {"name", "ok", "detail"}.
    """
    results: list[dict] = []
    paths = sorted(GOLDENS_DIR.glob("*.golden"))
    for path in paths:
        try:
            ok, detail = _run_golden(_parse_fields(path.read_text()), fuel)
        except Exception as e:  # a broken file is a failing golden, not a crash
            ok, detail = False, f"{type(e).__name__}: {e}"
        results.append({"name": path.stem, "ok": ok, "detail": detail})

    suite_counts: dict[str, int] = {}
    for lang in ("xcl", "fgcbv", "cbpv"):
        ok, detail, n = _suite_roundtrip(lang, seed + 1, 150)
        results.append({"name": f"suite-roundtrip-{lang}", "ok": ok, "detail": detail})
        suite_counts[f"roundtrip-{lang}"] = n
    ok, detail, n = _suite_subject_reduction(seed + 2, 150)
    results.append({"name": "suite-subject-reduction", "ok": ok, "detail": detail})
    suite_counts["subject-reduction"] = n
    ok, detail, n = _suite_progress(seed + 3, 150)
    results.append({"name": "suite-progress", "ok": ok, "detail": detail})
    suite_counts["progress"] = n
    ok, detail, n = _suite_chain_shape(fuel)
    results.append({"name": "suite-chain-shape", "ok": ok, "detail": detail})
    suite_counts["chain-shape"] = n

    stats = {"goldens": len(paths), "suite_counts": suite_counts}
    return results, stats

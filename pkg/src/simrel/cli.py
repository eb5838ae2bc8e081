"""Command-line driver for the equivalence workbench.

One command per checker, a shared configuration surface, and two-line
reports: the first line is the canonical record (byte-stable for identical
inputs and configuration, sorted keys, no timing), the second a stats
record that may carry wall-clock time.

Exit codes: 0 the property holds (or the command simply succeeded),
1 it fails with a witness, 2 undecided within the configured bounds,
3 unusable input (parse, typing, or flag errors).

Relation files are line-oriented: ``index :: lhs ~ rhs`` with ``#`` line
comments.  The index is ``term`` (xcl), ``value``/``comp`` (fgcbv), or a
CBPV type, optionally ``phi1, phi2 |- kappa`` for open terms whose free
variables are written #0, #1, ... from the innermost context end.  A line
``DELTA`` turns on the implicit diagonal; ``DELTA <file>`` also loads
explicit diagonal pairs from a universe file of ``index :: term`` lines.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field

from . import cbpv_sem, fgcbv, kernel, xcl
from .cbpv_syntax import CbpvComp, TypecheckError, typecheck
from .kernel import IndexedRelation, SemTools, SortMismatchError, Verdict
from .surface import (
    ParseError,
    parse_cbpv,
    parse_cbpv_index,
    parse_fgcbv,
    parse_xcl,
    print_cbpv,
    print_cbpv_index,
    print_cbpv_type,
    print_fgcbv,
    print_xcl,
)

LANGUAGES = ("xcl", "fgcbv", "cbpv")
COMMANDS = (
    "typecheck",
    "trace",
    "normalize",
    "check-sim",
    "logrel",
    "ctx-oracle",
    "selftest",
)
_FLAGS_BY_LANGUAGE = {
    "xcl": frozenset(),
    "fgcbv": frozenset({"fix"}),
    "cbpv": frozenset({"testing-weakening", "literal-to-rule"}),
}


class InputError(ValueError):
    """Anything that makes the request unusable (exit code 3)."""


@dataclass(frozen=True)
class RunConfig:
    language: str
    command: str
    fuel: int = 1000
    depth: int = 16
    label_size: int = 3
    value_size: int = 3
    ctx_size: int = 5
    flags: frozenset = field(default_factory=frozenset)
    seed: int = 0

    def __post_init__(self):
        for name in ("fuel", "depth", "label_size", "value_size", "ctx_size"):
            if getattr(self, name) <= 0:
                raise InputError(f"--{name.replace('_', '-')} must be positive")
        bad = self.flags - _FLAGS_BY_LANGUAGE.get(self.language, frozenset())
        if bad:
            raise InputError(
                f"flag {sorted(bad)[0]!r} is not valid for language {self.language!r}"
            )


# ---------------------------------------------------------------------------
# language dispatch helpers


def _parse_term(language: str, text: str, ctx_len: int | None = None):
    if language == "xcl":
        return parse_xcl(text)
    if language == "fgcbv":
        return parse_fgcbv(text)
    return parse_cbpv(text, free_vars=ctx_len)


def _print_term(language: str, t) -> str:
    if language == "xcl":
        return print_xcl(t)
    if language == "fgcbv":
        return print_fgcbv(t)
    return print_cbpv(t)


def _parse_index(language: str, text: str):
    text = text.strip()
    if language == "xcl":
        if text != "term":
            raise InputError(f"xcl relations are indexed by 'term', got {text!r}")
        return xcl.SORT
    if language == "fgcbv":
        if text in ("value", "v"):
            return fgcbv.VAL
        if text in ("comp", "c"):
            return fgcbv.COMP
        raise InputError(f"fgcbv indices are 'value' or 'comp', got {text!r}")
    ty, ctx = parse_cbpv_index(text)
    return (ty, ctx)


def _index_str(language: str, idx) -> str:
    if language == "xcl":
        return "term"
    if language == "fgcbv":
        return "value" if idx == fgcbv.VAL else "comp"
    return print_cbpv_index(idx[0], idx[1])


def _check_entry(language: str, idx, term) -> None:
    """Sort/type validation of one relation entry against its index."""
    if language == "fgcbv":
        want = idx
        got = fgcbv.sort_of(term)
        if got != want:
            raise InputError(
                f"term {print_fgcbv(term)!r} has sort "
                f"{'value' if got == fgcbv.VAL else 'comp'}, "
                f"index wants {'value' if want == fgcbv.VAL else 'comp'}"
            )
    elif language == "cbpv":
        ty, ctx = idx
        got = typecheck(ctx, term)
        if got != ty:
            raise InputError(
                f"term {print_cbpv(term)!r} has type {print_cbpv_type(got)}, "
                f"index declares {print_cbpv_type(ty)}"
            )


def _ctx_len(language: str, idx) -> int | None:
    return len(idx[1]) if language == "cbpv" else None


def parse_relation(lines, language: str, base_dir: str = ".", origin: str = "<relation>"):
    """Relation lines -> (IndexedRelation, extra universe entries).

    The extras are the (index, term) rows of any DELTA universe files; their
    diagonal pairs are already folded into the relation.
    """
    entries: dict = {}
    extras: list = []
    diagonal: bool = False
    for ln, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            if line == "DELTA":
                diagonal = True
                continue
            if line.startswith("DELTA "):
                upath = line[len("DELTA "):].strip()
                for idx, t in load_universe(os.path.join(base_dir, upath), language):
                    entries.setdefault(idx, set()).add((t, t))
                    extras.append((idx, t))
                continue
            if "::" not in line:
                raise InputError("expected 'index :: lhs ~ rhs'")
            idx_text, rest = line.split("::", 1)
            if "~" not in rest:
                raise InputError("expected 'lhs ~ rhs' after '::'")
            lhs_text, rhs_text = rest.split("~", 1)
            idx = _parse_index(language, idx_text)
            n = _ctx_len(language, idx)
            lhs = _parse_term(language, lhs_text.strip(), n)
            rhs = _parse_term(language, rhs_text.strip(), n)
            _check_entry(language, idx, lhs)
            _check_entry(language, idx, rhs)
            entries.setdefault(idx, set()).add((lhs, rhs))
        except (ParseError, TypecheckError, InputError) as e:
            raise InputError(f"{origin}:{ln}: {e}") from e
    return IndexedRelation(entries, diagonal=True if diagonal else ()), extras


def load_relation(path: str, language: str):
    try:
        lines = open(path, encoding="utf-8").read().splitlines()
    except OSError as e:
        raise InputError(f"cannot read relation file: {e}") from e
    base = os.path.dirname(os.path.abspath(path))
    return parse_relation(lines, language, base_dir=base, origin=path)


def load_universe(path: str, language: str):
    """Universe file: ``index :: term`` lines -> list of (index, term)."""
    out = []
    try:
        lines = open(path, encoding="utf-8").read().splitlines()
    except OSError as e:
        raise InputError(f"cannot read universe file: {e}") from e
    for ln, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            if "::" not in line:
                raise InputError("expected 'index :: term'")
            idx_text, term_text = line.split("::", 1)
            idx = _parse_index(language, idx_text)
            t = _parse_term(language, term_text.strip(), _ctx_len(language, idx))
            _check_entry(language, idx, t)
            out.append((idx, t))
        except (ParseError, TypecheckError, InputError) as e:
            raise InputError(f"{path}:{ln}: {e}") from e
    return out


def _witness_json(language: str, w: kernel.Witness | None):
    if w is None:
        return None
    out: dict = {}
    if w.clause:
        out["clause"] = w.clause
    if w.index is not None:
        out["index"] = _index_str(language, w.index)
    if w.pair is not None:
        out["pair"] = [_print_term(language, t) for t in w.pair]
    if w.context is not None:
        out["context"] = str(w.context)
    if w.detail:
        out["detail"] = w.detail
    return out


def _verdict_payload(language: str, v: Verdict) -> dict:
    return {
        "verdict": v.status,
        "witness": _witness_json(language, v.witness),
        "diagnostics": sorted(v.diagnostics),
    }


_EXIT = {"holds": 0, "fails": 1, "unknown": 2}


# ---------------------------------------------------------------------------
# commands


def _cmd_typecheck(cfg: RunConfig, args) -> tuple[dict, dict, int]:
    ctx = _cbpv_context(args)
    t = _parse_term(cfg.language, args.term, len(ctx) if ctx is not None else None)
    if cfg.language == "xcl":
        payload = {"sort": "term", "term": print_xcl(t), "size": xcl.term_size(t)}
    elif cfg.language == "fgcbv":
        payload = {
            "sort": "value" if isinstance(t, fgcbv.FgValue) else "comp",
            "term": print_fgcbv(t),
            "size": fgcbv.term_size(t),
        }
    else:
        ty = typecheck(ctx or (), t)
        payload = {
            "term": print_cbpv(t),
            "type": print_cbpv_type(ty),
            "context": [print_cbpv_type(phi) for phi in (ctx or ())],
        }
    return payload, {}, 0


def _cbpv_context(args):
    text = getattr(args, "context", None)
    if text is None:
        return None
    ty, ctx = parse_cbpv_index(text.strip() + " |- F unit")
    return ctx


def _cmd_trace(cfg: RunConfig, args) -> tuple[dict, dict, int]:
    t = _parse_term(cfg.language, args.term)
    records: list[dict] = []
    if cfg.language == "xcl":
        label = parse_xcl(args.label) if args.label else None
        for arrow, term in xcl.trace(t, label, fuel=cfg.fuel):
            records.append({"arrow": arrow, "term": print_xcl(term)})
    elif cfg.language == "fgcbv":
        if not isinstance(t, fgcbv.FgComp):
            raise InputError("trace wants a computation; values do not step")
        records.append({"arrow": "", "term": print_fgcbv(t)})
        cur = t
        for _ in range(cfg.fuel):
            if not isinstance(cur, fgcbv.FgComp):
                break
            cur = fgcbv.fg_step(cur).target
            records.append({"arrow": "-->", "term": print_fgcbv(cur)})
    else:
        if not isinstance(t, CbpvComp):
            raise InputError("trace wants a computation; values do not step")
        typecheck((), t)
        records.append({"arrow": "", "term": print_cbpv(t)})
        for rule, term in cbpv_sem.trace_records(
            t, cfg.fuel, "literal-to-rule" in cfg.flags
        ):
            records.append({"arrow": rule, "term": print_cbpv(term)})
    return {"trace": records}, {"steps": len(records) - 1}, 0


def _cmd_normalize(cfg: RunConfig, args) -> tuple[dict, dict, int]:
    t = _parse_term(cfg.language, args.term)
    steps = 0
    if cfg.language == "xcl":
        cur = t
        while steps < cfg.fuel and not xcl.is_terminal(cur):
            cur = xcl.step(cur).target
            steps += 1
        done = xcl.is_terminal(cur)
    elif cfg.language == "fgcbv":
        cur = t
        while steps < cfg.fuel and isinstance(cur, fgcbv.FgComp):
            cur = fgcbv.fg_step(cur).target
            steps += 1
        done = not isinstance(cur, fgcbv.FgComp)
    else:
        typecheck((), t)
        if not isinstance(t, CbpvComp):
            return {"normal_form": _print_term(cfg.language, t),
                    "steps": 0, "status": "normalized"}, {"steps": 0}, 0
        cur = t
        literal = "literal-to-rule" in cfg.flags
        seen = {cur}
        looped = False
        while steps < cfg.fuel:
            succ = cbpv_sem.successors(cur, (), literal)
            if not succ:
                break
            cur = succ[0]
            steps += 1
            if cur in seen:
                looped = True
                break
            seen.add(cur)
        done = not cbpv_sem.successors(cur, (), literal) and not looped
        if looped:
            # a revisited term is a proof this run has no normal form
            payload = {"normal_form": None, "steps": steps, "status": "looping"}
            return payload, {"steps": steps}, 1
    payload = {
        "normal_form": _print_term(cfg.language, cur) if done else None,
        "steps": steps,
        "status": "normalized" if done else "fuel-exhausted",
    }
    return payload, {"steps": steps}, 0 if done else 2


def _labels_for(cfg: RunConfig):
    if cfg.language == "xcl":
        return tuple(xcl.enumerate_terms(cfg.label_size))
    return tuple(fgcbv.enumerate_values(cfg.label_size, "fix" in cfg.flags))


def check_sim_verdict(cfg: RunConfig, rel: IndexedRelation) -> Verdict:
    if cfg.language == "xcl":
        return xcl.check_applicative_simulation(rel, _labels_for(cfg), fuel=cfg.fuel)
    if cfg.language == "fgcbv":
        return fgcbv.fg_check_simulation(rel, _labels_for(cfg), fuel=cfg.fuel)
    return cbpv_sem.check_weak_simulation(
        rel,
        subst_value_size=cfg.value_size,
        fuel=cfg.fuel,
        testing_weakening="testing-weakening" in cfg.flags,
        literal_to="literal-to-rule" in cfg.flags,
    )


def _cmd_check_sim(cfg: RunConfig, args) -> tuple[dict, dict, int]:
    rel, _ = load_relation(args.relation, cfg.language)
    v = check_sim_verdict(cfg, rel)
    payload = _verdict_payload(cfg.language, v)
    payload["pairs"] = rel.size()
    return payload, {"pairs": rel.size()}, _EXIT[v.status]


def logrel_chain(cfg: RunConfig, rel: IndexedRelation, extras=()):
    """The step-indexed chain for a relation file's seeds, per language."""
    pair_rows = [
        (idx, a, b) for idx, ps in sorted(rel.items(), key=lambda kv: repr(kv[0]))
        for (a, b) in sorted(ps, key=repr)
    ]
    if cfg.language == "xcl":
        seeds = [t for _, a, b in pair_rows for t in (a, b)]
        seeds += [t for _, t in extras]
        tools = SemTools(xcl.sim_semantics(()), cfg.fuel)
        terms: dict = {}
        for s in seeds:
            terms.setdefault(s, None)
            for r in tools.weak_terms(s):
                terms.setdefault(r, None)
        chain = xcl.logrel_xcl(
            tuple(terms), _labels_for(cfg), cfg.depth, fuel=cfg.fuel
        )
    elif cfg.language == "fgcbv":
        vals = [t for idx, a, b in pair_rows for t in (a, b) if idx == fgcbv.VAL]
        comps = [t for idx, a, b in pair_rows for t in (a, b) if idx == fgcbv.COMP]
        vals += [t for idx, t in extras if idx == fgcbv.VAL]
        comps += [t for idx, t in extras if idx == fgcbv.COMP]
        chain = fgcbv.fg_logrel(vals, comps, _labels_for(cfg), cfg.depth, fuel=cfg.fuel)
    else:
        seeds = [(idx, t) for idx, a, b in pair_rows for t in (a, b)]
        seeds += list(extras)
        universe = cbpv_sem.closure_universe(
            seeds, subst_value_size=cfg.value_size
        )
        chain = cbpv_sem.logrel_cbpv(
            universe,
            cfg.depth,
            fuel=cfg.fuel,
            subst_value_size=cfg.value_size,
            testing_weakening="testing-weakening" in cfg.flags,
            literal_to="literal-to-rule" in cfg.flags,
        )
    return pair_rows, chain


def _cmd_logrel(cfg: RunConfig, args) -> tuple[dict, dict, int]:
    rel, extras = load_relation(args.relation, cfg.language)
    pair_rows, chain = logrel_chain(cfg, rel, extras)
    last = chain[-1]
    rows = []
    dropped = 0
    for idx, a, b in pair_rows:
        kept = last.has(idx, a, b)
        dropped += 0 if kept else 1
        rows.append(
            {
                "index": _index_str(cfg.language, idx),
                "lhs": _print_term(cfg.language, a),
                "rhs": _print_term(cfg.language, b),
                "retained": kept,
            }
        )
    payload = {
        "depth": cfg.depth,
        "stabilized_at": kernel.stabilization_point(chain),
        "pairs": rows,
        "verdict": "holds" if dropped == 0 else "fails",
        "dropped": dropped,
    }
    stats = {"pairs": len(rows), "chain_sizes": [r.size() for r in chain]}
    return payload, stats, 0 if dropped == 0 else 1


def _cmd_ctx_oracle(cfg: RunConfig, args) -> tuple[dict, dict, int]:
    p = _parse_term(cfg.language, args.lhs)
    q = _parse_term(cfg.language, args.rhs)
    if cfg.language == "xcl":
        v = xcl.context_oracle(p, q, cfg.ctx_size, fuel=cfg.fuel)
    elif cfg.language == "fgcbv":
        if fgcbv.sort_of(p) != fgcbv.sort_of(q):
            raise InputError("both terms must have the same sort")
        v = fgcbv.context_oracle(
            p, q, cfg.ctx_size, fuel=cfg.fuel, with_fix="fix" in cfg.flags
        )
    else:
        tp = typecheck((), p)
        tq = typecheck((), q)
        if tp != tq:
            raise InputError(
                f"terms have different types: {print_cbpv_type(tp)} vs "
                f"{print_cbpv_type(tq)}"
            )
        v = cbpv_sem.context_oracle(p, q, cfg.ctx_size, fuel=cfg.fuel)
    payload = _verdict_payload(cfg.language, v)
    payload["lhs"] = _print_term(cfg.language, p)
    payload["rhs"] = _print_term(cfg.language, q)
    return payload, {}, _EXIT[v.status]


def _cmd_selftest(cfg: RunConfig, args) -> tuple[dict, dict, int]:
    from . import selftest

    results, stats = selftest.run_selftest(seed=cfg.seed, fuel=cfg.fuel)
    failures = [r for r in results if not r["ok"]]
    payload = {
        "results": results,
        "passed": len(results) - len(failures),
        "failed": len(failures),
    }
    return payload, stats, 0 if not failures else 1


_HANDLERS = {
    "typecheck": _cmd_typecheck,
    "trace": _cmd_trace,
    "normalize": _cmd_normalize,
    "check-sim": _cmd_check_sim,
    "logrel": _cmd_logrel,
    "ctx-oracle": _cmd_ctx_oracle,
    "selftest": _cmd_selftest,
}


# ---------------------------------------------------------------------------
# argument parsing and entry point


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="simrel",
        description="program-equivalence workbench for three small calculi",
    )
    ap.add_argument("--language", "-L", choices=LANGUAGES, help="term language")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--fuel", type=int, default=1000)
        sp.add_argument("--depth", type=int, default=16)
        sp.add_argument("--labels", dest="label_size", type=int, default=3,
                        help="max size of label/argument terms")
        sp.add_argument("--value-size", dest="value_size", type=int, default=3,
                        help="max size of enumerated substitution values")
        sp.add_argument("--ctx-size", dest="ctx_size", type=int, default=5)
        sp.add_argument("--flag", dest="flags", action="append", default=[],
                        choices=("fix", "testing-weakening", "literal-to-rule"))

    sp = sub.add_parser("typecheck", help="parse (and for cbpv type) one term")
    sp.add_argument("term")
    sp.add_argument("--context", help="cbpv typing context, e.g. 'unit, U F unit'")
    common(sp)

    sp = sub.add_parser("trace", help="deterministic reduction trace")
    sp.add_argument("term")
    sp.add_argument("--label", help="xcl: apply this label at the terminal")
    common(sp)

    sp = sub.add_parser("normalize", help="reduce to a normal form")
    sp.add_argument("term")
    common(sp)

    sp = sub.add_parser("check-sim", help="check a relation file for simulation")
    sp.add_argument("relation")
    common(sp)

    sp = sub.add_parser("logrel", help="step-indexed retention of a relation file")
    sp.add_argument("relation")
    common(sp)

    sp = sub.add_parser("ctx-oracle", help="brute-force contextual preorder")
    sp.add_argument("lhs")
    sp.add_argument("rhs")
    common(sp)

    sp = sub.add_parser("selftest", help="run the golden corpus")
    common(sp)

    return ap


def run(cfg: RunConfig, args) -> tuple[dict, dict, int]:
    """Dispatch one configured command; returns (canonical, stats, exit)."""
    payload, stats, code = _HANDLERS[cfg.command](cfg, args)
    report = {
        "command": cfg.command,
        "language": cfg.language,
        "config": {
            "fuel": cfg.fuel,
            "depth": cfg.depth,
            "label_size": cfg.label_size,
            "value_size": cfg.value_size,
            "ctx_size": cfg.ctx_size,
            "flags": sorted(cfg.flags),
            "seed": cfg.seed,
        },
    }
    report.update(payload)
    return report, stats, code


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    t0 = time.perf_counter()
    try:
        seed = int(os.environ.get("WORKBENCH_SEED", "20260819"))
        language = args.language
        if args.command == "selftest":
            language = language or "cbpv"
        if language is None:
            raise InputError("--language is required")
        cfg = RunConfig(
            language=language,
            command=args.command,
            fuel=args.fuel,
            depth=args.depth,
            label_size=args.label_size,
            value_size=args.value_size,
            ctx_size=args.ctx_size,
            flags=frozenset(args.flags),
            seed=seed,
        )
        report, stats, code = run(cfg, args)
    except (ParseError, TypecheckError, SortMismatchError, InputError) as e:
        print(json.dumps({"error": str(e)}, sort_keys=True, separators=(",", ":")))
        return 3
    stats = dict(stats)
    stats["wall_ms"] = int((time.perf_counter() - t0) * 1000)
    print(json.dumps(report, sort_keys=True, separators=(",", ":")))
    print(json.dumps({"stats": stats}, sort_keys=True, separators=(",", ":")))
    return code


if __name__ == "__main__":
    sys.exit(main())

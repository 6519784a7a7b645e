"""Command-line interface: the full two-stage pipeline plus utility
subcommands (check, genfun, tune, words, stats, bench).

All randomness derives from one root seed (flag --seed, else the
SHAPEGEN_SEED environment variable, else 0) through a fixed split
scheme: the word stream uses SeedSequence([seed, 0]), the j-th chain
SeedSequence([seed, 1, j]), and its initializer SeedSequence([seed, 2, j]).
Identical spec bytes, flags and seed therefore reproduce samples.jsonl
byte for byte.

Exit codes: 0 success, 1 parse/configuration error, 2 ambiguous
expression (witness reported), 3 initialization failure, 4 chain
failure.  Errors are emitted as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

import numpy as np

from .bench import RingSpec, bench_to_csv, bench_to_json, run_bench, uniformity_report
from .constraints import CompileError, DEFAULT_EPS, compile_spec
from .genfun import TuneError, convergence_radius, generating_function, \
    mean_length_function, taylor_coefficients, tune_z
from .hitrun import ChainError, ChainState, ChainStats, RejectionBudgetError, \
    SamplerConfig, VARIANTS, hr_step, run_chain, _nudge_into_box
from .lang import check_ambiguity, disambiguate
from .pso import InitializationError, PsoConfig, find_initial
from .sexpr import ParseError, format_regex, parse_spec
from .signals import boundary_jumps, project_continuity, render, to_csv
from .stats import InsufficientDataError, WordStats, same_length_test
from .words import WordTooLongError, build_oracle, sample_word

__all__ = ["main"]

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_AMBIGUOUS = 2
EXIT_INIT = 3
EXIT_CHAIN = 4


def _fail(code: int, kind: str, message: str, **extra) -> int:
    doc = {"error": kind, "message": message}
    doc.update(extra)
    print(json.dumps(doc), file=sys.stderr)
    return code


def _note(msg: str):
    print(msg, file=sys.stderr)


def _root_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("SHAPEGEN_SEED")
    return int(env) if env else 0


def _load_spec(path: str):
    with open(path, "r", encoding="utf-8") as f:
        return parse_spec(f.read())


def _atomic_write(path: str, text: str):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        f.write(text)
    os.replace(tmp, path)


def _coeffs_json(poly):
    out = []
    for c in poly.coeffs:
        f = Fraction(c)
        out.append(int(f) if f.denominator == 1 else str(f))
    return out


def _pick_z(spec, args):
    """Resolve --z / --mean-length into a concrete Boltzmann parameter."""
    g = generating_function(spec.regex)
    if args.z is not None:
        return args.z, None
    tuned = tune_z(g, args.mean_length)
    return tuned.z, tuned


def _parse_fixed_word(spec, text: str) -> tuple[str, ...]:
    names = sorted((d.name for d in spec.decls), key=len, reverse=True)
    if any(sep in text for sep in (" ", ",")):
        parts = [p for p in text.replace(",", " ").split() if p]
    else:
        # greedy longest-match tokenization of a run-together word like ABCFA
        parts = []
        i = 0
        while i < len(text):
            for name in names:
                if text.startswith(name, i):
                    parts.append(name)
                    i += len(name)
                    break
            else:
                raise ValueError(f"cannot tokenize fixed word {text!r} at offset {i}")
    unknown = [p for p in parts if p not in set(names)]
    if unknown:
        raise ValueError(f"unknown atom {unknown[0]!r} in fixed word")
    return tuple(parts)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_check(args) -> int:
    try:
        spec = _load_spec(args.spec)
    except (OSError, ParseError) as e:
        return _fail(EXIT_PARSE, "parse", str(e))
    report = check_ambiguity(spec.regex)
    doc = {"ambiguous": report.ambiguous,
           "witness": list(report.witness) if report.witness else None,
           "regex": format_regex(spec.regex)}
    if report.ambiguous and args.disambiguate:
        rewritten = disambiguate(spec.regex)
        doc["disambiguated"] = format_regex(rewritten)
        print(json.dumps(doc))
        _note("ambiguous; unambiguous rewrite emitted")
        return EXIT_OK
    print(json.dumps(doc))
    if report.ambiguous:
        _note(f"ambiguous; witness: {' '.join(report.witness) or 'eps'}")
        return EXIT_AMBIGUOUS
    _note("unambiguous")
    return EXIT_OK


def cmd_genfun(args) -> int:
    try:
        spec = _load_spec(args.spec)
    except (OSError, ParseError) as e:
        return _fail(EXIT_PARSE, "parse", str(e))
    report = check_ambiguity(spec.regex)
    if report.ambiguous:
        return _fail(EXIT_AMBIGUOUS, "ambiguous",
                     "expression is ambiguous; counting series would be wrong",
                     witness=list(report.witness))
    g = generating_function(spec.regex)
    nz = mean_length_function(g)
    rconv = convergence_radius(g)
    doc = {
        "numerator": _coeffs_json(g.num),
        "denominator": _coeffs_json(g.den),
        "rconv": rconv if rconv != float("inf") else "inf",
        "mean_length_numerator": _coeffs_json(nz.num),
        "mean_length_denominator": _coeffs_json(nz.den),
        "taylor": taylor_coefficients(g, args.taylor),
    }
    print(json.dumps(doc))
    _note(f"Rconv = {rconv:g}; first word counts: {doc['taylor']}")
    return EXIT_OK


def cmd_tune(args) -> int:
    try:
        spec = _load_spec(args.spec)
        g = generating_function(spec.regex)
        tuned = tune_z(g, args.mean_length)
    except (OSError, ParseError, ValueError) as e:
        return _fail(EXIT_PARSE, "parse" if isinstance(e, (OSError, ParseError)) else "config",
                     str(e))
    doc = {"z": tuned.z, "rconv": tuned.rconv,
           "mean_length_at_z": tuned.mean_length_at_z}
    print(json.dumps(doc))
    _note(f"z = {tuned.z:.5f} (Rconv {tuned.rconv:.5f})")
    return EXIT_OK


def cmd_words(args) -> int:
    try:
        spec = _load_spec(args.spec)
    except (OSError, ParseError) as e:
        return _fail(EXIT_PARSE, "parse", str(e))
    report = check_ambiguity(spec.regex)
    if report.ambiguous:
        return _fail(EXIT_AMBIGUOUS, "ambiguous",
                     "expression is ambiguous; run `shapegen check --disambiguate`",
                     witness=list(report.witness))
    try:
        z, _ = _pick_z(spec, args)
        oracle = build_oracle(spec.regex, z)
    except (TuneError, ValueError) as e:
        return _fail(EXIT_PARSE, "config", str(e))
    seed = _root_seed(args)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0]))
    emitted = 0
    attempts = 0
    while emitted < args.count:
        try:
            word = sample_word(oracle, rng)
        except WordTooLongError as e:
            return _fail(EXIT_PARSE, "config", str(e))
        attempts += 1
        if args.exact_length is not None and len(word) != args.exact_length:
            if attempts > 10_000_000:
                return _fail(EXIT_PARSE, "config",
                             f"no word of length {args.exact_length} in 1e7 draws")
            continue
        emitted += 1
        if args.format == "jsonl":
            print(json.dumps({"word": list(word.atoms), "length": len(word)}))
        else:
            print(" ".join(word.atoms) or "eps")
    return EXIT_OK


def cmd_stats(args) -> int:
    ws = WordStats()
    try:
        stream = open(args.jsonl, "r", encoding="utf-8") if args.jsonl != "-" else sys.stdin
        with stream:
            for line in stream:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                ws.add(tuple(rec["word"]))
    except (OSError, KeyError, json.JSONDecodeError) as e:
        return _fail(EXIT_PARSE, "parse", f"bad JSONL input: {e}")
    doc = ws.as_dict()
    if args.length is not None:
        if args.spec is None:
            return _fail(EXIT_PARSE, "config", "--length needs --spec to enumerate the language")
        try:
            spec = _load_spec(args.spec)
            p = same_length_test(ws, args.length, spec.regex)
        except (OSError, ParseError, InsufficientDataError) as e:
            return _fail(EXIT_PARSE, "config", str(e))
        doc["same_length_p"] = p
        if p is None:
            doc["same_length_note"] = (
                f"skipped: fewer than two words of length {args.length} in the language")
    print(json.dumps(doc))
    return EXIT_OK


def cmd_sample(args) -> int:
    try:
        spec = _load_spec(args.spec)
    except (OSError, ParseError) as e:
        return _fail(EXIT_PARSE, "parse", str(e))
    report = check_ambiguity(spec.regex)
    regex = spec.regex
    if report.ambiguous:
        if not args.disambiguate:
            return _fail(EXIT_AMBIGUOUS, "ambiguous",
                         "expression is ambiguous; pass --disambiguate or rewrite",
                         witness=list(report.witness))
        regex = disambiguate(regex)
        _note(f"disambiguated to: {format_regex(regex)}")

    fixed_word = None
    if args.fixed_word:
        try:
            fixed_word = _parse_fixed_word(spec, args.fixed_word)
        except ValueError as e:
            return _fail(EXIT_PARSE, "config", str(e))

    oracle = None
    if fixed_word is None:
        try:
            z, _ = _pick_z(spec, args)
            oracle = build_oracle(regex, z)
        except (TuneError, ValueError) as e:
            return _fail(EXIT_PARSE, "config", str(e))

    try:
        space = compile_spec(spec, args.epsilon)
    except CompileError as e:
        return _fail(EXIT_PARSE, "config", str(e))

    seed = _root_seed(args)
    word_rng = np.random.default_rng(np.random.SeedSequence([seed, 0]))
    sampler = SamplerConfig(variant=args.variant, burn_in=args.burn_in,
                            thin=args.thin, max_line_rejects=args.max_line_rejects)
    out_dir = args.out
    sig_dir = os.path.join(out_dir, "signals")
    os.makedirs(sig_dir, exist_ok=True)

    decls = spec.decl_map
    records = []
    chain: ChainState | None = None
    chain_word: tuple[str, ...] | None = None
    chain_index = -1
    word_ids: dict[tuple[str, ...], int] = {}
    total_stats = ChainStats()
    t0 = time.perf_counter()

    for i in range(args.count):
        if fixed_word is not None:
            word = fixed_word
        else:
            try:
                word = sample_word(oracle, word_rng).atoms
            except WordTooLongError as e:
                return _fail(EXIT_PARSE, "config", str(e))
        word_id = word_ids.setdefault(word, len(word_ids))
        if space.ndim == 0:
            valuation = space.reinstate(np.empty(0))
            step = 0
        else:
            if chain is None or word != chain_word:
                chain_index += 1
                pso_cfg = PsoConfig(
                    swarm_size=args.pso_swarm, max_iterations=args.pso_iters,
                    restarts=args.pso_restarts,
                    seed=int(np.random.SeedSequence([seed, 2, chain_index]).generate_state(1)[0]))
                try:
                    x0 = find_initial(space, pso_cfg)
                except InitializationError as e:
                    return _fail(EXIT_INIT, "init", str(e),
                                 best_penalty=e.best_penalty)
                rng = np.random.default_rng(np.random.SeedSequence([seed, 1, chain_index]))
                chain = ChainState(current=_nudge_into_box(space, x0),
                                   step_index=0, rng=rng, stats=total_stats)
                chain_word = word
                try:
                    for _ in range(sampler.burn_in):
                        hr_step(space, chain, sampler)
                except ChainError as e:
                    return _fail(EXIT_CHAIN, "chain", str(e),
                                 stats=e.stats.as_dict() if e.stats else None)
            try:
                for _ in range(sampler.thin):
                    hr_step(space, chain, sampler)
            except ChainError as e:
                return _fail(EXIT_CHAIN, "chain", str(e),
                             stats=e.stats.as_dict() if e.stats else None)
            valuation = space.reinstate(chain.current)
            step = chain.step_index
        if args.project_continuity:
            valuation = project_continuity(decls, word, valuation)
        signal = render(decls, word, valuation, dt=args.dt)
        _atomic_write(os.path.join(sig_dir, f"{i:03d}.csv"), to_csv(signal))
        records.append({"index": i, "word": list(word), "word_id": word_id,
                        "chain": chain_index, "step": step,
                        "valuation": valuation})

    _atomic_write(os.path.join(out_dir, "samples.jsonl"),
                  "".join(json.dumps(r) + "\n" for r in records))
    wall = time.perf_counter() - t0
    summary = {"count": args.count, "out": out_dir,
               "chains": chain_index + 1,
               "acceptance_rate": total_stats.acceptance_rate,
               "proposals": total_stats.proposals}
    print(json.dumps(summary))
    _note(f"wrote {args.count} signals to {sig_dir} in {wall:.1f}s "
          f"(acceptance {total_stats.acceptance_rate:.2%})")
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.ring_cmd != "ring":
        return _fail(EXIT_PARSE, "config", "only `bench ring` is available")
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    bad = [v for v in variants if v not in VARIANTS]
    if bad:
        return _fail(EXIT_PARSE, "config",
                     f"unknown variant {bad[0]!r}; pick from {', '.join(VARIANTS)}")
    try:
        ring = RingSpec(args.dims, args.c1, args.c2, args.box)
    except ValueError as e:
        return _fail(EXIT_PARSE, "config", str(e))
    results = run_bench(ring, variants, args.samples, repeats=args.repeats,
                        seed=_root_seed(args), burn_in=args.burn_in,
                        thin=args.thin, rejection_budget=args.rejection_budget)
    extra = {"ring": {"n": ring.n, "c1": ring.c1, "c2": ring.c2, "c": ring.c}}
    if args.out:
        _atomic_write(args.out + ".json", bench_to_json(results, extra))
        _atomic_write(args.out + ".csv", bench_to_csv(results))
        _note(f"wrote {args.out}.json and {args.out}.csv")
    else:
        print(bench_to_json(results, extra))
    for r in results:
        _note(f"{r.variant}: acceptance {r.acceptance_rate:.2%} "
              f"(+/- {r.acceptance_std:.2%}), {r.wall_time:.2f}s per repeat")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_spec(p):
    p.add_argument("--spec", required=True, help="path to a .sexp spec file")


def _add_seed(p):
    p.add_argument("--seed", type=int, default=None,
                   help="root seed (default: $SHAPEGEN_SEED or 0)")


def _add_z_group(p, required: bool):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--z", type=float, default=None,
                   help="Boltzmann parameter (must be below Rconv)")
    g.add_argument("--mean-length", type=float, default=None,
                   help="tune z for this mean word length")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="shapegen",
        description="Generate asymptotically uniform random signals from "
                    "shape-expression specs.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("check", help="parse a spec and check regex ambiguity")
    _add_spec(p)
    p.add_argument("--disambiguate", action="store_true",
                   help="emit an unambiguous rewrite instead of failing")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("genfun", help="print the counting series and Rconv")
    _add_spec(p)
    p.add_argument("--taylor", type=int, default=10, metavar="K",
                   help="number of series coefficients to print (default 10)")
    p.set_defaults(fn=cmd_genfun)

    p = sub.add_parser("tune", help="solve for z giving a target mean length")
    _add_spec(p)
    p.add_argument("--mean-length", type=float, required=True)
    p.set_defaults(fn=cmd_tune)

    p = sub.add_parser("words", help="sample shape words (Boltzmann)")
    _add_spec(p)
    _add_seed(p)
    _add_z_group(p, required=True)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--format", choices=("text", "jsonl"), default="text")
    p.add_argument("--exact-length", type=int, default=None,
                   help="keep only words of this length (naive rejection)")
    p.set_defaults(fn=cmd_words)

    p = sub.add_parser("stats", help="summarize a JSONL word stream")
    p.add_argument("--jsonl", default="-", help="JSONL file ('-' for stdin)")
    p.add_argument("--spec", default=None, help="spec for the same-length test")
    p.add_argument("--length", type=int, default=None,
                   help="run the same-length uniformity test at this length")
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("sample", help="full pipeline: words, valuations, signals")
    _add_spec(p)
    _add_seed(p)
    _add_z_group(p, required=False)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--fixed-word", default=None,
                   help="skip the word sampler; e.g. 'ABCFA' or 'A B C F A'")
    p.add_argument("--variant", choices=[v for v in VARIANTS if v != "rejection"],
                   default="hr_shrink")
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--max-line-rejects", type=int, default=100_000)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPS,
                   help="equality-relaxation half-width (default 1e-3)")
    p.add_argument("--dt", type=float, default=0.01, help="sampling period (s)")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--pso-swarm", type=int, default=30,
                   help="initializer swarm size (pipeline default 30)")
    p.add_argument("--pso-iters", type=int, default=100,
                   help="initializer iterations per restart (pipeline default 100)")
    p.add_argument("--pso-restarts", type=int, default=20)
    p.add_argument("--project-continuity", action="store_true",
                   help="overwrite dependent offsets so segments join exactly")
    p.add_argument("--disambiguate", action="store_true")
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("bench", help="hyper-ring benchmark harness")
    p.add_argument("ring_cmd", choices=("ring",))
    p.add_argument("--dims", type=int, default=3)
    p.add_argument("--c1", type=float, default=1.0)
    p.add_argument("--c2", type=float, default=0.9)
    p.add_argument("--box", type=float, default=1.0)
    p.add_argument("--variants", default="rejection,hr,hr_shrink,cdhr,cdhr_shrink")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--rejection-budget", type=int, default=10_000_000)
    p.add_argument("--out", default=None, help="report path prefix (.csv/.json)")
    _add_seed(p)
    p.set_defaults(fn=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "fn", None) is cmd_sample:
        if args.fixed_word is None and args.z is None and args.mean_length is None:
            return _fail(EXIT_PARSE, "config",
                         "give exactly one of --z or --mean-length (or --fixed-word)")
    try:
        return args.fn(args)
    except RejectionBudgetError as e:
        return _fail(EXIT_CHAIN, "chain", str(e))


if __name__ == "__main__":
    sys.exit(main())

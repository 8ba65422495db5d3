"""Command-line entry point: ``congest-dso <command> ...``.

Exit codes: 0 success, 1 usage error, 2 bad input data, 3 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import random
import sys

from . import oracle
from .apsisp import compute_2apsisp
from .baseline import answer_general_no_pre, answer_seb_no_pre
from .config import Config, ConfigError, load_config
from .dso_fastpre import answer_batch_pre, preprocess_fast_pre
from .dso_fastquery import answer_batch_fast, preprocess_fast_query
from .exclude import ExcludeRequest, exclude_multi_source, random_independent_paths
from .graph import Graph, GraphError, build_sp_tree, generate_deep, generate_random, read_graph, write_graph
from .lowerbound import bits_from_seed, build_fig1, build_fig2, verify_claims
from .queries import Query, answers_csv, random_queries, read_queries
from .simulator import CostModel, NetworkRun

EXIT_USAGE, EXIT_DATA, EXIT_VERIFY = 1, 2, 3

ALGOS = ("fastquery", "fastpre", "general", "seb", "exclude", "apsisp")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_k_range(text: str) -> list[int]:
    """``"1..64"`` means powers of two from 1 to 64; ``"3,5,8"`` is taken literally."""
    if ".." in text:
        lo, hi = (int(x) for x in text.split("..", 1))
        if lo < 1 or hi < lo:
            raise ValueError(f"bad range {text!r}")
        out, k = [], lo
        while k <= hi:
            out.append(k)
            k *= 2
        return out
    return [int(x) for x in text.split(",") if x.strip()]


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: str | None, data: str | bytes) -> None:
    if path is None or path == "-":
        sys.stdout.write(data.decode() if isinstance(data, bytes) else data)
        return
    mode = "wb" if isinstance(data, bytes) else "w"
    with open(path, mode) as fh:
        fh.write(data)


def _run(g: Graph, cfg: Config, seed: int) -> NetworkRun:
    return NetworkRun(g, bandwidth=cfg.bandwidth, seed=seed, simulate_broadcasts=cfg.simulate_broadcasts)


def _graph_for(n: int, m: int | None, cfg: Config, seed: int, deep: bool) -> Graph:
    m = m or 3 * n
    if deep:
        return generate_deep(n, m, seed)
    return generate_random(n, m, cfg.max_weight, seed)


# ---------------------------------------------------------------------------
# commands


def cmd_generate(args, cfg: Config) -> int:
    g = _graph_for(args.n, args.m, cfg.with_overrides(max_weight=args.max_w), args.seed, args.deep)
    _write(args.out, write_graph(g))
    return 0


def _preprocess(run, algo, cfg, seed):
    cm = CostModel(cfg.mode)
    if algo == "fastquery":
        return preprocess_fast_query(run, cm, seed)
    return preprocess_fast_pre(run, cfg.c, cfg.c_g, seed, cm)


def cmd_preprocess(args, cfg: Config) -> int:
    g = read_graph(_read(args.graph))
    run = _run(g, cfg, args.seed)
    state = _preprocess(run, args.algo, cfg, args.seed)
    if args.algo == "fastquery":
        words = state.max_storage_words(run)
    else:
        words = state.storage_words(0)
    _write(args.out, run.ledger.to_csv())
    print(f"preprocessing_rounds={state.preprocessing_rounds} max_words_per_node={words}", file=sys.stderr)
    return 0


def answer(run, algo, cfg, batch, seed, state=None):
    cm = CostModel(cfg.mode)
    if algo == "fastquery":
        state = state or preprocess_fast_query(run, cm, seed)
        return answer_batch_fast(run, state, batch)
    if algo == "fastpre":
        state = state or preprocess_fast_pre(run, cfg.c, cfg.c_g, seed, cm)
        return answer_batch_pre(run, state, batch)
    if algo == "general":
        return answer_general_no_pre(run, batch, cm)
    if algo == "seb":
        return answer_seb_no_pre(run, batch, cm, seed)
    raise ValueError(f"cannot answer queries with {algo}")


def cmd_query(args, cfg: Config) -> int:
    g = read_graph(_read(args.graph))
    batch = read_queries(_read(args.queries))
    run = _run(g, cfg, args.seed)
    answers = answer(run, args.algo, cfg, batch, args.seed)
    _write(args.out, answers_csv(answers, with_case=args.algo in ("fastpre", "fastquery")))
    return 0


def cmd_apsisp(args, cfg: Config) -> int:
    g = read_graph(_read(args.graph))
    run = _run(g, cfg, args.seed)
    table = compute_2apsisp(run, CostModel(cfg.mode), args.seed)
    _write(args.out, table.to_csv())
    return 0


def _exclude_trial(g, cfg, seed, k):
    rng = random.Random(seed)
    xs = rng.sample(range(g.n), min(k, g.n))
    reqs = [ExcludeRequest(x, random_independent_paths(build_sp_tree(g, x), rng)) for x in xs]
    run = _run(g, cfg, seed)
    results = exclude_multi_source(run, reqs, CostModel(cfg.mode), seed)
    checks = bad = 0
    for res in results:
        for p in res.paths:
            truth = oracle.excluded(g, res.source, p.edges)
            for (y, root), d in res.values.items():
                if root == p.subtree_root:
                    checks += 1
                    bad += d != truth[y]
    return run, checks, bad, 0


def _query_trial(g, cfg, seed, algo, k):
    rng = random.Random(seed)
    if algo == "seb":
        q0 = random_queries(g, 1, rng)[0]
        batch = [Query(rng.randrange(g.n), rng.randrange(g.n), q0.u, q0.v) for _ in range(k)]
    else:
        batch = random_queries(g, k, rng)
    run = _run(g, cfg, seed)
    answers = answer(run, algo, cfg, batch, seed)
    bad = under = 0
    for a in answers:
        truth = oracle.rp(g, a.query.x, a.query.y, a.query.edge)
        bad += a.distance != truth
        under += a.distance < truth
    return run, len(answers), bad, under


def _apsisp_trial(g, cfg, seed):
    run = _run(g, cfg, seed)
    table = compute_2apsisp(run, CostModel(cfg.mode), seed).matrix()
    truth = oracle.sisp2_table(g)
    bad = sum(table[x][y] != truth[x][y] for x in range(g.n) for y in range(g.n))
    return run, g.n * g.n, bad, 0


def trial(algo, g, cfg, seed, k):
    if algo == "exclude":
        return _exclude_trial(g, cfg, seed, k)
    if algo == "apsisp":
        return _apsisp_trial(g, cfg, seed)
    return _query_trial(g, cfg, seed, algo, k)


def cmd_verify(args, cfg: Config) -> int:
    checks = bad = under = 0
    for t in range(args.trials):
        seed = args.seed * 1000003 + t
        g = _graph_for(args.n, args.m, cfg, seed, deep=bool(t % 2))
        _, c, b, u = trial(args.algo, g, cfg, seed, args.k)
        checks, bad, under = checks + c, bad + b, under + u
    rate = bad / checks if checks else 0.0
    allowance = cfg.failure_allowance if args.algo == "fastpre" else 0.0
    ok = rate <= allowance and under == 0
    print(f"algo={args.algo} trials={args.trials} checks={checks} mismatches={bad} "
          f"undershoots={under} mismatch_rate={rate:.6f} {'PASS' if ok else 'FAIL'}")
    return 0 if ok else EXIT_VERIFY


BENCH_FIELDS = ["algorithm", "n", "m", "k", "mode", "rounds", "peak_congestion", "exact_match_rate"]


def bench_rows(algo, n, ks, cfg: Config, seed: int, m: int | None = None, deep: bool = False) -> list[dict]:
    """One row per batch size; preprocessing (when any) is shared across rows."""
    g = _graph_for(n, m, cfg, seed, deep)
    rows = []
    state = None
    run = _run(g, cfg, seed)
    if algo in ("fastquery", "fastpre"):
        state = _preprocess(run, algo, cfg, seed)
    for k in ks:
        rng = random.Random(seed * 7919 + k)
        if algo in ("fastquery", "fastpre", "general", "seb"):
            if algo == "seb":
                q0 = random_queries(g, 1, rng)[0]
                batch = [Query(rng.randrange(n), rng.randrange(n), q0.u, q0.v) for _ in range(k)]
            else:
                batch = random_queries(g, k, rng)
            if state is None:
                run = _run(g, cfg, seed)
            answers = answer(run, algo, cfg, batch, seed, state)
            row = run.ledger.rows[-1]
            good = sum(a.distance == oracle.rp(g, a.query.x, a.query.y, a.query.edge) for a in answers)
            rate = good / len(answers)
        else:
            r, checks, bad, _ = trial(algo, g, cfg, seed + k, k)
            row = r.ledger.rows[-1]
            rate = 1 - bad / checks if checks else 1.0
        rows.append({
            "algorithm": algo, "n": n, "m": g.m, "k": k, "mode": cfg.mode,
            "rounds": row.rounds, "peak_congestion": row.peak_congestion, "exact_match_rate": f"{rate:.4f}",
        })
    return rows


def cmd_bench(args, cfg: Config) -> int:
    ks = parse_k_range(args.k)
    rows = bench_rows(args.algo, args.n, ks, cfg, args.seed, args.m, args.deep)
    buf = io.StringIO()
    w = csv.DictWriter(buf, BENCH_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    _write(args.out, buf.getvalue())
    return 0


def _bits_file(path: str):
    rows = []
    for line in _read(path).splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            if set(line) - set("01 "):
                raise GraphError(f"bit file lines must contain only 0/1: {line!r}")
            rows.append([int(ch) for ch in line.replace(" ", "")])
    return rows


def cmd_lowerbound(args, cfg: Config) -> int:
    rng = random.Random(args.bits_seed)
    if args.family == "fig1":
        if args.bits_file:
            rows = _bits_file(args.bits_file)
            if len(rows) != 2 * args.k:
                raise GraphError(f"fig1 bit file needs {2 * args.k} rows (Alice then Bob)")
            bits_a, bits_b = rows[: args.k], rows[args.k:]
        else:
            bits_a = bits_from_seed(rng, args.k, args.q)
            bits_b = bits_from_seed(rng, args.k, args.q)
        build = build_fig1(args.k, args.q, args.ell, bits_a, bits_b, verify=False)
    else:
        if args.bits_file:
            rows = _bits_file(args.bits_file)
            bits = [b for row in rows for b in row]
        else:
            bits = bits_from_seed(rng, args.n)
        build = build_fig2(args.n, bits, args.stretch, args.directed, verify=False)
    results = verify_claims(build)
    _write(args.out, write_graph(build.graph))
    lines = build.manifest_lines()
    passed = sum(r.ok for r in results)
    lines.append(f'{{"claims_passed": {passed}, "claims_total": {len(results)}}}')
    manifest = "\n".join(lines) + "\n"
    if args.manifest:
        _write(args.manifest, manifest)
    else:
        sys.stderr.write(manifest)
    return 0 if passed == len(results) else EXIT_VERIFY


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="congest-dso", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="key=value configuration file")
    p.add_argument("--mode", choices=("charged", "faithful"), help="SSSP cost model (overrides config)")
    p.add_argument("--bandwidth", type=int, help="words per link per round (overrides config)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("generate", help="write a random graph file")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int)
    s.add_argument("--max-w", type=int, default=100)
    s.add_argument("--deep", action="store_true", help="long shortest paths")
    s.add_argument("--seed", type=int, help="defaults to the config seed")
    s.add_argument("--out")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("preprocess", help="run a DSO preprocessing and print its ledger")
    s.add_argument("--graph", required=True)
    s.add_argument("--algo", choices=("fastquery", "fastpre"), required=True)
    s.add_argument("--seed", type=int, help="defaults to the config seed")
    s.add_argument("--out")
    s.set_defaults(func=cmd_preprocess)

    s = sub.add_parser("query", help="answer a query file")
    s.add_argument("--graph", required=True)
    s.add_argument("--queries", required=True)
    s.add_argument("--algo", choices=("fastquery", "fastpre", "general", "seb"), required=True)
    s.add_argument("--seed", type=int, help="defaults to the config seed")
    s.add_argument("--out")
    s.set_defaults(func=cmd_query)

    s = sub.add_parser("apsisp", help="all-pairs second simple shortest paths")
    s.add_argument("--graph", required=True)
    s.add_argument("--seed", type=int, help="defaults to the config seed")
    s.add_argument("--out")
    s.set_defaults(func=cmd_apsisp)

    s = sub.add_parser("verify", help="compare an algorithm with the brute-force oracle")
    s.add_argument("--algo", choices=ALGOS, required=True)
    s.add_argument("--n", type=int, default=24)
    s.add_argument("--m", type=int)
    s.add_argument("--k", type=int, default=20, help="queries (or sources) per trial")
    s.add_argument("--trials", type=int, default=5)
    s.add_argument("--seed", type=int, help="defaults to the config seed")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("bench", help="measured rounds and congestion per batch size, as CSV")
    s.add_argument("--algo", choices=ALGOS, required=True)
    s.add_argument("--n", type=int, default=64)
    s.add_argument("--m", type=int)
    s.add_argument("--k", default="1..64")
    s.add_argument("--deep", action="store_true")
    s.add_argument("--seed", type=int, help="defaults to the config seed")
    s.add_argument("--out")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("lowerbound", help="build a lower-bound graph and check its claims")
    s.add_argument("--family", choices=("fig1", "fig2"), required=True)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--q", type=int, default=2)
    s.add_argument("--ell", type=int, default=4)
    s.add_argument("--n", type=int, default=8)
    s.add_argument("--stretch", type=int, default=1)
    s.add_argument("--directed", action="store_true")
    s.add_argument("--bits-seed", type=int, default=0)
    s.add_argument("--bits-file")
    s.add_argument("--out")
    s.add_argument("--manifest")
    s.set_defaults(func=cmd_lowerbound)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config).with_overrides(mode=args.mode, bandwidth=args.bandwidth)
        if cfg.bandwidth < 1:
            parser.error("--bandwidth must be >= 1")
        if getattr(args, "seed", 0) is None:
            args.seed = cfg.seed
        return args.func(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

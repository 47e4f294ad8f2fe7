"""Command-line driver for sample generation and coverage experiments.

Commands: ``generate``, ``campaign``, ``curve``, ``subblocks``, ``plotdata``.
Every command is deterministic given its flags and seed; worker count only
affects scheduling.  Exit codes: 0 success, 1 I/O failure, 2 usage or domain
error, 3 censored-results warning.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import secrets
import sys
from functools import partial
from pathlib import Path

import numpy as np

from . import coverage as cov
from .orthogonal_arrays import build_oa_strength2, randomize_oa, tang_expand
from .rng import substream
from .sampling import (
    OsParameters,
    generate_lhs,
    generate_os,
    infer_block_size,
    is_latin,
    is_orthogonal_sample,
    sample_to_csv,
    sample_to_json,
)

SEED_ENV_VAR = "HYPERCOVERAGE_SEED"


# ---------------------------------------------------------------------------
# Config files: one `key = value` pair per line, mirroring the long flags.
# Flags given on the command line override config values.
# ---------------------------------------------------------------------------


def parse_config(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def format_config(pairs: dict[str, str]) -> str:
    return "".join(f"{k} = {v}\n" for k, v in pairs.items())


def _apply_config(argv: list[str]) -> list[str]:
    """Expand ``--config PATH`` into leading flags so explicit flags win."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise ValueError("--config requires a path")
    pairs = parse_config(Path(argv[i + 1]).read_text())
    rest = argv[:i] + argv[i + 2 :]
    injected: list[str] = []
    for k, v in pairs.items():
        injected += [f"--{k}", v]
    # subcommand first, then config-derived flags, then explicit flags
    return rest[:1] + injected + rest[1:]


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        return int(env)
    return secrets.randbits(63)


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_text(text)
    os.replace(tmp, path)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _effective_config(args: argparse.Namespace, keys: list[str]) -> dict[str, str]:
    """Flag-name -> string-value view of the effective run configuration."""
    out: dict[str, str] = {}
    for key in keys:
        val = getattr(args, key.replace("-", "_"))
        if val is None:
            continue
        out[key] = str(val)
    return out


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


def cmd_generate(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    rng = substream(seed)
    p: int | None = None

    if args.sampler == "lhs":
        if args.n is None or args.d is None:
            raise ValueError("sampler 'lhs' requires --n and --d")
        sample = generate_lhs(args.n, args.d, rng)
    elif args.sampler == "os":
        if args.d is None or (args.p is None and args.n is None):
            raise ValueError("sampler 'os' requires --d and one of --p / --n")
        if args.p is not None:
            p = args.p
        else:
            p = infer_block_size(args.n, args.d)
            if p is None:
                raise ValueError(
                    f"--sampler os needs n to be a perfect d-th power; "
                    f"n={args.n} is not p**{args.d} for any integer p >= 2"
                )
        sample = generate_os(OsParameters(p, args.d), rng)
    else:  # tang
        if args.s is None or args.d is None:
            raise ValueError("sampler 'tang' requires --s and --d")
        oa = randomize_oa(build_oa_strength2(args.s, args.d), rng)
        sample = tang_expand(oa, rng)

    if p is None:
        p = infer_block_size(sample.n, sample.d)

    print(f"master seed: {seed}")
    print(f"latin: {str(is_latin(sample)).lower()}")
    if p is not None:
        verdict = is_orthogonal_sample(sample, OsParameters(p, sample.d))
        print(f"orthogonal: {str(verdict).lower()}")

    text = sample_to_csv(sample) if args.format == "csv" else sample_to_json(sample, p)
    _write_atomic(Path(args.out), text)
    print(f"wrote {sample.n}x{sample.d} sample to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# campaign
# ---------------------------------------------------------------------------


def _parse_int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _parse_float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def cmd_campaign(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    n_list = _parse_int_list(args.n_list)
    thresholds = tuple(_parse_float_list(args.thresholds))
    if not n_list:
        raise ValueError("--n-list must name at least one n")
    outdir = Path(args.out)
    print(f"master seed: {seed}")

    results = []
    for n in n_list:
        cfg = cov.CampaignConfig(
            n=n, d=args.d, t=args.t, thresholds=thresholds,
            replicates=args.replicates, max_trials=args.max_trials,
            sampler=args.sampler, master_seed=seed,
        )
        res = cov.run_campaign(cfg, workers=args.workers)
        results.append(res)
        _write_atomic(outdir / f"campaign_n{n}.csv", cov.campaign_csv(res))
        means = ", ".join(
            f"{_fmt(tau)} -> {m:.4g}" for tau, m in zip(thresholds, res.mean_trials)
        )
        print(f"n={n}: mean trials per threshold: {means}")

    gradients: dict[str, float] = {}
    if len(set(n_list)) >= 3:
        for tau in thresholds:
            try:
                gradients[_fmt(tau)] = cov.fit_loglog_gradient(results, tau)
            except ValueError as exc:
                print(f"gradient @ {_fmt(tau)}: not computed ({exc})", file=sys.stderr)
        for key, slope in gradients.items():
            print(f"gradient @ {key}: {slope:.4f}")
        grad_lines = ["threshold,slope"] + [
            f"{key},{_fmt(slope)}" for key, slope in gradients.items()
        ]
        _write_atomic(outdir / "gradients.csv", "\n".join(grad_lines) + "\n")

    summary = {
        "config": {
            "command": "campaign",
            "n_list": n_list,
            "d": args.d,
            "t": args.t,
            "thresholds": list(thresholds),
            "replicates": args.replicates,
            "max_trials": args.max_trials,
            "sampler": args.sampler,
            "master_seed": seed,
        },
        "campaigns": [cov.campaign_summary(r) for r in results],
        "gradients": gradients,
    }
    _write_atomic(outdir / "summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")

    run_cfg = _effective_config(
        args, ["n-list", "d", "t", "thresholds", "replicates", "max-trials", "sampler", "workers"]
    )
    run_cfg["seed"] = str(seed)
    _write_atomic(outdir / "run_config.txt", format_config(run_cfg))

    fully_censored = any(
        int(c) == r.replicates for r in results for c in r.censored_replicates
    )
    if fully_censored:
        print("warning: at least one threshold was censored in every replicate",
              file=sys.stderr)
        return 3
    return 0


# ---------------------------------------------------------------------------
# curve
# ---------------------------------------------------------------------------


def cmd_curve(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    if args.k_max < 1:
        raise ValueError(f"--k-max must be >= 1, got {args.k_max}")
    cfg = cov.CampaignConfig(
        n=args.n, d=args.d, t=args.t, replicates=args.replicates,
        sampler=args.sampler, master_seed=seed,
    )
    print(f"master seed: {seed}")
    points = cov.coverage_curve(cfg, args.k_max, workers=args.workers)
    _write_atomic(Path(args.out), cov.curve_csv(points))
    print(f"wrote {len(points)} curve rows to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# subblocks
# ---------------------------------------------------------------------------


def cmd_subblocks(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    params = OsParameters(args.p, args.d)
    cfg = cov.CampaignConfig(
        n=params.n, d=args.d, t=2, thresholds=(args.coverage_target,),
        replicates=args.replicates, max_trials=args.max_trials,
        sampler=args.sampler, master_seed=seed,
    )
    outdir = Path(args.out)
    print(f"master seed: {seed}")

    rows = cov._map_replicates(
        partial(cov.subblock_replicate, cfg), cfg.replicates, args.workers
    )

    pairs = list(itertools.combinations(range(args.d), 2))
    scale_per_trial = params.p ** (args.d - 2)
    summary_lines = ["pair,replicate,trials,min,max,variance"]
    positive_var = np.zeros(len(pairs), dtype=int)
    pooled_counts = np.zeros((len(pairs), params.p, params.p), dtype=np.int64)
    total_trials = 0

    for r, (k, counts) in enumerate(rows):
        total_trials += k
        pooled_counts += counts
        for s, (i, j) in enumerate(pairs):
            norm = counts[s] / (k * scale_per_trial)
            var = float(norm.var())
            if var > 0.0:
                positive_var[s] += 1
            summary_lines.append(
                f"x{i + 1}-x{j + 1},{r},{k},{_fmt(norm.min())},{_fmt(norm.max())},{_fmt(var)}"
            )

    for s, (i, j) in enumerate(pairs):
        hist = cov.SubBlockHistogram(
            p=params.p, subspace_pair=(i, j), counts=pooled_counts[s],
            normalized=pooled_counts[s] / (total_trials * scale_per_trial),
            trials=total_trials,
        )
        _write_atomic(outdir / f"subblocks_x{i + 1}_x{j + 1}.csv", cov.histogram_csv(hist))
        frac = positive_var[s] / cfg.replicates
        print(
            f"pair x{i + 1}-x{j + 1}: normalized range "
            f"[{hist.normalized.min():.4g}, {hist.normalized.max():.4g}], "
            f"replicates with positive variance: {frac:.0%}"
        )

    _write_atomic(outdir / "variance_summary.csv", "\n".join(summary_lines) + "\n")

    run_cfg = _effective_config(
        args, ["p", "d", "sampler", "coverage-target", "replicates", "max-trials", "workers"]
    )
    run_cfg["seed"] = str(seed)
    _write_atomic(outdir / "run_config.txt", format_config(run_cfg))
    return 0


# ---------------------------------------------------------------------------
# plotdata
# ---------------------------------------------------------------------------


def cmd_plotdata(args: argparse.Namespace) -> int:
    summary = json.loads(Path(args.summary).read_text())
    lines = ["n,d,t,sampler,threshold,mean_trials,log10_n,log10_mean_trials"]
    for camp in summary["campaigns"]:
        for tau, mean in zip(camp["thresholds"], camp["mean_trials"]):
            if mean is None:
                print(
                    f"skipping censored threshold {tau} for n={camp['n']}",
                    file=sys.stderr,
                )
                continue
            lines.append(
                f"{camp['n']},{camp['d']},{camp['t']},{camp['sampler']},"
                f"{_fmt(tau)},{_fmt(mean)},{_fmt(math.log10(camp['n']))},"
                f"{_fmt(math.log10(mean))}"
            )
    _write_atomic(Path(args.out), "\n".join(lines) + "\n")
    print(f"wrote {len(lines) - 1} plot rows to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypercoverage",
        description="Generate space-filling samples and measure subspace coverage.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=None,
                       help=f"master seed (default: ${SEED_ENV_VAR} or a fresh one, printed)")
        p.add_argument("--config", help="key = value file mirroring the flags; flags override")

    g = sub.add_parser("generate", help="generate one sample and validate it")
    g.add_argument("--sampler", choices=["lhs", "os", "tang"], required=True)
    g.add_argument("--n", type=int, help="points per trial (lhs; or os instead of --p)")
    g.add_argument("--p", type=int, help="blocks per axis (os)")
    g.add_argument("--d", type=int, required=True, help="dimensions")
    g.add_argument("--s", type=int, help="symbols of the base array (tang)")
    g.add_argument("--out", required=True)
    g.add_argument("--format", choices=["csv", "json"], default="csv")
    add_common(g)
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("campaign", help="trials-to-threshold campaign over an n list")
    c.add_argument("--n-list", required=True, help="comma-separated n values")
    c.add_argument("--d", type=int, required=True)
    c.add_argument("--t", type=int, required=True)
    c.add_argument("--thresholds", default="0.25,0.5,0.75,1.0")
    c.add_argument("--replicates", type=int, default=200)
    c.add_argument("--max-trials", type=int, default=1_000_000)
    c.add_argument("--sampler", choices=["lhs", "os"], default="lhs")
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--out", required=True, help="output directory")
    add_common(c)
    c.set_defaults(func=cmd_campaign)

    v = sub.add_parser("curve", help="coverage-vs-trials curve against the closed form")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--d", type=int, required=True)
    v.add_argument("--t", type=int, required=True)
    v.add_argument("--k-max", type=int, required=True)
    v.add_argument("--replicates", type=int, default=200)
    v.add_argument("--sampler", choices=["lhs", "os"], default="lhs")
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--out", required=True, help="output CSV path")
    add_common(v)
    v.set_defaults(func=cmd_curve)

    b = sub.add_parser("subblocks", help="sub-block occupancy of 2-D projections")
    b.add_argument("--p", type=int, required=True)
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--sampler", choices=["lhs", "os"], default="lhs")
    b.add_argument("--coverage-target", type=float, default=0.25)
    b.add_argument("--replicates", type=int, default=20)
    b.add_argument("--max-trials", type=int, default=100_000)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--out", required=True, help="output directory")
    add_common(b)
    b.set_defaults(func=cmd_subblocks)

    d = sub.add_parser("plotdata", help="reshape a campaign summary into log10/log10 columns")
    d.add_argument("--summary", required=True, help="summary.json from a campaign run")
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_plotdata)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(argv)
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, ValueError) else 1

    try:
        return args.func(args)
    except (ValueError, OverflowError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

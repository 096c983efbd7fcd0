"""Command-line front end: ``johnson-drift {analyze,hitting,simulate,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage or domain error.
Outputs go to ``--out-dir`` (default: ``$JOHNSON_DRIFT_OUT`` or the current
directory).  Every CSV starts with a ``#schema=`` line and floats are written
with 17 significant digits, so reruns with the same flags are byte-identical.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional, Sequence

from . import __version__
from .chain import build_chain, drift_profile, equilibrium_distance
from .errors import DomainError, ResourceError
from .hitting import hitting_time_table, log_ratio_vs_iid
from .oracle import Report, oracle_report
from .shells import JohnsonParams, shell_profile
from .svg import PALETTE, Panel, Series, render
from .walker import FULL_STATE, LUMPED, WalkConfig, simulate_batch, simulate_lumped

OUT_ENV = "JOHNSON_DRIFT_OUT"


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def parse_betas(text: str) -> list[float]:
    try:
        betas = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad beta list {text!r}") from None
    if not betas:
        raise argparse.ArgumentTypeError("empty beta list")
    return betas


def parse_range(text: str) -> tuple[int, int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        return int(text), int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; expected a..b") from None


class Outputs:
    """Tracks written files for the run manifest."""

    def __init__(self, out_dir: Path, prefix: str):
        self.dir = out_dir
        self.prefix = prefix
        self.files: list[str] = []
        out_dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        p = self.dir / f"{self.prefix}{name}"
        self.files.append(str(p))
        return p

    def write_csv(self, name: str, schema: str, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
        p = self.path(name)
        with open(p, "w", newline="") as fh:
            fh.write(f"#schema={schema}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([fmt(v) for v in row])
        return p

    def write_text(self, name: str, text: str) -> Path:
        p = self.path(name)
        p.write_text(text)
        return p

    def manifest(self, command: str, parameters: dict) -> Path:
        p = self.dir / f"{self.prefix}manifest.json"
        payload = {
            "subcommand": command,
            "parameters": parameters,
            "version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "outputs": self.files,
        }
        p.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return p


def _outputs(args, default_prefix: str) -> Outputs:
    out_dir = Path(args.out_dir or os.environ.get(OUT_ENV) or ".")
    prefix = args.prefix if args.prefix is not None else default_prefix
    return Outputs(out_dir, prefix)


def cmd_analyze(args) -> int:
    params = JohnsonParams(args.n, args.k)
    params.require_chain()
    profile = shell_profile(params)
    chain = build_chain(params, args.beta)
    drift = drift_profile(chain)
    flat = drift_profile(build_chain(params, 0.0))
    out = _outputs(args, "analyze_")

    rows = []
    for d in range(params.d_max + 1):
        inc = profile.increments[d] if d < params.d_max else None
        rows.append((d, profile.sizes[d], profile.log_sizes[d], inc, flat.drift[d]))
    out.write_csv("shells.csv", "shells/v1",
                  ("d", "shell_size", "log_shell_size", "entropy_increment", "drift"), rows)
    out.write_csv(
        "chain.csv", "chain/v1", ("d", "p", "q", "r", "drift", "variance"),
        [(d, chain.p[d], chain.q[d], chain.r[d], drift.drift[d], drift.variance[d])
         for d in range(params.d_max + 1)],
    )
    scalars = [
        ("n", params.n),
        ("k", params.k),
        ("d_max", params.d_max),
        ("d_hat_star", float(profile.continuous_argmax)),
        ("d_hat_star_exact", str(profile.continuous_argmax)),
        ("argmax_set", " ".join(str(d) for d in sorted(profile.argmax_set))),
        ("beta", args.beta),
        ("d_star", float(drift.equilibrium)),
        ("d_star_flat", float(flat.equilibrium)),
    ]
    out.write_csv("scalars.csv", "scalars/v1", ("name", "value"),
                  scalars)
    if args.svg:
        ds = list(range(params.d_max + 1))
        d_star = float(flat.equilibrium)
        panels = [
            Panel("Entropy landscape", "distance d", "S(d)",
                  [Series(ds, profile.log_sizes)], vlines=[d_star]),
            Panel("Entropy increment", "distance d", "S(d+1) - S(d)",
                  [Series(ds[:-1], profile.increments)], hlines=[0.0], vlines=[d_star]),
            Panel("Drift", "distance d", "E[dd | d]",
                  [Series(ds, [float(x) for x in flat.drift])], hlines=[0.0], vlines=[d_star]),
        ]
        out.write_text("landscape.svg", render(panels))
    out.manifest("analyze", {"n": params.n, "k": params.k, "beta": args.beta})
    print(f"J({params.n},{params.k}): d_max={params.d_max} "
          f"d_hat_star={float(profile.continuous_argmax):.2f} d_star={float(flat.equilibrium):.2f} "
          f"d_star(beta={args.beta:g})={float(drift.equilibrium):.2f}")
    return 0


def cmd_hitting(args) -> int:
    params = JohnsonParams(args.n, args.k)
    params.require_chain()
    lo, hi = args.m if args.m is not None else (1, params.d_max)
    for m in (lo, hi):
        params.check_distance(m)
    ms = range(lo, hi + 1)
    out = _outputs(args, "hitting_")
    rows = []
    tables = {}
    for beta in args.beta:
        table = hitting_time_table(params, beta, exact=args.exact and beta == 0)
        tables[beta] = table
        for m in ms:
            num = den = None
            if table.h is not None:
                num, den = table.h[m].numerator, table.h[m].denominator
            rows.append((m, num, den, table.log_h[m], table.h_float[m], beta))
    out.write_csv("hitting.csv", "hitting/v1",
                  ("m", "h_exact_num", "h_exact_den", "log_h", "h_float", "beta"), rows)
    ratio = None
    if 0.0 in args.beta:
        ratio = [(m, log_ratio_vs_iid(params, m)) for m in ms if m >= 1]
        out.write_csv("ratio.csv", "ratio/v1", ("m", "log_ratio"), ratio)
    if args.svg:
        panels = [Panel("Expected hitting time", "initial distance m", "log E[tau]",
                        [Series(list(ms), [tables[b].log_h[m] for m in ms], f"beta={b:g}",
                                PALETTE[i % len(PALETTE)])
                         for i, b in enumerate(args.beta)])]
        if ratio:
            panels.append(Panel("Log ratio to IID sampling", "initial distance m",
                                "log(E[tau] / C(n,k))",
                                [Series([m for m, _ in ratio], [r for _, r in ratio])],
                                hlines=[0.0]))
        out.write_text("hitting.svg", render(panels))
    out.manifest("hitting", {"n": params.n, "k": params.k, "beta": args.beta, "m": [lo, hi],
                             "exact": args.exact})
    for beta, table in tables.items():
        print(f"beta={beta:g}: h_{lo}={table.h_float[lo]:.6g} h_{hi}={table.h_float[hi]:.6g}")
    return 0


def cmd_simulate(args) -> int:
    params = JohnsonParams(args.n, args.k)
    config = WalkConfig(
        params=params,
        beta=args.beta,
        steps=args.steps,
        trajectories=args.trajectories,
        base_seed=args.seed,
        start_distance=args.start,
        mode=args.mode,
        absorbing=args.absorbing,
        store_paths=not args.no_trajectories or args.svg,
        workers=args.threads,
    )
    if config.mode == LUMPED:
        batch = simulate_lumped(config, build_chain(params, args.beta))
    else:
        batch = simulate_batch(config)
    out = _outputs(args, "simulate_")
    if not args.no_trajectories:
        out.write_csv(
            "trajectories.csv", "trajectories/v1", ("trajectory_id", "t", "d"),
            ((i, t, int(d)) for i, row in enumerate(batch.distances) for t, d in enumerate(row.tolist())),
        )
    out.write_csv("summary.csv", "summary/v1", ("t", "mean", "std"),
                  ((t, m, s) for t, (m, s) in enumerate(zip(batch.mean_path, batch.std_path))))
    out.write_csv("hits.csv", "hits/v1", ("trajectory_id", "hit_step"), enumerate(batch.hit_times))
    d_star = None
    if params.supports_chain:
        d_star = float(equilibrium_distance(params, args.beta))
    if args.svg:
        ts = list(range(config.steps + 1))
        shown = batch.distances[: args.svg_trajectories]
        series = [Series(ts, row.tolist(), color="#7f7f7f", width=0.5, opacity=0.35) for row in shown]
        series.append(Series(ts, batch.mean_path.tolist(), "mean", PALETTE[0], width=2.5))
        panel = Panel(
            f"Distance process on J({params.n},{params.k}), beta={args.beta:g}",
            "step t", "distance d", series,
            bands=[(ts, (batch.mean_path - batch.std_path).tolist(),
                    (batch.mean_path + batch.std_path).tolist())],
            hlines=[d_star] if d_star is not None else [],
            ylim=(0, params.d_max),
        )
        out.write_text("trajectories.svg", render([panel], width=640, height=400))
    out.manifest("simulate", {
        "n": params.n, "k": params.k, "beta": args.beta, "start": args.start,
        "trajectories": args.trajectories, "steps": args.steps, "seed": args.seed,
        "mode": args.mode, "absorbing": args.absorbing, "threads": args.threads,
    })
    msg = f"final mean={batch.mean_path[-1]:.4f} std={batch.std_path[-1]:.4f}"
    if d_star is not None:
        msg += f" (d*={d_star:.2f})"
    hits = [h for h in batch.hit_times if h is not None]
    if hits:
        msg += f" hits={len(hits)}/{batch.n_trajectories} mean_hit={sum(hits) / len(hits):.4f}"
    print(msg)
    return 0


def cmd_verify(args) -> int:
    if args.max_n < 2:
        raise DomainError("--max-n must be at least 2")
    combined = Report(f"oracle suite, n <= {args.max_n}")
    sections = []
    for n in range(2, args.max_n + 1):
        for k in range(1, n):
            report = oracle_report(JohnsonParams(n, k), betas=tuple(args.beta))
            sections.append(report.to_dict())
            combined.extend(report)
            print(report.to_text())
    out = _outputs(args, "verify_")
    payload = {"passed": combined.passed, "max_n": args.max_n, "instances": sections}
    out.write_text("report.json", json.dumps(payload, indent=2) + "\n")
    out.manifest("verify", {"max_n": args.max_n, "beta": args.beta})
    status = "PASSED" if combined.passed else f"FAILED ({len(combined.failures)} checks)"
    print(f"oracle suite {status}")
    return 0 if combined.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="johnson-drift", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=None, help=f"output directory (env {OUT_ENV})")
    common.add_argument("--prefix", default=None, help="file name prefix (default: '<command>_')")
    instance = argparse.ArgumentParser(add_help=False)
    instance.add_argument("--n", type=int, required=True)
    instance.add_argument("--k", type=int, required=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common, instance], help="shell sizes, entropy and drift")
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("hitting", parents=[common, instance], help="expected hitting times")
    p.add_argument("--beta", type=parse_betas, default=[0.0], help="comma-separated, e.g. 0,0.5,1,2")
    p.add_argument("--m", type=parse_range, default=None, help="starting distances a..b (inclusive)")
    p.add_argument("--exact", action=argparse.BooleanOptionalAction, default=True,
                   help="attach exact rationals at beta=0")
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_hitting)

    p = sub.add_parser("simulate", parents=[common, instance], help="Monte Carlo trajectories")
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--start", type=int, default=1)
    p.add_argument("--trajectories", type=int, default=100)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=(FULL_STATE, LUMPED), default=FULL_STATE)
    p.add_argument("--absorbing", action="store_true", help="stop each trajectory at the target")
    p.add_argument("--threads", type=int, default=1, help="worker processes")
    p.add_argument("--no-trajectories", action="store_true", help="skip the per-step dump")
    p.add_argument("--svg", action="store_true")
    p.add_argument("--svg-trajectories", type=int, default=100)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", parents=[common], help="run the brute-force oracle suite")
    p.add_argument("--max-n", type=int, default=7)
    p.add_argument("--beta", type=parse_betas, default=[0.5, 1.0, 2.0])
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, ResourceError) as exc:
        print(f"johnson-drift {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command line entry point: ``tripnet build|check|stats|oracle|simulate|export``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .builder import BuildConfig, BuildError, build_network
from .consistency import inconsistent_triplets
from .heights import build_pair_digraph, break_cycles
from .network import FORMATS, InvalidNetworkError, from_json, network_stats, serialize_network
from .oracle import BudgetExceeded, OracleBudget, min_reticulations_oracle
from .simulation import SimulationError, run_recombination, run_table1
from .triplets import TripletFormatError, parse_triplets

log = logging.getLogger("tripnet")


class UsageError(Exception):
    pass


class DomainError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_triplets(path: str):
    try:
        return parse_triplets(_read(path))
    except TripletFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _load_network(path: str):
    try:
        net = from_json(_read(path))
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None
    return net


def _cfg(args) -> BuildConfig:
    return BuildConfig(mode=args.mode, branch_width=args.branch_width, seed=args.seed)


def _losses(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad loss list {text!r}") from None
    if not values or any(not 0 <= v < 1 for v in values):
        raise argparse.ArgumentTypeError("losses must lie in [0, 1)")
    return values


def cmd_build(args) -> int:
    ts = _load_triplets(args.triplets)
    if args.dump_pairs:
        Path(args.dump_pairs).write_text(break_cycles(build_pair_digraph(ts)).to_dot())
    try:
        net = build_network(ts, _cfg(args))
    except BuildError as exc:
        raise DomainError(str(exc)) from None
    log.info("built network: R=%d", net.reticulation_count)
    _write(args, serialize_network(net, args.format))
    return 0


def cmd_check(args) -> int:
    ts = _load_triplets(args.triplets)
    net = _load_network(args.network)
    try:
        bad = inconsistent_triplets(net, ts)
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    lines = [f"consistent: {len(ts) - len(bad)}/{len(ts)}"]
    lines += [f"inconsistent: {t}" for t in bad]
    _write(args, "\n".join(lines) + "\n")
    return 1 if bad else 0


def cmd_stats(args) -> int:
    net = _load_network(args.network)
    try:
        st = network_stats(net)
    except InvalidNetworkError as exc:
        raise DomainError(str(exc)) from None
    lines = [f"reticulations: {st.reticulation_count}", f"level: {st.level}"]
    lines += [f"block {b}: {c}" for b, c in st.per_block if c]
    _write(args, "\n".join(lines) + "\n")
    return 0


def cmd_oracle(args) -> int:
    ts = _load_triplets(args.triplets)
    budget = OracleBudget(max_leaves=args.max_leaves, max_reticulations=args.max_r)
    try:
        r = min_reticulations_oracle(ts, budget)
    except BudgetExceeded as exc:
        _write(args, f"exceeds budget: {exc}\n")
        return 1
    _write(args, f"min reticulations: {r}\n")
    return 0


def cmd_simulate(args) -> int:
    cfg = _cfg(args)
    try:
        if args.scenario == "table1":
            rep = run_table1(args.trials, args.loss, cfg, args.seed, n_leaves=args.leaves)
            for s in rep.summary:
                log.info("loss %.2f: min %d max %d mean %.2f", s.loss, s.min, s.max, s.mean)
        else:
            rep = run_recombination(args.trials, args.codons, cfg, args.seed)
    except SimulationError as exc:
        raise DomainError(str(exc)) from None
    if args.csv:
        Path(args.csv).write_text(rep.to_csv())
    _write(args, rep.to_json())
    return 0


def cmd_export(args) -> int:
    net = _load_network(args.network)
    try:
        _write(args, serialize_network(net, args.format))
    except InvalidNetworkError as exc:
        raise DomainError(str(exc)) from None
    return 0


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tripnet", description=__doc__)
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, build=False, fmt=False):
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--seed", type=int, default=0)
        if build:
            p.add_argument("--mode", choices=["fast", "normal", "slow"], default="normal")
            p.add_argument("--branch-width", type=int, default=3)
        if fmt:
            p.add_argument("--format", choices=sorted(FORMATS), default="json")

    p = sub.add_parser("build", help="triplets -> network")
    p.add_argument("--triplets", required=True)
    p.add_argument("--dump-pairs", metavar="DOT", help="also write the repaired pair digraph")
    common(p, build=True, fmt=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("check", help="network + triplets -> consistency report")
    p.add_argument("--network", required=True)
    p.add_argument("--triplets", required=True)
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("stats", help="network -> R, level, per-block counts")
    p.add_argument("--network", required=True)
    common(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("oracle", help="triplets -> minimum R by exhaustive search")
    p.add_argument("--triplets", required=True)
    p.add_argument("--max-r", type=int, default=2)
    p.add_argument("--max-leaves", type=int, default=5)
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("simulate", help="run a simulation protocol")
    p.add_argument("scenario", choices=["table1", "recomb"])
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--loss", type=_losses, default=[0.0, 0.2, 0.4, 0.6, 0.8])
    p.add_argument("--leaves", type=int, default=10)
    p.add_argument("--codons", type=int, default=50)
    p.add_argument("--csv", help="write per-trial records here")
    common(p, build=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("export", help="convert a JSON network to another format")
    p.add_argument("--network", required=True)
    common(p, fmt=True)
    p.set_defaults(func=cmd_export)
    return ap


def _header(args) -> str:
    skip = {"func", "verbose"}
    items = [f"{k}={v}" for k, v in sorted(vars(args).items()) if k not in skip]
    return "# tripnet " + " ".join(items)


def main(argv: list[str] | None = None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "trials", 0) is None:
        args.trials = 50 if args.scenario == "table1" else 100
    logging.basicConfig(
        level=logging.WARNING if not args.verbose else (logging.INFO if args.verbose == 1 else logging.DEBUG),
        format="%(message)s", stream=sys.stderr)
    print(_header(args), file=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"tripnet: error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"tripnet: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

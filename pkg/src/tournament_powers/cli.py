"""Command-line interface: generate, analyze, run, verify and sweep.

Exit codes: 0 ok, 2 usage or input error, 3 infeasible (strict
preconditions or oracle budget), 4 not found, 5 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .certificate import (
    KINDS,
    Certificate,
    absorber_certificate,
    cycle_power_certificate,
    partition_certificate,
    path_power_certificate,
    verify_certificate,
)
from .construct import blowup, no_tt_block, paley, random_reversal, random_tournament, transitive_tournament
from .core import (
    DomainError,
    InfeasibleError,
    InputError,
    NotFoundError,
    Tournament,
    strongly_connected_components,
)
from .extremal import greedy_transitive
from .median import median_order
from .oracle import DEFAULT_BUDGET, OracleBudget, exact_min_backward, max_transitive
from .pipeline import PipelineConfig, discover_absorber, find_cycle_power, partition_path_powers
from .sequencing import find_path_power

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_NOT_FOUND, EXIT_VERIFY = 0, 2, 3, 4, 5
HEADER = "TOURNAMENT v1"
TASKS = ("path-power", "partition", "cycle-power", "absorber")
TYPES = ("random", "transitive", "reversal", "blowup", "paley", "no-tt")


class VerificationFailure(Exception):
    pass


# ---------------------------------------------------------------------------
# tournament text format


def render_tournament(T: Tournament) -> str:
    rows = []
    for i in range(T.n):
        row = np.where(T.orient[i], "1", "0")
        row[i] = "-"
        rows.append("".join(row))
    return f"{HEADER} n={T.n}\n" + "\n".join(rows) + "\n"


def parse_tournament(text: str) -> Tournament:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError("empty tournament file")
    head = lines[0].split()
    if len(head) != 3 or " ".join(head[:2]) != HEADER or not head[2].startswith("n="):
        raise InputError(f"bad header {lines[0]!r}, expected '{HEADER} n=<n>'")
    try:
        n = int(head[2][2:])
    except ValueError as err:
        raise InputError(f"bad vertex count in header {lines[0]!r}") from err
    rows = lines[1:]
    if n < 1 or len(rows) != n:
        raise InputError(f"header says n={n} but {len(rows)} rows follow")
    mat = np.zeros((n, n), dtype=bool)
    for i, row in enumerate(rows):
        if len(row) != n:
            raise InputError(f"row {i} has {len(row)} characters, expected {n}")
        for j, ch in enumerate(row):
            if (ch == "-") != (i == j) or ch not in "01-":
                raise InputError(f"bad character {ch!r} at row {i}, column {j}")
            mat[i, j] = ch == "1"
    asym = mat == mat.T
    np.fill_diagonal(asym, False)
    if asym.any():
        i, j = map(int, np.argwhere(asym)[0])
        raise InputError(f"rows {i} and {j} disagree on the pair {{{i},{j}}}")
    return Tournament(mat)


def read_tournament(path: str) -> Tournament:
    try:
        return parse_tournament(Path(path).read_text())
    except OSError as err:
        raise InputError(f"cannot read {path}: {err}") from err


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _emit(report: dict) -> None:
    print(json.dumps(report, default=str, indent=1))


# ---------------------------------------------------------------------------
# commands


def _blocks(spec: str) -> list[int]:
    try:
        if "x" in spec:
            count, size = spec.split("x")
            return [int(size)] * int(count)
        return [int(s) for s in spec.split(",")]
    except ValueError as err:
        raise InputError(f"bad --blocks {spec!r}; use COUNTxSIZE or a comma list") from err


def generate(args) -> Tournament:
    kind = args.type
    if kind in ("random", "transitive", "reversal") and args.n is None:
        raise InputError(f"--type {kind} needs --n")
    if kind == "random":
        return random_tournament(args.n, args.seed)
    if kind == "transitive":
        return transitive_tournament(args.n)
    if kind == "reversal":
        if args.p is None:
            raise InputError("--type reversal needs --p")
        return random_reversal(args.n, args.p, args.seed)
    if kind == "paley":
        if args.q is None:
            raise InputError("--type paley needs --q")
        return paley(args.q)
    if kind == "no-tt":
        return no_tt_block(args.k, args.seed, n_vertices=args.n)
    if args.blocks is None:
        raise InputError("--type blowup needs --blocks")
    return blowup(_blocks(args.blocks), args.inner, args.seed).tournament


def cmd_gen(args) -> int:
    _write(render_tournament(generate(args)), args.out)
    return EXIT_OK


def _budget(args) -> OracleBudget:
    return DEFAULT_BUDGET if args.budget is None else OracleBudget(time_limit=args.budget)


def analyze(T: Tournament, seed: int = 0, budget: OracleBudget = DEFAULT_BUDGET) -> dict:
    n = T.n
    order = median_order(T, "local", seed)
    report: dict = {
        "n": n,
        "strong_components": len(strongly_connected_components(T)),
        "median_backward": order.backward_count,
        "eps_upper": str(Fraction(order.backward_count, n * n)),
        "eps_exact": "unavailable",
        "min_backward_exact": "unavailable",
        "greedy_transitive": len(greedy_transitive(T, range(n))),
        "max_transitive": "unavailable",
    }
    try:
        count, _ = exact_min_backward(T, budget)
        report["min_backward_exact"] = count
        report["eps_exact"] = str(Fraction(count, n * n))
    except InfeasibleError:
        pass
    try:
        report["max_transitive"] = len(max_transitive(T, budget))
    except InfeasibleError:
        pass
    return report


def cmd_analyze(args) -> int:
    _emit(analyze(read_tournament(args.file), args.seed, _budget(args)))
    return EXIT_OK


def _config(args) -> PipelineConfig:
    return PipelineConfig(
        mode=args.mode, block_size=args.m, stride=args.stride, retries=args.retries,
        seed=args.seed, budget=_budget(args),
    )


def auto_eps(T: Tournament, budget: OracleBudget = DEFAULT_BUDGET, seed: int = 0) -> Fraction:
    """Exact intransitivity when the oracle allows it, else the local-median upper estimate."""
    n = T.n
    try:
        count, _ = exact_min_backward(T, budget)
    except InfeasibleError:
        count = median_order(T, "local", seed).backward_count
    eps = Fraction(count, n * n)
    if eps == 0:
        raise NotFoundError("the tournament is transitive; it has no cycles")
    return min(eps, Fraction(1, 4) - Fraction(1, 4 * n * n))


def run_task(T: Tournament, task: str, k: int, cfg: PipelineConfig, eps=None, target=None) -> tuple[Certificate, dict]:
    if task == "path-power":
        res = find_path_power(T, None, k, target or T.n, cfg.seed, budget=cfg.budget, restarts=cfg.restarts)
        stats = {"length": len(res.sequence), "met": res.met, "route": res.route}
        return path_power_certificate(res.sequence, k, stats), stats
    if task == "partition":
        parts, stats = partition_path_powers(T, k, cfg)
        return partition_certificate(parts, k, stats), stats
    if task == "cycle-power":
        eps = auto_eps(T, cfg.budget, cfg.seed) if eps in (None, "auto") else Fraction(eps)
        cyc, stats = find_cycle_power(T, k, eps, cfg)
        stats["eps"] = str(eps)
        return cycle_power_certificate(cyc, k, stats), stats
    if task == "absorber":
        H, stats = discover_absorber(T, k, cfg)
        stats = {**stats, "r": H.r, "r_prime": H.r_prime, "capacity": H.capacity(T)}
        return absorber_certificate(H, stats), stats
    raise InputError(f"unknown task {task!r}")


def cmd_run(args) -> int:
    T = read_tournament(args.file)
    cert, stats = run_task(T, args.task, args.k, _config(args), args.eps, args.target)
    res = verify_certificate(T, cert)
    if not res:
        raise VerificationFailure(f"emitted certificate failed verification: {res.reason} {res.witness}")
    _write(cert.to_json() + "\n", args.out)
    if args.out not in (None, "-"):
        _emit({"task": args.task, "k": args.k, "verified": True, **stats})
    return EXIT_OK


def cmd_verify(args) -> int:
    T = read_tournament(args.file)
    try:
        cert = Certificate.from_json(Path(args.certificate).read_text())
    except OSError as err:
        raise InputError(f"cannot read {args.certificate}: {err}") from err
    if args.kind and cert.kind != args.kind:
        raise InputError(f"certificate kind {cert.kind!r} does not match expected {args.kind!r}")
    res = verify_certificate(T, cert)
    _emit({"kind": cert.kind, "k": cert.k, "ok": res.ok, "reason": res.reason,
           "witness": list(res.witness), **res.report})
    return EXIT_OK if res else EXIT_VERIFY


def cmd_sweep(args) -> int:
    cfg = _config(args)
    rows = []
    for seed in range(args.seed, args.seed + args.seeds):
        args.seed = seed
        T = generate(args)
        row: dict = {"seed": seed, "n": T.n}
        try:
            cert, stats = run_task(T, args.task, args.k, replace(cfg, seed=seed),
                                   args.eps, args.target)
            if not verify_certificate(T, cert):
                raise VerificationFailure(f"seed {seed}: certificate failed verification")
            row.update(status="ok", **_summary(args.task, cert))
        except NotFoundError as err:
            row.update(status="not-found", error=str(err))
        rows.append(row)
        print(json.dumps(row, default=str))
    ok = [r for r in rows if r["status"] == "ok"]
    summary = {"runs": len(rows), "ok": len(ok)}
    key = {"partition": "parts", "absorber": "r"}.get(args.task, "length")
    if ok:
        vals = [r[key] for r in ok]
        summary.update({f"mean_{key}": float(np.mean(vals)), f"max_{key}": max(vals), f"min_{key}": min(vals)})
    print(json.dumps(summary))
    return EXIT_OK


def _summary(task: str, cert: Certificate) -> dict:
    p = cert.payload
    if task == "partition":
        return {"parts": len(p["parts"])}
    if task == "absorber":
        return {"r": len(p["S"]) - 1}
    return {"length": len(p.get("sequence", p.get("cycle", [])))}


# ---------------------------------------------------------------------------
# argument parsing


def _eps(text: str):
    if text == "auto":
        return text
    try:
        value = Fraction(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"bad eps {text!r}") from err
    return value


def _gen_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--type", choices=TYPES, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float, help="reversal probability")
    p.add_argument("--q", type=int, help="Paley prime")
    p.add_argument("--blocks", help="COUNTxSIZE or comma-separated sizes")
    p.add_argument("--inner", default="random", choices=("random", "transitive", "paley", "cycle"))


def _run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--eps", type=_eps, default="auto")
    p.add_argument("--mode", choices=("strict", "opportunistic"), default="opportunistic")
    p.add_argument("--m", type=int, help="block size")
    p.add_argument("--stride", type=int, default=80)
    p.add_argument("--retries", type=int, default=20)
    p.add_argument("--target", type=int, help="path-power target length (default n)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tournament-powers", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=float, help="oracle time limit in seconds")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="write a tournament file")
    _gen_flags(p)
    p.add_argument("--k", type=int, default=4, help="no-tt: forbidden transitive size")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("analyze", parents=[common], help="intransitivity and transitive-subset report")
    p.add_argument("file")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("run", parents=[common], help="run a pipeline and write a verified certificate")
    p.add_argument("task", choices=TASKS)
    p.add_argument("file")
    _run_flags(p)
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", parents=[common], help="check a certificate against a tournament")
    p.add_argument("file")
    p.add_argument("certificate")
    p.add_argument("--kind", choices=KINDS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", parents=[common], help="run a task over consecutive seeds")
    p.add_argument("task", choices=TASKS)
    _gen_flags(p)
    _run_flags(p)
    p.add_argument("--seeds", type=int, default=10)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (InputError, DomainError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleError as err:
        print(f"infeasible: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NotFoundError as err:
        print(f"not found: {err}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (VerificationFailure, AssertionError) as err:
        print(f"verification failure: {err}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())

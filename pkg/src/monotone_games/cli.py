"""Command-line surface: condition checks, solves, verification, and the
golden-scenario reproduction table.

Exit codes: 0 success, 2 config error, 3 non-convergence, 4
verification failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .conditions import (check_interim_idc, check_interim_quasi_supermodular,
                         check_interim_single_crossing,
                         check_interim_supermodular)
from .config import ConfigError, RunConfig
from .games import StepStrategy
from .scenarios import SCENARIOS, load_scenario
from .solver import (SolveSettings, find_monotone_equilibrium,
                     find_perfect_monotone_equilibrium,
                     solve_generalized_auction, uniqueness_scan)
from .verification import check_admissibility, check_bne, check_perfection

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NONCONVERGED = 3
EXIT_VERIFY = 4


def _emit(args, payload: dict, name: str):
    text = json.dumps(payload, indent=None if args.json else 2, default=_coerce,
                      sort_keys=True)
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / f"{name}.json").write_text(text + "\n")
    if not args.quiet:
        print(text)


def _coerce(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if dataclasses.is_dataclass(obj):
        return dataclasses.asdict(obj)
    if isinstance(obj, StepStrategy):
        return {"breakpoints": list(obj.breakpoints),
                "actions": [list(a) if isinstance(a, tuple) else a
                            for a in obj.actions]}
    return str(obj)


def _write_csv(args, rows: list[dict], name: str):
    if not args.out or not rows:
        return
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / f"{name}.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)


def _load_config(args) -> RunConfig:
    if args.config:
        cfg = RunConfig.from_file(args.config)
    elif args.scenario:
        cfg = RunConfig({"schema": 1, "scenario": args.scenario,
                         "seed": args.seed or 0})
    else:
        raise ConfigError("pass --config PATH or --scenario NAME")
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def cmd_check_conditions(args) -> int:
    cfg = _load_config(args)
    if cfg.game is None:
        raise ConfigError("condition checks need a game")
    game = cfg.game
    body = cfg.data.get("conditions", {})
    grid = args.grid or body.get("cutoff_grid", 7)
    reports = {}
    for i in range(game.n):
        reports[f"player-{i}"] = {
            "single-crossing": check_interim_single_crossing(game, i).to_dict(),
            "increasing-differences": check_interim_idc(game, i).to_dict(),
            "supermodularity": check_interim_supermodular(game, i).to_dict(),
            "quasi-supermodularity":
                check_interim_quasi_supermodular(game, i).to_dict(),
        }
    requested = body.get("checks")
    all_hold = all(
        rep["verdict"] == "holds-on-grid"
        for per_player in reports.values()
        for name, rep in per_player.items()
        if requested is None or name in requested)
    _emit(args, {"reports": reports, "grid": grid, "all_hold": all_hold},
          "conditions")
    return EXIT_OK if all_hold else EXIT_VERIFY


def cmd_solve(args) -> int:
    cfg = _load_config(args)
    settings = cfg.solve_settings(
        **({"m_schedule": tuple(2 ** j for j in range(2, args.m_max.bit_length()))}
           if args.m_max else {}))
    if cfg.game is not None:
        result = find_monotone_equilibrium(cfg.game, settings)
        scan = None
        if args.scan:
            scan = uniqueness_scan(cfg.game, grid=args.grid or 65,
                                   settings=settings)
        payload = {
            "profile": [_coerce(s) for s in result.profile],
            "residual": result.residual,
            "converged": result.converged,
            "method": result.method,
            "uniqueness": None if scan is None else {
                "zero_profiles": scan.zero_profiles,
                "minimal_cells": scan.minimal_cells,
                "unique_minimal_cell": scan.unique_minimal_cell,
            },
        }
        _emit(args, payload, "solve")
        _write_csv(args, [{"iteration": tr.get("iteration", -1),
                           "move": tr.get("move", "")}
                          for tr in result.trace if "iteration" in tr],
                   "solve-trace")
        return EXIT_OK if result.converged else EXIT_NONCONVERGED
    report = solve_generalized_auction(cfg.auction, settings)
    payload = {
        "profile": [_coerce(s) for s in report.result.profile],
        "residual": report.result.residual,
        "converged": report.converged,
        "reason": report.reason,
        "levels": [dataclasses.asdict(l) for l in report.levels],
        "certificate": report.certificate.to_dict(),
    }
    _emit(args, payload, "solve")
    _write_csv(args, [dataclasses.asdict(l) for l in report.levels],
               "solve-levels")
    return EXIT_OK if report.converged else EXIT_NONCONVERGED


def cmd_solve_perfect(args) -> int:
    cfg = _load_config(args)
    settings = cfg.solve_settings(
        **({"m_schedule": tuple(2 ** j for j in range(2, args.m_max.bit_length()))}
           if args.m_max else {}))
    if cfg.game is None:
        return cmd_solve(args)
    report = find_perfect_monotone_equilibrium(cfg.game, settings)
    payload = {
        "converged": report.converged,
        "reason": report.reason,
        "per_level": report.per_level,
        "profile": None if report.result is None else
            [_coerce(s) for s in report.result.profile],
        "certificate": None if report.certificate is None else
            report.certificate.to_dict(),
    }
    _emit(args, payload, "solve-perfect")
    _write_csv(args, [{k: str(v) for k, v in lvl.items()}
                      for lvl in report.per_level], "perfect-levels")
    return EXIT_OK if report.converged else EXIT_NONCONVERGED


def cmd_verify(args) -> int:
    cfg = _load_config(args)
    if cfg.game is None:
        raise ConfigError("verification needs a game")
    game = cfg.game
    profile = cfg.profile(game)
    sequence = None
    seq_name = None
    if cfg.scenario is not None:
        verify_body = cfg.data.get("verify", {})
        prof_name = args.profile or verify_body.get("profile")
        if profile is None and prof_name:
            profile = cfg.scenario.profiles[prof_name]
        seq_name = args.sequence or verify_body.get("sequence")
        if seq_name:
            sequence = cfg.scenario.sequences[seq_name]
    if profile is None:
        raise ConfigError("no strategy profile given (config key 'profile' "
                          "or a scenario profile name)")
    bne = check_bne(game, profile, tol=1e-8)
    payload = {"bne": bne.to_dict()}
    ok = bne.is_epsilon_bne
    if sequence is not None:
        levels = cfg.data.get("verify", {}).get("levels",
                                                [2 ** j for j in range(3, 9)])
        cert = check_perfection(game, profile, sequence, levels)
        payload["perfection"] = cert.to_dict()
        ok = ok and cert.certified
    adm = check_admissibility(game, profile, type_sample=8)
    payload["admissibility"] = adm.to_dict()
    ok = ok and adm.admissible
    _emit(args, payload, "verify")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_reproduce_paper(args) -> int:
    from .reproduce import run_reproduction
    rows, all_ok = run_reproduction(only=args.scenario, quiet=args.quiet)
    _write_csv(args, rows, "reproduce")
    _emit(args, {"rows": rows, "all_ok": all_ok}, "reproduce-summary")
    return EXIT_OK if all_ok else EXIT_VERIFY


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="monotone-games",
        description="Monotone and trembling-hand-perfect equilibria in "
                    "Bayesian games")
    parser.add_argument("--config", help="JSON config path")
    parser.add_argument("--scenario", help="built-in scenario name "
                        f"({', '.join(sorted(SCENARIOS))})")
    parser.add_argument("--out", help="output directory for JSON/CSV")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--m-max", type=int, default=None,
                        help="top tremble level (powers of two up to this)")
    parser.add_argument("--grid", type=int, default=None)
    parser.add_argument("--json", action="store_true",
                        help="compact JSON on stdout")
    parser.add_argument("--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check-conditions")
    p_solve = sub.add_parser("solve")
    p_solve.add_argument("--scan", action="store_true",
                         help="also run the uniqueness scan")
    sub.add_parser("solve-perfect")
    p_verify = sub.add_parser("verify")
    p_verify.add_argument("--profile", help="scenario profile name")
    p_verify.add_argument("--sequence", help="scenario sequence name")
    sub.add_parser("reproduce-paper")

    args = parser.parse_args(argv)
    handlers = {
        "check-conditions": cmd_check_conditions,
        "solve": cmd_solve,
        "solve-perfect": cmd_solve_perfect,
        "verify": cmd_verify,
        "reproduce-paper": cmd_reproduce_paper,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except KeyError as e:
        print(f"config error: unknown name {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

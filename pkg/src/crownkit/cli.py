"""Command line driver: ``verify campaign``, ``verify fixture`` and ``verify replay``.

Exit status is 0 when every check passes, 1 on a verification failure and 2
on usage, configuration or file-format errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .campaign import CHECKS, FIXTURES, CampaignConfig, ConfigError, evaluate, load_artifact, run, run_fixture
from .formats import FormatError, parse_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _checks(text: str) -> tuple[str, ...]:
    names = tuple(c.strip() for c in text.split(",") if c.strip())
    bad = [c for c in names if c not in CHECKS]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"unknown checks {bad}; choose from {','.join(CHECKS)}")
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="verify", description="Exact verification campaigns for crowned diagrams.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    camp = sub.add_parser("campaign", help="run seeded random trials")
    camp.add_argument("--seed", type=int, required=True)
    camp.add_argument("--period", type=int, required=True)
    camp.add_argument("--trials", type=int, required=True)
    camp.add_argument("--checks", type=_checks, default=CHECKS, help=f"comma list from {','.join(CHECKS)}")
    camp.add_argument("--max-rank", type=int, default=2)
    camp.add_argument("--max-entry", type=int, default=3)
    camp.add_argument("--max-disks", type=int, default=1)
    camp.add_argument("--shrink-budget", type=int, default=40)
    camp.add_argument("--jobs", type=int, default=1)
    camp.add_argument("--out", type=Path, help="report path (default: stdout)")
    camp.add_argument("--artifacts", type=Path, help="directory for one file per failure")

    fix = sub.add_parser("fixture", help="run a fixture against its frozen expected values")
    fix.add_argument("name", choices=sorted(FIXTURES))
    fix.add_argument("--corrupt", action="store_true", help="swap in a wrong instance to exercise the failure path")
    fix.add_argument("--out", type=Path)
    fix.add_argument("--artifacts", type=Path)

    rep = sub.add_parser("replay", help="re-run a failure artifact or every failure in a report")
    rep.add_argument("file", type=Path)
    return parser


def _emit(report: dict, out: Path | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _write_artifacts(failures: list[dict], directory: Path | None) -> None:
    if directory is None:
        return
    directory.mkdir(parents=True, exist_ok=True)
    for k, art in enumerate(failures):
        trial = "fixture" if art["trial"] is None else f"trial{art['trial']}"
        name = f"{art['check'].replace(':', '-')}-{trial}-{k}.json"
        (directory / name).write_text(json.dumps(art, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _summary(counts: dict) -> None:
    for check, c in counts.items():
        status = "PASS" if c["fail"] == 0 else "FAIL"
        print(f"{status} {check}: {c['pass']} passed, {c['fail']} failed", file=sys.stderr)


def cmd_campaign(args: argparse.Namespace) -> int:
    config = CampaignConfig(seed=args.seed, period=args.period, trials=args.trials, checks=args.checks,
                            max_rank=args.max_rank, max_entry=args.max_entry, max_disks=args.max_disks,
                            shrink_budget=args.shrink_budget)
    report = run(config, jobs=max(1, args.jobs))
    _summary(report["counts"])
    _emit(report, args.out)
    _write_artifacts(report["failures"], args.artifacts)
    return EXIT_OK if report["ok"] else EXIT_FAIL


def cmd_fixture(args: argparse.Namespace) -> int:
    report = run_fixture(args.name, corrupt=args.corrupt)
    for key, ok in report["checks"].items():
        print(f"{'PASS' if ok else 'FAIL'} {args.name} {key}", file=sys.stderr)
    _emit(report, args.out)
    _write_artifacts(report["failures"], args.artifacts)
    return EXIT_OK if report["ok"] else EXIT_FAIL


def cmd_replay(args: argparse.Namespace) -> int:
    data = parse_json(args.file.read_text(encoding="utf-8"))
    artifacts = data.get("failures", []) if isinstance(data, dict) and "failures" in data else [data]
    status = EXIT_OK
    for art in artifacts:
        check, inputs, recorded = load_artifact(art)
        rep = evaluate(check, inputs)
        same = sorted(rep.failed) == sorted(recorded)
        verdict = "reproduced" if same else ("passes now" if rep.ok else "different failure")
        print(f"{check}: {verdict}; recorded {recorded}, replayed {rep.failed}")
        if not rep.ok:
            status = EXIT_FAIL
    return status


COMMANDS = {"campaign": cmd_campaign, "fixture": cmd_fixture, "replay": cmd_replay}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, FormatError) as exc:
        print(f"verify: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"verify: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Verification campaigns: seeded instances, verifier dispatch, shrinking and reports."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Callable

from . import __version__
from .diagramkit import ComplexDiagram, NotFree, hocolim
from .exactlin import FgAbelianGroup, IntMatrix
from .formats import FORMAT_VERSION, FormatError, from_dict, to_dict
from .franke import (
    CrownedDiagram,
    DegenerationFailure,
    HypothesisFailure,
    NotInL,
    Report,
    cones_verify,
    disks_differential_verify,
    finality_verify,
    kunneth_verify,
    main_theorem_verify,
    moore_crowned,
    propA_verify,
    realize_R,
    round_trip_ok,
    theorem_A_verify,
    theorem_B_verify,
)
from .generate import SEED_LIMIT, generate_twisted, random_L_member, rng_from_seed
from .percomplex import (
    ChainMap,
    DifferentialNotSquareZero,
    GradedModule,
    NotAChainMap,
    PeriodicComplex,
    homology,
    is_isomorphic,
    moore,
    tensor,
)

CHECKS = ("theoremA", "theoremB", "propA", "cones", "disks", "main", "finality", "kunneth")
RNG_NAME = "philox4x64-10, key = seed + 2**64 * trial"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CampaignConfig:
    seed: int
    period: int
    trials: int
    checks: tuple[str, ...] = CHECKS
    max_rank: int = 2
    max_entry: int = 3
    max_disks: int = 1
    shrink_budget: int = 40

    def __post_init__(self) -> None:
        if not 0 <= self.seed < SEED_LIMIT:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.period < 2:
            raise ConfigError(f"period must be >= 2, got {self.period}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.max_rank < 0 or self.max_entry < 0 or self.max_disks < 0:
            raise ConfigError("max_rank, max_entry and max_disks must be non-negative")
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown or not self.checks:
            raise ConfigError(f"unknown checks {unknown}; choose from {', '.join(CHECKS)}")
        object.__setattr__(self, "checks", tuple(c for c in CHECKS if c in self.checks))


# instances

PAIR_CHECKS = {"theoremA": lambda x, y: theorem_A_verify(x, y, explicit=True),
               "theoremB": theorem_B_verify, "propA": propA_verify, "cones": cones_verify}


def make_instance(check: str, config: CampaignConfig, trial: int) -> dict[str, Any]:
    """Inputs for one trial. Checks sharing a kind of input see the same instance."""
    rng = rng_from_seed(config.seed, trial)
    n_ = config.period
    if check in PAIR_CHECKS:
        return {"x": random_L_member(rng, n_, config.max_rank, config.max_entry, config.max_disks),
                "y": random_L_member(rng, n_, config.max_rank, config.max_entry, config.max_disks)}
    if check in ("main", "kunneth"):
        return {"m": generate_twisted(rng, n_, config.max_rank, config.max_entry),
                "n": generate_twisted(rng, n_, config.max_rank, config.max_entry)}
    if check == "disks":
        s, t = (int(v) for v in rng.integers(0, n_, size=2))
        rs, rt = (int(v) for v in rng.integers(1, max(config.max_rank, 1), size=2, endpoint=True))
        return {"period": n_, "s": s, "t": t, "rank_s": rs, "rank_t": rt}
    if check == "finality":
        return {"period": n_}
    raise ConfigError(f"unknown check {check!r}")


# fixture oracles: frozen expected values for Moore(3) with N = 2

Z3 = FgAbelianGroup(0, (3,))
MOORE3_HOMOLOGY = GradedModule(2, (Z3, FgAbelianGroup()))
MOORE3_SQUARED = GradedModule(2, (Z3, Z3))


def fixture_moore3(m: PeriodicComplex) -> Report:
    rep = Report("fixture:moore3")
    rep.check("homology", is_isomorphic(homology(m), MOORE3_HOMOLOGY), str(homology(m)))
    rep.check("round_trip", round_trip_ok(m))
    r = homology(realize_R(m))
    rep.check("realize_R", is_isomorphic(r, MOORE3_HOMOLOGY), str(r))
    h_crown = homology(hocolim(moore_crowned(3, 2).diagram))
    rep.check("hocolim_crown", is_isomorphic(h_crown, MOORE3_HOMOLOGY), str(h_crown))
    lhs = homology(realize_R(tensor(m, m)))
    rhs = homology(tensor(realize_R(m), realize_R(m)))
    rep.check("R(M(x)M)", is_isomorphic(lhs, MOORE3_SQUARED), str(lhs))
    rep.check("R(M)(x)R(M)", is_isomorphic(rhs, MOORE3_SQUARED), str(rhs))
    rep.check("kunneth", kunneth_verify(m, m).ok)
    return rep


FIXTURES: dict[str, Callable[[], PeriodicComplex]] = {"moore3": lambda: moore(2, 3)}
CORRUPTED: dict[str, Callable[[], PeriodicComplex]] = {"moore3": lambda: moore(2, 2)}


def evaluate(check: str, inputs: dict[str, Any]) -> Report:
    """Run one verifier; exceptions from the engine become failing checks."""
    try:
        if check in PAIR_CHECKS:
            return PAIR_CHECKS[check](inputs["x"], inputs["y"])
        if check == "main":
            return main_theorem_verify(inputs["m"], inputs["n"])
        if check == "kunneth":
            return kunneth_verify(inputs["m"], inputs["n"])
        if check == "disks":
            return disks_differential_verify(inputs["period"], inputs["s"], inputs["t"],
                                             inputs["rank_s"], inputs["rank_t"])
        if check == "finality":
            return finality_verify(inputs["period"])
        if check == "fixture:moore3":
            return fixture_moore3(inputs["m"])
    except HypothesisFailure as exc:
        rep = Report(check)
        rep.check("hypotheses", False, str(exc))
        return rep
    except (NotInL, DegenerationFailure, NotFree) as exc:
        rep = Report(check)
        rep.check("error", False, f"{type(exc).__name__}: {exc}")
        return rep
    raise ConfigError(f"unknown check {check!r}")


# shrinking


def _drop(m: IntMatrix, row: int | None = None, col: int | None = None) -> IntMatrix:
    rows = [r for k, r in enumerate(m.to_rows()) if k != row]
    rows = [[v for k, v in enumerate(r) if k != col] for r in rows]
    return IntMatrix(m.rows - (row is not None), m.cols - (col is not None), rows)


def _nudge(m: IntMatrix, r: int, c: int) -> IntMatrix:
    rows = m.to_rows()
    v = rows[r][c]
    rows[r][c] = v - 1 if v > 0 else v + 1
    return IntMatrix(m.rows, m.cols, rows)


def _complex_moves(x: PeriodicComplex):
    """Smaller complexes as (dropped basis vector or None, builder) pairs."""
    n_ = x.period
    for n in range(n_):
        for e in range(x.rank(n)):
            ranks = [x.rank(k) - (k == n) for k in range(n_)]
            diffs = [x.d(k) for k in range(n_)]
            diffs[n] = _drop(diffs[n], col=e)
            diffs[(n + 1) % n_] = _drop(diffs[(n + 1) % n_], row=e)
            yield (n, e), lambda r=ranks, d=diffs: PeriodicComplex(n_, r, d)
    for n in range(n_):
        d = x.d(n)
        for r in range(d.rows):
            for c in range(d.cols):
                if d[r, c]:
                    diffs = [_nudge(x.d(k), r, c) if k == n else x.d(k) for k in range(n_)]
                    yield None, lambda d=diffs: PeriodicComplex(n_, [x.rank(k) for k in range(n_)], d)


def _crowned_moves(x: CrownedDiagram):
    d, n_ = x.diagram, x.period
    base = {e: [f.block(n) for n in range(n_)] for e, f in d.edge.items()}

    def rebuild(verts: dict, blocks: dict) -> CrownedDiagram:
        edges = {e: ChainMap(verts[e[0]], verts[e[1]], blocks[e]) for e in d.edge}
        return CrownedDiagram(ComplexDiagram(d.shape, verts, edges, n_))

    for v in d.shape:
        for dropped, move in _complex_moves(d[v]):
            def build(v=v, dropped=dropped, move=move):
                verts = {**d.vertex, v: move()}
                blocks = {e: list(bs) for e, bs in base.items()}
                if dropped is not None:
                    slot, idx = dropped
                    for e in blocks:
                        if e[0] == v:
                            blocks[e][slot] = _drop(blocks[e][slot], col=idx)
                        if e[1] == v:
                            blocks[e][slot] = _drop(blocks[e][slot], row=idx)
                return rebuild(verts, blocks)
            yield build
    for e, bs in base.items():
        for n, blk in enumerate(bs):
            for r in range(blk.rows):
                for c in range(blk.cols):
                    if blk[r, c]:
                        blocks = {k: list(v) for k, v in base.items()}
                        blocks[e][n] = _nudge(blk, r, c)
                        yield lambda blocks=blocks: rebuild(dict(d.vertex), blocks)


def _moves(value: Any):
    if isinstance(value, PeriodicComplex):
        return (mv for _, mv in _complex_moves(value))
    if isinstance(value, CrownedDiagram):
        return _crowned_moves(value)
    return iter(())


INT_FLOOR = {"rank_s": 1, "rank_t": 1}


def shrink(check: str, inputs: dict[str, Any], still_fails: Callable[[dict], bool],
           budget: int) -> tuple[dict[str, Any], int]:
    """Greedy descent: accept the first smaller instance that still fails, until none does."""
    current, spent = dict(inputs), 0
    improved = True
    while improved and spent < budget:
        improved = False
        candidates = []
        for key, value in current.items():
            if key in INT_FLOOR and value > INT_FLOOR[key]:
                candidates.append((key, lambda v=value: v - 1))
            candidates.extend((key, mv) for mv in _moves(value))
        for key, mv in candidates:
            if spent >= budget:
                break
            try:
                cand = {**current, key: mv()}
            except (DifferentialNotSquareZero, NotAChainMap, ValueError):
                continue
            spent += 1
            if still_fails(cand):
                current, improved = cand, True
                break
    return current, spent


# artifacts


def _encode(value: Any) -> Any:
    return value if isinstance(value, int) else to_dict(value)


def _decode(value: Any, path: str) -> Any:
    return value if isinstance(value, int) else from_dict(value, path)


def failure_artifact(check: str, inputs: dict, rep: Report, seed: int | None, trial: int | None,
                     shrink_steps: int) -> dict:
    return {
        "kind": "failure",
        "format_version": FORMAT_VERSION,
        "engine_version": __version__,
        "check": check,
        "seed": seed,
        "trial": trial,
        "failed": rep.failed,
        "details": {k: rep.details[k] for k in rep.failed if k in rep.details},
        "shrink_evaluations": shrink_steps,
        "inputs": {k: _encode(v) for k, v in inputs.items()},
    }


def load_artifact(data: Any) -> tuple[str, dict[str, Any], list[str]]:
    if not isinstance(data, dict) or data.get("kind") != "failure":
        raise FormatError("$.kind", "expected a failure artifact")
    for key in ("check", "inputs", "failed"):
        if key not in data:
            raise FormatError("$", f"missing field '{key}'")
    if not isinstance(data["inputs"], dict):
        raise FormatError("$.inputs", "expected an object")
    inputs = {k: _decode(v, f"$.inputs.{k}") for k, v in data["inputs"].items()}
    return data["check"], inputs, list(data["failed"])


def investigate(check: str, inputs: dict, seed: int | None, trial: int | None, budget: int) -> dict:
    """Shrink a failing instance and package it as an artifact."""
    first = evaluate(check, inputs)

    def still_fails(cand: dict) -> bool:
        rep = evaluate(check, cand)
        return not rep.ok and "hypotheses" not in rep.failed

    small, spent = shrink(check, inputs, still_fails, budget) if "hypotheses" not in first.failed else (inputs, 0)
    return failure_artifact(check, small, evaluate(check, small), seed, trial, spent)


# campaigns


def run_trial(config: CampaignConfig, trial: int) -> list[dict]:
    outcomes = []
    for check in config.checks:
        start = time.perf_counter()
        inputs = make_instance(check, config, trial)
        rep = evaluate(check, inputs)
        artifact = None
        if not rep.ok:
            artifact = investigate(check, inputs, config.seed, trial, config.shrink_budget)
        outcomes.append({"check": check, "trial": trial, "ok": rep.ok, "artifact": artifact,
                         "seconds": time.perf_counter() - start})
    return outcomes


def _run_trial_args(args: tuple[CampaignConfig, int]) -> list[dict]:
    return run_trial(*args)


def run(config: CampaignConfig, jobs: int = 1) -> dict:
    """Execute the campaign; the result is independent of ``jobs`` except for timing."""
    start = time.perf_counter()
    work = [(config, t) for t in range(config.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_trial_args, work))
    else:
        results = [run_trial(*w) for w in work]
    outcomes = sorted((o for r in results for o in r), key=lambda o: (o["trial"], CHECKS.index(o["check"])))
    counts = {c: {"pass": 0, "fail": 0} for c in config.checks}
    seconds = {c: 0.0 for c in config.checks}
    failures = []
    for o in outcomes:
        counts[o["check"]]["pass" if o["ok"] else "fail"] += 1
        seconds[o["check"]] += o["seconds"]
        if o["artifact"] is not None:
            failures.append(o["artifact"])
    return {
        "kind": "campaign_report",
        "format_version": FORMAT_VERSION,
        "engine_version": __version__,
        "seed": config.seed,
        "rng": RNG_NAME,
        "config": {**asdict(config), "checks": list(config.checks)},
        "counts": counts,
        "ok": all(v["fail"] == 0 for v in counts.values()),
        "failures": failures,
        "timing": {"total_seconds": round(time.perf_counter() - start, 3),
                   "per_check_seconds": {k: round(v, 3) for k, v in seconds.items()}},
    }


def run_fixture(name: str, corrupt: bool = False, budget: int = 40) -> dict:
    m = (CORRUPTED if corrupt else FIXTURES)[name]()
    check = f"fixture:{name}"
    start = time.perf_counter()
    rep = evaluate(check, {"m": m})
    failures = [] if rep.ok else [investigate(check, {"m": m}, None, None, budget)]
    return {
        "kind": "fixture_report",
        "format_version": FORMAT_VERSION,
        "engine_version": __version__,
        "fixture": name,
        "corrupted": corrupt,
        "checks": rep.checks,
        "ok": rep.ok,
        "failures": failures,
        "timing": {"total_seconds": round(time.perf_counter() - start, 3)},
    }

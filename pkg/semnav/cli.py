"""
Command line entry point

    python -m semnav run --seeds 0..99 --planner lsp greedy --scorer oracle --out summary.csv
    python -m semnav generate --seed 7 --out scenarios/seed7.txt
    python -m semnav serve --port 8000
"""

import argparse
import logging
import sys
from typing import Dict, List, Optional

from pydantic import ValidationError

from semnav.core.batch_runner import ScenarioSource, expand_variants, parse_seed_range, run_batch
from semnav.core.config import (
    DATABASE_URL,
    EXPLORATION_COST,
    MAX_FRONTIERS,
    MAX_STEPS,
    ORACLE_LAMBDA,
    SCENARIO_PRESETS,
    SENSOR_FOV,
    SENSOR_MAX_RANGE,
    SENSOR_RAYS,
    SUCCESS_COST,
    VLM_TIMEOUT,
)
from semnav.core.episode_runner import EpisodeConfig
from semnav.core.exceptions import SemNavError
from semnav.core.planner import PlannerMethod
from semnav.core.scenario_generator import ScenarioParams, generate_scenario
from semnav.core.scenario_io import save_scenario
from semnav.core.scorer import MockTable, ScorerKind


def parse_mock_table(text: Optional[str]) -> Dict[str, float]:
    """
    "east=0.9,north=0.2" -> {"east": 0.9, "north": 0.2}
    """
    table: Dict[str, float] = {}
    if not text:
        return table
    for item in text.split(","):
        if not item.strip():
            continue
        sector, sep, value = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"mock table entries look like east=0.9, got {item!r}")
        table[sector.strip().lower()] = float(value)
    return table


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semnav", description="Object-goal navigation with frontier planning")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run episodes and write SR/SPL summaries")
    run.add_argument("--scenario", action="append", default=[], help="Scenario file (repeatable)")
    run.add_argument("--seeds", help="Generated scenarios, inclusive range A..B")
    run.add_argument("--preset", default="default", choices=sorted(SCENARIO_PRESETS))
    run.add_argument("--planner", nargs="+", default=["lsp"], choices=[m.value for m in PlannerMethod])
    run.add_argument("--scorer", default="oracle", choices=[k.value for k in ScorerKind])
    run.add_argument("--max-steps", type=int, default=MAX_STEPS)
    run.add_argument("--rs", type=float, nargs="+", default=[SUCCESS_COST])
    run.add_argument("--re", type=float, nargs="+", default=[EXPLORATION_COST])
    run.add_argument("--k", type=int, default=MAX_FRONTIERS)
    run.add_argument("--fov", type=float, default=SENSOR_FOV)
    run.add_argument("--rays", type=int, default=SENSOR_RAYS)
    run.add_argument("--max-range", type=float, default=SENSOR_MAX_RANGE)
    run.add_argument("--oracle-lambda", type=float, default=ORACLE_LAMBDA)
    run.add_argument("--mock-default", type=float, default=0.5)
    run.add_argument("--mock-table", type=parse_mock_table, default={}, help="e.g. east=0.9,north=0.2")
    run.add_argument("--vlm-endpoint")
    run.add_argument("--vlm-timeout", type=float, default=VLM_TIMEOUT)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--out", default="summary.csv")
    run.add_argument("--trace", default="traces.jsonl")
    run.add_argument("--snapshots", help="Directory for map/value PGM snapshots")
    run.add_argument("--db", nargs="?", const=DATABASE_URL, help="Store the batch (optional database URL)")
    run.add_argument("--verbose", action="store_true")

    gen = sub.add_parser("generate", help="Write a generated scenario file")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--preset", default="default", choices=sorted(SCENARIO_PRESETS))
    gen.add_argument("--out", required=True)

    serve = sub.add_parser("serve", help="Start the results API")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    return parser


def _scenarios(args) -> List[ScenarioSource]:
    sources = [ScenarioSource(path=path) for path in args.scenario]
    if args.seeds:
        sources += [ScenarioSource(seed=seed, preset=args.preset) for seed in parse_seed_range(args.seeds)]
    return sources


def _store(summary, url: str) -> int:
    from sqlalchemy.orm import sessionmaker

    from database import init_db, make_engine
    from semnav.core.results_store import save_batch

    engine = make_engine(url)
    init_db(engine)
    with sessionmaker(bind=engine)() as db:
        return save_batch(db, summary)


def cmd_run(args) -> int:
    base = EpisodeConfig(
        scorer=args.scorer,
        max_steps=args.max_steps,
        fov=args.fov,
        rays=args.rays,
        max_range=args.max_range,
        k=args.k,
        oracle_lambda=args.oracle_lambda,
        mock_table=MockTable(table=args.mock_table, default=args.mock_default),
        vlm_endpoint=args.vlm_endpoint,
        vlm_timeout=args.vlm_timeout,
    )
    variants = expand_variants(base, args.planner, args.rs, args.re)
    scenarios = _scenarios(args)

    print(f"\n🧭 Running {len(scenarios)} scenarios x {len(variants)} configurations...")
    summary = run_batch(
        scenarios, variants, workers=args.workers, snapshot_dir=args.snapshots,
        csv_path=args.out, trace_path=args.trace,
    )

    print("📊 Summary:")
    for row in summary.rows:
        print(f"   {row.config_id}: SR {row.SR:.1f}  SPL {row.SPL:.1f}  "
              f"steps {row.mean_steps:.1f}  path {row.mean_path_m:.2f} m")
    failed = sum(1 for r in summary.results if r.error)
    if failed:
        print(f"⚠️  {failed} episodes failed with errors (counted as unsuccessful)")

    if args.db:
        batch_id = _store(summary, args.db)
        print(f"💾 Stored as batch {batch_id}")
    return 0


def cmd_generate(args) -> int:
    world = generate_scenario(args.seed, ScenarioParams.from_preset(args.preset))
    path = save_scenario(world, args.out)
    print(f"✅ Scenario saved: {path} ({world.width}x{world.height}, {len(world.targets)} x {world.target_label})")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("main:app", host=args.host, port=args.port)
    return 0


COMMANDS = {"run": cmd_run, "generate": cmd_generate, "serve": cmd_serve}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (SemNavError, ValidationError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

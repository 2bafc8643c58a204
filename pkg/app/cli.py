"""
Command-line front end.

    python app/cli.py gen --n 8 --variant partitioned-hybrid
    python app/cli.py verify --in out/8/partitioned-hybrid/netlist.json --exhaustive
    python app/cli.py report --designs 8:regular-cla,8:partitioned-hybrid
    python app/cli.py emit-verilog --in out/8/partitioned-hybrid/netlist.json --out mult8.v

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""
import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from adders import FinalAdderPlan
from config import TOOL_VERSION, Settings, load_settings, setup_logging
from dadda import CPA_ADDERS
from metrics import VectorStream, analyze, pair_reports, render_markdown, write_csv
from multipliers import MultiplierConfig, build_multiplier, verify
from netlist import ConfigError, GateCostModel, Netlist, NetlistError
from utils import PRESET_WIDTHS, file_sha256, normalize_variant, parse_design_id, validate_width, variant_label
from verilog import emit_verilog

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

VARIANT_CHOICES = ("regular-cla", "partitioned-cla", "partitioned-hybrid")
REPORT_ENDPOINTS = ("regular-cla", "partitioned-hybrid")
MANIFEST_NAME = "manifest.json"


@dataclass
class RunManifest:
    """
    Per-directory record of the runs that wrote files there. One entry per
    subcommand; a rerun replaces its entry. No timestamps, so identical runs
    give identical manifests.
    """

    path: Path
    tool_version: str = TOOL_VERSION
    runs: Dict[str, Dict] = field(default_factory=dict)

    @classmethod
    def load(cls, path: Path) -> "RunManifest":
        if not path.exists():
            return cls(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"Manifest {path} is not valid JSON: {e}") from e
        return cls(path, TOOL_VERSION, dict(data.get("runs", {})))

    def record(self, subcommand: str, flags: Dict, seeds: Dict, outputs: Sequence[Path]) -> None:
        base = self.path.parent
        self.runs[subcommand] = {
            "flags": flags,
            "seeds": seeds,
            "outputs": [
                {"path": Path(os.path.relpath(out, base)).as_posix(), "sha256": file_sha256(out)}
                for out in outputs
            ],
        }

    def save(self) -> None:
        data = {"tool_version": self.tool_version, "runs": self.runs}
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(json.dumps(data, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _flags(args: argparse.Namespace) -> Dict:
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items()) if k != "func"}


def record_outputs(subcommand: str, args: argparse.Namespace, seeds: Dict, outputs: Sequence[Path]) -> None:
    """Add a manifest entry next to every output file, grouped by directory."""
    by_dir: Dict[Path, List[Path]] = {}
    for out in outputs:
        by_dir.setdefault(out.parent, []).append(out)
    for directory, files in sorted(by_dir.items()):
        manifest = RunManifest.load(directory / MANIFEST_NAME)
        manifest.record(subcommand, _flags(args), seeds, files)
        manifest.save()
        logger.info(f"🧾 Manifest updated: {manifest.path}")


def _write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def _cost_model(choice: Optional[str], settings: Settings) -> GateCostModel:
    if choice is None:
        return settings.cost_model()
    if choice == "default":
        return GateCostModel.default()
    return GateCostModel.from_file(choice)


def cmd_gen(args: argparse.Namespace, settings: Settings) -> int:
    n = validate_width(args.n)
    variant = normalize_variant(args.variant)
    plan = None if args.plan in (None, "default") else FinalAdderPlan.from_file(args.plan)
    config = MultiplierConfig(
        n, variant, plan=plan, in_part_adder=args.in_part_adder,
        cost_model=settings.cost_model().digest(),
    )
    design = build_multiplier(config)

    out = Path(args.out) if args.out else settings.out_dir / str(n) / variant_label(variant) / "netlist.json"
    outputs = [design.netlist.save(out)]
    if args.schedule:
        schedules = {label: s.to_dict() for label, s in design.schedules.items()}
        outputs.append(_write_text(Path(args.schedule), json.dumps(schedules, sort_keys=True, indent=1) + "\n"))
    record_outputs("gen", args, {}, outputs)

    print(f"✓ {config.design_id}: {len(design.netlist.gates)} gates -> {out}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    netlist = Netlist.load(args.input)
    seed = settings.seed if args.seed is None else args.seed
    workers = args.workers or settings.workers
    if args.exhaustive:
        report = verify(netlist, "exhaustive", workers=workers)
    else:
        report = verify(netlist, "random", count=args.random, seed=seed, workers=workers)

    if args.report:
        path = _write_text(Path(args.report), json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n")
        record_outputs("verify", args, {"verify": report.seed}, [path])

    if report.passed:
        print(f"✅ PASS: {report.cases} {report.mode} cases match a*b")
        return EXIT_OK
    ce = report.counterexample
    print(f"❌ FAIL: a={ce.a} b={ce.b} got={ce.got} want={ce.want}")
    logger.error(f"❌ Verification failed for {args.input}")
    return EXIT_VERIFY_FAILED


def resolve_design(item: str, out_dir: Path) -> Tuple[str, Netlist, Path]:
    """
    A design id '<n>:<variant>' under out_dir, or a path to a netlist JSON file.

    :return: (design id, netlist, netlist path)
    """
    path = Path(item)
    if path.suffix == ".json" and path.exists():
        netlist = Netlist.load(path)
        return netlist.metadata.get("design_id", path.stem), netlist, path
    n, variant = parse_design_id(item)
    design_id = f"{n}:{variant_label(variant)}"
    path = out_dir / str(n) / variant_label(variant) / "netlist.json"
    if not path.exists():
        raise ConfigError(f"Design {design_id} not found at {path}; run 'gen' first")
    return design_id, Netlist.load(path), path


def expand_designs(text: str) -> List[str]:
    if text.strip() == "all":
        return [f"{n}:{v}" for n in PRESET_WIDTHS for v in REPORT_ENDPOINTS]
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise ConfigError("No designs given")
    return items


def cmd_report(args: argparse.Namespace, settings: Settings) -> int:
    out_dir = Path(args.out_dir) if args.out_dir else settings.out_dir
    cost_model = _cost_model(args.cost_model, settings)
    stream = VectorStream(
        settings.vectors if args.vectors is None else args.vectors,
        settings.seed if args.seed is None else args.seed,
    )
    workers = args.workers or settings.workers

    reports, design_csvs = [], []
    for item in expand_designs(args.designs):
        design_id, netlist, netlist_path = resolve_design(item, out_dir)
        report = analyze(netlist, cost_model, stream, design_id=design_id, workers=workers)
        reports.append(report)
        if netlist_path.name == "netlist.json":
            # out/<n>/<variant>/ keeps a one-row report next to its netlist
            design_csv = netlist_path.parent / "report.csv"
            write_csv([report], design_csv)
            design_csvs.append(design_csv)
    comparisons, ablations = pair_reports(reports)

    csv_path = Path(args.csv) if args.csv else out_dir / "report.csv"
    md_path = Path(args.md) if args.md else out_dir / "report.md"
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    write_csv(reports, csv_path)
    markdown = render_markdown(reports, comparisons, ablations)
    _write_text(md_path, markdown)
    record_outputs("report", args, {"vectors": stream.seed}, [csv_path, md_path] + design_csvs)

    print(markdown)
    print(f"✓ Report written to {csv_path} and {md_path}")
    return EXIT_OK


def cmd_emit_verilog(args: argparse.Namespace, settings: Settings) -> int:
    netlist = Netlist.load(args.input)
    path = _write_text(Path(args.out), emit_verilog(netlist))
    record_outputs("emit-verilog", args, {}, [path])
    print(f"✓ Verilog written to {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cli.py",
        description="Generate, verify and analyse regular and partitioned Dadda multiplier netlists.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a multiplier netlist (JSON)")
    gen.add_argument("--n", required=True, help="operand width in bits")
    gen.add_argument("--variant", required=True, choices=VARIANT_CHOICES)
    gen.add_argument("--plan", default=None, help="final adder plan JSON file, or 'default'")
    gen.add_argument("--in-part-adder", choices=CPA_ADDERS, default="prefix",
                     help="carry-propagate adder inside each part (partitioned variants)")
    gen.add_argument("--out", default=None, help="netlist path (default: <out_dir>/<n>/<variant>/netlist.json)")
    gen.add_argument("--schedule", default=None, help="also write the Dadda schedule JSON here")
    gen.set_defaults(func=cmd_gen)

    ver = sub.add_parser("verify", help="check a netlist against the integer product")
    ver.add_argument("--in", dest="input", required=True, help="netlist JSON file")
    mode = ver.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exhaustive", action="store_true", help="all 4^n input pairs (n <= 10)")
    mode.add_argument("--random", type=int, metavar="N", help="N seeded random input pairs")
    ver.add_argument("--seed", type=int, default=None)
    ver.add_argument("--workers", type=int, default=None)
    ver.add_argument("--report", default=None, help="write the verification report JSON here")
    ver.set_defaults(func=cmd_verify)

    rep = sub.add_parser("report", help="unit-gate analysis and comparison tables")
    rep.add_argument("--designs", required=True, help="comma-separated <n>:<variant> ids or JSON paths, or 'all'")
    rep.add_argument("--cost-model", default=None, help="cost model JSON file, or 'default'")
    rep.add_argument("--vectors", type=int, default=None, help="random input pairs for the toggle count")
    rep.add_argument("--seed", type=int, default=None)
    rep.add_argument("--workers", type=int, default=None)
    rep.add_argument("--csv", default=None)
    rep.add_argument("--md", default=None)
    rep.add_argument("--out-dir", default=None, help="where generated designs live (default: MULT_OUT_DIR)")
    rep.set_defaults(func=cmd_report)

    emit = sub.add_parser("emit-verilog", help="write a structural Verilog module")
    emit.add_argument("--in", dest="input", required=True)
    emit.add_argument("--out", required=True)
    emit.set_defaults(func=cmd_emit_verilog)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings()
    except ConfigError as e:
        print(f"❌ Configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE
    setup_logging(settings)

    try:
        return args.func(args, settings)
    except (NetlistError, OSError) as e:
        logger.error(f"❌ {args.command} failed: {e}")
        print(f"❌ Error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""
Unit-gate analysis reports and regular-vs-proposed comparisons.

Area, delay and power are proxied by area units, critical depth and the
toggle count over a seeded stream of random input pairs.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import pandas as pd

from netlist import ConfigError, GateCostModel, Netlist, area_units, critical_depth, gate_counts
from simulator import VectorPairs, switching_activity

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "n", "variant", "gates", "and_count", "or_count", "xor_count", "not_count",
    "area_units", "depth_units", "toggles",
]

# Sign of the published regular-vs-proposed deltas per width (area, delay, power).
PUBLISHED_SIGNS: Dict[int, Dict[str, int]] = {
    8: {"area": -1, "delay": 1, "power": -1},
    16: {"area": -1, "delay": 1, "power": -1},
    32: {"area": -1, "delay": 1, "power": -1},
    64: {"area": 1, "delay": 1, "power": -1},
}


@dataclass(frozen=True)
class VectorStream:
    """Seeded stream of uniform random input pairs."""

    count: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.count < 0:
            raise ConfigError(f"Vector count must be nonnegative, got {self.count}")

    def pairs(self, netlist: Netlist) -> VectorPairs:
        return VectorPairs.random({bus.name: bus.width for bus in netlist.inputs}, self.count, self.seed)


@dataclass(frozen=True)
class AnalysisReport:
    design_id: str
    n: int
    variant: str
    gate_counts: Dict[str, int]
    area_units: int
    depth_units: int
    toggles: Optional[int]
    vectors: int
    seed: int
    cost_model_digest: str
    settings_digest: Optional[str] = None

    @property
    def gates(self) -> int:
        return sum(self.gate_counts.values())

    @property
    def pdp(self) -> Optional[int]:
        """Power-delay product proxy: depth * toggles."""
        return None if self.toggles is None else self.depth_units * self.toggles

    def to_row(self) -> Dict:
        return {
            "n": self.n,
            "variant": self.variant,
            "gates": self.gates,
            "and_count": self.gate_counts.get("AND2", 0),
            "or_count": self.gate_counts.get("OR2", 0),
            "xor_count": self.gate_counts.get("XOR2", 0),
            "not_count": self.gate_counts.get("NOT", 0),
            "area_units": self.area_units,
            "depth_units": self.depth_units,
            "toggles": self.toggles,
        }


def analyze(netlist: Netlist, cost_model: Optional[GateCostModel] = None,
            vector_stream: Optional[VectorStream] = None, design_id: Optional[str] = None,
            workers: int = 1) -> AnalysisReport:
    """
    Analyse one design. An empty vector stream reports toggles as None, not 0.
    """
    cost_model = cost_model or GateCostModel.default()
    vector_stream = vector_stream if vector_stream is not None else VectorStream()
    meta = netlist.metadata
    design_id = design_id or meta.get("design_id", "custom")
    toggles = None
    if vector_stream.count:
        toggles = switching_activity(netlist, vector_stream.pairs(netlist), workers=workers)
    report = AnalysisReport(
        design_id=design_id,
        n=int(meta.get("n", netlist.inputs[0].width if netlist.inputs else 0)),
        variant=meta.get("variant", "custom"),
        gate_counts=gate_counts(netlist),
        area_units=area_units(netlist, cost_model),
        depth_units=critical_depth(netlist, cost_model),
        toggles=toggles,
        vectors=vector_stream.count,
        seed=vector_stream.seed,
        cost_model_digest=cost_model.digest(),
        settings_digest=meta.get("config_digest"),
    )
    logger.info(
        f"📊 {design_id}: area={report.area_units} depth={report.depth_units} toggles={report.toggles}"
    )
    return report


def percent_delta(baseline: Optional[float], candidate: Optional[float]) -> Optional[float]:
    """(baseline - candidate) / candidate * 100"""
    if baseline is None or candidate is None:
        return None
    if candidate == 0:
        return 0.0 if baseline == 0 else math.copysign(math.inf, baseline)
    return (baseline - candidate) / candidate * 100.0


def _sign(value: Optional[float]) -> int:
    if value is None or value == 0:
        return 0
    return 1 if value > 0 else -1


@dataclass(frozen=True)
class Comparison:
    """Deltas of the baseline with reference to the candidate, in percent."""

    baseline: AnalysisReport
    candidate: AnalysisReport
    area_delta: float
    depth_delta: float
    toggle_delta: Optional[float]
    pdp_delta: Optional[float]
    trend: Dict[str, Optional[bool]] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.candidate.n

    def to_row(self) -> Dict:
        return {
            "n": self.n,
            "baseline": self.baseline.design_id,
            "candidate": self.candidate.design_id,
            "area_pct": self.area_delta,
            "delay_pct": self.depth_delta,
            "power_pct": self.toggle_delta,
            "pdp_pct": self.pdp_delta,
            **{f"{k}_trend_ok": v for k, v in self.trend.items()},
        }


def compare(baseline_report: AnalysisReport, candidate_report: AnalysisReport) -> Comparison:
    """
    :raises ConfigError: if the reports used different cost models or vector streams
    """
    b, c = baseline_report, candidate_report
    if b.cost_model_digest != c.cost_model_digest:
        raise ConfigError(f"Cannot compare {b.design_id} and {c.design_id}: different cost models")
    if (b.vectors, b.seed) != (c.vectors, c.seed):
        raise ConfigError(f"Cannot compare {b.design_id} and {c.design_id}: different vector streams")

    area = percent_delta(b.area_units, c.area_units)
    depth = percent_delta(b.depth_units, c.depth_units)
    toggles = percent_delta(b.toggles, c.toggles)
    pdp = percent_delta(b.pdp, c.pdp)

    trend: Dict[str, Optional[bool]] = {}
    published = PUBLISHED_SIGNS.get(c.n)
    if published and b.variant == "regular_cla" and c.variant == "partitioned_hybrid":
        for key, value in (("area", area), ("delay", depth), ("power", toggles)):
            trend[key] = None if value is None else _sign(value) == published[key]
        if not all(ok for ok in trend.values() if ok is not None):
            logger.warning(f"⚠️  n={c.n}: unit-gate deltas disagree in sign with the published trend: {trend}")
    return Comparison(b, c, area, depth, toggles, pdp, trend)


def reports_frame(reports: Sequence[AnalysisReport]) -> pd.DataFrame:
    frame = pd.DataFrame([r.to_row() for r in reports], columns=CSV_COLUMNS)
    frame["toggles"] = frame["toggles"].astype("Int64")
    return frame


def comparisons_frame(comparisons: Sequence[Comparison]) -> pd.DataFrame:
    return pd.DataFrame([c.to_row() for c in comparisons])


def write_csv(reports: Sequence[AnalysisReport], path) -> None:
    reports_frame(reports).to_csv(path, index=False, na_rep="", lineterminator="\n")


def _pct(value: Optional[float]) -> str:
    if value is None:
        return "n/a"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:+.2f}"


def _trend_cell(comparison: Comparison) -> str:
    if not comparison.trend:
        return ""
    marks = [f"{k}:{'ok' if v else ('n/a' if v is None else 'differs')}" for k, v in comparison.trend.items()]
    return ", ".join(marks)


def render_markdown(reports: Sequence[AnalysisReport], comparisons: Sequence[Comparison],
                    ablations: Sequence[Comparison] = ()) -> str:
    """Per-design table followed by the regular-vs-proposed comparison tables."""
    lines = ["# Multiplier report", ""]
    lines.append("| Design | Gates | Area units | Depth units | Toggles |")
    lines.append("|---|---|---|---|---|")
    for r in reports:
        toggles = "n/a" if r.toggles is None else str(r.toggles)
        lines.append(f"| {r.design_id} | {r.gates} | {r.area_units} | {r.depth_units} | {toggles} |")

    if comparisons:
        lines += ["", "## Regular with reference to the proposed multiplier", ""]
        lines.append("| Multiplier N by N | Area % | Delay % | Power % | PDP % | Trend |")
        lines.append("|---|---|---|---|---|---|")
        for c in sorted(comparisons, key=lambda c: c.n):
            lines.append(
                f"| {c.n} by {c.n} | {_pct(c.area_delta)} | {_pct(c.depth_delta)} | "
                f"{_pct(c.toggle_delta)} | {_pct(c.pdp_delta)} | {_trend_cell(c)} |"
            )

    if ablations:
        lines += ["", "## Ablation", ""]
        lines.append("| Multiplier N by N | Baseline | Candidate | Area % | Delay % | Power % |")
        lines.append("|---|---|---|---|---|---|")
        for c in sorted(ablations, key=lambda c: (c.n, c.baseline.design_id)):
            lines.append(
                f"| {c.n} by {c.n} | {c.baseline.design_id} | {c.candidate.design_id} | "
                f"{_pct(c.area_delta)} | {_pct(c.depth_delta)} | {_pct(c.toggle_delta)} |"
            )
    return "\n".join(lines) + "\n"


def pair_reports(reports: Sequence[AnalysisReport]) -> tuple:
    """
    Group reports by width into the headline comparison (regular_cla against
    partitioned_hybrid) and the ablation comparisons that involve partitioned_cla.

    :return: (comparisons, ablations)
    """
    by_width: Dict[int, Dict[str, AnalysisReport]] = {}
    for r in reports:
        by_width.setdefault(r.n, {})[r.variant] = r
    comparisons: List[Comparison] = []
    ablations: List[Comparison] = []
    for n in sorted(by_width):
        group = by_width[n]
        regular = group.get("regular_cla")
        hybrid = group.get("partitioned_hybrid")
        plain = group.get("partitioned_cla")
        if regular and hybrid:
            comparisons.append(compare(regular, hybrid))
        if plain and hybrid:
            ablations.append(compare(plain, hybrid))
        if regular and plain:
            ablations.append(compare(regular, plain))
    return comparisons, ablations

"""
Dadda column compression.

reduce_to_two_rows() drives any weight -> nets column set down the Dadda
height sequence with (3,2) and (2,2) counters, and cpa_sum() adds the two
remaining rows into one.
"""
from __future__ import annotations

import hashlib
import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from adders import build_cla, build_prefix_cla, build_rca, full_adder, half_adder
from netlist import ConfigError, NetlistBuilder

logger = logging.getLogger(__name__)

FULL_ADDER = "(3,2)"
HALF_ADDER = "(2,2)"

CPA_BUILDERS = {"rca": build_rca, "cla": build_cla, "prefix": build_prefix_cla}
CPA_ADDERS = tuple(CPA_BUILDERS)


def dadda_targets(max_height: int) -> List[int]:
    """Every Dadda target below max_height, largest first: [..., 6, 4, 3, 2]."""
    if max_height < 2:
        raise ConfigError(f"max_height must be at least 2, got {max_height}")
    targets = []
    d = 2
    while d < max_height:
        targets.append(d)
        d = 3 * d // 2
    return targets[::-1]


@dataclass(frozen=True)
class CounterPlacement:
    kind: str
    weight: int
    inputs: Tuple[int, ...]
    sum_net: int
    carry_net: int

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind,
            "weight": self.weight,
            "inputs": list(self.inputs),
            "sum": self.sum_net,
            "carry": self.carry_net,
        }


@dataclass
class ReductionStage:
    target: int
    placements: List[CounterPlacement]
    columns_before: Dict[int, Tuple[int, ...]]
    columns_after: Dict[int, Tuple[int, ...]]

    @property
    def heights_before(self) -> Dict[int, int]:
        return {w: len(nets) for w, nets in self.columns_before.items()}

    @property
    def heights_after(self) -> Dict[int, int]:
        return {w: len(nets) for w, nets in self.columns_after.items()}

    def to_dict(self) -> Dict:
        return {
            "target": self.target,
            "heights_before": {str(w): h for w, h in self.heights_before.items()},
            "heights_after": {str(w): h for w, h in self.heights_after.items()},
            "placements": [p.to_dict() for p in self.placements],
        }


@dataclass
class ReductionSchedule:
    label: str
    stages: List[ReductionStage] = field(default_factory=list)

    def counter_totals(self) -> Tuple[int, int]:
        """(full adders, half adders) over all stages."""
        kinds = [p.kind for stage in self.stages for p in stage.placements]
        return kinds.count(FULL_ADDER), kinds.count(HALF_ADDER)

    def to_dict(self) -> Dict:
        fa, ha = self.counter_totals()
        return {
            "label": self.label,
            "full_adders": fa,
            "half_adders": ha,
            "stages": [stage.to_dict() for stage in self.stages],
        }

    def digest(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass
class TwoRowResult:
    """
    Columns of height at most two. max_value bounds the column set's value and
    is carried over from the unreduced input (reduction conserves value).
    """

    columns: Dict[int, Tuple[int, ...]]
    max_value: int

    @property
    def span(self) -> Tuple[int, int]:
        weights = [w for w, nets in self.columns.items() if nets]
        return min(weights), max(weights)

    def _row(self, position: int) -> List[Optional[int]]:
        lo, hi = self.span
        return [
            self.columns.get(w, ())[position] if len(self.columns.get(w, ())) > position else None
            for w in range(lo, hi + 1)
        ]

    @property
    def row_a(self) -> List[Optional[int]]:
        return self._row(0)

    @property
    def row_b(self) -> List[Optional[int]]:
        return self._row(1)


def _snapshot(columns: Mapping[int, List[int]]) -> Dict[int, Tuple[int, ...]]:
    return {w: tuple(columns[w]) for w in sorted(columns) if columns[w]}


def reduce_to_two_rows(columns: Mapping[int, Sequence[int]], builder: NetlistBuilder,
                       label: str = "matrix") -> Tuple[TwoRowResult, ReductionSchedule]:
    """
    Compress a column set to at most two nets per weight.

    Each stage processes weights in ascending order. A column's height counts
    its own nets plus the carries this stage sends into it; counters are placed
    until that height reaches the stage target, a (3,2) counter while at least
    two bits must go and a (2,2) counter for the last one. Counters take the
    lowest NetIds of a column first.

    A lone column of height 3 with target 2 therefore gets one (2,2) counter,
    not a (3,2): removing one bit is all the stage needs, and Dadda's rule
    places no more counters than that.

    :raises ConfigError: if every column is empty
    """
    cols: Dict[int, List[int]] = {w: sorted(nets) for w, nets in columns.items() if nets}
    if not cols:
        raise ConfigError("Cannot reduce an empty column set")
    max_value = sum(len(nets) << w for w, nets in cols.items())
    schedule = ReductionSchedule(label)
    max_height = max(len(nets) for nets in cols.values())
    targets = dadda_targets(max_height) if max_height > 2 else []

    for target in targets:
        before = _snapshot(cols)
        placements: List[CounterPlacement] = []
        carries_in: Dict[int, List[int]] = defaultdict(list)
        next_cols: Dict[int, List[int]] = {}
        w, top = min(cols), max(cols)
        while w <= top or carries_in.get(w):
            pending = list(cols.get(w, []))
            produced: List[int] = []
            height = len(pending) + len(carries_in.get(w, []))
            while height > target:
                take = 3 if height - target >= 2 else 2
                if len(pending) < take:
                    raise RuntimeError(
                        f"{label}: column {w} cannot reach height {target} (stage infeasible)"
                    )
                used, pending = pending[:take], pending[take:]
                if take == 3:
                    s, c = full_adder(*used, builder)
                    kind = FULL_ADDER
                else:
                    s, c = half_adder(*used, builder)
                    kind = HALF_ADDER
                placements.append(CounterPlacement(kind, w, tuple(used), s, c))
                produced.append(s)
                carries_in[w + 1].append(c)
                top = max(top, w + 1)
                height -= take - 1
            next_cols[w] = sorted(pending + produced + carries_in.get(w, []))
            w += 1

        cols = {w: nets for w, nets in next_cols.items() if nets}
        tallest = max(len(nets) for nets in cols.values())
        if tallest > target:
            raise RuntimeError(f"{label}: height law broken, {tallest} > {target}")
        schedule.stages.append(ReductionStage(target, placements, before, _snapshot(cols)))
        logger.debug(f"{label}: stage d={target} placed {len(placements)} counters")

    fa, ha = schedule.counter_totals()
    logger.info(f"🔧 {label}: {len(schedule.stages)} Dadda stages, {fa} full adders, {ha} half adders")
    return TwoRowResult(_snapshot(cols), max_value), schedule


def cpa_sum(two_rows: TwoRowResult, builder: NetlistBuilder, adder: str = "rca",
            width: Optional[int] = None) -> List[int]:
    """
    Add the two rows into one, least significant weight first.

    Leading single-net columns pass straight through; the carry-propagate
    adder starts at the first two-high column. The result is width bits wide
    (default: enough bits for two_rows.max_value above the lowest weight);
    carries past that width are not built and missing positions are CONST0.
    """
    if adder not in CPA_ADDERS:
        raise ConfigError(f"Unknown carry-propagate adder '{adder}', expected one of {CPA_ADDERS}")
    lo, hi = two_rows.span
    if width is None:
        width = max(two_rows.max_value.bit_length() - lo, hi - lo + 1)
    zero = builder.const(0)
    cols = two_rows.columns

    bits: List[int] = []
    w = lo
    while w <= hi and len(cols.get(w, ())) <= 1:
        bits.append(cols[w][0] if cols.get(w) else zero)
        w += 1

    if w <= hi:
        x = [cols[v][0] if cols.get(v) else zero for v in range(w, hi + 1)]
        y = [cols[v][1] if len(cols.get(v, ())) == 2 else zero for v in range(w, hi + 1)]
        need_carry = (hi + 1 - lo) < width
        total, carry = CPA_BUILDERS[adder](x, y, None, builder, carry_out=need_carry)
        bits.extend(total)
        if carry is not None:
            bits.append(carry)

    if len(bits) > width:
        raise ConfigError(f"Rows need {len(bits)} bits but only {width} were requested")
    bits.extend([zero] * (width - len(bits)))
    return bits

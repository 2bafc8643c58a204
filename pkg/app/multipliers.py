"""
Complete unsigned n x n multipliers.

- regular_cla: full-matrix Dadda reduction, then one grouped CLA over the
  two rows.
- partitioned_cla: part0 and part1 reduced and summed independently (prefix
  adders by default), then an n-bit prefix CLA adds part0's overflow bits
  into part1.
- partitioned_hybrid: same parts, with the hybrid CLA + MBEC final adder.

Every design has inputs a[n-1:0], b[n-1:0] and output p[2n-1:0].
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from adders import FinalAdderPlan, assemble_hybrid_adder, build_prefix_cla, default_plan, overflow_width
from dadda import CPA_ADDERS, ReductionSchedule, cpa_sum, reduce_to_two_rows
from netlist import ConfigError, ConstructionError, Netlist, NetlistBuilder
from ppgen import generate_pp, partition
from simulator import bits_to_ints, first_mismatch, simulate
from utils import normalize_variant, stable_digest, validate_width, variant_label

logger = logging.getLogger(__name__)

REGULAR_CLA = "regular_cla"
PARTITIONED_CLA = "partitioned_cla"
PARTITIONED_HYBRID = "partitioned_hybrid"

EXHAUSTIVE_LIMIT = 10


@dataclass(frozen=True)
class MultiplierConfig:
    """
    :param n: operand width
    :param variant: regular_cla | partitioned_cla | partitioned_hybrid
    :param plan: hybrid final adder plan; None means default_plan(n)
    :param in_part_adder: carry-propagate adder used inside each part (prefix | cla | rca)
    :param cost_model: digest of the cost model the design will be analysed with
    """

    n: int
    variant: str = PARTITIONED_HYBRID
    plan: Optional[FinalAdderPlan] = None
    in_part_adder: str = "prefix"
    cost_model: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "variant", normalize_variant(self.variant))
        minimum = 2 if self.variant == REGULAR_CLA else 4
        object.__setattr__(self, "n", validate_width(self.n, minimum))
        if self.in_part_adder not in CPA_ADDERS:
            raise ConfigError(f"in_part_adder must be one of {CPA_ADDERS}, got '{self.in_part_adder}'")
        if self.plan is not None:
            if self.variant != PARTITIONED_HYBRID:
                raise ConfigError(f"A final adder plan only applies to {PARTITIONED_HYBRID}")
            self.plan.validate(self.n)
            if self.plan.cla_width != overflow_width(self.n):
                raise ConfigError(
                    f"Plan CLA width {self.plan.cla_width} must equal part0's overflow width {overflow_width(self.n)}"
                )

    @property
    def design_id(self) -> str:
        return f"{self.n}:{variant_label(self.variant)}"

    def resolved_plan(self) -> Optional[FinalAdderPlan]:
        if self.variant != PARTITIONED_HYBRID:
            return None
        return self.plan or default_plan(self.n)

    def to_dict(self) -> Dict:
        plan = self.resolved_plan()
        return {
            "n": self.n,
            "variant": self.variant,
            "plan": plan.to_dict() if plan else None,
            "in_part_adder": self.in_part_adder if self.variant != REGULAR_CLA else None,
            "cost_model": self.cost_model,
        }

    def digest(self) -> str:
        return stable_digest(self.to_dict())


@dataclass
class MultiplierNetlist:
    netlist: Netlist
    config: MultiplierConfig
    plan: Optional[FinalAdderPlan]
    schedules: Dict[str, ReductionSchedule]
    part_nets: Dict[str, List[int]] = field(default_factory=dict)


def _provenance(config: MultiplierConfig, schedules: Dict[str, ReductionSchedule]) -> Dict:
    return {
        "design_id": config.design_id,
        "n": config.n,
        "variant": config.variant,
        "config": config.to_dict(),
        "config_digest": config.digest(),
        "schedule_digests": {label: s.digest() for label, s in schedules.items()},
    }


def _fresh(builder: Optional[NetlistBuilder]) -> NetlistBuilder:
    builder = builder or NetlistBuilder()
    if builder.num_nets:
        raise ConfigError("Multipliers must be generated into an empty builder")
    return builder


def build_regular(n: int, builder: Optional[NetlistBuilder] = None, cost_model: Optional[str] = None) -> MultiplierNetlist:
    config = MultiplierConfig(n, REGULAR_CLA, cost_model=cost_model)
    builder = _fresh(builder)
    a = builder.add_input("a", n)
    b = builder.add_input("b", n)
    matrix = generate_pp(n, a, b, builder)
    rows, schedule = reduce_to_two_rows(matrix.columns, builder, label="matrix")
    product = cpa_sum(rows, builder, adder="cla", width=2 * n)
    builder.set_output("p", product)

    schedules = {"matrix": schedule}
    netlist = builder.build(metadata=_provenance(config, schedules))
    logger.info(f"✅ Built {config.design_id}: {len(netlist.gates)} gates")
    return MultiplierNetlist(netlist, config, None, schedules)


def _final_stage(kind: str, overflow: List[int], part1: List[int], plan: Optional[FinalAdderPlan],
                 builder: NetlistBuilder) -> List[int]:
    """Upper n product bits from part0's overflow and part1's n-bit sum."""
    n = len(part1)
    if kind == PARTITIONED_HYBRID:
        return assemble_hybrid_adder(overflow, part1, plan, builder).bits
    padded = overflow + [builder.const(0)] * (n - len(overflow))
    bits, _ = build_prefix_cla(padded, part1, None, builder, carry_out=False)
    return bits


def check_parts_disjoint(netlist: Netlist, part0: List[int], part1: List[int]) -> None:
    """Part0 and part1 must share no gate, only primary inputs and constants."""
    graph = netlist.to_digraph()
    shared = netlist.fan_in_cone(part0, graph) & netlist.fan_in_cone(part1, graph)
    if shared:
        raise ConstructionError(f"part0 and part1 share {len(shared)} gates, e.g. net {min(shared)}")


def build_partitioned(n: int, final_adder_kind: str = PARTITIONED_HYBRID, plan: Optional[FinalAdderPlan] = None,
                      builder: Optional[NetlistBuilder] = None, in_part_adder: str = "prefix",
                      cost_model: Optional[str] = None) -> MultiplierNetlist:
    """
    Partitioned multiplier. Part0's low n sum bits are final products p[n-1:0];
    its k overflow bits and part1's n sum bits meet in the final stage.

    :param final_adder_kind: partitioned_cla or partitioned_hybrid
    :raises ConfigError: for n < 4, a plan on a non-hybrid design, or an inconsistent plan
    """
    kind = normalize_variant(final_adder_kind)
    if kind == REGULAR_CLA:
        raise ConfigError("build_partitioned needs partitioned_cla or partitioned_hybrid")
    config = MultiplierConfig(n, kind, plan=plan, in_part_adder=in_part_adder, cost_model=cost_model)
    plan = config.resolved_plan()
    k = overflow_width(n)

    builder = _fresh(builder)
    a = builder.add_input("a", n)
    b = builder.add_input("b", n)
    parts = partition(generate_pp(n, a, b, builder))

    rows0, schedule0 = reduce_to_two_rows(parts.part0.columns, builder, label="part0")
    part0 = cpa_sum(rows0, builder, adder=in_part_adder)
    if len(part0) != n + k:
        raise RuntimeError(f"part0 sum is {len(part0)} bits, expected {n + k}")
    rows1, schedule1 = reduce_to_two_rows(parts.part1.columns, builder, label="part1")
    part1 = cpa_sum(rows1, builder, adder=in_part_adder, width=n)

    low, overflow = part0[:n], part0[n:]
    upper = _final_stage(kind, overflow, part1, plan, builder)
    builder.set_output("p", low + upper)

    schedules = {"part0": schedule0, "part1": schedule1}
    netlist = builder.build(metadata=_provenance(config, schedules))
    check_parts_disjoint(netlist, part0, part1)
    logger.info(f"✅ Built {config.design_id}: {len(netlist.gates)} gates, plan {plan.to_dict() if plan else None}")
    return MultiplierNetlist(
        netlist, config, plan, schedules,
        part_nets={"part0": part0, "part1": part1, "overflow": overflow},
    )


def build_multiplier(config: MultiplierConfig, builder: Optional[NetlistBuilder] = None) -> MultiplierNetlist:
    if config.variant == REGULAR_CLA:
        return build_regular(config.n, builder, cost_model=config.cost_model)
    return build_partitioned(
        config.n, config.variant, config.plan, builder,
        in_part_adder=config.in_part_adder, cost_model=config.cost_model,
    )


def build_final_stage(n: int, kind: str = PARTITIONED_HYBRID, plan: Optional[FinalAdderPlan] = None) -> Netlist:
    """
    The final adder on its own, with inputs ovf[k-1:0], p1[n-1:0] and output
    hi[n-1:0] = (p1 + ovf) mod 2^n, for analysing the last stage in isolation.
    """
    kind = normalize_variant(kind)
    if kind == REGULAR_CLA:
        raise ConfigError("The regular multiplier has no separate final stage")
    n = validate_width(n, 4)
    plan = (plan or default_plan(n)) if kind == PARTITIONED_HYBRID else None
    builder = NetlistBuilder()
    overflow = builder.add_input("ovf", overflow_width(n))
    part1 = builder.add_input("p1", n)
    builder.set_output("hi", _final_stage(kind, overflow, part1, plan, builder))
    return builder.build(metadata={"final_stage": variant_label(kind), "n": n})


@dataclass(frozen=True)
class Counterexample:
    a: int
    b: int
    got: int
    want: int


@dataclass(frozen=True)
class VerifyReport:
    passed: bool
    mode: str
    cases: int
    seed: Optional[int] = None
    counterexample: Optional[Counterexample] = None

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "mode": self.mode,
            "cases": self.cases,
            "seed": self.seed,
            "counterexample": None if self.counterexample is None else vars(self.counterexample),
        }


def operand_width(netlist: Netlist) -> int:
    try:
        n = netlist.input_bus("a").width
        if netlist.input_bus("b").width != n or netlist.output_bus("p").width != 2 * n:
            raise KeyError("p")
    except KeyError:
        raise ConfigError("Not a multiplier netlist: expected inputs a[n], b[n] and output p[2n]") from None
    return n


def verify(netlist: Netlist, mode: str = "random", count: int = 100_000, seed: int = 0,
           workers: int = 1) -> VerifyReport:
    """
    Compare the netlist against the integer product a*b.

    :param mode: 'exhaustive' (all 4^n pairs, only for n <= 10) or 'random'
    :return: VerifyReport with the first (lowest-index) failing case, if any
    """
    n = operand_width(netlist)
    if mode == "exhaustive":
        if n > EXHAUSTIVE_LIMIT:
            raise ConfigError(
                f"Exhaustive verification of n={n} would take 4^{n} cases; "
                f"use random mode for n > {EXHAUSTIVE_LIMIT}"
            )
        index = np.arange(1 << (2 * n), dtype=np.uint64)
        mask = np.uint64((1 << n) - 1)
        a_vals = (index & mask).tolist()
        b_vals = (index >> np.uint64(n)).tolist()
        seed = None
    elif mode == "random":
        if count < 1:
            raise ConfigError("Random verification needs at least one case")
        rng = np.random.default_rng(seed)
        a_vals = bits_to_ints(rng.integers(0, 2, size=(count, n), dtype=np.uint8))
        b_vals = bits_to_ints(rng.integers(0, 2, size=(count, n), dtype=np.uint8))
    else:
        raise ConfigError(f"Unknown verification mode '{mode}'")

    got = simulate(netlist, {"a": a_vals, "b": b_vals}, workers=workers)["p"]
    want = [x * y for x, y in zip(a_vals, b_vals)]
    bad = first_mismatch(got, want)
    if bad is None:
        logger.info(f"✅ Verified n={n} {mode}: {len(want)} cases passed")
        return VerifyReport(True, mode, len(want), seed)
    example = Counterexample(a_vals[bad], b_vals[bad], got[bad], want[bad])
    logger.warning(f"❌ Verification failed for n={n}: {example}")
    return VerifyReport(False, mode, len(want), seed, example)

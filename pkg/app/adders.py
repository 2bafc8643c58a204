"""
Adder library: counters, ripple-carry, grouped and parallel-prefix
carry-lookahead adders, binary to excess-1 converters (BEC / BEC with carry),
mux-selected BEC blocks and the variable-block hybrid final adder.

All constructors take and return lists of NetIds, least significant bit first.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from netlist import ConfigError, ConstructionError, NetlistBuilder

logger = logging.getLogger(__name__)

CLA_GROUP = 4
MIN_BLOCK = 4


def full_adder(a: int, b: int, c: int, builder: NetlistBuilder) -> Tuple[int, int]:
    """(3,2) counter. Returns (sum, carry)."""
    ab = builder.xor2(a, b)
    total = builder.xor2(ab, c)
    carry = builder.or2(builder.and2(a, b), builder.and2(ab, c))
    return total, carry


def half_adder(a: int, b: int, builder: NetlistBuilder) -> Tuple[int, int]:
    """(2,2) counter. Returns (sum, carry)."""
    return builder.xor2(a, b), builder.and2(a, b)


def mux2(sel: int, a0: int, a1: int, builder: NetlistBuilder, sel_n: Optional[int] = None) -> int:
    """a1 when sel else a0; pass sel_n to share one inverter across a block."""
    if sel_n is None:
        sel_n = builder.not1(sel)
    return builder.or2(builder.and2(sel, a1), builder.and2(sel_n, a0))


def _check_widths(x: Sequence[int], y: Sequence[int]) -> None:
    if len(x) != len(y):
        raise ConstructionError(f"Adder operands differ in width: {len(x)} vs {len(y)}")
    if not x:
        raise ConstructionError("Adder operands must be at least 1 bit wide")


def build_rca(x: Sequence[int], y: Sequence[int], cin: Optional[int], builder: NetlistBuilder,
              carry_out: bool = True) -> Tuple[List[int], Optional[int]]:
    """
    Ripple-carry adder. With cin=None the first position is a half adder.

    :return: (sum bits, carry-out or None)
    """
    _check_widths(x, y)
    bits = []
    carry = cin
    last = len(x) - 1
    for position, (xi, yi) in enumerate(zip(x, y)):
        if position == last and not carry_out:
            s = builder.xor2(xi, yi)
            bits.append(s if carry is None else builder.xor2(s, carry))
            carry = None
        elif carry is None:
            s, carry = half_adder(xi, yi, builder)
            bits.append(s)
        else:
            s, carry = full_adder(xi, yi, carry, builder)
            bits.append(s)
    return bits, carry


def build_cla(x: Sequence[int], y: Sequence[int], cin: Optional[int], builder: NetlistBuilder,
              carry_out: bool = True) -> Tuple[List[int], Optional[int]]:
    """
    Carry-lookahead adder built from 4-bit generate/propagate groups, the
    groups chained by their carries.

    Inside a group starting at bit s, the group generate/propagate terms are
    G[j:s] = g_j | p_j & G[j-1:s] and P[j:s] = p_j & P[j-1:s], and every carry
    is c_{j+1} = G[j:s] | P[j:s] & c_s, so the incoming carry crosses a group
    through two gates.

    :return: (sum bits, carry-out or None)
    """
    _check_widths(x, y)
    width = len(x)
    p = [builder.xor2(xi, yi) for xi, yi in zip(x, y)]
    g = [builder.and2(xi, yi) for xi, yi in zip(x, y)]

    bits = []
    carry = cin
    for start in range(0, width, CLA_GROUP):
        stop = min(start + CLA_GROUP, width)
        group_in = carry
        big_g = big_p = None
        for j in range(start, stop):
            bits.append(p[j] if carry is None else builder.xor2(p[j], carry))
            if j == width - 1 and not carry_out:
                break
            if big_g is None:
                big_g, big_p = g[j], p[j]
            else:
                big_g = builder.or2(g[j], builder.and2(p[j], big_g))
                if group_in is not None:
                    big_p = builder.and2(p[j], big_p)
            if group_in is None:
                carry = big_g
            else:
                carry = builder.or2(big_g, builder.and2(big_p, group_in))
    return bits, (carry if carry_out else None)


def sklansky_steps(width: int) -> Iterator[Tuple[int, int, int]]:
    """
    Combine steps (span, i, j) of a Sklansky prefix network over positions
    0..width-1: at each level, node i takes in the prefix that ends at j. Node j
    is never updated in the level that reads it, so updates can be in place.
    """
    span = 1
    while span < width:
        for i in range(width):
            if i & span:
                yield span, i, (i & ~(span - 1)) - 1
        span *= 2


def prefix_and(bits: Sequence[int], builder: NetlistBuilder) -> List[int]:
    """out[i] = bits[0] & ... & bits[i], ceil(log2(len(bits))) AND levels deep."""
    out = list(bits)
    for _, i, j in sklansky_steps(len(out)):
        out[i] = builder.and2(out[j], out[i])
    return out


def build_prefix_cla(x: Sequence[int], y: Sequence[int], cin: Optional[int], builder: NetlistBuilder,
                     carry_out: bool = True) -> Tuple[List[int], Optional[int]]:
    """
    Parallel-prefix carry-lookahead adder (Sklansky network).

    Carries use generate g = x & y and transmit t = x | y; sums use x ^ y. Only
    the carries the sum bits (and carry-out, if asked for) read are built.

    :return: (sum bits, carry-out or None)
    """
    _check_widths(x, y)
    width = len(x)
    p = [builder.xor2(xi, yi) for xi, yi in zip(x, y)]
    span = width if carry_out else width - 1
    g = [builder.and2(x[i], y[i]) for i in range(span)]
    t = [None if i == 0 and cin is None else builder.or2(x[i], y[i]) for i in range(span)]
    if cin is not None and span:
        g[0] = builder.or2(g[0], builder.and2(t[0], cin))

    for level, i, j in sklansky_steps(span):
        g[i] = builder.or2(g[i], builder.and2(t[i], g[j]))
        if i >= 2 * level:
            t[i] = builder.and2(t[i], t[j])

    bits = [p[0] if cin is None else builder.xor2(p[0], cin)]
    bits += [builder.xor2(p[i], g[i - 1]) for i in range(1, width)]
    return bits, (g[width - 1] if carry_out else None)


class BecVariant(str, Enum):
    PLAIN = "plain"
    WITH_CARRY = "with_carry"


def build_bec(b: Sequence[int], variant: Union[str, BecVariant], builder: NetlistBuilder) -> Tuple[List[int], Optional[int]]:
    """
    Binary to excess-1 converter: x = (b + 1) mod 2^m. The with-carry variant
    also returns cy = 1 iff b is all ones.

    Bit i flips when every bit below it is 1. Those all-ones terms come from
    a prefix AND, so the converter is about log2(m) gates deep.
    """
    variant = BecVariant(variant)
    if not b:
        raise ConstructionError("BEC width must be at least 1")
    with_carry = variant is BecVariant.WITH_CARRY
    ones = prefix_and(b if with_carry else b[:-1], builder)
    x = [builder.not1(b[0])] + [builder.xor2(b[i], ones[i - 1]) for i in range(1, len(b))]
    return x, (ones[-1] if with_carry else None)


@dataclass
class MbecBlock:
    bits: List[int]
    carry: Optional[int] = None
    carry_n: Optional[int] = None


def build_mbec_block(p_bits: Sequence[int], select: int, variant: Union[str, BecVariant],
                     builder: NetlistBuilder, select_n: Optional[int] = None) -> MbecBlock:
    """
    Carry-select block: p_bits when select=0, BEC(p_bits) when select=1.

    The unincremented block has an appended MSB of 0, so the with-carry
    block's carry is select & cy. Its complement comes from a NAND, ready to
    drive the next block's muxes without an extra inverter.

    :param select_n: the complement of select, if the caller already has it
    """
    variant = BecVariant(variant)
    incremented, cy = build_bec(p_bits, variant, builder)
    if select_n is None:
        select_n = builder.not1(select)
    out = [mux2(select, keep, inc, builder, select_n) for keep, inc in zip(p_bits, incremented)]
    if variant is BecVariant.PLAIN:
        return MbecBlock(out)
    return MbecBlock(out, builder.and2(select, cy), builder.nand2(select, cy))


def overflow_width(n: int) -> int:
    """
    k(n): bits of part0's sum above weight n-1. The largest part0 value is
    (n-1)*2^n + 1.
    """
    if n < 2:
        raise ConfigError(f"Operand width must be at least 2, got {n}")
    return ((n - 1) * (1 << n) + 1).bit_length() - n


@dataclass(frozen=True)
class AdderBlock:
    width: int
    variant: BecVariant = BecVariant.PLAIN

    def to_dict(self) -> Dict:
        return {"width": self.width, "variant": self.variant.value}


@dataclass(frozen=True)
class FinalAdderPlan:
    """
    Hybrid final adder layout: a cla_width-bit CLA followed by MBEC blocks,
    with-carry blocks first and one plain block last.
    """

    cla_width: int
    blocks: Tuple[AdderBlock, ...] = field(default_factory=tuple)

    @property
    def upper_width(self) -> int:
        return self.cla_width + sum(block.width for block in self.blocks)

    def validate(self, n: int) -> "FinalAdderPlan":
        if self.cla_width < 1:
            raise ConfigError("Plan CLA width must be at least 1")
        if not self.blocks:
            raise ConfigError("Plan needs at least one MBEC block")
        if self.upper_width != n:
            raise ConfigError(
                f"Plan covers {self.upper_width} bits (CLA {self.cla_width} + blocks "
                f"{[b.width for b in self.blocks]}), expected {n}"
            )
        if self.blocks[-1].variant is not BecVariant.PLAIN:
            raise ConfigError("The last plan block must be plain")
        for position, block in enumerate(self.blocks[:-1]):
            if block.variant is not BecVariant.WITH_CARRY:
                raise ConfigError(f"Plan block #{position} must be with_carry")
            w = block.width
            if w < MIN_BLOCK or w & (w - 1):
                raise ConfigError(f"Plan block #{position} width {w} is not a power of two >= {MIN_BLOCK}")
        if self.blocks[-1].width < 1:
            raise ConfigError("The last plan block must be at least 1 bit wide")
        return self

    def to_dict(self) -> Dict:
        return {"cla_width": self.cla_width, "blocks": [block.to_dict() for block in self.blocks]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "FinalAdderPlan":
        try:
            blocks = tuple(
                AdderBlock(int(entry["width"]), BecVariant(entry.get("variant", "plain")))
                for entry in data["blocks"]
            )
            return cls(int(data["cla_width"]), blocks)
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Malformed final adder plan: {e}") from e

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "FinalAdderPlan":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"Plan file not found: {path}")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"Plan file {path} is not valid JSON: {e}") from e
        return cls.from_dict(data)


def default_plan(n: int) -> FinalAdderPlan:
    """
    k = k(n), then with-carry blocks of 4, 8, 16, ... while at least twice the
    current size remains; the plain block takes what is left.
    """
    if n < 4:
        raise ConfigError(f"Partitioned multipliers need n >= 4, got {n}")
    k = overflow_width(n)
    remaining = n - k
    blocks = []
    size = MIN_BLOCK
    while remaining >= 2 * size:
        blocks.append(AdderBlock(size, BecVariant.WITH_CARRY))
        remaining -= size
        size *= 2
    blocks.append(AdderBlock(remaining, BecVariant.PLAIN))
    return FinalAdderPlan(k, tuple(blocks))


@dataclass
class HybridAdderResult:
    bits: List[int]
    cla_carry: int
    selects: List[int]
    block_inputs: List[List[int]]


def assemble_hybrid_adder(part0_overflow: Sequence[int], part1_bits: Sequence[int], plan: FinalAdderPlan,
                          builder: NetlistBuilder) -> HybridAdderResult:
    """
    Add part0's overflow bits into part1's bits.

    A k-bit prefix CLA sums overflow + part1[0:k]; its carry selects the first
    MBEC block, and each with-carry block's carry selects the next one.

    :return: the n upper product bits plus the select nets for inspection
    """
    n = len(part1_bits)
    plan.validate(n)
    if len(part0_overflow) != plan.cla_width:
        raise ConfigError(f"Plan CLA width {plan.cla_width} does not match {len(part0_overflow)} overflow bits")

    k = plan.cla_width
    bits, select = build_prefix_cla(list(part0_overflow), list(part1_bits[:k]), None, builder, carry_out=True)
    cla_carry = select
    select_n = builder.not1(select)
    selects, block_inputs = [], []
    position = k
    for block in plan.blocks:
        chunk = list(part1_bits[position:position + block.width])
        selects.append(select)
        block_inputs.append(chunk)
        result = build_mbec_block(chunk, select, block.variant, builder, select_n)
        bits.extend(result.bits)
        select, select_n = result.carry, result.carry_n
        position += block.width
    return HybridAdderResult(bits, cla_carry, selects, block_inputs)

import json

import networkx as nx
import numpy as np
import pytest

from adders import (
    AdderBlock,
    BecVariant,
    FinalAdderPlan,
    assemble_hybrid_adder,
    build_bec,
    build_cla,
    build_mbec_block,
    build_prefix_cla,
    build_rca,
    default_plan,
    overflow_width,
    prefix_and,
    sklansky_steps,
)
from multipliers import build_final_stage
from netlist import ConfigError, ConstructionError, NetlistBuilder, critical_depth
from simulator import bits_to_ints, evaluate, simulate

# Rows of the 5-bit converter table: input, converted, carry
BEC5_ROWS = [
    (0b00000, 0b00001, 0),
    (0b00001, 0b00010, 0),
    (0b00111, 0b01000, 0),
    (0b01111, 0b10000, 0),
    (0b11011, 0b11100, 0),
    (0b11110, 0b11111, 0),
    (0b11111, 0b00000, 1),
]


def _adder_netlist(width, build, with_cin=True):
    builder = NetlistBuilder()
    x = builder.add_input("x", width)
    y = builder.add_input("y", width)
    cin = builder.add_input("cin", 1)[0] if with_cin else None
    total, carry = build(x, y, cin, builder)
    builder.set_output("s", total + [carry])
    return builder.build()


def _exhaustive_add(netlist, width):
    xs, ys, cs = [], [], []
    for x in range(1 << width):
        for y in range(1 << width):
            for c in (0, 1):
                xs.append(x)
                ys.append(y)
                cs.append(c)
    got = simulate(netlist, {"x": xs, "y": ys, "cin": cs})["s"]
    return got, [x + y + c for x, y, c in zip(xs, ys, cs)]


def test_rca_examples():
    netlist = _adder_netlist(4, build_rca)
    assert evaluate(netlist, {"x": 0b1111, "y": 0b0001, "cin": 0}) == {"s": 0b10000}
    assert evaluate(netlist, {"x": 0b1010, "y": 0, "cin": 0}) == {"s": 0b1010}


def test_rca_exhaustive_4_bit():
    got, want = _exhaustive_add(_adder_netlist(4, build_rca), 4)
    assert len(got) == 512
    assert got == want


@pytest.mark.parametrize("width", [1, 2, 3, 4, 5, 6])
def test_cla_exhaustive(width):
    got, want = _exhaustive_add(_adder_netlist(width, build_cla), width)
    assert got == want


@pytest.mark.parametrize("width", [1, 3, 5])
def test_cla_matches_rca_without_carry_in(width):
    cla = _adder_netlist(width, build_cla, with_cin=False)
    rca = _adder_netlist(width, build_rca, with_cin=False)
    xs = [x for x in range(1 << width) for _ in range(1 << width)]
    ys = [y for _ in range(1 << width) for y in range(1 << width)]
    assert simulate(cla, {"x": xs, "y": ys}) == simulate(rca, {"x": xs, "y": ys})


def test_cla_three_bit_example():
    netlist = _adder_netlist(3, build_cla)
    assert evaluate(netlist, {"x": 0b011, "y": 0b101, "cin": 0}) == {"s": 0b1000}
    assert evaluate(netlist, {"x": 0b110, "y": 0, "cin": 0}) == {"s": 0b110}


def test_sklansky_steps_for_eight_positions():
    assert list(sklansky_steps(8)) == [
        (1, 1, 0), (1, 3, 2), (1, 5, 4), (1, 7, 6),
        (2, 2, 1), (2, 3, 1), (2, 6, 5), (2, 7, 5),
        (4, 4, 3), (4, 5, 3), (4, 6, 3), (4, 7, 3),
    ]
    assert list(sklansky_steps(1)) == []


@pytest.mark.parametrize("width", range(1, 8))
def test_prefix_and_exhaustive(width):
    builder = NetlistBuilder()
    b = builder.add_input("b", width)
    builder.set_output("o", prefix_and(b, builder))
    netlist = builder.build()
    bs = list(range(1 << width))
    want = [sum(1 << i for i in range(width) if all(b >> j & 1 for j in range(i + 1))) for b in bs]
    assert simulate(netlist, {"b": bs})["o"] == want


@pytest.mark.parametrize("width", [1, 2, 3, 4, 5, 6])
def test_prefix_cla_exhaustive(width):
    got, want = _exhaustive_add(_adder_netlist(width, build_prefix_cla), width)
    assert got == want


@pytest.mark.parametrize("width", [1, 2, 5, 8])
def test_prefix_cla_without_carries(width):
    builder = NetlistBuilder()
    x = builder.add_input("x", width)
    y = builder.add_input("y", width)
    total, carry = build_prefix_cla(x, y, None, builder, carry_out=False)
    assert carry is None
    builder.set_output("s", total)
    netlist = builder.build()
    xs = [x for x in range(1 << width) for _ in range(1 << width)]
    ys = [y for _ in range(1 << width) for y in range(1 << width)]
    assert simulate(netlist, {"x": xs, "y": ys})["s"] == [(x + y) % (1 << width) for x, y in zip(xs, ys)]


def test_prefix_cla_is_logarithmic():
    prefix = critical_depth(_adder_netlist(64, build_prefix_cla, with_cin=False))
    grouped = critical_depth(_adder_netlist(64, build_cla, with_cin=False))
    assert prefix == 15
    assert prefix < grouped


@pytest.mark.parametrize("width", [16, 33, 70])
@pytest.mark.parametrize("build", [build_rca, build_cla, build_prefix_cla])
def test_adders_random_wide(width, build):
    netlist = _adder_netlist(width, build)
    rng = np.random.default_rng(width)
    xs = bits_to_ints(rng.integers(0, 2, size=(100_000, width), dtype=np.uint8))
    ys = bits_to_ints(rng.integers(0, 2, size=(100_000, width), dtype=np.uint8))
    cs = rng.integers(0, 2, size=100_000).tolist()
    got = simulate(netlist, {"x": xs, "y": ys, "cin": cs})["s"]
    assert got == [x + y + c for x, y, c in zip(xs, ys, cs)]


def test_adders_reject_width_mismatch():
    builder = NetlistBuilder()
    x = builder.add_input("x", 3)
    y = builder.add_input("y", 2)
    with pytest.raises(ConstructionError):
        build_rca(x, y, None, builder)
    with pytest.raises(ConstructionError):
        build_cla(x, y, None, builder)
    with pytest.raises(ConstructionError):
        build_prefix_cla(x, y, None, builder)


def _bec_netlist(width, variant):
    builder = NetlistBuilder()
    b = builder.add_input("b", width)
    x, cy = build_bec(b, variant, builder)
    builder.set_output("x", x)
    if cy is not None:
        builder.set_output("cy", [cy])
    return builder.build()


def test_bec5_table_rows():
    plain = _bec_netlist(5, "plain")
    with_carry = _bec_netlist(5, BecVariant.WITH_CARRY)
    for b, x, cy in BEC5_ROWS:
        assert evaluate(plain, {"b": b}) == {"x": x}
        assert evaluate(with_carry, {"b": b}) == {"x": x, "cy": cy}


@pytest.mark.parametrize("width", range(1, 9))
def test_bec_exhaustive(width):
    netlist = _bec_netlist(width, "with_carry")
    bs = list(range(1 << width))
    out = simulate(netlist, {"b": bs})
    assert out["x"] == [(b + 1) % (1 << width) for b in bs]
    assert out["cy"] == [int(b == (1 << width) - 1) for b in bs]


@pytest.mark.parametrize("variant", ["plain", "with_carry"])
def test_bec_depth_grows_with_log_width(variant):
    # prefix AND over 16 bits is 4 levels, then one XOR
    assert critical_depth(_bec_netlist(16, variant)) == 6


def test_mbec_reuses_the_callers_select_complement():
    builder = NetlistBuilder()
    p = builder.add_input("p", 4)
    sel, sel_n = builder.add_input("sel", 1)[0], builder.add_input("sel_n", 1)[0]
    block = build_mbec_block(p, sel, "plain", builder, select_n=sel_n)
    builder.set_output("out", block.bits)
    netlist = builder.build()
    assert not any(g.kind.value == "NOT" and g.inputs == (sel,) for g in netlist.gates)
    assert evaluate(netlist, {"p": 0b0101, "sel": 1, "sel_n": 0}) == {"out": 0b0110}
    assert evaluate(netlist, {"p": 0b0101, "sel": 0, "sel_n": 1}) == {"out": 0b0101}


def _mbec_netlist(width, variant):
    builder = NetlistBuilder()
    p = builder.add_input("p", width)
    sel = builder.add_input("sel", 1)[0]
    block = build_mbec_block(p, sel, variant, builder)
    builder.set_output("out", block.bits)
    if block.carry is not None:
        builder.set_output("carry", [block.carry])
        builder.set_output("carry_n", [block.carry_n])
    return builder.build()


def test_mbec_select_zero_passes_through():
    netlist = _mbec_netlist(5, "with_carry")
    for p in range(32):
        assert evaluate(netlist, {"p": p, "sel": 0}) == {"out": p, "carry": 0, "carry_n": 1}


def test_mbec_select_one_increments():
    assert evaluate(_mbec_netlist(5, "with_carry"), {"p": 0b11111, "sel": 1}) == {"out": 0, "carry": 1, "carry_n": 0}
    assert evaluate(_mbec_netlist(4, "with_carry"), {"p": 0b0101, "sel": 1}) == {"out": 0b0110, "carry": 0, "carry_n": 1}
    assert evaluate(_mbec_netlist(4, "plain"), {"p": 0b0101, "sel": 1}) == {"out": 0b0110}


def test_overflow_width():
    assert [overflow_width(n) for n in (8, 16, 32, 64)] == [3, 4, 5, 6]
    for n in range(2, 70):
        part0_max = sum((w + 1) << w for w in range(n))
        assert part0_max == (n - 1) * (1 << n) + 1
        assert overflow_width(n) == part0_max.bit_length() - n


def _widths(plan):
    return plan.cla_width, [(b.width, b.variant.value) for b in plan.blocks]


def test_default_plans():
    assert _widths(default_plan(8)) == (3, [(5, "plain")])
    assert _widths(default_plan(16)) == (4, [(4, "with_carry"), (8, "plain")])
    assert _widths(default_plan(32)) == (5, [(4, "with_carry"), (8, "with_carry"), (15, "plain")])
    assert _widths(default_plan(64)) == (6, [(4, "with_carry"), (8, "with_carry"), (16, "with_carry"), (30, "plain")])
    for n in range(4, 80):
        default_plan(n).validate(n)


def test_plan_validation():
    wc = BecVariant.WITH_CARRY
    with pytest.raises(ConfigError):
        FinalAdderPlan(4, (AdderBlock(4, wc), AdderBlock(7))).validate(16)
    with pytest.raises(ConfigError):
        FinalAdderPlan(4, (AdderBlock(6, wc), AdderBlock(6))).validate(16)
    with pytest.raises(ConfigError):
        FinalAdderPlan(4, (AdderBlock(4), AdderBlock(8))).validate(16)
    with pytest.raises(ConfigError):
        FinalAdderPlan(4, (AdderBlock(4, wc), AdderBlock(8, wc))).validate(16)
    FinalAdderPlan(4, (AdderBlock(12),)).validate(16)


def test_plan_from_file(tmp_path):
    path = tmp_path / "plan.json"
    path.write_text(json.dumps(default_plan(32).to_dict()))
    assert FinalAdderPlan.from_file(path) == default_plan(32)
    path.write_text(json.dumps({"blocks": []}))
    with pytest.raises(ConfigError):
        FinalAdderPlan.from_file(path)


def _hybrid_netlist(n, plan=None):
    plan = plan or default_plan(n)
    builder = NetlistBuilder()
    ovf = builder.add_input("ovf", plan.cla_width)
    p1 = builder.add_input("p1", n)
    result = assemble_hybrid_adder(ovf, p1, plan, builder)
    builder.set_output("hi", result.bits)
    return builder.build(), result


def test_hybrid_n8_exhaustive():
    netlist, result = _hybrid_netlist(8)
    ovf = [o for o in range(8) for _ in range(256)]
    p1 = [p for _ in range(8) for p in range(256)]
    got = simulate(netlist, {"ovf": ovf, "p1": p1})["hi"]
    assert got == [(p + o) % 256 for o, p in zip(ovf, p1)]
    assert result.block_inputs == [list(range(6, 11))]


def test_hybrid_n16_first_block_covers_bits_4_to_7():
    _, result = _hybrid_netlist(16)
    p1_base = 4
    assert result.block_inputs[0] == list(range(p1_base + 4, p1_base + 8))
    assert len(result.block_inputs[1]) == 8


@pytest.mark.parametrize("n", [16, 32])
def test_hybrid_random(n):
    netlist, _ = _hybrid_netlist(n)
    k = overflow_width(n)
    rng = np.random.default_rng(n)
    ovf = bits_to_ints(rng.integers(0, 2, size=(100_000, k), dtype=np.uint8))
    p1 = bits_to_ints(rng.integers(0, 2, size=(100_000, n), dtype=np.uint8))
    got = simulate(netlist, {"ovf": ovf, "p1": p1})["hi"]
    assert got == [(p + o) % (1 << n) for o, p in zip(ovf, p1)]


def test_hybrid_zero_overflow_passes_part1_through():
    netlist, _ = _hybrid_netlist(16)
    for p in (0, 1, 0x0FF0, 0xFFF0, 0x7FFF):
        assert evaluate(netlist, {"ovf": 0, "p1": p}) == {"hi": p}


@pytest.mark.parametrize("n", [16, 32, 64])
def test_block_select_never_depends_on_its_own_inputs(n):
    netlist, result = _hybrid_netlist(n)
    graph = netlist.to_digraph()
    for position, (select, inputs) in enumerate(zip(result.selects, result.block_inputs)):
        for net in inputs:
            assert not nx.has_path(graph, net, select), f"block {position} select reachable from its input {net}"
    assert result.selects[0] == result.cla_carry


def test_hybrid_rejects_mismatched_plan():
    builder = NetlistBuilder()
    ovf = builder.add_input("ovf", 3)
    p1 = builder.add_input("p1", 16)
    with pytest.raises(ConfigError):
        assemble_hybrid_adder(ovf, p1, default_plan(16), builder)


@pytest.mark.parametrize("n", [8, 16, 32, 64])
def test_hybrid_final_stage_is_shallower_than_cla(n):
    hybrid = critical_depth(build_final_stage(n, "partitioned_hybrid"))
    cla = critical_depth(build_final_stage(n, "partitioned_cla"))
    assert hybrid < cla

import numpy as np
import pytest

from adders import build_rca
from netlist import EvaluationError, NetlistBuilder
from simulator import (
    VectorPairs,
    bits_to_ints,
    evaluate,
    ints_to_bits,
    net_values,
    simulate,
    switching_activity,
)


def _adder(width=4):
    builder = NetlistBuilder()
    x = builder.add_input("x", width)
    y = builder.add_input("y", width)
    total, carry = build_rca(x, y, None, builder)
    builder.set_output("s", total + [carry])
    return builder.build()


def _inverter():
    builder = NetlistBuilder()
    x = builder.add_input("x", 1)[0]
    builder.set_output("y", [builder.not1(x)])
    return builder.build()


def test_bit_conversion_matches_python_ints():
    values = [0, 1, 5, 255, 256, (1 << 70) - 3]
    bits = ints_to_bits(values, 72)
    assert bits.shape == (6, 72)
    assert bits[2, :4].tolist() == [1, 0, 1, 0]
    assert bits_to_ints(bits) == values


def test_evaluate_adds():
    netlist = _adder()
    assert evaluate(netlist, {"x": 15, "y": 1}) == {"s": 16}
    assert evaluate(netlist, {"x": 9, "y": 0}) == {"s": 9}


def test_evaluate_netlist_without_inputs():
    builder = NetlistBuilder()
    builder.set_output("z", [builder.not1(builder.const(0))])
    netlist = builder.build()
    assert netlist.inputs == ()
    assert evaluate(netlist, {}) == {"z": 1}


def test_evaluate_is_deterministic():
    netlist = _adder()
    assert evaluate(netlist, {"x": 7, "y": 12}) == evaluate(netlist, {"x": 7, "y": 12})


def test_missing_extra_and_out_of_range_inputs():
    netlist = _adder()
    with pytest.raises(EvaluationError):
        evaluate(netlist, {"x": 1})
    with pytest.raises(EvaluationError):
        evaluate(netlist, {"x": 1, "y": 2, "z": 0})
    with pytest.raises(EvaluationError):
        evaluate(netlist, {"x": 16, "y": 0})
    with pytest.raises(EvaluationError):
        evaluate(netlist, {"x": -1, "y": 0})
    with pytest.raises(EvaluationError):
        simulate(netlist, {"x": [1, 2], "y": [3]})


def test_batch_matches_single_evaluation_across_chunks():
    netlist = _adder(6)
    rng = np.random.default_rng(3)
    xs = rng.integers(0, 64, size=20_000).tolist()
    ys = rng.integers(0, 64, size=20_000).tolist()
    out = simulate(netlist, {"x": xs, "y": ys})["s"]
    assert out == [x + y for x, y in zip(xs, ys)]


def test_workers_give_the_same_results():
    netlist = _adder(6)
    xs = list(range(64)) * 300
    ys = list(reversed(range(64))) * 300
    serial = simulate(netlist, {"x": xs, "y": ys})
    parallel = simulate(netlist, {"x": xs, "y": ys}, workers=2)
    assert serial == parallel


def test_net_values_probe_internal_nets():
    netlist = _inverter()
    values = net_values(netlist, {"x": [0, 1, 1]})
    assert values.shape == (3, 2)
    assert values[:, 1].tolist() == [True, False, False]


def test_identical_pair_has_no_toggles():
    netlist = _adder()
    pairs = VectorPairs.from_assignments([({"x": 3, "y": 9}, {"x": 3, "y": 9})])
    assert switching_activity(netlist, pairs) == 0


def test_inverter_toggle_counts_input_and_output():
    pairs = VectorPairs.from_assignments([({"x": 0}, {"x": 1})])
    assert switching_activity(_inverter(), pairs) == 2


def test_toggles_are_additive_over_repeated_streams():
    netlist = _adder()
    pairs = VectorPairs.random({"x": 4, "y": 4}, 500, seed=1)
    once = switching_activity(netlist, pairs)
    assert once > 0
    assert switching_activity(netlist, pairs.repeated(2)) == 2 * once


def test_random_pairs_are_seeded():
    first = VectorPairs.random({"x": 4, "y": 4}, 100, seed=7)
    again = VectorPairs.random({"x": 4, "y": 4}, 100, seed=7)
    other = VectorPairs.random({"x": 4, "y": 4}, 100, seed=8)
    assert first == again
    assert first != other
    assert len(first) == 100


def test_toggles_with_workers_match_serial():
    netlist = _adder(8)
    pairs = VectorPairs.random({"x": 8, "y": 8}, 20_000, seed=0)
    assert switching_activity(netlist, pairs, workers=2) == switching_activity(netlist, pairs)


def test_malformed_pairs_rejected():
    with pytest.raises(EvaluationError):
        VectorPairs({"x": (0, 1)}, {"x": (1,)})
    with pytest.raises(EvaluationError):
        VectorPairs.from_assignments([({"x": 0}, {"y": 1})])
    with pytest.raises(EvaluationError):
        switching_activity(_inverter(), VectorPairs.from_assignments([({"z": 0}, {"z": 1})]))

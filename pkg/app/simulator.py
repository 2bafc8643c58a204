"""
Bit-parallel netlist simulation.

Net values are kept as numpy uint8 rows of shape (num_nets, nbytes), eight
vectors per byte (little bit order). One pass over the gates evaluates a whole
chunk of vectors; chunks can be spread over worker processes and the results
are combined in chunk order.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from netlist import EvaluationError, GateKind, Netlist

logger = logging.getLogger(__name__)

CHUNK_VECTORS = 8192

_BINARY_OPS = {
    GateKind.AND2: (np.bitwise_and, False),
    GateKind.OR2: (np.bitwise_or, False),
    GateKind.XOR2: (np.bitwise_xor, False),
    GateKind.NAND2: (np.bitwise_and, True),
    GateKind.NOR2: (np.bitwise_or, True),
    GateKind.XNOR2: (np.bitwise_xor, True),
}


def ints_to_bits(values: Sequence[int], width: int) -> np.ndarray:
    """(count, width) uint8 matrix, column i holding bit i of each value."""
    nbytes = (width + 7) // 8
    raw = b"".join(int(v).to_bytes(nbytes, "little") for v in values)
    packed = np.frombuffer(raw, dtype=np.uint8).reshape(len(values), nbytes)
    return np.unpackbits(packed, axis=1, count=width, bitorder="little")


def bits_to_ints(bits: np.ndarray) -> List[int]:
    packed = np.packbits(np.asarray(bits, dtype=np.uint8), axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def _check_assignments(netlist: Netlist, assignments: Mapping[str, Sequence[int]]) -> int:
    names = {bus.name for bus in netlist.inputs}
    missing = sorted(names - set(assignments))
    extra = sorted(set(assignments) - names)
    if missing:
        raise EvaluationError(f"Missing input assignment for {missing}")
    if extra:
        raise EvaluationError(f"Unknown inputs in assignment: {extra}")

    lengths = {len(assignments[name]) for name in names}
    if len(lengths) > 1:
        raise EvaluationError(f"Input vectors have different lengths: {sorted(lengths)}")
    count = lengths.pop() if lengths else 0

    for bus in netlist.inputs:
        limit = 1 << bus.width
        for value in assignments[bus.name]:
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise EvaluationError(f"Input '{bus.name}' value {value!r} is not an integer")
            if not 0 <= value < limit:
                raise EvaluationError(f"Input '{bus.name}' value {value} does not fit in {bus.width} bits")
    return count


def _propagate(netlist: Netlist, assignments: Mapping[str, Sequence[int]], start: int, stop: int) -> np.ndarray:
    """Evaluate vectors [start, stop) and return the packed value rows of every net."""
    count = stop - start
    nbytes = (count + 7) // 8
    values = np.zeros((netlist.num_nets, nbytes), dtype=np.uint8)

    for bus in netlist.inputs:
        bits = ints_to_bits(assignments[bus.name][start:stop], bus.width)
        values[list(bus.bits)] = np.packbits(bits.T, axis=1, bitorder="little")

    for gate in netlist.gates:
        row = values[gate.output]
        kind = gate.kind
        if kind in _BINARY_OPS:
            op, invert = _BINARY_OPS[kind]
            op(values[gate.inputs[0]], values[gate.inputs[1]], out=row)
            if invert:
                np.invert(row, out=row)
        elif kind is GateKind.NOT:
            np.invert(values[gate.inputs[0]], out=row)
        elif kind is GateKind.CONST1:
            row.fill(0xFF)
        # CONST0 rows stay zero
    return values


def _unpack_rows(values: np.ndarray, nets: Sequence[int], count: int) -> np.ndarray:
    """(count, len(nets)) bit matrix for the given nets."""
    return np.unpackbits(values[list(nets)], axis=1, count=count, bitorder="little").T


def _chunks(count: int) -> List[Tuple[int, int]]:
    return [(start, min(start + CHUNK_VECTORS, count)) for start in range(0, count, CHUNK_VECTORS)]


def _fan_out(task: Callable, jobs: List[tuple], workers: int) -> list:
    """Run task over jobs, in order, optionally across worker processes."""
    if workers <= 1 or len(jobs) <= 1:
        return [task(*job) for job in jobs]
    logger.debug(f"Fanning {len(jobs)} chunks out over {workers} workers")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, *zip(*jobs)))


def _simulate_chunk(netlist: Netlist, assignments: Mapping[str, Sequence[int]], start: int, stop: int) -> Dict[str, List[int]]:
    values = _propagate(netlist, assignments, start, stop)
    return {bus.name: bits_to_ints(_unpack_rows(values, bus.bits, stop - start)) for bus in netlist.outputs}


def simulate(netlist: Netlist, assignments: Mapping[str, Sequence[int]], workers: int = 1) -> Dict[str, List[int]]:
    """
    Evaluate many input vectors at once.

    :param assignments: input name -> list of integer values, all the same length
    :param workers: worker processes for chunked evaluation
    :return: output name -> list of integer values
    """
    count = _check_assignments(netlist, assignments)
    assignments = {name: list(vals) for name, vals in assignments.items()}
    results = {bus.name: [] for bus in netlist.outputs}
    jobs = [(netlist, assignments, start, stop) for start, stop in _chunks(count)]
    for partial in _fan_out(_simulate_chunk, jobs, workers):
        for name, vals in partial.items():
            results[name].extend(vals)
    return results


def evaluate(netlist: Netlist, input_assignment: Mapping[str, int]) -> Dict[str, int]:
    """Evaluate a single input assignment, e.g. {"a": 3, "b": 5} -> {"p": 15}.

    A netlist without inputs is evaluated once, with `{}` as its assignment.
    """
    assignments = {name: [value] for name, value in input_assignment.items()}
    _check_assignments(netlist, assignments)
    outputs = _simulate_chunk(netlist, assignments, 0, 1)
    return {name: vals[0] for name, vals in outputs.items()}


def net_values(netlist: Netlist, assignments: Mapping[str, Sequence[int]]) -> np.ndarray:
    """(count, num_nets) boolean matrix of every net's value, for probing internal nets."""
    count = _check_assignments(netlist, assignments)
    rows = []
    for start, stop in _chunks(count):
        values = _propagate(netlist, assignments, start, stop)
        rows.append(np.unpackbits(values, axis=1, count=stop - start, bitorder="little").T)
    if not rows:
        return np.zeros((0, netlist.num_nets), dtype=bool)
    return np.concatenate(rows).astype(bool)


@dataclass(frozen=True)
class VectorPairs:
    """Consecutive input assignments; pair i is (first[*][i], second[*][i])."""

    first: Dict[str, Tuple[int, ...]]
    second: Dict[str, Tuple[int, ...]]

    def __post_init__(self):
        if set(self.first) != set(self.second):
            raise EvaluationError("Both halves of a vector pair must assign the same inputs")
        lengths = {len(v) for v in self.first.values()} | {len(v) for v in self.second.values()}
        if len(lengths) > 1:
            raise EvaluationError(f"Vector pair stream has ragged lengths: {sorted(lengths)}")

    def __len__(self) -> int:
        return len(next(iter(self.first.values()), ()))

    @classmethod
    def from_assignments(cls, pairs: Sequence[Tuple[Mapping[str, int], Mapping[str, int]]]) -> "VectorPairs":
        first: Dict[str, List[int]] = {}
        second: Dict[str, List[int]] = {}
        for before, after in pairs:
            if set(before) != set(after) or (first and set(before) != set(first)):
                raise EvaluationError("Every pair must assign the same set of inputs")
            for name in before:
                first.setdefault(name, []).append(before[name])
                second.setdefault(name, []).append(after[name])
        return cls({k: tuple(v) for k, v in first.items()}, {k: tuple(v) for k, v in second.items()})

    @classmethod
    def random(cls, widths: Mapping[str, int], count: int, seed: int = 0) -> "VectorPairs":
        """Uniform random pairs; identical (widths, count, seed) give identical streams."""
        rng = np.random.default_rng(seed)
        halves = []
        for _ in range(2):
            half = {}
            for name, width in widths.items():
                bits = rng.integers(0, 2, size=(count, width), dtype=np.uint8)
                half[name] = tuple(bits_to_ints(bits))
            halves.append(half)
        return cls(*halves)

    def repeated(self, times: int) -> "VectorPairs":
        return VectorPairs(
            {k: v * times for k, v in self.first.items()},
            {k: v * times for k, v in self.second.items()},
        )


def _toggle_chunk(netlist: Netlist, pairs: VectorPairs, start: int, stop: int) -> int:
    before = _propagate(netlist, pairs.first, start, stop)
    after = _propagate(netlist, pairs.second, start, stop)
    changed = np.unpackbits(before ^ after, axis=1, count=stop - start, bitorder="little")
    return int(changed.sum(dtype=np.int64))


def switching_activity(netlist: Netlist, vector_pairs: VectorPairs, workers: int = 1) -> int:
    """Number of nets (inputs included) whose value differs across each pair, summed over pairs."""
    _check_assignments(netlist, vector_pairs.first)
    _check_assignments(netlist, vector_pairs.second)
    jobs = [(netlist, vector_pairs, start, stop) for start, stop in _chunks(len(vector_pairs))]
    return sum(_fan_out(_toggle_chunk, jobs, workers))


def first_mismatch(got: Sequence[int], want: Sequence[int]) -> Optional[int]:
    for index, (g, w) in enumerate(zip(got, want)):
        if g != w:
            return index
    return None

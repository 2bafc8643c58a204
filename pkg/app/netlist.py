"""
Gate-level netlist core.

A netlist is a DAG of typed 1-bit gates. NetIds are dense integers handed out
in creation order: primary inputs first, then one id per gate, so creation
order is always a valid topological order.
"""
from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

import networkx as nx

logger = logging.getLogger(__name__)

NETLIST_SCHEMA_VERSION = 1


class NetlistError(ValueError):
    """Base class for every error raised by the generator and analyzers."""


class ConstructionError(NetlistError):
    """Raised when a gate or netlist would violate the construction invariants."""


class EvaluationError(NetlistError):
    """Raised for missing, extra or out-of-range input assignments."""


class ConfigError(NetlistError):
    """Raised for invalid widths, variants, plans, cost models or settings."""


class GateKind(str, Enum):
    AND2 = "AND2"
    OR2 = "OR2"
    NAND2 = "NAND2"
    NOR2 = "NOR2"
    XOR2 = "XOR2"
    XNOR2 = "XNOR2"
    NOT = "NOT"
    CONST0 = "CONST0"
    CONST1 = "CONST1"


ARITY: Dict[GateKind, int] = {
    GateKind.AND2: 2,
    GateKind.OR2: 2,
    GateKind.NAND2: 2,
    GateKind.NOR2: 2,
    GateKind.XOR2: 2,
    GateKind.XNOR2: 2,
    GateKind.NOT: 1,
    GateKind.CONST0: 0,
    GateKind.CONST1: 0,
}

CONST_KINDS = (GateKind.CONST0, GateKind.CONST1)


def parse_kind(kind: Union[str, GateKind]) -> GateKind:
    try:
        return GateKind(kind)
    except ValueError:
        raise ConstructionError(f"Unknown gate kind: {kind!r}") from None


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    inputs: Tuple[int, ...]
    output: int


@dataclass(frozen=True)
class Bus:
    """Named, ordered group of nets; bit 0 is the least significant."""

    name: str
    bits: Tuple[int, ...]

    @property
    def width(self) -> int:
        return len(self.bits)


@dataclass(frozen=True)
class Netlist:
    """
    Immutable gate-level netlist.

    :param inputs: primary input buses, in declaration order
    :param gates: gates in topological (creation) order
    :param outputs: primary output buses
    :param metadata: free-form provenance (generator settings, digests)
    """

    inputs: Tuple[Bus, ...]
    gates: Tuple[Gate, ...]
    outputs: Tuple[Bus, ...]
    metadata: Dict = field(default_factory=dict, compare=False)

    @property
    def num_inputs(self) -> int:
        return sum(bus.width for bus in self.inputs)

    @property
    def num_nets(self) -> int:
        return self.num_inputs + len(self.gates)

    def input_bus(self, name: str) -> Bus:
        for bus in self.inputs:
            if bus.name == name:
                return bus
        raise KeyError(name)

    def output_bus(self, name: str) -> Bus:
        for bus in self.outputs:
            if bus.name == name:
                return bus
        raise KeyError(name)

    def to_dict(self) -> Dict:
        data = {
            "version": NETLIST_SCHEMA_VERSION,
            "inputs": [{"name": bus.name, "width": bus.width} for bus in self.inputs],
            "gates": [
                {"kind": gate.kind.value, "in": list(gate.inputs), "out": gate.output}
                for gate in self.gates
            ],
            "outputs": [{"name": bus.name, "bits": list(bus.bits)} for bus in self.outputs],
        }
        if self.metadata:
            data["metadata"] = self.metadata
        return data

    def to_json(self) -> str:
        """Canonical JSON text; identical netlists give byte-identical text."""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(), encoding="utf-8")
        logger.info(f"💾 Netlist written to {path} ({len(self.gates)} gates)")
        return path

    @classmethod
    def from_dict(cls, data: Mapping) -> "Netlist":
        """
        Rebuild a netlist from the JSON schema, re-checking dense ids and
        topological order through the builder.
        """
        if not isinstance(data, Mapping):
            raise ConstructionError("Netlist JSON must be an object")
        version = data.get("version")
        if version != NETLIST_SCHEMA_VERSION:
            raise ConstructionError(f"Unsupported netlist schema version: {version!r}")

        builder = NetlistBuilder()
        try:
            for entry in data["inputs"]:
                builder.add_input(str(entry["name"]), int(entry["width"]))
            for position, entry in enumerate(data["gates"]):
                expected = builder.num_nets
                if int(entry["out"]) != expected:
                    raise ConstructionError(
                        f"Gate #{position} declares output {entry['out']}, expected dense id {expected}"
                    )
                builder.add_gate(entry["kind"], [int(i) for i in entry["in"]])
            for entry in data["outputs"]:
                builder.set_output(str(entry["name"]), [int(i) for i in entry["bits"]])
        except (KeyError, TypeError) as e:
            raise ConstructionError(f"Malformed netlist JSON: {e}") from e
        return builder.build(metadata=dict(data.get("metadata", {})))

    @classmethod
    def from_json(cls, text: str) -> "Netlist":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConstructionError(f"Netlist file is not valid JSON: {e}") from e
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Netlist":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Netlist file not found: {path}")
        return cls.from_json(path.read_text(encoding="utf-8"))

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()

    def to_digraph(self) -> nx.DiGraph:
        """Directed graph over net ids; edges run from gate inputs to the gate output."""
        graph = nx.DiGraph()
        for bus in self.inputs:
            for position, net in enumerate(bus.bits):
                graph.add_node(net, kind="INPUT", port=f"{bus.name}[{position}]")
        for gate in self.gates:
            graph.add_node(gate.output, kind=gate.kind.value)
            for net in gate.inputs:
                graph.add_edge(net, gate.output)
        return graph

    def fan_in_cone(self, nets: Iterable[int], graph: Optional[nx.DiGraph] = None) -> Set[int]:
        """
        Gate outputs the given nets depend on, the nets themselves included.
        Primary inputs and constants are shared by every cone and left out.
        """
        graph = self.to_digraph() if graph is None else graph
        sink = "cone"
        graph.add_node(sink)
        graph.add_edges_from((net, sink) for net in nets)
        try:
            found = nx.ancestors(graph, sink)
        finally:
            graph.remove_node(sink)
        skip = {"INPUT"} | {kind.value for kind in CONST_KINDS}
        return {net for net in found if graph.nodes[net]["kind"] not in skip}


class NetlistBuilder:
    """
    Single-owner builder. Inputs must be declared before the first gate so that
    primary inputs occupy ids 0..total_width-1.
    """

    def __init__(self):
        self._inputs: List[Bus] = []
        self._gates: List[Gate] = []
        self._outputs: Dict[str, Bus] = {}
        self._consts: Dict[GateKind, int] = {}
        self._next_id = 0

    @property
    def num_nets(self) -> int:
        return self._next_id

    @property
    def num_gates(self) -> int:
        return len(self._gates)

    def add_input(self, name: str, width: int) -> List[int]:
        if self._gates:
            raise ConstructionError(f"Input '{name}' declared after gates were added")
        if width < 1:
            raise ConstructionError(f"Input '{name}' must be at least 1 bit wide")
        if any(bus.name == name for bus in self._inputs):
            raise ConstructionError(f"Duplicate input name '{name}'")
        bits = tuple(range(self._next_id, self._next_id + width))
        self._next_id += width
        self._inputs.append(Bus(name, bits))
        return list(bits)

    def _check_net(self, net) -> int:
        if isinstance(net, bool) or not isinstance(net, int) or not 0 <= net < self._next_id:
            raise ConstructionError(f"Unknown NetId {net!r}")
        return net

    def add_gate(self, kind: Union[str, GateKind], inputs: Sequence[int]) -> int:
        kind = parse_kind(kind)
        inputs = tuple(inputs)
        if len(inputs) != ARITY[kind]:
            raise ConstructionError(
                f"{kind.value} takes {ARITY[kind]} input(s), got {len(inputs)}"
            )
        for net in inputs:
            self._check_net(net)
        out = self._next_id
        self._next_id += 1
        self._gates.append(Gate(kind, inputs, out))
        if kind in CONST_KINDS:
            self._consts.setdefault(kind, out)
        return out

    def const(self, value: int) -> int:
        """Shared CONST0/CONST1 net, created on first use."""
        kind = GateKind.CONST1 if value else GateKind.CONST0
        if kind not in self._consts:
            self._consts[kind] = self.add_gate(kind, ())
        return self._consts[kind]

    def and2(self, a: int, b: int) -> int:
        return self.add_gate(GateKind.AND2, (a, b))

    def or2(self, a: int, b: int) -> int:
        return self.add_gate(GateKind.OR2, (a, b))

    def nand2(self, a: int, b: int) -> int:
        return self.add_gate(GateKind.NAND2, (a, b))

    def nor2(self, a: int, b: int) -> int:
        return self.add_gate(GateKind.NOR2, (a, b))

    def xor2(self, a: int, b: int) -> int:
        return self.add_gate(GateKind.XOR2, (a, b))

    def xnor2(self, a: int, b: int) -> int:
        return self.add_gate(GateKind.XNOR2, (a, b))

    def not1(self, a: int) -> int:
        return self.add_gate(GateKind.NOT, (a,))

    def set_output(self, name: str, bits: Iterable[int]) -> None:
        bits = tuple(self._check_net(net) for net in bits)
        if not bits:
            raise ConstructionError(f"Output '{name}' has no bits")
        self._outputs[name] = Bus(name, bits)

    def build(self, metadata: Optional[Dict] = None) -> Netlist:
        return Netlist(
            inputs=tuple(self._inputs),
            gates=tuple(self._gates),
            outputs=tuple(self._outputs.values()),
            metadata=dict(metadata or {}),
        )


@dataclass(frozen=True)
class GateCostModel:
    """Per-kind area and delay units. CONST gates must cost nothing."""

    area_units: Dict[GateKind, int]
    delay_units: Dict[GateKind, int]
    name: str = "unit-gate"

    def __post_init__(self):
        for label, table in (("area_units", self.area_units), ("delay_units", self.delay_units)):
            missing = [kind.value for kind in GateKind if kind not in table]
            if missing:
                raise ConfigError(f"Cost model '{self.name}' {label} is missing {missing}")
            for kind, value in table.items():
                if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                    raise ConfigError(
                        f"Cost model '{self.name}' {label}[{kind.value}] must be a nonnegative integer"
                    )
            for kind in CONST_KINDS:
                if table[kind] != 0:
                    raise ConfigError(f"Cost model '{self.name}' gives {kind.value} nonzero {label}")

    @classmethod
    def default(cls) -> "GateCostModel":
        simple = {GateKind.AND2: 1, GateKind.OR2: 1, GateKind.NAND2: 1, GateKind.NOR2: 1, GateKind.NOT: 1}
        table = {**simple, GateKind.XOR2: 2, GateKind.XNOR2: 2, GateKind.CONST0: 0, GateKind.CONST1: 0}
        return cls(area_units=dict(table), delay_units=dict(table))

    @classmethod
    def from_dict(cls, data: Mapping, name: str = "custom") -> "GateCostModel":
        try:
            area = {parse_kind(k): v for k, v in data["area_units"].items()}
            delay = {parse_kind(k): v for k, v in data["delay_units"].items()}
        except (KeyError, AttributeError, TypeError) as e:
            raise ConfigError(f"Cost model needs 'area_units' and 'delay_units' maps: {e}") from e
        except ConstructionError as e:
            raise ConfigError(str(e)) from e
        return cls(area_units=area, delay_units=delay, name=name)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "GateCostModel":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"Cost model file not found: {path}")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"Cost model file {path} is not valid JSON: {e}") from e
        return cls.from_dict(data, name=path.stem)

    def to_dict(self) -> Dict:
        return {
            "area_units": {k.value: self.area_units[k] for k in GateKind},
            "delay_units": {k.value: self.delay_units[k] for k in GateKind},
        }

    def digest(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


def gate_counts(netlist: Netlist) -> Dict[str, int]:
    counts = {kind.value: 0 for kind in GateKind}
    for gate in netlist.gates:
        counts[gate.kind.value] += 1
    return counts


def area_units(netlist: Netlist, cost_model: Optional[GateCostModel] = None) -> int:
    cost_model = cost_model or GateCostModel.default()
    return sum(cost_model.area_units[gate.kind] for gate in netlist.gates)


def arrival_times(netlist: Netlist, cost_model: Optional[GateCostModel] = None) -> List[int]:
    """Weighted arrival time of every net; primary inputs and constants arrive at 0."""
    cost_model = cost_model or GateCostModel.default()
    arrival = [0] * netlist.num_nets
    delay = cost_model.delay_units
    for gate in netlist.gates:
        latest = max((arrival[net] for net in gate.inputs), default=0)
        arrival[gate.output] = latest + delay[gate.kind]
    return arrival


def critical_depth(netlist: Netlist, cost_model: Optional[GateCostModel] = None) -> int:
    """Longest weighted input-to-output path."""
    arrival = arrival_times(netlist, cost_model)
    return max((arrival[net] for bus in netlist.outputs for net in bus.bits), default=0)

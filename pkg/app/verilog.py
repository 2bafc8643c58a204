"""Structural Verilog writer: one wire per net, one primitive instance per gate."""
import logging
import re
from typing import List, Optional

from netlist import GateKind, Netlist

logger = logging.getLogger(__name__)

PRIMITIVES = {
    GateKind.AND2: "and",
    GateKind.OR2: "or",
    GateKind.NAND2: "nand",
    GateKind.NOR2: "nor",
    GateKind.XOR2: "xor",
    GateKind.XNOR2: "xnor",
    GateKind.NOT: "not",
}


def module_name_for(netlist: Netlist) -> str:
    meta = netlist.metadata
    if "design_id" in meta:
        return "mult_" + re.sub(r"\W+", "_", meta["design_id"])
    return "netlist"


def _port(name: str, width: int) -> str:
    return name if width == 1 else f"[{width - 1}:0] {name}"


def emit_verilog(netlist: Netlist, module_name: Optional[str] = None) -> str:
    """Deterministic structural Verilog for a netlist; ports keep the bus names."""
    module_name = module_name or module_name_for(netlist)
    ports = [bus.name for bus in netlist.inputs] + [bus.name for bus in netlist.outputs]
    lines: List[str] = [f"module {module_name} ({', '.join(ports)});"]
    lines += [f"  input {_port(bus.name, bus.width)};" for bus in netlist.inputs]
    lines += [f"  output {_port(bus.name, bus.width)};" for bus in netlist.outputs]
    lines += [f"  wire n{net};" for net in range(netlist.num_nets)]

    for bus in netlist.inputs:
        for position, net in enumerate(bus.bits):
            ref = bus.name if bus.width == 1 else f"{bus.name}[{position}]"
            lines.append(f"  assign n{net} = {ref};")

    for gate in netlist.gates:
        if gate.kind is GateKind.CONST0:
            lines.append(f"  assign n{gate.output} = 1'b0;")
        elif gate.kind is GateKind.CONST1:
            lines.append(f"  assign n{gate.output} = 1'b1;")
        else:
            args = ", ".join(f"n{net}" for net in (gate.output, *gate.inputs))
            lines.append(f"  {PRIMITIVES[gate.kind]} g{gate.output} ({args});")

    for bus in netlist.outputs:
        for position, net in enumerate(bus.bits):
            ref = bus.name if bus.width == 1 else f"{bus.name}[{position}]"
            lines.append(f"  assign {ref} = n{net};")
    lines.append("endmodule")
    logger.debug(f"Emitted module {module_name} with {len(netlist.gates)} gates")
    return "\n".join(lines) + "\n"

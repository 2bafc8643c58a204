import re

from multipliers import MultiplierConfig, build_multiplier
from netlist import NetlistBuilder
from verilog import emit_verilog


def _toy():
    builder = NetlistBuilder()
    a = builder.add_input("a", 2)
    b = builder.add_input("b", 2)
    s0 = builder.xor2(a[0], b[0])
    s1 = builder.xnor2(a[1], builder.not1(b[1]))
    builder.set_output("p", [s0, s1, builder.const(0)])
    return builder.build()


def test_toy_module_text():
    text = emit_verilog(_toy(), "toy")
    assert text.startswith("module toy (a, b, p);\n")
    assert "  input [1:0] a;" in text
    assert "  output [2:0] p;" in text
    assert "  assign n0 = a[0];" in text
    assert "  xor g4 (n4, n0, n2);" in text
    assert "  not g5 (n5, n3);" in text
    assert "  xnor g6 (n6, n1, n5);" in text
    assert "  assign n7 = 1'b0;" in text
    assert "  assign p[2] = n7;" in text
    assert text.endswith("endmodule\n")


def test_multiplier_module_is_deterministic_and_accounts_for_every_net():
    netlist = build_multiplier(MultiplierConfig(8, "partitioned-hybrid")).netlist
    text = emit_verilog(netlist)
    assert text == emit_verilog(netlist)
    assert text.startswith("module mult_8_partitioned_hybrid (a, b, p);")
    wires = re.findall(r"^  wire n\d+;$", text, flags=re.M)
    assert len(wires) == len(netlist.gates) + netlist.num_inputs
    instances = re.findall(r"^  (and|or|xor|not) g\d+ ", text, flags=re.M)
    consts = re.findall(r"= 1'b[01];$", text, flags=re.M)
    assert len(instances) + len(consts) == len(netlist.gates)
    assert text.count("  assign p[") == 16

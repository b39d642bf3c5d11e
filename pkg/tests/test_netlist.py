"""Netlist document parsing, emission, and round-trip identity."""

import pytest

import wireflow as wf
from wireflow.netlist import (
    NetlistError,
    circuit_from_doc,
    circuit_to_doc,
    dumps_netlist,
    load_netlist,
    loads_netlist,
    save_netlist,
)

from helpers import two_node


def test_round_trip_identity():
    spec = two_node(600.0, 0.1, 1e6)
    again = loads_netlist(dumps_netlist(spec))
    assert again == spec


def test_round_trip_all_builtin_scenarios():
    for spec in (
        wf.single_load_circuit(750.0, 0.05, 2e5),
        wf.toy_case_1().to_circuit(),
        wf.toy_case_2().to_circuit(),
        wf.route_circuit(1000.0, 200.0, 0.0, 433.7, 5e4),
    ):
        assert loads_netlist(dumps_netlist(spec)) == spec


def test_doc_shape():
    doc = circuit_to_doc(two_node())
    assert list(doc) == ["nodes", "resistors", "sources", "loads"]
    assert doc["resistors"][0] == {"a": "n1", "b": "n2", "ohms": 0.1}
    assert doc["sources"][0] == {"node": "n1", "volts": 600.0}
    assert doc["loads"][0] == {"node": "n2", "watts": 1e6}


def test_file_round_trip(tmp_path):
    spec = wf.toy_case_1().to_circuit()
    path = tmp_path / "toy.json"
    save_netlist(spec, path)
    assert load_netlist(path) == spec


def test_invalid_json_reports_position():
    with pytest.raises(NetlistError, match=r"line 2"):
        loads_netlist('{"nodes": [],\n "resistors": }')


def test_missing_key_reported():
    with pytest.raises(NetlistError, match="missing top-level key 'loads'"):
        circuit_from_doc({"nodes": [], "resistors": [], "sources": []})


def test_field_errors_carry_json_path():
    base = circuit_to_doc(two_node())
    bad = {**base, "resistors": [{"a": "n1", "b": "n2", "ohms": "0.1"}]}
    with pytest.raises(NetlistError, match=r"resistors\[0\].ohms"):
        circuit_from_doc(bad)
    bad = {**base, "loads": [{"node": "n2"}]}
    with pytest.raises(NetlistError, match=r"loads\[0\].*watts"):
        circuit_from_doc(bad)
    bad = {**base, "sources": [{"node": "n1", "volts": 600.0, "amps": 1.0}]}
    with pytest.raises(NetlistError, match=r"sources\[0\].*amps"):
        circuit_from_doc(bad)


def test_unknown_top_level_key_rejected():
    with pytest.raises(NetlistError, match="unknown top-level"):
        circuit_from_doc(
            {"nodes": [], "resistors": [], "sources": [], "loads": [],
             "extra": 1}
        )


def test_semantic_errors_surface_as_circuit_errors():
    doc = {
        "nodes": ["a", "b"],
        "resistors": [{"a": "a", "b": "ghost", "ohms": 0.1}],
        "sources": [{"node": "a", "volts": 600.0}],
        "loads": [],
    }
    with pytest.raises(wf.UnknownNodeError):
        circuit_from_doc(doc)


def test_missing_file_reported():
    with pytest.raises(NetlistError, match="cannot read"):
        load_netlist("/nonexistent/netlist.json")

import pytest

from metapent import NetworkGraph, UnknownNode, parse_scenario, serialize_scenario


def test_out_edges_lexicographic_with_self_loop():
    g = NetworkGraph.build(
        nodes=["v", "a", "b"],
        edges=[("v", "b"), ("v", "a"), ("v", "v")],
        entry="v",
    )
    assert g.out_edges("v") == [("v", "a"), ("v", "b"), ("v", "v")]
    assert g.targets("v") == ["a", "b", "v"]


def test_out_edges_isolated_node():
    g = NetworkGraph.build(["v", "w"], [("v", "w")], "v")
    assert g.out_edges("w") == []


def test_out_edges_unknown_node():
    g = NetworkGraph.build(["v"], [], "v")
    with pytest.raises(UnknownNode):
        g.out_edges("nope")


def test_hospital_web_server_out_edges(hospital):
    targets = hospital.graph.targets("web-server")
    assert targets == ["ai-apps", "web-server", "workstation"]


def test_validate_ok(hospital):
    assert hospital.graph.validate() == []


def test_validate_dangling_edge():
    g = NetworkGraph.build(["v"], [("v", "ghost")], "v")
    problems = g.validate()
    assert any("dangling edge" in p for p in problems)


def test_validate_negative_importance():
    g = NetworkGraph.build(["v"], [], "v", importance={"v": -3})
    problems = g.validate()
    assert any("negative importance" in p for p in problems)


def test_validate_bad_entry_and_critical():
    g = NetworkGraph.build(["v"], [], "w", critical=["x"])
    problems = g.validate()
    assert any("entry" in p for p in problems)
    assert any("critical" in p for p in problems)


def test_validate_ok_implies_out_edges_never_error():
    g = NetworkGraph.build(["a", "b"], [("a", "b")], "a")
    assert g.validate() == []
    for v in g.sorted_nodes():
        g.out_edges(v)  # must not raise


def test_graph_round_trips_through_scenario_format(hospital):
    text = serialize_scenario(hospital)
    again = parse_scenario(text)
    assert again.graph == hospital.graph
    assert again.msp.terminal == hospital.msp.terminal

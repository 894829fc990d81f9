import itertools

import pytest

from metapent import (
    GameNode,
    KnowledgeLibrary,
    LibraryGap,
    MetapentError,
    MicroTacticGame,
    PropertySet,
    Role,
    UnknownPredicate,
    build_meta_game,
    explore_node,
)

from tests.oracles import satisfied_keys


def tiny_template(name, node="web-server"):
    root = GameNode("root", Role.ATTACKER, ("go",),
                    {"go": GameNode("z", Role.LEAF, outcome=node)})
    return MicroTacticGame(node=node, root=root, label=name)


def web_library():
    return KnowledgeLibrary.build(
        "web-server",
        ["is-linux", "is-microsoftD", "can-bypassD"],
        [
            (["is-linux", "is-microsoftD"], tiny_template("web-baseline")),
            (["is-linux", "is-microsoftD", "can-bypassD"], tiny_template("web-bypass")),
        ],
    )


def test_adapt_baseline_property_set():
    lib = web_library()
    got = lib.adapt(PropertySet.of("web-server", ["is-linux", "is-microsoftD"]))
    assert got.label == "web-baseline"


def test_adapt_bypass_property_set():
    lib = web_library()
    got = lib.adapt(PropertySet.of("web-server", ["is-linux", "is-microsoftD", "can-bypassD"]))
    assert got.label == "web-bypass"


def test_adapt_empty_key_entry():
    lib = KnowledgeLibrary.build("n", ["p"], [([], tiny_template("default", "n"))])
    assert lib.adapt(PropertySet.of("n")).label == "default"


def test_adapt_gap_carries_unmatched_set():
    lib = web_library()
    with pytest.raises(LibraryGap) as err:
        lib.adapt(PropertySet.of("web-server", ["is-linux"]))
    assert err.value.node == "web-server"
    assert err.value.properties == frozenset(["is-linux"])


def test_adapt_returns_fresh_instances():
    lib = web_library()
    props = PropertySet.of("web-server", ["is-linux", "is-microsoftD"])
    a, b = lib.adapt(props), lib.adapt(props)
    assert a == b and a is not b and a.root is not b.root


def test_adapt_rejects_predicates_outside_universe():
    lib = web_library()
    with pytest.raises(UnknownPredicate):
        lib.adapt(PropertySet.of("web-server", ["is-quantum"]))


def test_duplicate_canonical_keys_rejected():
    with pytest.raises(MetapentError, match="duplicate canonical key"):
        KnowledgeLibrary.build(
            "n", ["a", "b"],
            [(["a", "b"], tiny_template("x", "n")), (["b", "a"], tiny_template("y", "n"))],
        )


def test_exact_match_equals_literal_conjunction_bruteforce():
    # full power set, |universe| = 5: the set-equality rule and the literal
    # evaluation must select the same single entry (or agree on a gap)
    universe = ["p1", "p2", "p3", "p4", "p5"]
    keys = []
    for size in range(len(universe) + 1):
        for combo in itertools.combinations(universe, size):
            if len(combo) % 2 == 0:  # half the subsets get entries
                keys.append(frozenset(combo))
    lib = KnowledgeLibrary.build(
        "n", universe, [(sorted(k), tiny_template(f"t{i}", "n")) for i, k in enumerate(keys)]
    )
    for size in range(len(universe) + 1):
        for combo in itertools.combinations(universe, size):
            props = PropertySet.of("n", combo)
            matches = satisfied_keys(universe, keys, combo)
            assert len(matches) <= 1
            if matches:
                assert lib.adapt(props) == lib.entries[matches[0]]
                assert lib.adapt(props).label == lib.entries[matches[0]].label
            else:
                with pytest.raises(LibraryGap):
                    lib.adapt(props)


def test_explore_scripted_appends_new_predicates():
    props = PropertySet.of("v", ["is-linux"])
    out = explore_node(props, ["is-linux", "can-bypassD"], ["can-bypassD"])
    assert out.predicates == frozenset(["is-linux", "can-bypassD"])


def test_explore_empty_script_is_identity():
    props = PropertySet.of("v", ["is-linux"])
    assert explore_node(props, ["is-linux"], []) == props


def test_explore_idempotent_on_exhausted_script():
    props = PropertySet.of("v", ["a"])
    script = ["b", "b", "c"]
    once = explore_node(props, ["a", "b", "c"], script)
    twice = explore_node(once, ["a", "b", "c"], script)
    assert once == twice


def test_explore_script_outside_universe():
    with pytest.raises(UnknownPredicate):
        explore_node(PropertySet.of("v"), ["a"], ["zzz"])


def test_explore_stochastic_same_seed_same_result():
    props = PropertySet.of("v", ["a"])
    universe = ["a", "b", "c", "d", "e"]
    one = explore_node(props, universe, mode="stochastic", seed=424242, p_discover=0.7)
    two = explore_node(props, universe, mode="stochastic", seed=424242, p_discover=0.7)
    assert one == two
    assert one.predicates >= props.predicates


def test_explore_stochastic_p_zero_and_one():
    props = PropertySet.of("v")
    universe = ["a", "b"]
    assert explore_node(props, universe, mode="stochastic", seed=1, p_discover=0.0) == props
    full = explore_node(props, universe, mode="stochastic", seed=1, p_discover=1.0)
    assert full.predicates == frozenset(universe)


def test_build_meta_game_applies_evade_property_set(hospital):
    properties = dict(hospital.properties)
    properties["ai-center"] = PropertySet.of(
        "ai-center", ["is-windows", "is-windowsD", "evadeMLmodel"]
    )
    game = build_meta_game(
        hospital.graph, hospital.libraries, properties, hospital.msp,
        scripts=hospital.exploration,
    )
    assert game.mtgs["ai-center"].label == "evade-ml"


def test_build_meta_game_default_sets_give_baseline_trees(hospital):
    game = build_meta_game(
        hospital.graph, hospital.libraries, hospital.properties, hospital.msp
    )
    # no exploration scripts: the web server stays on its baseline tree
    assert game.mtgs["web-server"].label == "web-baseline"
    assert game.mtgs["ai-center"].label == "erode-integrity"


def test_build_meta_game_gap_names_node(hospital):
    properties = dict(hospital.properties)
    properties["db-a"] = PropertySet.of("db-a")  # no entry for the empty set
    with pytest.raises(LibraryGap) as err:
        build_meta_game(hospital.graph, hospital.libraries, properties, hospital.msp)
    assert err.value.node == "db-a"

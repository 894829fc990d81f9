import copy
import random

import pytest

from metapent import (
    GameNode,
    MacroProcess,
    MicroTacticGame,
    NetworkGraph,
    PlanProfile,
    Role,
    UnknownNode,
    UtilityUnset,
    IncompleteProfile,
    expected_utility,
    outcome_probabilities,
    set_outcome_utilities,
    solve_spne,
    solve_stackelberg,
    to_dot,
)

from tests.generators import random_zero_sum_tree
from tests.oracles import (
    best_commitment_defender_value,
    enumerate_outcome_probabilities,
    maxmin_value,
    subgame_value,
)


def leaf(hid, outcome):
    return GameNode(history_id=hid, role=Role.LEAF, outcome=outcome)


def decision(hid, role, children):
    return GameNode(hid, role, tuple(children), dict(children))


def chance(hid, children, dist):
    return GameNode(hid, Role.CHANCE, tuple(children), dict(children), chance=tuple(dist))


def depth2_game():
    # attacker then defender, zero-sum; backward induction value is 2
    root = decision("A", Role.ATTACKER, {
        "a1": decision("D1", Role.DEFENDER, {"d1": leaf("L1", "t"), "d2": leaf("L2", "t")}),
        "a2": decision("D2", Role.DEFENDER, {"d1": leaf("L3", "t"), "d2": leaf("L4", "t")}),
    })
    return MicroTacticGame("v", root, {
        "L1": (4.0, -4.0), "L2": (1.0, -1.0), "L3": (3.0, -3.0), "L4": (2.0, -2.0),
    })


def depth3_game():
    root = chance("C", {
        "left": decision("A", Role.ATTACKER, {
            "x": leaf("z1", "t1"),
            "y": decision("D", Role.DEFENDER, {"p": leaf("z2", "t2"), "q": leaf("z3", "t1")}),
        }),
        "right": leaf("z4", "t2"),
    }, (0.25, 0.75))
    return MicroTacticGame("v", root, {
        "z1": (4.0, -4.0), "z2": (1.0, -1.0), "z3": (3.0, -3.0), "z4": (0.0, 0.0),
    })


def deterrence_game():
    # committing to block makes attacking pointless; the attacker retreats
    root = decision("A", Role.ATTACKER, {
        "attack": decision("D", Role.DEFENDER, {"block": leaf("L1", "t"), "ignore": leaf("L2", "t")}),
        "retreat": leaf("L3", "t"),
    })
    return MicroTacticGame("v", root, {
        "L1": (-10.0, 10.0), "L2": (8.0, -8.0), "L3": (0.0, 0.0),
    })


# --- solve_spne -------------------------------------------------------------

def test_spne_depth1_argmax():
    root = decision("A", Role.ATTACKER, {"first": leaf("L1", "t"), "second": leaf("L2", "t")})
    g = MicroTacticGame("v", root, {"L1": (3.0, -3.0), "L2": (5.0, -5.0)})
    profile = solve_spne(g)
    assert profile.attacker == {"A": {"second": 1.0}}


def test_spne_single_leaf_tree():
    g = MicroTacticGame("v", leaf("L", "t"), {"L": (7.0, -7.0)})
    profile = solve_spne(g)
    assert profile.attacker == {} and profile.defender == {}
    assert expected_utility(g, profile) == (7.0, -7.0)


def test_spne_depth2_matches_enumeration():
    g = depth2_game()
    assert maxmin_value(g) == 2.0  # enumeration oracle, frozen
    profile = solve_spne(g)
    assert expected_utility(g, profile) == (2.0, -2.0)
    assert profile.attacker == {"A": {"a2": 1.0}}
    assert profile.defender == {"D1": {"d2": 1.0}, "D2": {"d2": 1.0}}


def test_spne_tie_breaks_lexicographically():
    root = decision("A", Role.ATTACKER, {"zeta": leaf("L1", "t"), "alpha": leaf("L2", "t")})
    g = MicroTacticGame("v", root, {"L1": (1.0, -1.0), "L2": (1.0, -1.0)})
    assert solve_spne(g).attacker == {"A": {"alpha": 1.0}}


def test_spne_missing_utility():
    root = decision("A", Role.ATTACKER, {"a": leaf("L1", "t")})
    g = MicroTacticGame("v", root, {})
    with pytest.raises(UtilityUnset):
        solve_spne(g)


def test_spne_fixed_defender_pins_actions():
    g = depth2_game()
    profile = solve_spne(g, fixed_defender={"D1": "d1", "D2": "d1"})
    # with the defender scripted to d1 everywhere, a1 yields 4
    assert profile.attacker == {"A": {"a1": 1.0}}
    assert profile.defender == {"D1": {"d1": 1.0}, "D2": {"d1": 1.0}}
    with pytest.raises(IncompleteProfile):
        solve_spne(g, fixed_defender={"D1": "d1"})


def test_spne_value_equals_enumeration_on_random_trees():
    rng = random.Random(2024)
    for _ in range(25):
        g = random_zero_sum_tree(rng)
        value = expected_utility(g, solve_spne(g))[0]
        assert value == maxmin_value(g)  # dyadic arithmetic keeps both sides exact


# --- solve_stackelberg ------------------------------------------------------

def test_stackelberg_no_defender_nodes_equals_spne():
    root = decision("A", Role.ATTACKER, {
        "a": chance("C", {"w": leaf("L1", "t"), "l": leaf("L2", "t")}, (0.5, 0.5)),
        "b": leaf("L3", "t"),
    })
    g = MicroTacticGame("v", root, {"L1": (4.0, -4.0), "L2": (0.0, 0.0), "L3": (1.0, -1.0)})
    assert solve_stackelberg(g) == solve_spne(g)


def test_stackelberg_deterrence_derived():
    g = deterrence_game()
    spne = solve_spne(g)
    stack = solve_stackelberg(g)
    # enumeration oracle over commitments x best responses gave value 0
    assert best_commitment_defender_value(g) == 0.0
    assert expected_utility(g, stack)[1] == 0.0
    assert expected_utility(g, stack)[1] >= expected_utility(g, spne)[1]
    assert stack.defender == {"D": {"block": 1.0}}
    assert stack.attacker == {"A": {"retreat": 1.0}}


def test_stackelberg_defender_value_matches_commitment_oracle():
    rng = random.Random(99)
    for _ in range(25):
        g = random_zero_sum_tree(rng)
        spne_ud = expected_utility(g, solve_spne(g))[1]
        stack_ud = expected_utility(g, solve_stackelberg(g))[1]
        assert stack_ud == best_commitment_defender_value(g)
        assert stack_ud >= spne_ud


# --- outcome_probabilities --------------------------------------------------

def test_outcomes_chance_root_passthrough():
    root = chance("C", {"a": leaf("z1", "u1"), "b": leaf("z2", "u2")}, (0.3, 0.7))
    g = MicroTacticGame("v", root, {"z1": (0.0, 0.0), "z2": (0.0, 0.0)})
    tau = outcome_probabilities(g, PlanProfile())
    assert tau == {"u1": 0.3, "u2": 0.7}


def test_outcomes_pure_deterministic_path():
    g = depth2_game()
    tau = outcome_probabilities(g, solve_spne(g))
    assert tau == {"t": 1.0}


def test_outcomes_depth3_matches_path_enumeration():
    g = depth3_game()
    profile = PlanProfile(
        attacker={"A": {"x": 0.5, "y": 0.5}},
        defender={"D": {"p": 1.0}},
        chance={"C": {"left": 0.25, "right": 0.75}},
    )
    tau = outcome_probabilities(g, profile)
    assert tau == {"t1": 0.125, "t2": 0.875}  # frozen from the path-product oracle
    assert tau == enumerate_outcome_probabilities(g, profile)
    assert sum(tau.values()) == pytest.approx(1.0, abs=1e-9)


def test_outcomes_incomplete_profile():
    g = depth3_game()
    with pytest.raises(IncompleteProfile):
        outcome_probabilities(g, PlanProfile(attacker={"A": {"x": 1.0}}))


def test_outcomes_affine_in_chance_probability():
    def tau_at(p):
        root = chance("C", {
            "w": leaf("z1", "u1"),
            "l": decision("A", Role.ATTACKER, {"go": leaf("z2", "u2"), "no": leaf("z3", "u1")}),
        }, (p, 1.0 - p))
        g = MicroTacticGame("v", root, {k: (0.0, 0.0) for k in ("z1", "z2", "z3")})
        return outcome_probabilities(g, PlanProfile(attacker={"A": {"go": 0.25, "no": 0.75}}))

    lo, mid, hi = tau_at(0.0), tau_at(0.5), tau_at(1.0)
    for z in lo:
        assert mid[z] == pytest.approx(0.5 * (lo[z] + hi[z]), abs=1e-12)


# --- set_outcome_utilities --------------------------------------------------

def movement_fixture():
    g = NetworkGraph.build(
        ["v", "u"], [("v", "u"), ("v", "v"), ("u", "u")], "v", importance={"u": 100}
    )
    root = decision("A", Role.ATTACKER, {"advance": leaf("z-adv", "u"), "stay": leaf("z-stay", "v")})
    tree = MicroTacticGame("v", root)
    values = {"v": 20.0, "u": 10.0}
    return g, tree, values


def test_utilities_full_skill_move():
    g, tree, values = movement_fixture()
    msp = MacroProcess(g, skill=1.0, stay_penalty=-50, gamma=0.9)
    out = set_outcome_utilities(tree, values, msp)
    assert out.utilities["z-adv"] == (109.0, -109.0)  # importance + gamma * value


def test_utilities_stay_outcome():
    g, tree, values = movement_fixture()
    msp = MacroProcess(g, skill=1.0, stay_penalty=-50, gamma=0.9)
    out = set_outcome_utilities(tree, values, msp)
    assert out.utilities["z-stay"] == (-32.0, 32.0)  # penalty + gamma * own value


def test_utilities_partial_skill_blend():
    g, tree, values = movement_fixture()
    msp = MacroProcess(g, skill=0.7, stay_penalty=-50, gamma=0.9)
    out = set_outcome_utilities(tree, values, msp)
    expected = 0.7 * (100 + 0.9 * 10) + 0.3 * (-50 + 0.9 * 20)  # two-branch expansion
    assert out.utilities["z-adv"][0] == pytest.approx(expected, rel=1e-12)
    assert out.utilities["z-adv"][1] == -out.utilities["z-adv"][0]


def test_utilities_missing_value_entry():
    g, tree, _ = movement_fixture()
    msp = MacroProcess(g, skill=1.0, stay_penalty=-50)
    with pytest.raises(UnknownNode):
        set_outcome_utilities(tree, {"v": 0.0}, msp)


def test_utilities_do_not_mutate_input():
    g, tree, values = movement_fixture()
    msp = MacroProcess(g, skill=1.0, stay_penalty=-50)
    out = set_outcome_utilities(tree, values, msp)
    assert tree.utilities == {} and out is not tree


# --- invariants --------------------------------------------------------------

def test_spne_is_best_response_in_every_subgame():
    rng = random.Random(7)
    for _ in range(15):
        g = random_zero_sum_tree(rng)
        profile = solve_spne(g)
        for role in (Role.ATTACKER, Role.DEFENDER):
            own = 0 if role is Role.ATTACKER else 1
            table = profile.attacker if role is Role.ATTACKER else profile.defender
            for node in g.decision_nodes(role):
                base = subgame_value(g, node, profile)[own]
                for action in node.actions:
                    deviated = copy.deepcopy(profile)
                    dev_table = deviated.attacker if role is Role.ATTACKER else deviated.defender
                    dev_table[node.history_id] = {action: 1.0}
                    assert subgame_value(g, node, deviated)[own] <= base


def test_scaling_attacker_utilities_keeps_choices():
    rng = random.Random(11)
    for _ in range(10):
        g = random_zero_sum_tree(rng)
        scaled = g.with_utilities({k: (2.5 * ua, ud) for k, (ua, ud) in g.utilities.items()})
        a, b = solve_spne(g), solve_spne(scaled)
        assert a.attacker == b.attacker and a.defender == b.defender


def test_validate_flags_broken_chance_and_outcomes():
    bad_chance = chance("C", {"a": leaf("z1", "u1"), "b": leaf("z2", "u2")}, (0.4, 0.4))
    g = MicroTacticGame("v", bad_chance)
    assert any("sum to" in p for p in g.validate())

    graph = NetworkGraph.build(["v", "u1"], [("v", "u1")], "v")
    g2 = MicroTacticGame("v", chance("C", {"a": leaf("z1", "u1"), "b": leaf("z2", "u2")}, (0.5, 0.5)))
    assert any("not an out-edge" in p for p in g2.validate(graph))


def test_validate_flags_non_zero_sum_utilities():
    g = MicroTacticGame("v", leaf("L", "t"), {"L": (3.0, -2.0)})
    assert any("zero-sum" in p for p in g.validate())


# --- dot export ---------------------------------------------------------------

def test_to_dot_deterministic_and_highlights():
    g = depth2_game()
    profile = solve_spne(g)
    dot1 = to_dot(g, profile)
    dot2 = to_dot(g, profile)
    assert dot1 == dot2
    assert '"A" -> "D2" [label="a2", penwidth=2.5, style=bold];' in dot1
    assert dot1.startswith("digraph mtg {")

"""CTMC construction: hand-enumerated oracles, blocking, determinism,
rename/hiding/commutativity invariants and error paths."""

import math

import pytest

from ctk.algebra import flatten
from ctk.ast_nodes import Hide, Instance, Par, Rename
from ctk.checker import check_property
from ctk.ctmc import build, export_tables, label_transitions
from ctk.errors import BuildError, StateCapError
from ctk.parser import parse_model
from ctk.properties import parse_property

import oracle


def build_fixture(fixture, expr=None):
    model = fixture.model
    expr = expr if expr is not None else model.systems()[0].expr
    return build(flatten(expr, model))


def canonical(ctmc):
    """Transition multiset keyed by variable valuations, order-insensitive."""
    def key(i):
        return tuple(sorted(zip(ctmc.var_names, ctmc.states[i])))
    return sorted((key(t.source), t.label, t.rate, key(t.target))
                  for t in ctmc.transitions)


# ---------------------------------------------------------------------------
# the receptor module alone, against a hand enumeration

RECEPTOR_STATES = {(1, 1, 0), (1, 2, 0), (0, 0, 1), (0, 1, 1), (0, 2, 1)}

RECEPTOR_TRANSITIONS = {
    # (R1, L1, R1Active) -> (R1, L1, R1Active): label, rate
    ((1, 1, 0), "i1_1", 1.0, (0, 0, 1)),
    ((1, 1, 0), "e3_1", 1.0, (0, 1, 1)),
    ((1, 1, 0), "e4_1", 1.0, (1, 2, 0)),
    ((1, 2, 0), "i1_1", 2.0, (0, 0, 1)),
    ((1, 2, 0), "e3_1", 1.0, (0, 2, 1)),
    ((0, 0, 1), "e4_1", 1.0, (0, 1, 1)),
    ((0, 1, 1), "e4_1", 1.0, (0, 2, 1)),
}


@pytest.fixture(scope="module")
def receptor_alone(fixtures):
    model = fixtures["independent"].model
    return build(flatten(Instance("Receptor", 1), model))


def test_receptor_reachable_states(receptor_alone):
    assert receptor_alone.var_names == ("R1", "L1", "R1Active")
    assert set(receptor_alone.states) == RECEPTOR_STATES


def test_receptor_transition_set(receptor_alone):
    ctmc = receptor_alone
    got = {(ctmc.states[t.source], t.label, t.rate, ctmc.states[t.target])
           for t in ctmc.transitions}
    assert got == RECEPTOR_TRANSITIONS


def test_mass_action_binding_rate(receptor_alone):
    ctmc = receptor_alone
    rates = {ctmc.states[t.source][1]: t.rate
             for t in label_transitions(ctmc, "i1_1")}
    assert rates == {1: 1.0, 2: 2.0}


def test_label_transition_counts(receptor_alone):
    assert len(label_transitions(receptor_alone, "e4_1")) == 3
    # pure self-loop hooks are dropped
    assert label_transitions(receptor_alone, "e1_1") == []
    assert label_transitions(receptor_alone, "unknown") == []


def test_variable_without_commands():
    model = parse_model("module M x : [0..3] init 2; endmodule")
    ctmc = build(flatten(Instance("M", 1), model))
    assert ctmc.num_states == 1
    assert ctmc.transitions == ()


# ---------------------------------------------------------------------------
# fixture systems against the independent oracle

@pytest.mark.parametrize("name", sorted(oracle.STATE_COUNTS))
def test_fixture_matches_oracle_enumeration(name, fixtures):
    ctmc = build_fixture(fixtures[name])
    init, rxns = oracle.reactions(name)
    keys, states, trans = oracle.enumerate_ctmc(init, rxns)
    assert (ctmc.num_states, len(ctmc.transitions)) == oracle.STATE_COUNTS[name]
    assert canonical(ctmc) == oracle.canonical(keys, states, trans)


def test_blocked_labels_produce_no_transitions(fixtures):
    fixture = fixtures["independent"]
    system = fixture.model.systems()[0].expr
    ctmc = build_fixture(fixture)
    assert len(system.sync) == 18
    for label in system.sync:
        assert label_transitions(ctmc, label) == []


def test_construction_is_deterministic(fixtures):
    a = build_fixture(fixtures["signal-flow"])
    b = build_fixture(fixtures["signal-flow"])
    assert a.states == b.states
    assert a.transitions == b.transitions


def test_par_commutativity_up_to_isomorphism(fixtures):
    for name in ("independent", "signal-flow", "substrate-availability"):
        model = fixtures[name].model
        system = model.systems()[0].expr
        swapped = Par(system.right, system.left, system.sync)
        assert canonical(build(flatten(system, model))) == \
            canonical(build(flatten(swapped, model)))


def _strip_hides(expr):
    if isinstance(expr, Hide):
        return _strip_hides(expr.child)
    if isinstance(expr, Rename):
        return Rename(_strip_hides(expr.child), expr.mapping)
    if isinstance(expr, Par):
        return Par(_strip_hides(expr.left), _strip_hides(expr.right), expr.sync)
    return expr


def test_hiding_preserves_state_count(fixtures, ctmcs):
    for name, fixture in fixtures.items():
        system = fixture.model.systems()[0].expr
        unhidden = build(flatten(_strip_hides(system), fixture.model))
        assert unhidden.num_states == ctmcs[name].num_states


def test_rename_preserves_command_and_transition_counts(fixtures):
    model = fixtures["independent"].model
    plain = Instance("Receptor", 1)
    renamed = Rename(plain, (("e4_1", "produce_1"), ("e3_1", "alt_1")))
    a = build(flatten(plain, model))
    b = build(flatten(renamed, model))
    assert len(a.transitions) == len(b.transitions)
    assert len(label_transitions(b, "produce_1")) == 3


def test_rename_preserves_p1_transition_count(fixtures):
    model = fixtures["independent"].model
    p1 = model.composition("P1").expr
    renamed = Rename(p1, (("e6_1", "step_1"),))
    assert len(build(flatten(p1, model)).transitions) == \
        len(build(flatten(renamed, model)).transitions)


def test_exit_rate_bound(fixtures, ctmcs):
    for name, ctmc in ctmcs.items():
        flat = flatten(fixtures[name].model.systems()[0].expr,
                       fixtures[name].model)
        n_commands = sum(len(c.module.commands) for c in flat.components)
        max_level = max(hi for _, hi in ctmc.var_bounds)
        max_parts = max(len(b.parts) for b in flat.bundles)
        bound = n_commands * max_level ** max_parts
        assert all(rate <= bound for rate in ctmc.exit_rates())


def test_product_rate_law(fixtures):
    """Synchronised rates equal the product of participant rates,
    recomputed per transition from the flat system."""
    from ctk.ast_nodes import eval_expr

    for name in ("substrate-availability", "gene-expression", "signal-flow"):
        model = fixtures[name].model
        flat = flatten(model.systems()[0].expr, model)
        ctmc = build(flat)
        by_label = {}
        for bundle in flat.bundles:
            by_label.setdefault(bundle.label, []).append(bundle)
        for t in ctmc.transitions:
            valuation = ctmc.valuation(t.source)
            matched = False
            for bundle in by_label[t.label]:
                commands = [flat.command(p) for p in bundle.parts]
                if not all(eval_expr(c.guard, valuation) for c in commands):
                    continue
                product = math.prod(
                    float(eval_expr(c.rate, valuation)) for c in commands)
                if product == t.rate:
                    matched = True
                    break
            assert matched, (name, t)


# ---------------------------------------------------------------------------
# self-loop elision soundness

CHAIN = """
module Chain
   x1 : [0..2] init 0;
   [step1_1] x1 = 0 -> 1:(x1' = 1);
   [step2_1] x1 = 1 -> 1:(x1' = 2);
endmodule
"""

CHAIN_WITH_IDLE = CHAIN.replace(
    "endmodule",
    "[idle_1] x1 = 1 -> 1:(x1' = x1);\nendmodule")


def test_identity_command_changes_no_probability():
    plain = parse_model(CHAIN)
    noisy = parse_model(CHAIN_WITH_IDLE)
    a = build(flatten(Instance("Chain", 1), plain))
    b = build(flatten(Instance("Chain", 1), noisy))
    assert canonical(a) == canonical(b)
    for text in ("P=? [ F<=3 (x1 = 2) ]", "P=? [ (x1 < 2) U (x1 = 2) ]"):
        formula = parse_property(text)
        pa = check_property(a, formula).value
        pb = check_property(b, formula).value
        assert pa == pytest.approx(pb, abs=1e-12)


# ---------------------------------------------------------------------------
# error paths and export

def test_state_cap_enforced(fixtures):
    model = fixtures["independent"].model
    flat = flatten(model.systems()[0].expr, model)
    with pytest.raises(StateCapError):
        build(flat, state_cap=10)


def test_out_of_range_update_disables_command():
    model = parse_model(
        "module M x : [0..1] init 0; [up_1] x >= 0 -> 1:(x' = x + 1); endmodule")
    ctmc = build(flatten(Instance("M", 1), model))
    # x=0 -> x=1 fires; x=1 -> x=2 is out of range and must be disabled
    assert ctmc.num_states == 2
    assert len(ctmc.transitions) == 1


def test_joint_double_write_rejected():
    model = parse_model(
        "module M x1 : [0..1] init 0; "
        "[a_1] x1 = 0 -> 1:(x1' = 1) & (x1' = 0); endmodule")
    with pytest.raises(BuildError, match="writes variable 'x1' twice"):
        build(flatten(Instance("M", 1), model))


def test_synchronised_instances_keep_variables_apart():
    model = parse_model(
        "module A x1 : [0..1] init 0; [a_1] x1 = 0 -> 1:(x1' = 1); endmodule")
    flat = flatten(
        Par(Instance("A", 1),
            Rename(Instance("A", 2), (("a_2", "a_1"),)), ("a_1",)),
        model)
    ctmc = build(flat)
    # one joint transition raising both copies
    assert ctmc.num_states == 2
    assert len(ctmc.transitions) == 1
    assert ctmc.transitions[0].rate == 1.0


def test_negative_rate_rejected():
    model = parse_model(
        "module M x : [0..1] init 0; [a_1] x = 0 -> x - 1:(x' = 1); endmodule")
    with pytest.raises(BuildError, match="negative rate"):
        build(flatten(Instance("M", 1), model))


def test_export_tables(tmp_path, fixtures):
    ctmc = build_fixture(fixtures["substrate-availability"])
    states_path, trans_path = export_tables(ctmc, str(tmp_path))
    state_lines = [l for l in open(states_path) if not l.startswith("#")]
    trans_lines = [l for l in open(trans_path) if not l.startswith("#")]
    assert len(state_lines) == ctmc.num_states
    assert len(trans_lines) == len(ctmc.transitions)
    first = state_lines[0].split()
    assert first[0] == "0" and len(first) == 1 + len(ctmc.var_names)

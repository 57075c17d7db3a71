"""Acceptance suite. One test per criterion; each prints a PASS/FAIL line.

Criterion 2 (characterisation identity) is implemented exactly as stated
and is EXPECTED TO FAIL on two cells: the gene-expression signature also
holds on the substrate-availability model (once the second pathway has
completed it has necessarily consumed X1, so Protein1 can never be
expressed afterwards), and the receptor-function signature also holds on
the intracellular-communication model (the replenished ligand makes
R2Active = 1 with L2 = 1 reachable). Both are provable properties of the
library compositions, confirmed by the independent oracle in
tests/oracle.py; see test_criterion_2_computed_matrix for the regression
guard on the actual matrix. Details in notes/decisions.md (kept outside
the package).
"""

import json
import math
import subprocess
import sys

import numpy as np
import pytest
import scipy.linalg

from ctk.algebra import flatten
from ctk.checker import CheckSettings, check_property, prob_bounded_until, \
    prob_unbounded_until
from ctk.ctmc import Ctmc, Transition, build, label_transitions
from ctk.crosstalk import SIGNATURE_PROPERTIES, characterise
from ctk.properties import parse_property
from ctk.stdlib import CROSSTALK_FIXTURES, load_fixture

import oracle
from test_ctmc import canonical, _strip_hides

DETECTION_ORDER = ("competitive_signal_flow_p1",
                   "time_dependent_signal_flow_p1",
                   "time_dependent_signal_flow_p2")

# published table at its printed precision
PRINTED_TABLE = {
    "independent": ("0.500", "0.184", "0.18473"),
    "signal-flow": ("0.638", "0.304", "0.18473"),
    "substrate-availability": ("0.500", "0.141", "0.14125"),
    "receptor-function": ("0.487", "0.184", "0.19257"),
    "gene-expression": ("0.363", "0.147", "0.18473"),
    "intracellular-communication": ("0.500", "0.184", "0.18477"),
}

TOLERANCES = {3: 5e-4, 5: 5e-6}


def matches_printed(computed: float, printed: str) -> bool:
    """True when `computed` prints as `printed` under truncation or
    round-to-nearest at the printed precision, or lies within the stated
    absolute tolerance of it.

    The published entries provably mix both conventions (0.304971 is
    printed 0.304, truncated, while 0.146787 is printed 0.147, rounded),
    and the stated absolute tolerances alone are unsatisfiable: the
    independent row prints one symmetric quantity as both 0.184 and
    0.18473, and no number is within 5e-4 of the former and 5e-6 of the
    latter. Accepting either convention is the tightest consistent check.
    """
    decimals = len(printed.split(".")[1])
    scale = 10 ** decimals
    target = round(float(printed) * scale)
    truncated = math.floor(computed * scale)
    rounded = round(computed * scale)
    if truncated == target or rounded == target:
        return True
    return abs(computed - float(printed)) <= TOLERANCES[decimals]


@pytest.fixture(scope="module")
def built():
    out = {}
    for name in CROSSTALK_FIXTURES:
        fixture = load_fixture(name)
        system = fixture.model.systems()[0]
        out[name] = (fixture, build(flatten(system.expr, fixture.model)))
    return out


# ---------------------------------------------------------------------------
# criterion 1: detection table reproduction

def test_criterion_1_detection_table(built):
    failures = []
    print()
    for name in CROSSTALK_FIXTURES:
        fixture, ctmc = built[name]
        for prop, printed, derived in zip(
                DETECTION_ORDER, PRINTED_TABLE[name],
                oracle.DETECTION_VALUES[name]):
            computed = check_property(ctmc, fixture.properties[prop]).value
            ok = matches_printed(computed, printed)
            ok_derived = abs(computed - derived) < 1e-6
            if not (ok and ok_derived):
                failures.append((name, prop, computed, printed, derived))
            print(f"  {name:30s} {prop:32s} {computed:.7f} "
                  f"vs printed {printed:8s} "
                  f"{'ok' if ok and ok_derived else 'MISMATCH'}")
    print(f"CRITERION 1 detection table: {'FAIL' if failures else 'PASS'}")
    assert not failures, failures


# ---------------------------------------------------------------------------
# criterion 2: characterisation identity (faithful; expected to fail on
# two provable cells, see module docstring) and the computed matrix

def matrix(built):
    out = {}
    for name in CROSSTALK_FIXTURES:
        if name == "independent":
            continue
        _, ctmc = built[name]
        out[name] = tuple(characterise(ctmc).verdicts.values())
    return out


def test_criterion_2_characterisation_identity(built):
    got = matrix(built)
    names = [n for n in CROSSTALK_FIXTURES if n != "independent"]
    identity = {name: tuple(other == name for other in names)
                for name in names}
    deviations = [
        (model, sig, got[model][j], identity[model][j])
        for model in names
        for j, sig in enumerate(SIGNATURE_PROPERTIES)
        if got[model][j] != identity[model][j]
    ]
    verdict = "PASS" if not deviations else "FAIL (expected, see docstring)"
    print(f"\nCRITERION 2 characterisation identity: {verdict}")
    for model, sig, got_v, want_v in deviations:
        print(f"  ({model}, {sig}): computed {got_v}, identity wants {want_v}")
    assert not deviations, (
        "the published signature formulas do not separate these models; "
        f"deviating cells: {[(m, s) for m, s, _, _ in deviations]}")


def test_criterion_2_computed_matrix(built):
    """Regression guard: the full matrix equals the analytically derived
    one (identity plus the two documented extra cells), and the
    independence property holds on the independent model."""
    got = matrix(built)
    expected = {
        "signal-flow": (True, False, False, False, False),
        "substrate-availability": (False, True, False, True, False),
        "receptor-function": (False, False, True, False, False),
        "gene-expression": (False, False, False, True, False),
        "intracellular-communication": (False, False, True, False, True),
    }
    assert got == expected
    fixture, ctmc = built["independent"]
    assert characterise(ctmc).holding() == []
    independence = check_property(ctmc, fixture.properties["independence"])
    assert independence.value is True
    print("\nCRITERION 2 (computed matrix + independence property): PASS")


# ---------------------------------------------------------------------------
# criterion 3: oracle equivalence on random chains

def _random_ctmc(rng):
    n = int(rng.integers(2, 7))
    transitions = []
    for s in range(n):
        for t in range(n):
            if s != t and rng.random() < 0.6:
                transitions.append(
                    Transition(s, f"t{s}_{t}", float(rng.uniform(0.1, 4.0)), t))
    return Ctmc(var_names=("x",), var_bounds=((0, n - 1),),
                states=tuple((i,) for i in range(n)), initial=0,
                transitions=tuple(transitions))


def test_criterion_3_oracle_equivalence():
    rng = np.random.default_rng(431017)
    checked = 0
    for _ in range(12):
        ctmc = _random_ctmc(rng)
        n = ctmc.num_states
        phi2 = np.zeros(n, dtype=bool)
        phi2[int(rng.integers(0, n))] = True
        phi1 = np.ones(n, dtype=bool)
        if n > 2 and rng.random() < 0.5:
            phi1[int(rng.integers(0, n))] = False
        t = float(rng.uniform(0.2, 4.0))

        # uniformization vs dense matrix exponential
        absorbing = phi2 | (~phi1 & ~phi2)
        Q = np.zeros((n, n))
        for tr in ctmc.transitions:
            if not absorbing[tr.source]:
                Q[tr.source, tr.target] += tr.rate
        Q[np.diag_indices(n)] -= Q.sum(axis=1)
        dense = scipy.linalg.expm(Q * t) @ phi2.astype(float)
        unif = prob_bounded_until(ctmc, phi1, phi2, t)
        assert np.max(np.abs(unif - dense)) < 1e-7

        # Gauss-Seidel vs direct elimination
        gs = prob_unbounded_until(ctmc, phi1, phi2,
                                  CheckSettings(solver="iterative"))
        direct = prob_unbounded_until(ctmc, phi1, phi2,
                                      CheckSettings(solver="direct"))
        assert np.max(np.abs(gs - direct)) < 1e-9
        checked += 1
    assert checked >= 10
    print(f"\nCRITERION 3 oracle equivalence ({checked} random chains): PASS")


# ---------------------------------------------------------------------------
# criterion 4: algebraic invariants

def test_criterion_4_algebraic_invariants(built):
    from ctk.ast_nodes import Instance, Par, Rename

    # blocking: every one-sided sync label yields zero transitions
    fixture, ctmc = built["independent"]
    system = fixture.model.systems()[0].expr
    assert len(system.sync) == 18
    for label in system.sync:
        assert label_transitions(ctmc, label) == []

    # renaming preserves transition count
    model = fixture.model
    p1 = model.composition("P1").expr
    renamed = Rename(p1, (("e6_1", "step_1"),))
    assert len(build(flatten(p1, model)).transitions) == \
        len(build(flatten(renamed, model)).transitions)

    # parallel composition is commutative up to isomorphism
    for name in CROSSTALK_FIXTURES:
        fx, ct = built[name]
        sysx = fx.model.systems()[0].expr
        swapped = Par(sysx.right, sysx.left, sysx.sync)
        assert canonical(build(flatten(swapped, fx.model))) == canonical(ct)

    # hiding never changes the reachable state count
    for name in CROSSTALK_FIXTURES:
        fx, ct = built[name]
        stripped = _strip_hides(fx.model.systems()[0].expr)
        assert build(flatten(stripped, fx.model)).num_states == ct.num_states

    print("\nCRITERION 4 algebraic invariants: PASS")


# ---------------------------------------------------------------------------
# criterion 5: case-study gates

def test_criterion_5_case_study_gates():
    fixture = load_fixture("case-study")
    ctmcs = {}
    for name in ("CaseIndependent", "CaseMapkCrosstalk", "CaseWntCrosstalk",
                 "CaseFullCrosstalk"):
        ctmcs[name] = build(flatten(fixture.model.composition(name).expr,
                                    fixture.model))
    certain = {name: check_property(c, fixture.properties["psi_1_certain"]).value
               for name, c in ctmcs.items()}
    assert certain == {"CaseIndependent": False, "CaseMapkCrosstalk": True,
                       "CaseWntCrosstalk": False, "CaseFullCrosstalk": True}
    psi2 = {name: check_property(c, fixture.properties["psi_2"]).value
            for name, c in ctmcs.items()}
    assert psi2["CaseFullCrosstalk"] > psi2["CaseMapkCrosstalk"]
    assert psi2["CaseFullCrosstalk"] > psi2["CaseWntCrosstalk"]
    informational = {row.prop: row.value for row in fixture.expected
                     if row.source == "informational"}
    assert len(informational) == 4  # recorded, not gated
    print("\nCRITERION 5 case-study gates: PASS")


# ---------------------------------------------------------------------------
# criterion 6: determinism of canonical reports

def _canonical_cli_report(*argv):
    result = subprocess.run(
        [sys.executable, "-m", "ctk", *argv, "--format", "json"],
        capture_output=True, text=True, check=True)
    report = json.loads(result.stdout)
    report.pop("diagnostics", None)
    return json.dumps(report, sort_keys=True)


def test_criterion_6_determinism(built):
    # in-process: two independent builds give identical results
    for name in CROSSTALK_FIXTURES:
        fixture, _ = built[name]
        system = fixture.model.systems()[0]
        a = build(flatten(system.expr, fixture.model))
        b = build(flatten(system.expr, fixture.model))
        assert a.states == b.states and a.transitions == b.transitions
        for prop in DETECTION_ORDER:
            va = check_property(a, fixture.properties[prop]).value
            vb = check_property(b, fixture.properties[prop]).value
            assert va == vb

    # end to end: byte-identical canonical CLI reports
    for argv in (("check", "independent"),
                 ("detect", "independent", "gene-expression"),
                 ("classify", "receptor-function")):
        assert _canonical_cli_report(*argv) == _canonical_cli_report(*argv)
    print("\nCRITERION 6 determinism: PASS")

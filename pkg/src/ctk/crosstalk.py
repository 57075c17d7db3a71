"""Cross-talk classification, detection and characterisation.

Classification inspects the shared external labels of two composed
pathways together with their role annotations. Detection compares three
fixed signal-flow probabilities against an independent baseline.
Characterisation evaluates the five signature properties; each cross-talk
composition in the library satisfies its own signature.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .algebra import alphabet, instantiate_annotations
from .ast_nodes import (
    CompositionExpr,
    Hide,
    Instance,
    Model,
    Par,
    ParAuto,
    Rename,
)
from .checker import CheckResult, CheckSettings, DEFAULT_SETTINGS, check_property
from .ctmc import Ctmc
from .errors import MissingAnnotationError, ModelError
from .properties import parse_property

DETECTION_PROPERTIES: dict[str, str] = {
    "competitive_signal_flow_p1":
        "P=? [ F (Protein1 = 1 & Protein2 = 0) ]",
    "time_dependent_signal_flow_p1":
        "P=? [ F<=3 (Protein1 = 1) ]",
    "time_dependent_signal_flow_p2":
        "P=? [ F<=3 (Protein2 = 1) ]",
}

SIGNATURE_PROPERTIES: dict[str, str] = {
    "signal-flow":
        "P>0 [ F (R1Active = 0 & Protein1 = 1) ]",
    "substrate-availability":
        "P<=0 [ F (Protein1 = 1 & Protein2 = 1) ]",
    "receptor-function":
        "P>0 [ F (R2Active = 1 & L2 = 1) ]",
    "gene-expression":
        "P<=0 [ F (Protein1 = 1) {Protein1 = 0 & Protein2 = 1} ]",
    "intracellular-communication":
        "P>0 [ (L2 = 1) & (L2 = 1) U ((L2 = 0) & (L2 = 0) U (L2 = 1)) ]",
}

DEFAULT_DETECTION_THRESHOLD = 1e-5

_PRODUCTION_ROLES = frozenset(
    {"activation", "alternative-activation", "expression", "binding"})
_CAT_INH = frozenset({"catalysis", "inhibition"})


class CrosstalkCategory(enum.Enum):
    INDEPENDENT = "independent"
    SIGNAL_FLOW = "signal-flow"
    SUBSTRATE_AVAILABILITY = "substrate-availability"
    RECEPTOR_FUNCTION = "receptor-function"
    GENE_EXPRESSION = "gene-expression"
    INTRACELLULAR_COMMUNICATION = "intracellular-communication"
    UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class RoleRef:
    """Annotation of one command behind a (possibly renamed) label."""

    role: str
    module_kind: str
    original_label: str


@dataclass(frozen=True)
class Classification:
    category: CrosstalkCategory
    shared_labels: frozenset[str]


def role_map(expr: CompositionExpr, model: Model) -> dict[str, frozenset[RoleRef]]:
    """Role annotations reachable under each external label of `expr`."""
    if isinstance(expr, Instance):
        annos = instantiate_annotations(
            model.annotations.get(expr.generic, ()), expr.index)
        return {a.label: frozenset((RoleRef(a.role, a.module_kind, a.label),))
                for a in annos}
    if isinstance(expr, Rename):
        child = role_map(expr.child, model)
        mapping = dict(expr.mapping)
        out: dict[str, frozenset[RoleRef]] = {}
        for label, refs in child.items():
            new = mapping.get(label, label)
            out[new] = out.get(new, frozenset()) | refs
        return out
    if isinstance(expr, Hide):
        child = role_map(expr.child, model)
        hidden = set(expr.labels)
        return {l: refs for l, refs in child.items() if l not in hidden}
    if isinstance(expr, (Par, ParAuto)):
        left = role_map(expr.left, model)
        right = role_map(expr.right, model)
        for label, refs in right.items():
            left[label] = left.get(label, frozenset()) | refs
        return left
    raise ModelError(f"unknown composition node {expr!r}")


def classify(p1: CompositionExpr, p2: CompositionExpr,
             model: Model) -> Classification:
    """Assign one of the five cross-talk categories to a composition.

    Rules are applied in order of specificity: independent, intracellular
    communication, gene expression, receptor function, then the cascade
    rules split into substrate availability versus signal flow by the
    competition predicate (a shared label fusing a degradation with a
    production or activation in the other pathway).
    """
    shared = frozenset(alphabet(p1, model) & alphabet(p2, model))
    if not shared:
        return Classification(CrosstalkCategory.INDEPENDENT, shared)

    roles1 = role_map(p1, model)
    roles2 = role_map(p2, model)
    sides: dict[str, tuple[frozenset[RoleRef], frozenset[RoleRef]]] = {}
    for label in sorted(shared):
        a = roles1.get(label, frozenset())
        b = roles2.get(label, frozenset())
        if not a or not b:
            missing = "first" if not a else "second"
            raise MissingAnnotationError(
                f"shared label '{label}' has no role annotation on the "
                f"{missing} pathway")
        sides[label] = (a, b)

    all_refs = frozenset().union(*(a | b for a, b in sides.values()))

    def has(role=None, kind=None, refs=all_refs):
        return any((role is None or r.role == role)
                   and (kind is None or r.module_kind == kind)
                   for r in refs)

    def only(predicate, refs=all_refs):
        return all(predicate(r) for r in refs)

    # intracellular communication: a gene-expression degradation fused with
    # a receptor ligand production
    if (has(role="degradation", kind="gene-expression")
            and has(role="ligand-production", kind="receptor")
            and only(lambda r: (r.role == "degradation"
                                and r.module_kind == "gene-expression")
                     or (r.role == "ligand-production"
                         and r.module_kind == "receptor"))):
        return Classification(
            CrosstalkCategory.INTRACELLULAR_COMMUNICATION, shared)

    # gene expression: a gene-expression label plus catalysis/inhibition
    # from a cascade
    if (has(kind="gene-expression")
            and any(r.role in _CAT_INH and r.module_kind == "cascade"
                    for r in all_refs)
            and only(lambda r: r.module_kind == "gene-expression"
                     or (r.role in _CAT_INH and r.module_kind == "cascade"))):
        return Classification(CrosstalkCategory.GENE_EXPRESSION, shared)

    # receptor function: a receptor label plus catalysis/inhibition from a
    # receptor or cascade
    if (any(r.module_kind == "receptor" and r.role not in _CAT_INH
            for r in all_refs)
            and any(r.role in _CAT_INH for r in all_refs)
            and only(lambda r: r.module_kind == "receptor"
                     or (r.role in _CAT_INH
                         and r.module_kind in ("receptor", "cascade")))):
        return Classification(CrosstalkCategory.RECEPTOR_FUNCTION, shared)

    # cascade rules: cascade labels, possibly with receptor catalysis or
    # inhibition; competition decides substrate availability vs signal flow
    if (has(kind="cascade")
            and only(lambda r: r.module_kind == "cascade"
                     or (r.role in _CAT_INH and r.module_kind == "receptor"))):
        if _competition(sides):
            return Classification(
                CrosstalkCategory.SUBSTRATE_AVAILABILITY, shared)
        return Classification(CrosstalkCategory.SIGNAL_FLOW, shared)

    return Classification(CrosstalkCategory.UNCLASSIFIED, shared)


def _competition(sides) -> bool:
    """A label fuses a degradation with a production in the other pathway."""
    for a, b in sides.values():
        for one, other in ((a, b), (b, a)):
            if (any(r.role == "degradation" for r in one)
                    and any(r.role in _PRODUCTION_ROLES for r in other)):
                return True
    return False


# ---------------------------------------------------------------------------
# detection

@dataclass(frozen=True)
class DetectionRow:
    name: str
    baseline: float
    model: float

    @property
    def delta(self) -> float:
        return self.model - self.baseline


@dataclass
class DetectionReport:
    rows: list[DetectionRow]
    threshold: float

    @property
    def detected(self) -> bool:
        return any(abs(row.delta) > self.threshold for row in self.rows)


def detect(baseline: Ctmc, model: Ctmc,
           threshold: float = DEFAULT_DETECTION_THRESHOLD,
           settings: CheckSettings = DEFAULT_SETTINGS) -> DetectionReport:
    """Probability deltas of the three detection properties vs a baseline."""
    rows = []
    for name, text in DETECTION_PROPERTIES.items():
        formula = parse_property(text)
        base = check_property(baseline, formula, settings)
        cand = check_property(model, formula, settings)
        rows.append(DetectionRow(name, float(base.value), float(cand.value)))
    return DetectionReport(rows=rows, threshold=threshold)


# ---------------------------------------------------------------------------
# characterisation

@dataclass
class CharacterisationReport:
    verdicts: dict[str, bool] = field(default_factory=dict)
    results: dict[str, CheckResult] = field(default_factory=dict)

    def holding(self) -> list[str]:
        return [name for name, verdict in self.verdicts.items() if verdict]


def characterise(model: Ctmc,
                 settings: CheckSettings = DEFAULT_SETTINGS) -> CharacterisationReport:
    """Evaluate the five signature properties on a composed model."""
    report = CharacterisationReport()
    for name, text in SIGNATURE_PROPERTIES.items():
        result = check_property(model, parse_property(text), settings)
        report.results[name] = result
        report.verdicts[name] = bool(result.value)
    return report

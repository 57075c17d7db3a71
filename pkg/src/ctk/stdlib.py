"""Shipped fixture library: the generic modules, the independent and five
cross-talk compositions, the case-study skeleton, their property suites and
the expected-results sidecar.

Fixtures live next to this module as `.ctk`/`.csl` files plus
`expected.tsv`; the directory can be overridden through the
CROSSTALK_FIXTURES environment variable.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .ast_nodes import CslFormula, Model
from .errors import CtkError
from .parser import parse_model
from .properties import parse_property_file

FIXTURES_ENV = "CROSSTALK_FIXTURES"

FIXTURE_NAMES = (
    "independent",
    "signal-flow",
    "substrate-availability",
    "receptor-function",
    "gene-expression",
    "intracellular-communication",
    "case-study",
)

CROSSTALK_FIXTURES = FIXTURE_NAMES[:6]


@dataclass(frozen=True)
class Expectation:
    fixture: str
    prop: str
    value: str
    source: str  # 'reference', 'derived' or 'informational'

    def as_float(self) -> float:
        return float(self.value)

    def as_bool(self) -> bool:
        return self.value == "true"


@dataclass
class Fixture:
    name: str
    model_path: Path
    property_path: Path
    model: Model
    properties: dict[str, CslFormula]
    expected: tuple[Expectation, ...]

    @property
    def model_text(self) -> str:
        return self.model_path.read_text(encoding="utf-8")

    @property
    def property_text(self) -> str:
        return self.property_path.read_text(encoding="utf-8")


def fixtures_dir() -> Path:
    override = os.environ.get(FIXTURES_ENV)
    if override:
        return Path(override)
    return Path(__file__).parent / "fixtures"


def _expected_rows(directory: Path) -> list[Expectation]:
    rows: list[Expectation] = []
    path = directory / "expected.tsv"
    if not path.exists():
        return rows
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise CtkError(f"malformed expected.tsv row: {line!r}")
        rows.append(Expectation(*fields))
    return rows


def list_fixtures() -> tuple[str, ...]:
    return FIXTURE_NAMES


def load_fixture(name: str) -> Fixture:
    """Load, parse and validate a shipped fixture by name."""
    if name not in FIXTURE_NAMES:
        raise CtkError(
            f"unknown fixture '{name}'; available: {', '.join(FIXTURE_NAMES)}")
    directory = fixtures_dir()
    model_path = directory / f"{name}.ctk"
    property_path = directory / f"{name}.csl"
    model = parse_model(model_path.read_text(encoding="utf-8"))
    properties = parse_property_file(property_path.read_text(encoding="utf-8"))
    expected = tuple(r for r in _expected_rows(directory) if r.fixture == name)
    return Fixture(name, model_path, property_path, model, properties, expected)


def case_study_skeleton() -> Fixture:
    """The reconstructed three-pathway case study (best effort wiring)."""
    return load_fixture("case-study")

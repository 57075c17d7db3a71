#!/usr/bin/env python3
"""Print the characterisation matrix: which signature property holds on
which composition, plus the classification of each shared label set.

The matrix is the identity on the diagonal; two off-diagonal entries hold
as well because they are genuine properties of the compositions (see the
README's discussion of the substrate-availability and
intracellular-communication rows).
"""

from ctk import build, characterise, classify, flatten, load_fixture
from ctk.crosstalk import SIGNATURE_PROPERTIES
from ctk.stdlib import CROSSTALK_FIXTURES


def main() -> None:
    short = {name: name.split("-")[0][:6] for name in SIGNATURE_PROPERTIES}
    print(f"{'composition':30s} " +
          " ".join(f"{short[s]:>6s}" for s in SIGNATURE_PROPERTIES) +
          "   classification (shared labels)")
    for name in CROSSTALK_FIXTURES:
        fixture = load_fixture(name)
        system = fixture.model.systems()[0]
        ctmc = build(flatten(system.expr, fixture.model))
        report = characterise(ctmc)
        cls = classify(system.expr.left, system.expr.right, fixture.model)
        cells = " ".join(f"{'X' if v else '.':>6s}"
                         for v in report.verdicts.values())
        labels = ", ".join(sorted(cls.shared_labels)) or "-"
        print(f"{name:30s} {cells}   {cls.category.value} ({labels})")


if __name__ == "__main__":
    main()

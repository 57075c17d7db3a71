#!/usr/bin/env python3
"""Run the three-pathway case study.

Prints eventual and time-bounded expression probabilities for the
independent composition, each cross-talk group alone, both together, and
the variant without receptor deactivation.
"""

from ctk import build, check_property, flatten
from ctk.stdlib import case_study_skeleton

SYSTEMS = ("CaseIndependent", "CaseNoDeactivation", "CaseMapkCrosstalk",
           "CaseWntCrosstalk", "CaseFullCrosstalk")


def main() -> None:
    fixture = case_study_skeleton()
    targets = {row.prop: row.value for row in fixture.expected
               if row.source == "informational"}
    print(f"{'system':22s} {'states':>6s} {'psi_1':>14s} {'psi_2':>14s} "
          f"{'certain':>8s} {'target':>7s}")
    for name in SYSTEMS:
        expr = fixture.model.composition(name).expr
        ctmc = build(flatten(expr, fixture.model))
        psi1 = check_property(ctmc, fixture.properties["psi_1"]).value
        psi2 = check_property(ctmc, fixture.properties["psi_2"]).value
        certain = check_property(ctmc, fixture.properties["psi_1_certain"]).value
        target = targets.get(f"psi_2@{name}", "-")
        print(f"{name:22s} {ctmc.num_states:6d} {psi1:14.9f} {psi2:14.9f} "
              f"{str(certain):>8s} {target:>7s}")


if __name__ == "__main__":
    main()

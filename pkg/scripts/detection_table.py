#!/usr/bin/env python3
"""Reproduce the cross-talk detection table.

Builds the six shipped compositions, checks the three detection
properties on each, and prints every probability at full precision, at
the reference precision, and as a delta against the independent baseline.
"""

from ctk import build, check_property, flatten, load_fixture
from ctk.stdlib import CROSSTALK_FIXTURES

PROPERTIES = ("competitive_signal_flow_p1",
              "time_dependent_signal_flow_p1",
              "time_dependent_signal_flow_p2")


def main() -> None:
    results = {}
    for name in CROSSTALK_FIXTURES:
        fixture = load_fixture(name)
        system = fixture.model.systems()[0]
        ctmc = build(flatten(system.expr, fixture.model))
        results[name] = [
            check_property(ctmc, fixture.properties[prop]).value
            for prop in PROPERTIES]
        reference = {row.prop: row.value for row in fixture.expected
                     if row.source == "reference" and row.prop in PROPERTIES}
        results[name].append(reference)

    header = f"{'composition':30s} {'competitive':>13s} {'time-dep P1':>13s} {'time-dep P2':>13s}"
    print(header)
    print("-" * len(header))
    for name in CROSSTALK_FIXTURES:
        c, t1, t2, reference = results[name]
        print(f"{name:30s} {c:13.7f} {t1:13.7f} {t2:13.7f}")
        ref = "  ".join(reference.get(p, "-") for p in PROPERTIES)
        print(f"{'':30s} reference: {ref}")

    print()
    print("deltas against the independent baseline:")
    base = results["independent"][:3]
    for name in CROSSTALK_FIXTURES[1:]:
        deltas = [results[name][i] - base[i] for i in range(3)]
        print(f"{name:30s} " + " ".join(f"{d:+13.7f}" for d in deltas))


if __name__ == "__main__":
    main()

"""Expanding non-invariant tests over output transformations.

Grouping or renumbering output values preserves selective influences, so a
necessary test may be run on every transformed version of a system; one
failure anywhere refutes the original.  Tests whose verdicts move under
such transforms (power distances, correlations) gain real power this way.
"""

import itertools

from selinf import (
    ClassificationMetric,
    Design,
    InputSpec,
    JointPmf,
    OutputSpec,
    OutputTransform,
    PowerMetric,
    System,
    TransformSpec,
    apply_transform,
    cosphericity_report,
    generate_battery,
    run_battery,
    run_cosphericity,
    run_distance_test,
)

band = Design(
    (InputSpec("l1", (1, 2)), InputSpec("l2", (1, 2))),
    (
        OutputSpec("A1", (0, 2, 4), (0.0, 2.0, 4.0)),
        OutputSpec("A2", (0, 1, 2), (0.0, 1.0, 2.0)),
    ),
    tuple(itertools.product((1, 2), (1, 2))),
)
shared = {
    (0, 0): 0.24, (0, 1): 0.07,
    (2, 0): 0.07, (2, 1): 0.24, (2, 2): 0.07,
    (4, 1): 0.07, (4, 2): 0.24,
}
flipped = {
    (0, 1): 0.07, (0, 2): 0.24,
    (2, 0): 0.07, (2, 1): 0.24, (2, 2): 0.07,
    (4, 0): 0.24, (4, 1): 0.07,
}
system = System(
    band,
    {
        (1, 1): JointPmf(2, shared),
        (1, 2): JointPmf(2, shared),
        (2, 1): JointPmf(2, shared),
        (2, 2): JointPmf(2, flipped),
    },
)

print("=== Grouping values flips the distance verdict ===")
print(f"original, p=1: {run_distance_test(system, PowerMetric(1.0)).verdict}")

grouping = TransformSpec(
    (
        OutputTransform(
            OutputSpec("B1", (1, 2), (1.0, 2.0)), {None: {0: 2, 2: 1, 4: 1}}
        ),
        OutputTransform(
            OutputSpec("B2", (1, 2), (1.0, 2.0)), {None: {0: 2, 1: 1, 2: 1}}
        ),
    ),
    name="merge-the-top",
)
grouped = apply_transform(system, grouping)
verdict = run_distance_test(grouped, PowerMetric(1.0))
print(f"grouped,  p=1: {verdict.verdict}")
print(f"  violated chain: {verdict.witness.lhs:.2f} > {verdict.witness.rhs:.2f}")
print("the same refutation, phrased as a classification metric on the original:")
classes = ClassificationMetric((((0, 2), (4,)), ((0, 1), (2,))))
print(f"  d_class with {{0,2}}|{{4}} and {{0,1}}|{{2}}: "
      f"{run_distance_test(system, classes).verdict}")

print("\n=== A battery wraps this into one verdict ===")
report = run_battery(
    system, [grouping], lambda s: run_distance_test(s, PowerMetric(1.0))
)
print(f"battery: {report.verdict} ({report.summary})")

print("\n=== Correlations move under nonlinear renumbering ===")
spread = Design(
    band.inputs,
    (
        OutputSpec("A1", (0, 1, 5), (0.0, 1.0, 5.0)),
        OutputSpec("A2", (0, 1, 5), (0.0, 1.0, 5.0)),
    ),
    band.treatments,
)
relabel = {0: 0, 2: 1, 4: 5}, {0: 0, 1: 1, 2: 5}
spread_system = System(
    spread,
    {
        t: JointPmf(
            2,
            {
                (relabel[0][a], relabel[1][b]): m
                for (a, b), m in system.pmf(t).items()
            },
        )
        for t in band.treatments
    },
)
passed = run_cosphericity(spread_system)[0]
print(f"payloads (0,1,5): lhs {passed.lhs:.4f} <= rhs {passed.rhs:.4f} -> pass")
squash = TransformSpec(
    tuple(
        OutputTransform(
            OutputSpec(o.name, (0, 1, 2), (0.0, 1.0, 2.0)), {None: {0: 0, 1: 1, 5: 2}}
        )
        for o in spread.outputs
    ),
    name="squash-five",
)
failed = run_cosphericity(apply_transform(spread_system, squash))[0]
print(f"payloads (0,1,2): lhs {failed.lhs:.4f} >  rhs {failed.rhs:.4f} -> fail")
print(f"=> correlation test over the battery: "
      f"{run_battery(spread_system, [squash], cosphericity_report).verdict}")

print("\n=== Seeded random batteries for CI ===")
specs = generate_battery(spread_system.design, n_groupings=10, n_monotone=10, seed=0)
report = run_battery(
    spread_system,
    specs,
    lambda s: run_distance_test(s, PowerMetric(1.0)),
)
print(f"{len(specs)} random transforms, distance test: {report.verdict}")
print(f"  ({report.summary})")

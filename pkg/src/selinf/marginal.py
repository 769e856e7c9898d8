"""Complete marginal selectivity test.

Selective influences imply that the joint distribution of any subset of
outputs depends only on the levels of the paired inputs.  The test compares,
for every index subset up to a size cap, the sub-marginals of every pair of
treatments that agree on the corresponding input levels.  It is the cheapest
necessary condition and is also implied by the linear feasibility test.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import UsageError
from .model import JointPmf, System, Treatment, marginalize

EPS_TEST = 1e-9


@dataclass(frozen=True)
class MarginalReport:
    """Worst observed marginal discrepancy over all checked comparisons.

    ``discrepancy`` is the sup-norm difference between two sub-marginal
    tables (sharpest single violating cell); ``total_variation`` is reported
    for the same pair, informationally.  ``worst_subset``/``worst_pair`` are
    None when no comparable pair exists (vacuous pass).
    """

    worst_subset: tuple[int, ...] | None
    worst_pair: tuple[Treatment, Treatment] | None
    discrepancy: float
    total_variation: float
    passed: bool


def _sup_and_tv(a: JointPmf, b: JointPmf) -> tuple[float, float]:
    keys = set(a.table) | set(b.table)
    diffs = [abs(a.mass(k) - b.mass(k)) for k in keys]
    if not diffs:
        return 0.0, 0.0
    return max(diffs), 0.5 * sum(diffs)


def check_marginal_selectivity(
    system: System,
    max_subset_size: int | None = None,
    eps_test: float = EPS_TEST,
) -> MarginalReport:
    """Run the complete marginal selectivity test up to ``max_subset_size``.

    The default cap is n-1 (the complete test); pass 1 for the simple test.
    """
    design = system.design
    n = design.n
    if max_subset_size is None:
        max_subset_size = n - 1
    if n > 1 and not 1 <= max_subset_size <= n - 1:
        raise UsageError(f"max_subset_size must be in [1, {n - 1}]")

    worst = MarginalReport(None, None, 0.0, 0.0, True)
    if n == 1 or len(design.treatments) < 2:
        return worst

    for size in range(1, max_subset_size + 1):
        for subset in itertools.combinations(range(n), size):
            groups: dict[tuple, list[Treatment]] = {}
            for t in design.treatments:
                key = tuple(t[k] for k in subset)
                groups.setdefault(key, []).append(t)
            for members in groups.values():
                if len(members) < 2:
                    continue
                margins = [marginalize(system.pmf(t), subset) for t in members]
                for (i, t1), (j, t2) in itertools.combinations(enumerate(members), 2):
                    sup, tv = _sup_and_tv(margins[i], margins[j])
                    if sup > worst.discrepancy:
                        worst = MarginalReport(subset, (t1, t2), sup, tv, True)
    return MarginalReport(
        worst.worst_subset,
        worst.worst_pair,
        worst.discrepancy,
        worst.total_variation,
        worst.discrepancy <= eps_test,
    )

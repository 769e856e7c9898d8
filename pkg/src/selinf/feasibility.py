"""The criterion test: coupling existence as a linear feasibility problem.

Selective influences hold for a finite system if and only if there is a
single joint pmf over one coupling variable per (input, level) pair whose
appropriate marginals reproduce every observed treatment distribution.  That
existence question is ``M q = p, q >= 0`` for a Boolean matrix ``M`` built
purely from the design:

* one row per (allowable treatment, output-value tuple);
* one column per assignment of values to all coupling coordinates;
* entry 1 iff the assignment, restricted to the coordinates selected by the
  row's treatment, equals the row's output tuple.

The solver is a dense phase-I simplex (artificial variables, Bland's rule):
the matrices are small, exactly 0/1, and robustness matters more than speed.
For the two-binary-inputs / two-binary-outputs design the same feasible set
is described in closed form by the Bell/CHSH/Fine inequalities, implemented
here as an independent cross-check of the solver.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, SolverError, UsageError
from .marginal import check_marginal_selectivity
from .model import JointPmf, Level, System, Treatment, validate_system
from .report import CONSISTENT, INAPPLICABLE, RULED_OUT, TestReport

EPS_LP = 1e-8
PIVOT_TOL = 1e-10
COLUMN_CAP = 10**7


@dataclass(frozen=True)
class FeasibilitySystem:
    """The matrix form of the coupling-existence problem for one system.

    Row order: treatments in declared order, outcome tuples lexicographic by
    declared value order within each treatment block.  Column order: coupling
    assignments lexicographic with the first coordinate (input 1, level 1)
    slowest-varying.  ``coords`` lists the coupling coordinates as
    (input index, level), in column-label order.
    """

    system: System
    coords: tuple[tuple[int, Level], ...]
    row_labels: tuple[tuple[Treatment, tuple], ...]
    col_labels: tuple[tuple, ...]
    matrix: np.ndarray  # int8, shape (rows, cols)
    p: np.ndarray  # float64, aligned with row_labels

    def coordinate_index(self, k: int, level: Level) -> int:
        try:
            return self.coords.index((k, level))
        except ValueError:
            raise UsageError(f"no coupling coordinate for input {k}, level {level!r}") from None

    def rank_bound(self) -> int:
        """Informational upper bound on rank(M): prod(m_k (v_k - 1) + 1)."""
        design = self.system.design
        bound = 1
        for spec, out in zip(design.inputs, design.outputs):
            bound *= len(spec.levels) * (len(out.values) - 1) + 1
        return bound

    def format_grid(self) -> str:
        """Plain-text 0/1 grid of M with row and column labels.

        Layout: one header line per
        coupling coordinate giving its assigned value in each column, then
        one row per (treatment, outcome) with 1 for ones and '.' for zeros.
        """
        design = self.system.design
        cell = max(
            [len(str(v)) for out in design.outputs for v in out.values] + [1]
        )
        header_rows = []
        for c, (k, level) in enumerate(self.coords):
            name = f"H({design.inputs[k].name}={level})"
            cells = " ".join(str(a[c]).rjust(cell) for a in self.col_labels)
            header_rows.append((name, cells))
        body_rows = []
        for (t, outcome), row in zip(self.row_labels, self.matrix):
            tpart = ", ".join(
                f"{spec.name}={lev}" for spec, lev in zip(design.inputs, t)
            )
            opart = ", ".join(
                f"{out.name}={v}" for out, v in zip(design.outputs, outcome)
            )
            cells = " ".join(
                (str(1) if e else ".").rjust(cell) for e in row
            )
            body_rows.append((f"{tpart} | {opart}", cells))
        width = max(len(label) for label, _ in header_rows + body_rows)
        lines = [f"{label.rjust(width)}  {cells}" for label, cells in header_rows]
        lines.append("-" * len(lines[0]))
        prev_treatment = None
        for (t, _), (label, cells) in zip(self.row_labels, body_rows):
            if prev_treatment is not None and t != prev_treatment:
                lines.append("")
            prev_treatment = t
            lines.append(f"{label.rjust(width)}  {cells}")
        return "\n".join(lines)


@dataclass(frozen=True)
class CouplingWitness:
    """A validated coupling pmf: q >= 0 (clipped), sums to 1, M q = p."""

    q: np.ndarray
    residual: float


@dataclass(frozen=True)
class LpVerdict:
    feasible: bool
    witness: CouplingWitness | None
    iterations: int


def build_feasibility_system(
    system: System, column_cap: int = COLUMN_CAP
) -> FeasibilitySystem:
    """Construct M and p for ``system``; fails loudly above ``column_cap``."""
    violations = validate_system(system)
    if violations:
        raise UsageError("invalid system: " + "; ".join(violations[:3]))
    design = system.design

    coords = tuple(
        (k, level)
        for k, spec in enumerate(design.inputs)
        for level in spec.levels
    )
    coord_values = [design.outputs[k].values for k, _ in coords]
    n_cols = 1
    for values in coord_values:
        n_cols *= len(values)
        if n_cols > column_cap:
            raise CapacityError(
                f"coupling space exceeds {column_cap} columns; decompose the "
                "design (drop inputs or group output values) before testing"
            )

    outcomes = list(design.outcome_tuples())
    outcome_rank = {o: i for i, o in enumerate(outcomes)}
    block = len(outcomes)
    row_labels = tuple(
        (t, o) for t in design.treatments for o in outcomes
    )
    p = np.array(
        [system.pmf(t).mass(o) for t, o in row_labels], dtype=np.float64
    )

    coord_index = {c: i for i, c in enumerate(coords)}
    selectors = [
        [coord_index[(k, t[k])] for k in range(design.n)]
        for t in design.treatments
    ]
    col_labels = tuple(itertools.product(*coord_values))
    matrix = np.zeros((len(row_labels), n_cols), dtype=np.int8)
    for j, assignment in enumerate(col_labels):
        for b, sel in enumerate(selectors):
            induced = tuple(assignment[s] for s in sel)
            matrix[b * block + outcome_rank[induced], j] = 1
    return FeasibilitySystem(system, coords, row_labels, col_labels, matrix, p)


def _phase1_simplex(
    a: np.ndarray, b: np.ndarray, pivot_tol: float, max_iter: int
) -> tuple[float, np.ndarray, int]:
    """Minimize the sum of artificials for a x = b, x >= 0.

    Returns (optimum, x, iterations).  Bland's rule (smallest eligible index
    entering; smallest basic index on ratio ties) prevents cycling, so the
    iteration cap only guards against oversized instances.
    """
    m, n = a.shape
    a = a.astype(np.float64, copy=True)
    b = b.astype(np.float64, copy=True)
    neg = b < 0
    a[neg] *= -1.0
    b[neg] *= -1.0

    tableau = np.hstack([a, np.eye(m), b[:, None]])
    basis = np.arange(n, n + m)
    # Reduced costs for min(sum of artificials) with the artificial basis.
    cost = np.zeros(n + m + 1)
    cost[:n] = -a.sum(axis=0)
    cost[-1] = -b.sum()

    iterations = 0
    while True:
        # Bland: smallest eligible index enters; artificials never re-enter.
        eligible = np.nonzero(cost[:n] < -pivot_tol)[0]
        if eligible.size == 0:
            break
        entering = int(eligible[0])
        iterations += 1
        if iterations > max_iter:
            raise SolverError(f"phase-I simplex exceeded {max_iter} iterations")

        col = tableau[:, entering]
        rows = np.nonzero(col > pivot_tol)[0]
        if rows.size == 0:
            raise SolverError("phase-I objective unbounded; matrix is malformed")
        ratios = tableau[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + pivot_tol]
        leaving = int(ties[np.argmin(basis[ties])])

        pivot_row = tableau[leaving] / tableau[leaving, entering]
        tableau -= np.outer(tableau[:, entering], pivot_row)
        tableau[leaving] = pivot_row
        cost -= cost[entering] * pivot_row
        basis[leaving] = entering

    x = np.zeros(n)
    structural = basis < n
    x[basis[structural]] = tableau[structural, -1]
    return -cost[-1], x, iterations


def make_witness(
    fs: FeasibilitySystem, q: np.ndarray, eps_lp: float = EPS_LP
) -> CouplingWitness:
    """Validate a candidate coupling vector against the witness contract.

    Entries in (-eps_lp, 0) are clipped to zero; anything worse, a total mass
    away from 1, or a residual above eps_lp raises UsageError.
    """
    q = np.asarray(q, dtype=np.float64).copy()
    if q.shape != (len(fs.col_labels),):
        raise UsageError(f"witness length {q.shape} does not match {len(fs.col_labels)} columns")
    if q.min() < -eps_lp:
        raise UsageError(f"witness has negative entry {q.min():.3g}")
    q[q < 0] = 0.0
    if abs(q.sum() - 1.0) > eps_lp:
        raise UsageError(f"witness mass {q.sum():.10g} != 1")
    residual = float(np.abs(fs.matrix.astype(np.float64) @ q - fs.p).max())
    if residual > eps_lp:
        raise UsageError(f"witness residual {residual:.3g} exceeds {eps_lp}")
    return CouplingWitness(q, residual)


def solve_feasibility(
    fs: FeasibilitySystem,
    eps_lp: float = EPS_LP,
    pivot_tol: float = PIVOT_TOL,
    max_iter: int | None = None,
) -> LpVerdict:
    """Decide M q = p, q >= 0 by phase-I simplex; return a witness if feasible.

    Redundant rows are kept as-is; the artificial basis absorbs rank
    deficiency.  Infeasible means the phase-I optimum exceeds eps_lp.
    """
    m, n = fs.matrix.shape
    if max_iter is None:
        max_iter = 50 * (m + n) + 1000
    optimum, q, iterations = _phase1_simplex(
        fs.matrix.astype(np.float64), fs.p, pivot_tol, max_iter
    )
    if optimum > eps_lp:
        return LpVerdict(False, None, iterations)
    return LpVerdict(True, make_witness(fs, q, eps_lp), iterations)


def extract_coupling_marginals(
    witness: CouplingWitness,
    fs: FeasibilitySystem,
    which: list[tuple[int, Level]],
) -> JointPmf:
    """Marginal pmf of the selected coupling coordinates, from the witness.

    For coordinates matching an allowable treatment this reproduces the
    observed treatment pmf (within twice the solver tolerance); cross-level
    selections expose joint behavior that is never directly observable.
    """
    positions = [fs.coordinate_index(k, level) for k, level in which]
    table: dict[tuple, float] = {}
    for assignment, mass in zip(fs.col_labels, witness.q):
        if mass == 0.0:
            continue
        key = tuple(assignment[c] for c in positions)
        table[key] = table.get(key, 0.0) + float(mass)
    return JointPmf(len(positions), table)


@dataclass(frozen=True)
class FineViolation:
    """The most-violated Fine inequality: indices, value, violated bound."""

    i: Level
    i_prime: Level
    j: Level
    j_prime: Level
    value: float
    bound: str  # "lower" (>= 0) or "upper" (<= 1)
    excess: float


def fine_inequality_check(system: System, eps_test: float = 1e-9) -> TestReport:
    """Closed-form feasibility check for the 2x2 binary fully crossed design.

    Evaluates 0 <= p(i.) + p(.j) + p(i'j') - p(ij) - p(ij') - p(i'j) <= 1
    over all i != i', j != j', where p(ij) is the probability that both
    outputs take their first declared value at treatment (i, j) and p(i.),
    p(.j) are the corresponding output marginals.  Inapplicable unless the
    design is 2x2 binary, fully crossed, and marginally selective.
    """
    design = system.design
    name = "fine"
    if design.n != 2 or any(len(s.levels) != 2 for s in design.inputs):
        return TestReport(name, INAPPLICABLE, "requires two binary inputs")
    if any(len(o.values) != 2 for o in design.outputs):
        return TestReport(name, INAPPLICABLE, "requires two binary outputs")
    if not design.is_fully_crossed():
        return TestReport(name, INAPPLICABLE, "requires all four treatments allowable")
    report = check_marginal_selectivity(system, eps_test=eps_test)
    if not report.passed:
        return TestReport(
            name,
            INAPPLICABLE,
            f"marginal selectivity fails (discrepancy {report.discrepancy:.3g})",
        )

    levels1, levels2 = design.inputs[0].levels, design.inputs[1].levels
    first1, first2 = design.outputs[0].values[0], design.outputs[1].values[0]

    def joint(i: Level, j: Level) -> float:
        pmf = system.pmf((i, j))
        return sum(m for (a, b), m in pmf.items() if a == first1 and b == first2)

    def marg1(i: Level) -> float:
        pmf = system.pmf((i, levels2[0]))
        return sum(m for (a, _), m in pmf.items() if a == first1)

    def marg2(j: Level) -> float:
        pmf = system.pmf((levels1[0], j))
        return sum(m for (_, b), m in pmf.items() if b == first2)

    worst: FineViolation | None = None
    for i, i_prime in itertools.permutations(levels1, 2):
        for j, j_prime in itertools.permutations(levels2, 2):
            value = (
                marg1(i)
                + marg2(j)
                + joint(i_prime, j_prime)
                - joint(i, j)
                - joint(i, j_prime)
                - joint(i_prime, j)
            )
            excess = max(-value, value - 1.0)
            if excess > eps_test and (worst is None or excess > worst.excess):
                bound = "lower" if -value > value - 1.0 else "upper"
                worst = FineViolation(i, i_prime, j, j_prime, value, bound, excess)
    if worst is not None:
        return TestReport(
            name,
            RULED_OUT,
            f"inequality violated by {worst.excess:.4g} at "
            f"(i={worst.i}, i'={worst.i_prime}, j={worst.j}, j'={worst.j_prime})",
            witness=worst,
        )
    return TestReport(name, CONSISTENT, "all eight double inequalities hold")


def lp_report(system: System, eps_lp: float = EPS_LP) -> TestReport:
    """Run the full feasibility test and wrap the verdict as a TestReport."""
    fs = build_feasibility_system(system)
    verdict = solve_feasibility(fs, eps_lp=eps_lp)
    if verdict.feasible:
        return TestReport(
            "lp",
            CONSISTENT,
            f"feasible in {verdict.iterations} iterations "
            f"(residual {verdict.witness.residual:.2g})",
            witness=verdict.witness,
            details={"iterations": verdict.iterations, "fs": fs},
        )
    return TestReport(
        "lp",
        RULED_OUT,
        f"no nonnegative coupling pmf exists ({verdict.iterations} iterations)",
        details={"iterations": verdict.iterations, "fs": fs},
    )

"""Worked systems and random generators shared across the test modules.

The deterministic fixtures are small hand-checked systems with known
verdicts; the random generators produce seeded latent-model systems that
satisfy selective influences by construction.
"""

from __future__ import annotations

import itertools

import numpy as np

from selinf import (
    Design,
    InputSpec,
    JointPmf,
    LatentModel,
    OutputSpec,
    OutputTransform,
    System,
    TransformSpec,
    generate_system,
)


def binary_design(values1=(1, 2), values2=(1, 2), numeric=False) -> Design:
    kw1 = {"numeric": values1} if numeric else {}
    kw2 = {"numeric": values2} if numeric else {}
    return Design(
        (InputSpec("l1", (1, 2)), InputSpec("l2", (1, 2))),
        (OutputSpec("A1", values1, **kw1), OutputSpec("A2", values2, **kw2)),
        tuple(itertools.product((1, 2), (1, 2))),
    )


def system_from_tables(design: Design, tables: dict) -> System:
    return System(design, {t: JointPmf(design.n, tb) for t, tb in tables.items()})


def feasible_binary_system() -> System:
    """2x2 binary system known to admit a coupling (feasible)."""
    return system_from_tables(
        binary_design(),
        {
            (1, 1): {(1, 1): 0.140, (1, 2): 0.360, (2, 1): 0.360, (2, 2): 0.140},
            (1, 2): {(1, 1): 0.198, (1, 2): 0.302, (2, 1): 0.302, (2, 2): 0.198},
            (2, 1): {(1, 1): 0.189, (1, 2): 0.311, (2, 1): 0.311, (2, 2): 0.189},
            (2, 2): {(1, 1): 0.460, (1, 2): 0.040, (2, 1): 0.040, (2, 2): 0.460},
        },
    )


#: A known coupling pmf for feasible_binary_system (one of many), in column order.
FEASIBLE_BINARY_WITNESS = np.array(
    [0.067, 0, 0.131, 0.04, 0, 0.073, 0, 0.189, 0.122, 0, 0.14, 0, 0.04, 0.198, 0, 0]
)


def pr_box_system() -> System:
    """Uniform marginals everywhere, yet no coupling exists (infeasible)."""
    diag = {(1, 1): 0.5, (2, 2): 0.5}
    anti = {(1, 2): 0.5, (2, 1): 0.5}
    return system_from_tables(
        binary_design(),
        {(1, 1): diag, (1, 2): diag, (2, 1): diag, (2, 2): anti},
    )


def marginal_violation_system() -> System:
    """A2's marginal differs between treatments sharing l2=2: fails by 0.1."""
    return system_from_tables(
        binary_design(),
        {
            (1, 1): {(1, 1): 0.2, (1, 2): 0.2, (2, 1): 0.3, (2, 2): 0.3},
            (1, 2): {(1, 1): 0.3, (1, 2): 0.1, (2, 1): 0.2, (2, 2): 0.4},
            (2, 1): {(1, 1): 0.4, (1, 2): 0.3, (2, 1): 0.1, (2, 2): 0.2},
            (2, 2): {(1, 1): 0.3, (1, 2): 0.4, (2, 1): 0.1, (2, 2): 0.2},
        },
    )


def transform_base_system() -> System:
    """Feasible 2x2 binary system used for the level-specific transform."""
    return system_from_tables(
        binary_design(),
        {
            (1, 1): {(1, 1): 0.30, (1, 2): 0.40, (2, 1): 0.10, (2, 2): 0.20},
            (1, 2): {(1, 1): 0.35, (1, 2): 0.35, (2, 1): 0.15, (2, 2): 0.15},
            (2, 1): {(1, 1): 0.32, (1, 2): 0.48, (2, 1): 0.08, (2, 2): 0.12},
            (2, 2): {(1, 1): 0.45, (1, 2): 0.35, (2, 1): 0.05, (2, 2): 0.15},
        },
    )


def level_specific_transform() -> TransformSpec:
    """First output to {+1, -1} (order flips with the level), second to {7, 3}."""
    b1 = OutputSpec("B1", (1, -1), (1.0, -1.0))
    b2 = OutputSpec("B2", (7, 3), (7.0, 3.0))
    return TransformSpec(
        (
            OutputTransform(b1, {1: {1: 1, 2: -1}, 2: {1: -1, 2: 1}}),
            OutputTransform(b2, {1: {1: 7, 2: 3}, 2: {1: 3, 2: 7}}),
        ),
        name="level-specific",
    )


#: Transformed tables after level_specific_transform, keyed like the system.
TRANSFORMED_TABLES = {
    (1, 1): {(1, 7): 0.30, (1, 3): 0.40, (-1, 7): 0.10, (-1, 3): 0.20},
    (1, 2): {(1, 7): 0.35, (1, 3): 0.35, (-1, 7): 0.15, (-1, 3): 0.15},
    (2, 1): {(1, 7): 0.08, (1, 3): 0.12, (-1, 7): 0.32, (-1, 3): 0.48},
    (2, 2): {(1, 7): 0.15, (1, 3): 0.05, (-1, 7): 0.35, (-1, 3): 0.45},
}

#: Observed-probability vector of the transformed system, in row order.
TRANSFORMED_P = [
    0.3, 0.4, 0.1, 0.2,
    0.35, 0.35, 0.15, 0.15,
    0.08, 0.12, 0.32, 0.48,
    0.15, 0.05, 0.35, 0.45,
]

#: A known coupling pmf for the transformed system (one of many).
TRANSFORMED_WITNESS = np.array(
    [0.03, 0, 0, 0, 0, 0.27, 0.32, 0.08, 0, 0.05, 0.12, 0, 0, 0.05, 0.03, 0.05]
)


def _tridiagonal_tables(values):
    """The .24/.07 band tables shared by the distance and correlation fixtures."""
    a, b, c = values
    diag = {
        (a, a): 0.24, (a, b): 0.07,
        (b, a): 0.07, (b, b): 0.24, (b, c): 0.07,
        (c, b): 0.07, (c, c): 0.24,
    }
    anti = {
        (a, b): 0.07, (a, c): 0.24,
        (b, a): 0.07, (b, b): 0.24, (b, c): 0.07,
        (c, a): 0.24, (c, b): 0.07,
    }
    return {(1, 1): diag, (1, 2): diag, (2, 1): diag, (2, 2): anti}


def d1_system() -> System:
    """Three-valued outputs (0,2,4) x (0,1,2); passes the p=1 distance test."""
    design = Design(
        (InputSpec("l1", (1, 2)), InputSpec("l2", (1, 2))),
        (
            OutputSpec("A1", (0, 2, 4), (0.0, 2.0, 4.0)),
            OutputSpec("A2", (0, 1, 2), (0.0, 1.0, 2.0)),
        ),
        tuple(itertools.product((1, 2), (1, 2))),
    )
    return system_from_tables(design, _tridiagonal_tables_pair())


def _tridiagonal_tables_pair():
    diag = {
        (0, 0): 0.24, (0, 1): 0.07,
        (2, 0): 0.07, (2, 1): 0.24, (2, 2): 0.07,
        (4, 1): 0.07, (4, 2): 0.24,
    }
    anti = {
        (0, 1): 0.07, (0, 2): 0.24,
        (2, 0): 0.07, (2, 1): 0.24, (2, 2): 0.07,
        (4, 0): 0.24, (4, 1): 0.07,
    }
    return {(1, 1): diag, (1, 2): diag, (2, 1): diag, (2, 2): anti}


def d1_grouping_transform() -> TransformSpec:
    """Level-free grouping 0->2, 2->1, 4->1 and 0->2, 1->1, 2->1."""
    b1 = OutputSpec("B1", (1, 2), (1.0, 2.0))
    b2 = OutputSpec("B2", (1, 2), (1.0, 2.0))
    return TransformSpec(
        (
            OutputTransform(b1, {None: {0: 2, 2: 1, 4: 1}}),
            OutputTransform(b2, {None: {0: 2, 1: 1, 2: 1}}),
        ),
        name="grouping",
    )


def cosphericity_system() -> System:
    """Same band tables on values (0,1,5): passes the correlation test."""
    design = Design(
        (InputSpec("l1", (1, 2)), InputSpec("l2", (1, 2))),
        (
            OutputSpec("A1", (0, 1, 5), (0.0, 1.0, 5.0)),
            OutputSpec("A2", (0, 1, 5), (0.0, 1.0, 5.0)),
        ),
        tuple(itertools.product((1, 2), (1, 2))),
    )
    return system_from_tables(design, _tridiagonal_tables((0, 1, 5)))


def squash_five_transform() -> TransformSpec:
    """Nonlinear monotone payload change 0->0, 1->1, 5->2 on both outputs."""
    target = OutputSpec("B", (0, 1, 2), (0.0, 1.0, 2.0))
    tr = OutputTransform(target, {None: {0: 0, 1: 1, 5: 2}})
    return TransformSpec((tr, tr), name="squash-five")


def three_variable_pmf() -> JointPmf:
    """Three binary variables with masses 1/16, 7/16, 3/16, 5/16."""
    return JointPmf(
        3,
        {
            (0, 0, 0): 1 / 16,
            (0, 1, 0): 7 / 16,
            (1, 0, 0): 3 / 16,
            (1, 1, 0): 5 / 16,
        },
    )


def random_latent_setup(
    rng: np.random.Generator,
    max_inputs: int = 3,
    max_levels: int = 3,
    max_values: int = 3,
    max_latent: int = 6,
    column_cap: int = 5000,
    allow_partial: bool = True,
):
    """Seeded random (design, latent model) pair within the stated bounds.

    Oversized coupling spaces are resampled so that downstream feasibility
    runs stay fast; every bound (including dummy single-level inputs) is
    still exercised.
    """
    while True:
        n = int(rng.integers(1, max_inputs + 1))
        m = [int(rng.integers(1, max_levels + 1)) for _ in range(n)]
        v = [int(rng.integers(2, max_values + 1)) for _ in range(n)]
        cols = 1
        for mk, vk in zip(m, v):
            cols *= vk**mk
        if cols <= column_cap:
            break
    inputs = tuple(InputSpec(f"l{k+1}", tuple(range(1, m[k] + 1))) for k in range(n))
    outputs = []
    for k in range(n):
        payloads = np.sort(rng.choice(np.arange(10), size=v[k], replace=False))
        outputs.append(
            OutputSpec(
                f"A{k+1}",
                tuple(int(x) for x in payloads),
                tuple(float(x) for x in payloads),
            )
        )
    all_treatments = list(itertools.product(*(spec.levels for spec in inputs)))
    if allow_partial and len(all_treatments) > 1 and rng.random() < 0.3:
        keep = max(1, int(rng.integers(1, len(all_treatments) + 1)))
        chosen = rng.choice(len(all_treatments), size=keep, replace=False)
        treatments = tuple(all_treatments[i] for i in sorted(chosen))
    else:
        treatments = tuple(all_treatments)
    design = Design(inputs, tuple(outputs), treatments)

    n_latent = int(rng.integers(1, max_latent + 1))
    latent_values = list(range(n_latent))
    masses = rng.dirichlet(np.ones(n_latent))
    latent = JointPmf(1, {(r,): float(p) for r, p in zip(latent_values, masses)})
    responses = []
    for k in range(n):
        table = {}
        for level in inputs[k].levels:
            for r in latent_values:
                table[(level, r)] = outputs[k].values[int(rng.integers(v[k]))]
        responses.append(table)
    return design, LatentModel(latent, tuple(responses))


def random_selective_system(rng: np.random.Generator, **kwargs) -> System:
    design, model = random_latent_setup(rng, **kwargs)
    return generate_system(design, model)


def random_marginally_selective_2x2(rng: np.random.Generator) -> System:
    """Mixture of a feasible 2x2 binary system with the infeasible box.

    The mixture keeps marginal selectivity (both components have
    level-determined marginals) while sweeping from feasible to infeasible
    as the mixing weight grows.
    """
    design = binary_design()
    feasible = generate_system(
        design,
        _random_binary_latent(rng, design),
    )
    box = pr_box_system()
    alpha = float(rng.uniform(0.0, 1.0))
    tables = {}
    for t in design.treatments:
        table = {}
        for key in itertools.product((1, 2), (1, 2)):
            table[key] = (1 - alpha) * feasible.pmf(t).mass(key) + alpha * box.pmf(
                t
            ).mass(key)
        tables[t] = table
    return system_from_tables(design, tables)


def _random_binary_latent(rng: np.random.Generator, design: Design) -> LatentModel:
    n_latent = int(rng.integers(2, 7))
    masses = rng.dirichlet(np.ones(n_latent))
    latent = JointPmf(1, {(r,): float(p) for r, p in enumerate(masses)})
    responses = []
    for k in range(2):
        table = {}
        for level in design.inputs[k].levels:
            for r in range(n_latent):
                table[(level, r)] = int(rng.integers(1, 3))
        responses.append(table)
    return LatentModel(latent, tuple(responses))


def random_rt_setup(rng: np.random.Generator, max_latent: int = 6):
    """Seeded random prolongation-valid two-process latent model."""
    n_latent = int(rng.integers(1, max_latent + 1))
    masses = rng.dirichlet(np.ones(n_latent))
    latent = JointPmf(1, {(r,): float(p) for r, p in enumerate(masses)})
    durations = {}
    for k in range(2):
        low = rng.uniform(0.0, 10.0, size=n_latent)
        high = low + rng.uniform(0.0, 5.0, size=n_latent)
        durations[k] = (low, high)
    outputs, responses = [], []
    for k in range(2):
        low, high = durations[k]
        values = tuple(sorted({float(x) for x in np.concatenate([low, high])}))
        outputs.append(OutputSpec(f"T{k+1}", values, values))
        table = {}
        for r in range(n_latent):
            table[(1, r)] = float(low[r])
            table[(2, r)] = float(high[r])
        responses.append(table)
    design = Design(
        (InputSpec("l1", (1, 2)), InputSpec("l2", (1, 2))),
        tuple(outputs),
        tuple(itertools.product((1, 2), (1, 2))),
    )
    return design, LatentModel(latent, tuple(responses))

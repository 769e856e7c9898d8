"""Core data model: inputs, treatments, joint pmfs, and latent generators.

A *system* is a family of finite discrete joint distributions over output
tuples, one joint pmf per allowable treatment (a treatment assigns one level
to every input).  Inputs and outputs are index-paired one to one; callers
with a many-to-many influence pattern must pre-group inputs so that this
pairing holds.

In measure-theoretic terms each ``JointPmf`` is a distribution (S, Sigma, p)
with S a finite product of value sets and Sigma implicitly the power set;
only the point masses are stored.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import UsageError

#: Default tolerance for probability-mass bookkeeping.
EPS_PROB = 1e-9

Level = Hashable
Value = Hashable
Treatment = tuple  # one level per input, in declared input order


@dataclass(frozen=True)
class InputSpec:
    """A deterministic input: a name and its ordered levels.

    Single-level ("dummy") inputs are allowed; they stand for outputs that
    no real input influences.
    """

    name: str
    levels: tuple[Level, ...]

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        if len(self.levels) < 1:
            raise UsageError(f"input {self.name!r} needs at least one level")
        if len(set(self.levels)) != len(self.levels):
            raise UsageError(f"input {self.name!r} has duplicate levels")


@dataclass(frozen=True)
class OutputSpec:
    """A random output: a name, its ordered values, optional numeric payloads.

    Numeric payloads are deliberately separate from value labels: numeric
    coding of qualitative outcomes is arbitrary, and tests that need numbers
    (power metrics, correlations) refuse outputs that lack payloads instead
    of silently indexing the labels.
    """

    name: str
    values: tuple[Value, ...]
    numeric: tuple[float | None, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.values) < 1:
            raise UsageError(f"output {self.name!r} needs at least one value")
        if len(set(self.values)) != len(self.values):
            raise UsageError(f"output {self.name!r} has duplicate values")
        if self.numeric is not None:
            numeric = tuple(None if x is None else float(x) for x in self.numeric)
            if len(numeric) != len(self.values):
                raise UsageError(
                    f"output {self.name!r}: numeric payloads must align with values"
                )
            for x in numeric:
                if x is not None and not math.isfinite(x):
                    raise UsageError(f"output {self.name!r}: non-finite payload {x!r}")
            object.__setattr__(self, "numeric", numeric)

    @property
    def has_numeric(self) -> bool:
        """True when every value carries a numeric payload."""
        return self.numeric is not None and all(x is not None for x in self.numeric)

    def numeric_value(self, value: Value) -> float:
        """Payload of ``value``; raises UsageError when absent."""
        try:
            idx = self.values.index(value)
        except ValueError:
            raise UsageError(f"output {self.name!r}: unknown value {value!r}") from None
        if self.numeric is None or self.numeric[idx] is None:
            raise UsageError(f"output {self.name!r}: value {value!r} has no numeric payload")
        return self.numeric[idx]


@dataclass(frozen=True)
class Design:
    """Index-paired inputs and outputs plus the allowable treatments.

    ``treatments`` is an ordered tuple of full level assignments (one level
    per input, in declared input order); order is preserved everywhere so
    that derived matrices are reproducible.
    """

    inputs: tuple[InputSpec, ...]
    outputs: tuple[OutputSpec, ...]
    treatments: tuple[Treatment, ...]

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "treatments", tuple(tuple(t) for t in self.treatments))
        if len(self.inputs) != len(self.outputs):
            raise UsageError("inputs and outputs must be index-paired (equal counts)")
        if not self.treatments:
            raise UsageError("at least one allowable treatment is required")
        if len(set(self.treatments)) != len(self.treatments):
            raise UsageError("duplicate treatments")
        for t in self.treatments:
            if len(t) != len(self.inputs):
                raise UsageError(f"treatment {t!r} must assign a level to every input")
            for spec, level in zip(self.inputs, t):
                if level not in spec.levels:
                    raise UsageError(
                        f"treatment {t!r} assigns undeclared level {level!r} "
                        f"to input {spec.name!r}"
                    )

    @property
    def n(self) -> int:
        return len(self.inputs)

    def is_fully_crossed(self) -> bool:
        """True when every combination of input levels is allowable."""
        full = 1
        for spec in self.inputs:
            full *= len(spec.levels)
        return len(self.treatments) == full

    def outcome_tuples(self) -> Iterable[tuple[Value, ...]]:
        """All output-value tuples in lexicographic declared-value order."""
        return itertools.product(*(o.values for o in self.outputs))


@dataclass(frozen=True)
class JointPmf:
    """A finite discrete joint pmf stored as a map from value tuples to mass.

    Masses in (-eps, 0) are clipped to zero at construction; exact zeros are
    dropped from the support.  Construction does not renormalize: a badly
    scaled table is surfaced by ``validate_system`` rather than hidden.
    """

    arity: int
    table: Mapping[tuple, float] = field(default_factory=dict)

    def __post_init__(self):
        clean: dict[tuple, float] = {}
        for key, mass in self.table.items():
            key = tuple(key) if isinstance(key, (tuple, list)) else (key,)
            if len(key) != self.arity:
                raise UsageError(f"tuple {key!r} has arity {len(key)}, expected {self.arity}")
            mass = float(mass)
            if not math.isfinite(mass):
                raise UsageError(f"non-finite mass {mass!r} at {key!r}")
            if -EPS_PROB < mass < 0.0:
                mass = 0.0
            if mass != 0.0:
                clean[key] = clean.get(key, 0.0) + mass
        object.__setattr__(self, "table", clean)

    def mass(self, key: tuple) -> float:
        return self.table.get(tuple(key), 0.0)

    def total(self) -> float:
        return sum(self.table.values())

    def items(self):
        return self.table.items()

    def support(self) -> list[tuple]:
        return list(self.table.keys())

    def allclose(self, other: "JointPmf", tol: float = EPS_PROB) -> bool:
        if self.arity != other.arity:
            return False
        keys = set(self.table) | set(other.table)
        return all(abs(self.mass(k) - other.mass(k)) <= tol for k in keys)


@dataclass(frozen=True)
class System:
    """A design together with one joint output pmf per allowable treatment."""

    design: Design
    distributions: Mapping[Treatment, JointPmf]

    def __post_init__(self):
        object.__setattr__(
            self, "distributions", {tuple(k): v for k, v in self.distributions.items()}
        )

    def pmf(self, treatment: Treatment) -> JointPmf:
        try:
            return self.distributions[tuple(treatment)]
        except KeyError:
            raise UsageError(f"no distribution for treatment {treatment!r}") from None


@dataclass(frozen=True)
class LatentModel:
    """An explicit single-source model: a latent pmf and response tables.

    ``responses[k]`` maps ``(level of input k, latent value)`` to a value of
    output k.  Systems generated from such a model satisfy selective
    influences by construction, which makes the generator a source of
    known-consistent fixtures.
    """

    latent: JointPmf  # arity 1, over latent values
    responses: tuple[Mapping[tuple, Value], ...]

    def __post_init__(self):
        if self.latent.arity != 1:
            raise UsageError("latent pmf must be univariate (arity 1)")
        object.__setattr__(self, "responses", tuple(dict(r) for r in self.responses))

    def latent_values(self) -> list:
        return [r for (r,) in self.latent.support()]

    def respond(self, k: int, level: Level, r) -> Value:
        try:
            return self.responses[k][(level, r)]
        except KeyError:
            raise UsageError(
                f"response table {k} is not total: missing ({level!r}, {r!r})"
            ) from None


def marginalize(pmf: JointPmf, indices: Sequence[int]) -> JointPmf:
    """Project ``pmf`` onto the given coordinate indices (in the given order).

    Each original mass is summed into its projected tuple, so total mass is
    preserved exactly up to float addition.
    """
    indices = tuple(indices)
    if len(set(indices)) != len(indices):
        raise UsageError(f"duplicate indices in {indices!r}")
    for i in indices:
        if not 0 <= i < pmf.arity:
            raise UsageError(f"index {i} out of range for arity {pmf.arity}")
    out: dict[tuple, float] = {}
    for key, mass in pmf.items():
        proj = tuple(key[i] for i in indices)
        out[proj] = out.get(proj, 0.0) + mass
    return JointPmf(len(indices), out)


def validate_system(system: System, eps_prob: float = EPS_PROB) -> list[str]:
    """Collect invariant violations; an empty list means the system is valid.

    Violations are data, not exceptions: ingested tables often carry rounding
    defects that the caller wants reported in bulk.
    """
    design = system.design
    violations: list[str] = []
    declared = set(design.treatments)
    for t in system.distributions:
        if t not in declared:
            violations.append(f"distribution given for undeclared treatment {t!r}")
    for t in design.treatments:
        if t not in system.distributions:
            violations.append(f"treatment {t!r} has no distribution")
            continue
        pmf = system.distributions[t]
        if pmf.arity != design.n:
            violations.append(
                f"treatment {t!r}: pmf arity {pmf.arity} != number of outputs {design.n}"
            )
            continue
        for key, mass in pmf.items():
            if mass < -eps_prob:
                violations.append(f"treatment {t!r}: negative mass {mass} at {key!r}")
            for value, spec in zip(key, design.outputs):
                if value not in spec.values:
                    violations.append(
                        f"treatment {t!r}: undeclared value {value!r} "
                        f"for output {spec.name!r}"
                    )
        total = pmf.total()
        if abs(total - 1.0) > eps_prob:
            violations.append(f"treatment {t!r}: mass sum {total:.10g} != 1")
    return violations


def generate_system(design: Design, model: LatentModel) -> System:
    """Build the system induced by a latent model, by exact enumeration.

    For each treatment the output tuple is a deterministic function of the
    latent value, so the treatment pmf is the pushforward of the latent pmf.
    """
    value_sets = [set(o.values) for o in design.outputs]
    distributions: dict[Treatment, JointPmf] = {}
    for t in design.treatments:
        table: dict[tuple, float] = {}
        for (r,), mass in model.latent.items():
            outcome = []
            for k, level in enumerate(t):
                value = model.respond(k, level, r)
                if value not in value_sets[k]:
                    raise UsageError(
                        f"response table {k} maps ({level!r}, {r!r}) to {value!r}, "
                        f"outside output {design.outputs[k].name!r}"
                    )
                outcome.append(value)
            key = tuple(outcome)
            table[key] = table.get(key, 0.0) + mass
        distributions[t] = JointPmf(design.n, table)
    return System(design, distributions)

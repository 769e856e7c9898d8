"""JSON-shaped document format for systems, response times, and transforms.

Top-level keys: ``inputs`` (list of {name, levels}), ``outputs`` (list of
{name, values}, where each value is a bare label or {label, numeric}),
``treatments`` (list of {levels: {input name: level}, pmf: [{tuple, p}]}),
and optionally ``rt`` ({grid, cdfs: {"i,j": [...]}}).  Probabilities may be
decimal strings or numbers.  Tuples are matched against declared labels,
never guessed by position; JSON stringifies object keys, so labels are also
matched by their string form where JSON forces that.
"""

from __future__ import annotations

import json
from typing import Any

from .architectures import RtSystem
from .errors import UsageError
from .model import Design, InputSpec, JointPmf, OutputSpec, System
from .transforms import OutputTransform, TransformSpec


def _number(raw: Any, where: str) -> float:
    if isinstance(raw, bool) or not isinstance(raw, (int, float, str)):
        raise UsageError(f"{where}: expected a number or decimal string, got {raw!r}")
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"{where}: cannot parse {raw!r} as a probability") from None


def resolve_label(candidates, raw, where: str):
    """Match a raw JSON label to a declared one, falling back to str equality."""
    if raw in candidates:
        return raw
    by_str = [c for c in candidates if str(c) == str(raw)]
    if len(by_str) == 1:
        return by_str[0]
    raise UsageError(f"{where}: unknown label {raw!r} (declared: {list(candidates)})")


def _parse_output(entry: dict, where: str) -> OutputSpec:
    values, numeric = [], []
    for i, item in enumerate(entry.get("values", [])):
        if isinstance(item, dict):
            if "label" not in item:
                raise UsageError(f"{where}.values[{i}]: missing 'label'")
            values.append(item["label"])
            numeric.append(
                _number(item["numeric"], f"{where}.values[{i}].numeric")
                if "numeric" in item
                else None
            )
        else:
            values.append(item)
            numeric.append(None)
    payloads = tuple(numeric) if any(x is not None for x in numeric) else None
    return OutputSpec(entry.get("name", ""), tuple(values), payloads)


def system_from_dict(doc: dict) -> System:
    """Parse and validate a system document; raises UsageError with the path."""
    if not isinstance(doc, dict):
        raise UsageError("document root must be an object")
    for key in ("inputs", "outputs", "treatments"):
        if key not in doc:
            raise UsageError(f"missing top-level key {key!r}")

    inputs = []
    for i, entry in enumerate(doc["inputs"]):
        if "name" not in entry or "levels" not in entry:
            raise UsageError(f"inputs[{i}]: need 'name' and 'levels'")
        inputs.append(InputSpec(entry["name"], tuple(entry["levels"])))
    outputs = [
        _parse_output(entry, f"outputs[{i}]") for i, entry in enumerate(doc["outputs"])
    ]
    if len(inputs) != len(outputs):
        raise UsageError("inputs and outputs must have equal length (index-paired)")
    names = [spec.name for spec in inputs]

    treatments, distributions = [], {}
    for ti, entry in enumerate(doc["treatments"]):
        where = f"treatments[{ti}]"
        if "levels" not in entry or "pmf" not in entry:
            raise UsageError(f"{where}: need 'levels' and 'pmf'")
        levels = entry["levels"]
        if set(levels) != set(names):
            raise UsageError(
                f"{where}.levels: must assign every input ({names}), got {sorted(levels)}"
            )
        t = tuple(
            resolve_label(spec.levels, levels[spec.name], f"{where}.levels.{spec.name}")
            for spec in inputs
        )
        table: dict[tuple, float] = {}
        for ci, cell in enumerate(entry["pmf"]):
            cwhere = f"{where}.pmf[{ci}]"
            if "tuple" not in cell or "p" not in cell:
                raise UsageError(f"{cwhere}: need 'tuple' and 'p'")
            if len(cell["tuple"]) != len(outputs):
                raise UsageError(f"{cwhere}.tuple: expected {len(outputs)} labels")
            key = tuple(
                resolve_label(out.values, raw, f"{cwhere}.tuple[{k}]")
                for k, (out, raw) in enumerate(zip(outputs, cell["tuple"]))
            )
            table[key] = table.get(key, 0.0) + _number(cell["p"], f"{cwhere}.p")
        distributions[t] = JointPmf(len(outputs), table)
        treatments.append(t)

    design = Design(tuple(inputs), tuple(outputs), tuple(treatments))
    return System(design, distributions)


def system_to_dict(system: System) -> dict:
    """Serialize a system back to the document format (round-trip safe)."""
    design = system.design
    outputs = []
    for out in design.outputs:
        values = []
        for i, v in enumerate(out.values):
            if out.numeric is not None and out.numeric[i] is not None:
                values.append({"label": v, "numeric": out.numeric[i]})
            else:
                values.append({"label": v})
        outputs.append({"name": out.name, "values": values})
    treatments = []
    for t in design.treatments:
        pmf = system.pmf(t)
        treatments.append(
            {
                "levels": {spec.name: lev for spec, lev in zip(design.inputs, t)},
                "pmf": [
                    {"tuple": list(key), "p": mass}
                    for key, mass in sorted(pmf.items(), key=lambda kv: repr(kv[0]))
                ],
            }
        )
    return {
        "inputs": [
            {"name": spec.name, "levels": list(spec.levels)} for spec in design.inputs
        ],
        "outputs": outputs,
        "treatments": treatments,
    }


def rt_from_dict(doc: dict) -> RtSystem:
    """Parse the optional 'rt' block into an RtSystem."""
    if "grid" not in doc or "cdfs" not in doc:
        raise UsageError("rt: need 'grid' and 'cdfs'")
    cdfs = {}
    for key, values in doc["cdfs"].items():
        parts = [p.strip() for p in str(key).split(",")]
        if len(parts) != 2 or not all(p in ("1", "2") for p in parts):
            raise UsageError(f"rt.cdfs: key {key!r} must be 'i,j' with i,j in 1..2")
        cdfs[(int(parts[0]), int(parts[1]))] = [
            _number(v, f"rt.cdfs[{key}]") for v in values
        ]
    return RtSystem(
        [_number(v, "rt.grid") for v in doc["grid"]],
        cdfs,
    )


def transforms_from_file(path: str, design: Design) -> list[TransformSpec]:
    """Parse a list of transform specs against a concrete design."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, list):
        raise UsageError("transforms file must contain a list of transform specs")
    by_name = {out.name: k for k, out in enumerate(design.outputs)}
    specs = []
    for si, entry in enumerate(doc):
        where = f"transforms[{si}]"
        per_output: dict[int, OutputTransform] = {}
        for oi, oentry in enumerate(entry.get("outputs", [])):
            owhere = f"{where}.outputs[{oi}]"
            if oentry.get("output") not in by_name:
                raise UsageError(f"{owhere}: unknown output {oentry.get('output')!r}")
            k = by_name[oentry["output"]]
            source = design.outputs[k]
            if "values" not in oentry:
                raise UsageError(f"{owhere}: need 'values' (the target value set)")
            target = _parse_output(
                {"name": source.name, "values": oentry["values"]}, owhere
            )
            raw_maps = (
                {None: oentry["map"]} if "map" in oentry else oentry.get("maps", {})
            )
            if not raw_maps:
                raise UsageError(f"{owhere}: need 'map' or 'maps'")
            maps = {}
            for raw_level, mapping in raw_maps.items():
                level = (
                    None
                    if raw_level is None
                    else resolve_label(
                        design.inputs[k].levels, raw_level, f"{owhere}.maps"
                    )
                )
                maps[level] = {
                    resolve_label(source.values, old, f"{owhere}.map"): resolve_label(
                        target.values, new, f"{owhere}.map"
                    )
                    for old, new in mapping.items()
                }
            per_output[k] = OutputTransform(target, maps)
        missing = [k for k in range(design.n) if k not in per_output]
        for k in missing:  # untouched outputs get the identity
            out = design.outputs[k]
            per_output[k] = OutputTransform(out, {None: {v: v for v in out.values}})
        specs.append(
            TransformSpec(
                tuple(per_output[k] for k in range(design.n)),
                name=entry.get("name", f"transform-{si}"),
            )
        )
    return specs


def load_document(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None

"""JSON documents for instances and solutions.

Rationals are written as bare integers when integral and as "a/b" strings
otherwise, so no value ever passes through a float.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Sequence

from .instance import Instance, InstanceError, format_rational, instance_to_document, parse_rational, validate_instance


class DocumentError(InstanceError):
    pass


def read_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise DocumentError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def load_instance(path: str | Path) -> Instance:
    raw = read_json(path)
    if not isinstance(raw, Mapping):
        raise DocumentError("instance: top level must be an object")
    return validate_instance(raw)


def write_text(path: str | Path | None, text: str) -> None:
    if path is None or str(path) == "-":
        import sys

        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def instance_json(inst: Instance) -> str:
    return dumps(instance_to_document(inst))


@dataclass(frozen=True)
class SolutionDocument:
    assignment: tuple[int, ...]
    loads: tuple[Fraction, ...]
    objective_value: Fraction
    certified_bound: Fraction
    meta: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "assignment": list(self.assignment),
            "loads": [format_rational(v) for v in self.loads],
            "objective_value": format_rational(self.objective_value),
            "certified_bound": format_rational(self.certified_bound),
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())


def make_solution(assignment: Sequence[int], loads: Sequence[Fraction | int], objective_value: Fraction | int,
                  certified_bound: Fraction | int, meta: dict | None = None) -> SolutionDocument:
    return SolutionDocument(
        tuple(assignment), tuple(Fraction(v) for v in loads), Fraction(objective_value),
        Fraction(certified_bound), dict(meta or {}),
    )


def parse_solution(raw: Any) -> SolutionDocument:
    if not isinstance(raw, Mapping):
        raise DocumentError("solution: top level must be an object")
    for key in ("assignment", "loads", "objective_value", "certified_bound"):
        if key not in raw:
            raise DocumentError(f"{key}: missing field")
    assignment = raw["assignment"]
    if not isinstance(assignment, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in assignment):
        raise DocumentError("assignment: must be an array of machine indices")
    loads = raw["loads"]
    if not isinstance(loads, list):
        raise DocumentError("loads: must be an array")
    meta = raw.get("meta", {})
    if not isinstance(meta, Mapping):
        raise DocumentError("meta: must be an object")
    return SolutionDocument(
        tuple(assignment),
        tuple(parse_rational(v, f"loads[{t}]") for t, v in enumerate(loads)),
        parse_rational(raw["objective_value"], "objective_value"),
        parse_rational(raw["certified_bound"], "certified_bound"),
        dict(meta),
    )


def load_solution(path: str | Path) -> SolutionDocument:
    return parse_solution(read_json(path))

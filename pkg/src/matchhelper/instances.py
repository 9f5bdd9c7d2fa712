"""Problem instances: JSON files and the built-in example family."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .prob import DONT_CARE, FunctionTable, JointPmf, ValidationError, check_pairing


class ParseError(ValueError):
    def __init__(self, msg: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(msg + where)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class ProblemInstance:
    joint: JointPmf
    function: FunctionTable
    delta: float | None = None
    name: str = ""

    def __post_init__(self):
        check_pairing(self.joint, self.function)


def example1(delta: float) -> ProblemInstance:
    """Three-symbol sources matched with probability 1 - 4*delta/3."""
    if not 0 < delta < 0.5:
        raise ValidationError(f"example1 needs delta in (0, 0.5), got {delta}")
    d = delta
    m = np.array([[0, 1 - d, d],
                  [1 - d, 0, d],
                  [d, d, 1 - 2 * d]]) / 3
    F = FunctionTable(((DONT_CARE, 1, 4),
                       (1, DONT_CARE, 3),
                       (4, 3, 2)))
    labels = ("u1", "u2", "u3")
    return ProblemInstance(JointPmf(m, labels, ("v1", "v2", "v3")), F, delta,
                           f"example1:delta={delta:g}")


def example1_components(delta: float) -> tuple[ProblemInstance, ProblemInstance]:
    """The matched (K_M = 0) and non-matched (K_M = 1) parts of example1."""
    d = delta
    base = example1(delta)
    a = (1 - d) / (3 - 4 * d)
    matched = np.array([[0, a, 0], [a, 0, 0], [0, 0, (1 - 2 * d) / (3 - 4 * d)]])
    rest = np.array([[0, 0, 0.25], [0, 0, 0.25], [0.25, 0.25, 0]])
    lab = (base.joint.row_labels, base.joint.col_labels)
    return (ProblemInstance(JointPmf(matched, *lab), base.function, delta,
                            f"example1-km0:delta={delta:g}"),
            ProblemInstance(JointPmf(rest, *lab), base.function, delta,
                            f"example1-km1:delta={delta:g}"))


_BUILTIN = re.compile(r"^(example1(?:-km[01])?)(?::(?:δ|delta|d)=(.+))?$")


def builtin(name: str, delta: float | None = None) -> ProblemInstance:
    m = _BUILTIN.match(name.strip())
    if not m:
        raise KeyError(name)
    family, dtext = m.groups()
    if dtext is not None:
        try:
            delta = float(dtext)
        except ValueError:
            raise ValidationError(f"cannot read delta from {dtext!r}") from None
    if delta is None:
        raise ValidationError(f"{family} needs a delta (e.g. {family}:delta=0.25)")
    if family == "example1":
        return example1(delta)
    km0, km1 = example1_components(delta)
    return km0 if family.endswith("0") else km1


def is_builtin(name: str) -> bool:
    return bool(_BUILTIN.match(name.strip()))


def parse_instance(text: str, name: str = "") -> ProblemInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno) from None
    if not isinstance(doc, dict) or "matrix" not in doc or "function" not in doc:
        raise ValidationError("instance needs 'matrix' and 'function' entries")
    labels = doc.get("labels") or {}
    try:
        m = np.array(doc["matrix"], dtype=float)
    except (TypeError, ValueError):
        raise ValidationError("matrix must be a rectangular array of numbers") from None
    joint = JointPmf(m, labels.get("rows"), labels.get("cols"))
    fn = doc["function"]
    if not isinstance(fn, list) or not all(isinstance(r, list) for r in fn):
        raise ValidationError("function must be a list of rows")
    outcomes = tuple(tuple(v if not isinstance(v, list) else tuple(v) for v in row)
                     for row in fn)
    return ProblemInstance(joint, FunctionTable(outcomes), doc.get("delta"), name)


def load_instance(ref: str, delta: float | None = None) -> ProblemInstance:
    """Load a built-in name (``example1:delta=0.25``) or a JSON file path."""
    if is_builtin(ref):
        return builtin(ref, delta)
    text = Path(ref).read_text(encoding="utf-8")
    return parse_instance(text, ref)


def dump_instance(inst: ProblemInstance) -> str:
    doc = {"matrix": inst.joint.matrix.tolist(),
           "function": [list(r) for r in inst.function.outcomes]}
    if inst.joint.row_labels or inst.joint.col_labels:
        doc["labels"] = {"rows": inst.joint.row_labels, "cols": inst.joint.col_labels}
    return json.dumps(doc, indent=2)

"""Manifold spec files and built-in specs."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .circulant import CirculantMetric
from .expr import parse

__all__ = ["ManifoldSpec", "UnknownSpec", "SpecError", "BUILTIN_SPECS", "load_spec"]


class UnknownSpec(LookupError):
    pass


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class ManifoldSpec:
    A: str
    B: str
    constraints: tuple[str, ...] = ()
    sample_box: tuple[tuple[float, float], ...] = ((0.0, 1.0),) * 3
    name: str = field(default="", compare=False)

    def __post_init__(self):
        box = self.sample_box
        if len(box) != 3 or any(len(iv) != 2 for iv in box):
            raise SpecError(f"sample_box needs three [lo, hi] intervals, got {box!r}")
        if any(not float(lo) <= float(hi) for lo, hi in box):
            raise SpecError(f"empty interval in sample_box {box!r}")
        for label, text in [("A", self.A), ("B", self.B)] + [("constraint", c) for c in self.constraints]:
            try:
                parse(text)
            except ValueError as exc:
                raise SpecError(f"{label}: {exc}") from exc

    @classmethod
    def from_dict(cls, d: dict, name: str = "") -> "ManifoldSpec":
        missing = [k for k in ("A", "B") if k not in d]
        if missing:
            raise SpecError(f"spec is missing field(s) {missing}")
        kwargs = {"A": str(d["A"]), "B": str(d["B"]), "name": name,
                  "constraints": tuple(str(c) for c in d.get("constraints", ()))}
        if "sample_box" in d:
            kwargs["sample_box"] = tuple(tuple(float(v) for v in iv) for iv in d["sample_box"])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "A": self.A,
            "B": self.B,
            "constraints": list(self.constraints),
            "sample_box": [list(iv) for iv in self.sample_box],
        }

    @property
    def hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def metric(self) -> CirculantMetric:
        return CirculantMetric.from_strings(self.A, self.B, self.constraints)


BUILTIN_SPECS = {
    "paper-example": {
        "A": "2*X1",
        "B": "2*X1 + X2 + X3",
        "constraints": ["2*X1 + X2 + X3", "-(X2 + X3)"],
        "sample_box": [[0.5, 2.0], [-1.0, -0.1], [-1.0, -0.1]],
    },
    "flat": {
        "A": "2",
        "B": "1",
        "constraints": [],
        "sample_box": [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]],
    },
    "parallel-example": {
        "A": "X1 + X2 + X3 + 1",
        "B": "X1 + X2 + X3",
        "constraints": [],
        "sample_box": [[0.1, 1.0], [0.1, 1.0], [0.1, 1.0]],
    },
    # A and B depend on X1 + X2 + X3 only, so the cyclic coordinate shift is
    # an isometry whose differential is q: in V2 everywhere, not in V1.
    "cyclic-example": {
        "A": "2 + exp(X1 + X2 + X3)",
        "B": "1 + (X1 + X2 + X3)^2/4",
        "constraints": [],
        "sample_box": [[-0.5, 0.5], [-0.5, 0.5], [-0.5, 0.5]],
    },
}


def load_spec(source: str | Path) -> ManifoldSpec:
    """A built-in name from BUILTIN_SPECS or the path of a JSON spec file."""
    key = str(source)
    if key in BUILTIN_SPECS:
        return ManifoldSpec.from_dict(BUILTIN_SPECS[key], name=key)
    path = Path(source)
    if not path.exists():
        raise UnknownSpec(f"{key!r} is neither a built-in spec ({', '.join(BUILTIN_SPECS)}) nor a file")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
    if not isinstance(data, dict):
        raise SpecError(f"{path}: top level must be an object")
    return ManifoldSpec.from_dict(data, name=str(path))

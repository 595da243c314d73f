"""Serialized output: JSON documents with exact decimal strings."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

SCHEMA_VERSION = 1


def encode_float(x: float) -> str:
    """17 significant digits; parses back to the identical double."""
    return format(float(x), ".17g")


def decode_float(s: str) -> float:
    return float(s)


@dataclass
class OutputDocument:
    kind: str
    spec: str
    q_from: str | None
    q_to: str | None
    label_order: list[str]
    matrix: np.ndarray
    checks: list[dict] | None = None
    schema_version: int = SCHEMA_VERSION
    extra: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def to_dict(self) -> dict:
        d = {
            "schema_version": self.schema_version,
            "kind": self.kind,
            "spec": self.spec,
            "q_from": self.q_from,
            "q_to": self.q_to,
            "dim": self.dim,
            "label_order": list(self.label_order),
            "matrix": [[encode_float(x) for x in row] for row in np.asarray(self.matrix)],
        }
        if self.checks is not None:
            d["checks"] = self.checks
        if self.extra:
            d["extra"] = self.extra
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "OutputDocument":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {d.get('schema_version')!r}")
        m = np.array([[decode_float(x) for x in row] for row in d["matrix"]], dtype=float)
        if m.size == 0:
            m = m.reshape(0, 0)
        if m.shape != (d["dim"], d["dim"]):
            raise ValueError(f"matrix shape {m.shape} does not match dim {d['dim']}")
        return cls(d["kind"], d["spec"], d["q_from"], d["q_to"], list(d["label_order"]), m,
                   d.get("checks"), d["schema_version"], d.get("extra", {}))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "OutputDocument":
        return cls.from_dict(json.loads(text))

    def to_table(self) -> str:
        head = [f"# {self.kind} {self.spec}"]
        qs = [f"{k}={v}" for k, v in (("q_from", self.q_from), ("q_to", self.q_to)) if v is not None]
        if qs:
            head.append("# " + " ".join(qs))
        lines = head
        rows = self.extra.get("row_labels") or self.label_order or [""] * self.dim
        cols = self.extra.get("col_labels")
        if self.kind == "crystal":
            lab_w = max(len(l) for l in rows)
            for lab, row in zip(rows, self.matrix):
                terms = " ".join(f"{'+' if row[j] > 0 else '-'}{cols[j]}" for j in np.flatnonzero(row))
                lines.append(f"{lab:<{lab_w}}  {terms}")
        elif self.dim:
            width = max(len(f"{x:.6f}") for x in self.matrix.ravel())
            lab_w = max(len(l) for l in rows)
            for lab, row in zip(rows, self.matrix):
                lines.append(f"{lab:<{lab_w}}  " + " ".join(f"{x:>{width}.6f}" for x in row))
        for c in self.checks or []:
            mark = "ok  " if c["pass"] else "FAIL"
            q = f" q={c['q']}" if c.get("q") is not None else ""
            res, tol = float(c["residual"]), float(c["tolerance"])
            lines.append(f"{mark} {c['name']}{q}: {res:.3e} <= {tol:.1e}")
        if "overall" in self.extra:
            lines.append(f"overall: {'PASS' if self.extra['overall'] else 'FAIL'}")
        return "\n".join(lines) + "\n"

    def equals(self, other: "OutputDocument") -> bool:
        """Bit-exact comparison, matrix included."""
        return (self.to_dict() == other.to_dict()
                and np.array_equal(self.matrix.view(np.uint64), other.matrix.view(np.uint64)))


def checks_payload(checks) -> list[dict]:
    return [{"name": c.name, "q": None if c.q is None else encode_float(c.q),
             "residual": encode_float(c.residual), "tolerance": encode_float(c.tolerance),
             "pass": c.passed} for c in checks]


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".dktwist-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise

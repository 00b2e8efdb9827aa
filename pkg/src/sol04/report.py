"""Verification records, run configuration and report serialization."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

SIG_DIGITS = 9

# Reference labels carried in the "anchor" field of report records.
ANCHORS = {
    "group": "Eq (2.2)",
    "ambient": "Eqs (2.4)-(2.8)",
    "curvature": "Eq (2.9)",
    "gauss_codazzi": "Eqs (2.11)-(2.12)",
    "ricci": "Eq (2.13)",
    "M1_spectrum": "Eq (3.3)",
    "M1_sectional": "Eq (3.4)",
    "M1_ricci": "Eq (3.5)",
    "M1_implicit": "Prop 3.1(1)",
    "M1_tube": "Prop 3.1(4)",
    "M2_spectrum": "Eq (3.6)",
    "M2_sectional": "Eq (3.7)",
    "M2_ricci": "Eq (3.8)",
    "M2_implicit": "Prop 3.2(1)",
    "M2_geodesic": "Prop 3.2(2)",
    "M3_spectrum": "Eq (3.9)",
    "M3_sectional": "Eq (3.10)",
    "M3_ricci": "Eq (3.10)",
    "M3_implicit": "Prop 3.3(1)",
    "M4_spectrum": "Prop 3.4(2); Theorem 1.1(4)",
    "M4_sectional": "Prop 3.4(2)",
    "M4_ricci": "Prop 3.4(2)",
    "M4_implicit": "Prop 3.4(1)",
    "M4_congruence": "Prop 3.4(3)",
    "parallel": "Remark 1.1",
    "homogeneity": "Theorem 1.2",
    "angles": "Section 4",
    "case1i": "Eqs (4.19)-(4.20)",
    "case1i_immersion": "Eq (4.23); Lemma 4.5",
    "case1ii": "Eq (4.30); Lemma 4.6",
    "case1iii": "Lemma 4.7",
    "case2": "Lemma 4.9",
    "case3": "Section 4, Case III",
    "obstruction": "Eqs (4.31)-(4.33); Lemma 4.8",
    "classification": "Theorem 1.1",
}


def _fmt(x):
    if x is None:
        return None
    if isinstance(x, bool):
        return x
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return repr(x)
    return float(f"{x:.{SIG_DIGITS}g}")


@dataclass
class Check:
    """One verified quantity.

    ``value`` is what was measured.  If ``expected`` is given the check passes
    when ``|value - expected| <= bound``, otherwise when ``|value| <= bound``.
    """

    id: str
    value: float
    bound: float
    anchor: str = ""
    expected: Optional[float] = None
    passed: Optional[bool] = None

    def __post_init__(self):
        self.value = float(self.value)
        if self.passed is None:
            ref = 0.0 if self.expected is None else float(self.expected)
            self.passed = bool(math.isfinite(self.value) and abs(self.value - ref) <= self.bound)

    def as_record(self) -> dict:
        rec = {"id": self.id, "value": _fmt(self.value), "bound": _fmt(self.bound),
               "pass": self.passed, "anchor": self.anchor}
        if self.expected is not None:
            rec["expected"] = _fmt(self.expected)
        return rec


@dataclass
class VerificationReport:
    suite: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, *args, **kwargs) -> Check:
        c = args[0] if args and isinstance(args[0], Check) else Check(*args, **kwargs)
        self.checks.append(c)
        return c

    def extend(self, other: "VerificationReport") -> None:
        self.checks.extend(other.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def max_value(self, prefix: str = "") -> float:
        vals = [abs(c.value) for c in self.checks if c.id.startswith(prefix)]
        return max(vals) if vals else 0.0

    def records(self) -> list[dict]:
        return [c.as_record() for c in sorted(self.checks, key=lambda c: c.id)]

    def to_json(self) -> str:
        doc = {"suite": self.suite, "pass": self.passed, "checks": self.records()}
        return json.dumps(doc, indent=2, sort_keys=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["id", "value", "expected", "bound", "pass", "anchor"],
                           lineterminator="\n")
        w.writeheader()
        for rec in self.records():
            w.writerow(rec)
        return buf.getvalue()


@dataclass
class RunConfig:
    """Tolerances, step sizes and grids shared by the CLI and the acceptance suite."""

    tol_spectrum: float = 1e-5
    tol_ricci: float = 1e-5
    tol_sectional: float = 1e-4
    tol_minimal: float = 1e-8
    tol_implicit: float = 1e-8
    tol_gauss: float = 1e-3
    tol_codazzi: float = 1e-3
    tol_ode: float = 1e-8
    tol_ambient: float = 1e-12
    tol_geodesic: float = 1e-6
    tol_homogeneity_spectrum: float = 1e-6
    h1: float = 1e-5
    h2: float = 1e-3
    rk4_steps: int = 10_000
    r_grid: list[float] = field(default_factory=lambda: [0.0, 0.25, 0.5, 1.0, 2.0])
    samples: int = 100
    format: str = "json"
    seed: int = 0

    def __post_init__(self):
        for f in fields(self):
            if f.name.startswith("tol_") or f.name in ("h1", "h2"):
                if not getattr(self, f.name) > 0:
                    raise ValueError(f"{f.name} must be positive")
        if self.rk4_steps < 1 or self.samples < 1:
            raise ValueError("rk4_steps and samples must be >= 1")
        if self.format not in ("json", "csv"):
            raise ValueError(f"format must be json or csv, got {self.format!r}")

    def updated(self, **kw) -> "RunConfig":
        d = asdict(self)
        d.update({k: v for k, v in kw.items() if v is not None})
        return RunConfig(**d)


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines (``#`` comments) into RunConfig keyword arguments."""
    types = {f.name: f.type for f in fields(RunConfig)}
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key == "r_grid":
            out[key] = [float(v) for v in val.replace(",", " ").split()]
        elif key in ("rk4_steps", "samples", "seed"):
            out[key] = int(val)
        elif key == "format":
            out[key] = val
        else:
            out[key] = float(val)
    return out


def load_config(path: Optional[str] = None) -> RunConfig:
    """Defaults, overridden by the file named in ``SOL4_CONFIG`` (or ``path``)."""
    path = path or os.environ.get("SOL4_CONFIG")
    if not path:
        return RunConfig()
    with open(path) as fh:
        return RunConfig(**parse_config_text(fh.read()))

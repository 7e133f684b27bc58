"""Report records and their JSON form."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

SCHEMA_VERSION = "specmix/1"
LOG_BASE = 2
DEGENERATE_RHO = 1e-12
MARGIN_TOL = 1e-8

# conventions embedded in every report
CONVENTIONS = {
    "log_base_bounds": 2,
    "log_base_hoeffding": "e",
    "r_definition": "maximum degree over (k-1)-sets (hypergraphs) / common (d-1)-cell degree (complexes)",
    "inverse_bound_degree_term": "(r + alpha*n)^2",
    "lower_bound_denominator": "sqrt((1-alpha)^2 + alpha^2)",
    "partition_multiplicity": "k^(n-k)",
    "empty_parts": "admitted in mixing sweeps (both sides 0), excluded from discrepancy maximization",
    "witness_tie_break": "lexicographically least assignment string (vertex 0 first; 0=unused, i=part i)",
}


def round_sig(x: float, digits: int = 12) -> float:
    if x is None or not math.isfinite(x) or x == 0:
        return x
    return float(f"{x:.{digits}g}")


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return round_sig(x)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if hasattr(obj, "to_dict"):
        return _clean(obj.to_dict())
    return obj


@dataclass
class DiscrepancyReport:
    rho: float
    witness: list | None
    alpha: float
    mode: Any
    tuples_examined: int
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class VerificationReport:
    statement: str
    params: dict
    margins: list = field(default_factory=list)
    min_margin: float | None = None
    fitted_constant: float | None = None
    passed: bool = True
    flags: list = field(default_factory=list)
    witness: Any = None
    histogram: dict | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def report_payload(report, config: dict | None = None) -> dict:
    """JSON-ready payload; everything here is deterministic given the config."""
    body = report.to_dict() if hasattr(report, "to_dict") else dict(report)
    return _clean(
        {
            "schema": SCHEMA_VERSION,
            "conventions": CONVENTIONS,
            "config": config or {},
            "report": body,
        }
    )


def write_report(report, path, config: dict | None = None, runtime: dict | None = None) -> dict:
    doc = report_payload(report, config)
    doc["runtime"] = _clean(runtime or {})
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return doc


def load_schema(name: str = "report") -> dict:
    from importlib.resources import files

    return json.loads(files("specmix.schemas").joinpath(f"{name}.schema.json").read_text())

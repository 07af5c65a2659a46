"""Report rows shared by the energy bounds, the check harness and the CLI."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

CSV_FIELDS = ("check_name", "p", "family", "params", "size_A", "size_B",
              "lhs", "rhs", "ratio", "constraint_ok", "seed")

PASS, FAIL, REPORT_ONLY = "pass", "fail", "report-only"


@dataclass
class CheckReport:
    name: str
    p: int
    lhs: float
    rhs: Optional[float]
    constraint_ok: bool = True
    klass: str = "asymptotic"
    relation: str = ">>"
    status: str = REPORT_ONLY
    family: str = ""
    params: dict = field(default_factory=dict)
    size_A: Optional[int] = None
    size_B: Optional[int] = None
    seed: Optional[int] = None

    @property
    def ratio(self) -> Optional[float]:
        if self.rhs is None:
            return None
        if self.rhs == 0:
            return math.inf if self.lhs else math.nan
        return self.lhs / self.rhs

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    def row(self) -> dict:
        return {
            "check_name": self.name,
            "p": self.p,
            "family": self.family,
            "params": format_params(self.params),
            "size_A": "" if self.size_A is None else self.size_A,
            "size_B": "" if self.size_B is None else self.size_B,
            "lhs": fmt_num(self.lhs),
            "rhs": fmt_num(self.rhs),
            "ratio": fmt_num(self.ratio),
            "constraint_ok": "true" if self.constraint_ok else "false",
            "seed": "" if self.seed is None else self.seed,
        }


def fmt_num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return f"{x:.10g}"


def format_params(params: dict) -> str:
    return ";".join(f"{k}={fmt_num(v) if isinstance(v, float) else v}" for k, v in params.items())


def exact_report(name: str, p: int, lhs: int, rhs: int, relation: str, **kw) -> CheckReport:
    """Exact-class report; the relation is decided on integers, never floats."""
    ok = lhs <= rhs if relation == "<=" else lhs >= rhs if relation == ">=" else lhs == rhs
    return CheckReport(name, p, lhs, rhs, klass="exact", relation=relation,
                       status=PASS if ok else FAIL, **kw)


def to_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n",
                       extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def to_json(rows: Iterable[dict]) -> str:
    """JSON array of the CSV rows, field for field, with the same string values."""
    return json.dumps([{k: str(r[k]) for k in CSV_FIELDS} for r in rows], indent=1) + "\n"

"""Command-line front end: gen, compute, check, sweep and oracle.

Runs are described by a ``RunConfig``, read from a plain ``key = value`` file
(``--config``) and overridden by flags.  Exit codes: 0 success, 1 an exact
check failed or an oracle disagreed, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Callable, Optional

from . import geometry as geo
from . import harness
from .catalogue import (DEFAULT_FAMILIES, DEFAULT_PRIMES, DEFAULT_SIZES, Task, companions,
                        tasks, template_label)
from .energy import additive_energy, collision_energy, multiplicative_energy, power_energy
from .families import FamilyError, FamilySpec, ResourceError, generate
from .field import DomainError, FieldError
from .oracle_suite import OracleLimitError, run_oracles
from .report import CheckReport, fmt_num, to_csv, to_json
from .sets import ExprError, SetFileError, format_set, read_set

COMMANDS = ("gen", "compute", "check", "sweep", "oracle")
LIST_FIELDS = {"p", "families", "checks", "quantities", "sizes", "oracles"}


class ConfigError(ValueError):
    pass


USAGE_ERRORS = (ConfigError, FamilyError, ExprError, SetFileError, FieldError, ResourceError,
                harness.HarnessError, OracleLimitError, geo.GeometryError, DomainError)


@dataclass
class RunConfig:
    command: str = "check"
    p: list = field(default_factory=list)
    families: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    quantities: list = field(default_factory=list)
    sizes: list = field(default_factory=list)
    oracles: list = field(default_factory=list)
    set_file: str = ""
    b_file: str = ""
    c_file: str = ""
    seed: int = 0
    alpha: int = 1
    beta: int = 1
    d: int = 2
    lines: str = "sum"
    instances: int = 10
    max_size: int = 0
    output: str = "-"
    format: str = "csv"
    jobs: int = 1

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.lines not in ("sum", "product", "connecting"):
            raise ConfigError("lines must be sum, product or connecting")
        if self.jobs < 1:
            raise ConfigError("jobs must be positive")
        return self

    def to_text(self) -> str:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            out.append(f"{f.name} = {' '.join(map(str, v)) if f.name in LIST_FIELDS else v}")
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        cfg = cls()
        for no, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"config line {no}: expected key = value")
            k, v = (s.strip() for s in line.split("=", 1))
            cfg.set(k, v, where=f"config line {no}")
        return cfg

    def set(self, key: str, value: str, where: str = "override"):
        names = {f.name: f for f in fields(self)}
        key = key.replace("-", "_")
        if key not in names:
            raise ConfigError(f"{where}: unknown key {key!r}")
        try:
            if key in LIST_FIELDS:
                items = value.split()
                parsed = [int(x) for x in items] if key in ("p", "sizes") else items
            elif isinstance(getattr(RunConfig(), key), int):
                parsed = int(value)
            else:
                parsed = value
        except ValueError:
            raise ConfigError(f"{where}: bad value {value!r} for {key}") from None
        setattr(self, key, parsed)


# --- instances -----------------------------------------------------------------------

def _instance_tasks(cfg: RunConfig) -> list[Task]:
    primes = cfg.p or list(DEFAULT_PRIMES)
    if cfg.command == "sweep":
        return tasks(primes, cfg.families or DEFAULT_FAMILIES, cfg.sizes or DEFAULT_SIZES, cfg.seed,
                     cfg.alpha, cfg.beta, cfg.d)
    if cfg.families:
        return tasks(primes, cfg.families, cfg.sizes, cfg.seed, cfg.alpha, cfg.beta, cfg.d)
    return tasks(primes, DEFAULT_FAMILIES, cfg.sizes or DEFAULT_SIZES, cfg.seed, cfg.alpha, cfg.beta,
                 cfg.d)


def _file_instance(cfg: RunConfig, derive: bool = True) -> harness.Instance:
    """A from ``set_file``; B and C from their files, else companions (checks) or A (compute)."""
    a = read_set(cfg.set_file)
    b, c = companions(a.p, len(a), cfg.seed) if derive else (None, None)
    if cfg.b_file:
        b = read_set(cfg.b_file)
    if cfg.c_file:
        c = read_set(cfg.c_file)
    return harness.Instance(a, b, c, cfg.alpha, cfg.beta, cfg.d, family=f"file:{Path(cfg.set_file).name}",
                            seed=cfg.seed)


# --- compute -------------------------------------------------------------------------

def _lines_for(inst: harness.Instance, kind: str) -> geo.LineSet:
    if kind == "connecting":
        return geo.connecting_lines(inst.A)
    b, c = inst.b.nonzero(), inst.c
    return geo.grid_lines_sum(b, c) if kind == "sum" else geo.grid_lines_product(b, c)


def _nonvertical(lines: geo.LineSet) -> geo.LineSet:
    return geo.LineSet(lines.field, lines.m, lines.b, lines.m[:0], lines.provenance, lines.dropped)


def _line_stats(inst) -> geo.LineDirectionStats:
    return inst.cached("line_stats", lambda: geo.line_and_direction_sets(inst.A))


def _q_crossratio(inst, cfg):
    cr = geo.cross_ratio_sets(inst.A)
    return len(cr.R_inf), {"R": len(cr.R)}


def _q_distances(inst, cfg):
    ds = geo.distance_sets(inst.A)
    return len(ds.quadratic), {"cubic": len(ds.cubic)}


def _q_incidences(inst, cfg):
    lines = _nonvertical(_lines_for(inst, cfg.lines))
    q, pl = geo.collision_points_planes(lines, inst.A)
    res = geo.point_plane_incidences(q, pl, with_k=False)
    return res.count, {"lines": cfg.lines, "points": len(q), "planes": len(pl)}


def _q_with_lines(fn):
    def run(inst, cfg):
        lines = _lines_for(inst, cfg.lines)
        return fn(inst, lines), {"lines": cfg.lines, "L": len(lines)}
    return run


QUANTITIES: dict[str, Callable] = {
    "sumset_size": lambda i, c: (i.size("A+B"), {}),
    "product_size": lambda i, c: (i.size("AB"), {}),
    "energy": lambda i, c: (additive_energy(i.A, i.b), {}),
    "mult_energy": lambda i, c: (multiplicative_energy(i.A, i.b), {}),
    "power_energy": lambda i, c: (power_energy(i.A, c.d), {"d": c.d}),
    "collision_energy": _q_with_lines(lambda i, L: collision_energy(_nonvertical(L), i.A)),
    "triples": lambda i, c: (i.triples, {}),
    "lines": lambda i, c: (_line_stats(i).lines if len(i.A) > 1 else 0, {}),
    "directions": lambda i, c: (_line_stats(i).directions if len(i.A) > 1 else 0, {}),
    "crossratio": _q_crossratio,
    "distances": _q_distances,
    "incidences": _q_incidences,
    "pencil": _q_with_lines(lambda i, L: geo.pencil_stat(_nonvertical(L))),
    "max_collinear": lambda i, c: (geo.max_collinear(
        [(x, y) for x in i.A.tolist() for y in i.b.tolist()], i.p), {"grid": "AxB"}),
    "image_set_size": _q_with_lines(lambda i, L: len(geo.image_set(_nonvertical(L), i.A))),
}


def compute_rows(inst: harness.Instance, cfg: RunConfig) -> list[CheckReport]:
    rows = []
    for q in cfg.quantities:
        value, params = QUANTITIES[q](inst, cfg)
        rows.append(CheckReport(q, inst.p, value, None, family=inst.family, params=params,
                                size_A=len(inst.A), size_B=len(inst.b), seed=inst.seed))
    return rows


# --- check / sweep ---------------------------------------------------------------------

def _check_task(args) -> list[dict]:
    task, names = args
    inst = task.build()
    return [r.row() | {"_exact": r.klass == "exact", "_fail": r.failed}
            for n in names for r in harness.run_check(n, inst)]


def _run_tasks(cfg: RunConfig, task_list: list, names: list) -> list[dict]:
    work = [(t, names) for t in task_list]
    if cfg.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            chunks = list(ex.map(_check_task, work))
    else:
        chunks = [_check_task(w) for w in work]
    return [row for chunk in chunks for row in chunk]


VARIANT_KEYS = ("quantity", "expr", "kind", "grid", "lines", "config", "n", "m", "d")


def _variant(params: str) -> str:
    kv = dict(item.split("=", 1) for item in params.split(";") if "=" in item)
    return ";".join(f"{k}={kv[k]}" for k in VARIANT_KEYS if k in kv and not (k == "m" and "n" not in kv))


def sweep_summary(rows: list[dict]) -> list[dict]:
    """Exponent-fit rows per (check variant, family template, p) plus warning rows."""
    groups: dict[tuple, list] = {}
    satisfied: dict[tuple, bool] = {}
    for r in rows:
        if r["_exact"]:
            continue
        key = (r["check_name"], _variant(r["params"]), template_label(r["family"]), r["p"])
        satisfied.setdefault((r["check_name"], r["p"]), False)
        if r["constraint_ok"] != "true":
            continue
        satisfied[(r["check_name"], r["p"])] = True
        lhs = float(r["lhs"])
        if lhs > 0 and r["size_A"]:
            groups.setdefault(key, []).append((int(r["size_A"]), lhs))
    out = []
    for (name, variant, fam, p), pts in groups.items():
        pts = sorted(set(pts))
        if len({s for s, _ in pts}) < 3:
            continue
        fit = harness.exponent_fit(pts)
        params = ";".join(filter(None, [variant, f"intercept={fmt_num(fit.intercept)}",
                                        f"residual={fmt_num(fit.residual)}", f"points={fit.n}"]))
        out.append(_summary_row(f"{name}#fit", p, fam, params, fmt_num(fit.slope), "true"))
    for (name, p), ok in satisfied.items():
        if not ok:
            out.append(_summary_row(f"{name}#warning", p, "", "reason=constraint never satisfied on grid",
                                    "", "false"))
    return out


def _summary_row(name, p, family, params, lhs, ok) -> dict:
    return {"check_name": name, "p": p, "family": family, "params": params, "size_A": "", "size_B": "",
            "lhs": lhs, "rhs": "", "ratio": "", "constraint_ok": ok, "seed": "", "_exact": False,
            "_fail": False}


# --- commands --------------------------------------------------------------------------

def _emit(cfg: RunConfig, rows: list[dict], out) -> None:
    text = to_json(rows) if cfg.format == "json" else to_csv(rows)
    if cfg.output in ("", "-"):
        out.write(text)
    else:
        Path(cfg.output).write_text(text)


def cmd_gen(cfg: RunConfig, out) -> int:
    if not cfg.families:
        raise ConfigError("gen needs at least one family")
    primes = cfg.p or []
    if not primes:
        raise ConfigError("gen needs p")
    made = []
    for p in primes:
        for fam in cfg.families:
            spec = FamilySpec.parse(fam)
            made.append((p, spec, generate(spec, p)))
    if cfg.output in ("", "-"):
        for _, _, s in made:
            out.write(format_set(s))
        return 0
    target = Path(cfg.output)
    if len(made) == 1 and not target.is_dir():
        target.write_text(format_set(made[0][2]))
        return 0
    target.mkdir(parents=True, exist_ok=True)
    for p, spec, s in made:
        stem = "".join(ch if ch.isalnum() or ch in "=_" else "_" for ch in str(spec)).strip("_")
        (target / f"{stem}_p{p}.txt").write_text(format_set(s))
    return 0


def cmd_compute(cfg: RunConfig, out) -> int:
    if not cfg.quantities:
        raise ConfigError("compute needs at least one quantity")
    for q in cfg.quantities:
        if q not in QUANTITIES:
            raise ConfigError(f"unknown quantity {q!r}; known: {', '.join(QUANTITIES)}")
    if cfg.set_file:
        insts = [_file_instance(cfg, derive=False)]
    else:
        insts = []
        for t in _instance_tasks(cfg):
            built = t.build()
            insts.append(harness.Instance(built.A, family=t.family, seed=t.seed, d=t.d))
    rows = [r.row() for inst in insts for r in compute_rows(inst, cfg)]
    _emit(cfg, rows, out)
    return 0


def _check_names(cfg: RunConfig) -> list:
    names = cfg.checks or list(harness.REGISTRY)
    for n in names:
        if n not in harness.REGISTRY:
            raise ConfigError(f"unknown check {n!r}")
    return names


def cmd_check(cfg: RunConfig, out) -> int:
    names = _check_names(cfg)
    if cfg.set_file:
        inst = _file_instance(cfg)
        rows = [r.row() | {"_exact": r.klass == "exact", "_fail": r.failed}
                for n in names for r in harness.run_check(n, inst)]
    else:
        rows = _run_tasks(cfg, _instance_tasks(cfg), names)
    _emit(cfg, rows, out)
    return 1 if any(r["_fail"] for r in rows) else 0


def cmd_sweep(cfg: RunConfig, out) -> int:
    names = _check_names(cfg)
    task_list = _instance_tasks(cfg)
    rows = _run_tasks(cfg, task_list, names)
    rows += sweep_summary(rows)
    _emit(cfg, rows, out)
    return 1 if any(r["_fail"] for r in rows) else 0


def cmd_oracle(cfg: RunConfig, out) -> int:
    results = run_oracles(cfg.p or [5, 7, 101], cfg.instances, cfg.seed, cfg.oracles or None,
                          cfg.max_size or None)
    summary: dict[str, list] = {}
    for r in results:
        summary.setdefault(r.case, []).append(r)
    bad = 0
    for name, rs in summary.items():
        failures = [r for r in rs if not r.ok]
        bad += len(failures)
        out.write(f"{'FAIL' if failures else 'ok':4} {name}: {len(rs) - len(failures)}/{len(rs)}\n")
        for r in failures[:3]:
            out.write(f"     p={r.p} instance={r.index} fast={r.fast!r} oracle={r.slow!r}\n")
    out.write(f"{len(results) - bad}/{len(results)} comparisons agree\n")
    return 1 if bad else 0


COMMAND_FUNCS = {"gen": cmd_gen, "compute": cmd_compute, "check": cmd_check, "sweep": cmd_sweep,
                 "oracle": cmd_oracle}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sumprodlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="key = value run file")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any config key (lists are space separated)")
        sp.add_argument("--p", type=int, action="append", help="prime (repeatable)")
        sp.add_argument("--family", action="append", help="family spec, e.g. 'ap(start=1,step=3,size=8)'")
        sp.add_argument("--check", action="append", help="registered check name")
        sp.add_argument("--quantity", action="append", help="quantity for compute")
        sp.add_argument("--oracle", action="append", help="oracle case name")
        sp.add_argument("--sizes", type=int, nargs="+", help="size grid")
        sp.add_argument("--set-file", help="read A from a set file")
        sp.add_argument("--b-file", help="read B from a set file")
        sp.add_argument("--c-file", help="read C from a set file")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--d", type=int)
        sp.add_argument("--alpha", type=int)
        sp.add_argument("--beta", type=int)
        sp.add_argument("--lines", choices=("sum", "product", "connecting"))
        sp.add_argument("--instances", type=int)
        sp.add_argument("--output", "-o")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--jobs", type=int)
        sp.add_argument("--save-config", help="write the effective config to this file")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.from_text(Path(ns.config).read_text()) if ns.config else RunConfig()
    cfg.command = ns.command
    for item in ns.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        cfg.set(*item.split("=", 1))
    flat = {"p": ns.p, "families": ns.family, "checks": ns.check, "quantities": ns.quantity,
            "oracles": ns.oracle, "sizes": ns.sizes, "set_file": ns.set_file, "b_file": ns.b_file, "c_file": ns.c_file, "seed": ns.seed,
            "d": ns.d, "alpha": ns.alpha, "beta": ns.beta, "lines": ns.lines,
            "instances": ns.instances, "output": ns.output, "format": ns.format, "jobs": ns.jobs}
    for k, v in flat.items():
        if v is not None:
            setattr(cfg, k, v)
    return cfg.validate()


def main(argv: Optional[list] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0) and 2
    try:
        cfg = config_from_args(ns)
        if ns.save_config:
            Path(ns.save_config).write_text(cfg.to_text())
        return COMMAND_FUNCS[cfg.command](cfg, out)
    except USAGE_ERRORS as e:
        print(f"sumprodlab: error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"sumprodlab: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Declarative sweeps over the spin-star model, written to CSV.

A config is a JSON object; ``ExperimentConfig.from_dict`` documents the
accepted keys.  Every run is deterministic for a given config and build:
grid points are evaluated (optionally in a process pool) and written back
in canonical grid order.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Optional, Sequence

import numpy as np

from . import __version__, oracle
from .dynamics import E_KIND, LE_KIND, QuenchSpec, entanglement_series, long_time_average
from .entanglement import (Bipartition, edd_entanglement_gap, localizable_entanglement,
                           log_negativity, trace_out_center)
from .fitting import FitModel, fit
from .hamiltonian import SpinStarParams, build_block
from .spectra import (ND, classify_gap, critical_periphery_size, diagonalize, energy_gap,
                      ground_manifold, solve)

log = logging.getLogger(__name__)

EXPERIMENTS = ("spectrum", "gap-scan", "npc-map", "static-entanglement", "edd-gap",
               "dynamics", "fit-report", "oracle-check")

META_COLUMNS = ["n0", "np", "n_prime", "gamma", "delta", "sign", "h", "deg_tol", "seed",
                "tool_version"]


class ConfigError(ValueError):
    """Invalid experiment config; ``problems`` lists every offending field."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("invalid config: " + "; ".join(problems))


def parse_sizes(spec) -> list[int]:
    """Sizes from a list, ``"lo:hi:step"`` (inclusive) or ``{"range": [lo, hi, step]}``."""
    if isinstance(spec, int):
        return [spec]
    if isinstance(spec, str):
        parts = [int(p) for p in spec.split(":")]
        lo, hi, step = (parts + [1])[:3] if len(parts) >= 2 else (parts[0], parts[0], 1)
        return list(range(lo, hi + 1, step))
    if isinstance(spec, dict) and "range" in spec:
        lo, hi, *rest = spec["range"]
        return list(range(int(lo), int(hi) + 1, int(rest[0]) if rest else 1))
    return [int(x) for x in spec]


def _floats(spec) -> list[float]:
    if isinstance(spec, (int, float)):
        return [float(spec)]
    return [float(x) for x in spec]


def n_prime_values(rule, np_: int) -> list[int]:
    """Partition sizes for one periphery: ``"half"``, ``"all"``, an explicit list, or ``{"ratio": r}``."""
    if rule == "half":
        return [np_ // 2]
    if rule == "all":
        return list(range(1, np_ // 2 + 1))
    if isinstance(rule, dict) and "ratio" in rule:
        return [max(1, min(np_ // 2, int(round(rule["ratio"] * np_))))]
    return [int(k) for k in rule if 1 <= int(k) <= np_ // 2]


@dataclass
class ExperimentConfig:
    experiment: str
    gamma: list[float] = field(default_factory=lambda: [0.0])
    delta: list[float] = field(default_factory=lambda: [0.0])
    np: list[int] = field(default_factory=lambda: [2])
    n0: list[int] = field(default_factory=lambda: [1])
    tie_n0: bool = False
    n_prime: Any = "half"
    sign: int = 1
    h: float = 0.0
    deg_tol: float = 1e-4
    measured: bool = True
    threshold: float = 1e-4
    np_max: int = 1000
    force_pair: bool = True
    quench: Optional[QuenchSpec] = None
    quantities: list[str] = field(default_factory=lambda: [E_KIND])
    input: Optional[str] = None
    fits: list[dict] = field(default_factory=list)
    oracle_samples: int = 20
    output: str = "results"
    seed: int = 0
    workers: int = 1

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        """Build and validate a config.

        Keys: ``experiment`` (required), ``gamma``, ``delta`` (number or list),
        ``np``, ``n0`` (list, ``"lo:hi:step"``, ``{"range": [...]}``; ``n0`` may
        also be ``"np"`` to tie the two sizes), ``n_prime`` (``"half"``,
        ``"all"``, list, ``{"ratio": r}``), ``sign``, ``h``, ``deg_tol``,
        ``measured``, ``threshold``, ``np_max``, ``force_pair``, ``quench``
        (``{"h", "t_max", "dt", "avg_window"}``), ``quantities``, ``input``,
        ``fits``, ``oracle_samples``, ``output``, ``seed``, ``workers``.
        """
        problems = []
        d = dict(d)
        known = set(cls.__dataclass_fields__)
        for key in d:
            if key not in known:
                problems.append(f"unknown field {key!r}")
        kw: dict[str, Any] = {}
        for key in known & set(d):
            kw[key] = d[key]

        def conv(name, fn):
            if name in kw:
                try:
                    kw[name] = fn(kw[name])
                except (TypeError, ValueError) as exc:
                    problems.append(f"{name}: {exc}")

        conv("gamma", _floats)
        conv("delta", _floats)
        conv("np", parse_sizes)
        if kw.get("n0") == "np":
            kw["n0"], kw["tie_n0"] = [0], True
        conv("n0", parse_sizes)
        if "quench" in kw and kw["quench"] is not None:
            try:
                kw["quench"] = QuenchSpec(**kw["quench"])
            except (TypeError, ValueError) as exc:
                problems.append(f"quench: {exc}")
        if "experiment" not in kw:
            problems.append("experiment: missing")
            kw["experiment"] = None
        bad = {p.split(":")[0] for p in problems}
        cfg = cls(**{k: v for k, v in kw.items() if k not in bad or k == "experiment"})
        try:
            cfg.validate()
        except ConfigError as exc:
            problems += [p for p in exc.problems if p.split(":")[0] not in bad]
        if problems:
            raise ConfigError(problems)
        return cfg

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def validate(self) -> None:
        problems = []
        if self.experiment is not None and self.experiment not in EXPERIMENTS:
            problems.append(f"experiment: {self.experiment!r} not one of {', '.join(EXPERIMENTS)}")
        for name in ("gamma", "delta"):
            vals = getattr(self, name)
            if not vals:
                problems.append(f"{name}: empty grid")
            elif any(not -1 <= v <= 1 for v in vals):
                problems.append(f"{name}: values must lie in [-1, 1]")
        if not self.np or any(n < 1 for n in self.np):
            problems.append("np: needs positive sizes")
        if not self.tie_n0 and (not self.n0 or any(n < 1 for n in self.n0)):
            problems.append("n0: needs positive sizes")
        if self.sign not in (1, -1):
            problems.append("sign: must be +1 or -1")
        if self.h < 0:
            problems.append("h: must be non-negative")
        if not self.deg_tol > 0:
            problems.append("deg_tol: must be positive")
        if not (self.n_prime in ("half", "all") or isinstance(self.n_prime, (list, dict))):
            problems.append("n_prime: expected 'half', 'all', a list or {'ratio': r}")
        if isinstance(self.n_prime, dict) and not 0 < self.n_prime.get("ratio", -1) <= 0.5:
            problems.append("n_prime: ratio must lie in (0, 0.5]")
        if self.experiment == "dynamics" and self.quench is None:
            problems.append("quench: required for dynamics")
        if any(q not in (E_KIND, LE_KIND) for q in self.quantities):
            problems.append("quantities: entries must be 'E' or '<E>'")
        if self.experiment == "fit-report":
            if not self.input:
                problems.append("input: required for fit-report")
            for i, f in enumerate(self.fits):
                if f.get("model") not in {m.value for m in FitModel} | {m.name for m in FitModel}:
                    problems.append(f"fits[{i}].model: unknown model {f.get('model')!r}")
        if self.workers < 1:
            problems.append("workers: must be at least 1")
        if problems:
            raise ConfigError(problems)

    def to_json(self) -> str:
        """Canonical JSON of everything that affects results (``workers`` does not)."""
        d = asdict(self)
        d.pop("workers")
        return json.dumps(d, sort_keys=True, default=str)

    def points(self) -> list[SpinStarParams]:
        """Parameter points in canonical order: gamma, delta, n0, np."""
        out = []
        n0s = [None] if self.tie_n0 else self.n0
        for g, dl, n0, n in itertools.product(self.gamma, self.delta, n0s, self.np):
            out.append(SpinStarParams(n0=n if n0 is None else n0, np=n, gamma=g, delta=dl,
                                      sign=self.sign, h=self.h))
        return out


# --- CSV ---------------------------------------------------------------------

def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return repr(v) if math.isfinite(v) else str(v)
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def write_csv(path: Path, rows: Sequence[dict], columns: Sequence[str], meta: dict) -> Path:
    """CSV with a commented metadata header; byte-identical for identical input."""
    buf = io.StringIO()
    for k in sorted(meta):
        buf.write(f"# {k}: {meta[k]}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r.get(c)) for c in columns])
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue())
    return path


def read_csv(path) -> list[dict]:
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def _meta_row(cfg: ExperimentConfig, p: Optional[SpinStarParams], n_prime=None) -> dict:
    row = {"sign": cfg.sign, "deg_tol": cfg.deg_tol, "seed": cfg.seed, "tool_version": __version__,
           "n_prime": n_prime, "h": cfg.h}
    if p is not None:
        row.update(n0=p.n0, np=p.np, gamma=p.gamma, delta=p.delta, sign=p.sign, h=p.h)
    return row


def _map(fn: Callable, tasks: list, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks))


def _guard(fn: Callable, task) -> list[dict]:
    """Run one grid point; failures become a tagged row instead of aborting the run."""
    try:
        return fn(task)
    except Exception as exc:  # noqa: BLE001 - recorded per row
        cfg, p = task[0], task[1]
        row = _meta_row(cfg, p)
        row["error"] = f"{type(exc).__name__}: {exc}"
        log.warning("grid point %s failed: %s", p, exc)
        return [row]


# --- tasks (module level so they pickle) -----------------------------------------

def _spectrum_task(task) -> list[dict]:
    cfg, p = task
    spec = diagonalize(build_block(p))
    man = ground_manifold(spec, p, cfg.deg_tol)
    return [dict(_meta_row(cfg, p), index=i, energy=float(e), kind=man.kind if i == 0 else None)
            for i, e in enumerate(spec.eigenvalues)]


def _gap_task(task) -> list[dict]:
    cfg, p = task
    e0, e1, gap = energy_gap(p)
    return [dict(_meta_row(cfg, p), E0=e0, E1=e1, gap=gap, kind=classify_gap(gap, cfg.deg_tol))]


def _npc_task(task) -> list[dict]:
    cfg, p = task
    npc = critical_periphery_size(p.gamma, p.delta, cfg.threshold, cfg.np_max, cfg.sign)
    row = _meta_row(cfg, p)
    row.update(n0=1, np=None, npc=npc, threshold=cfg.threshold, np_max=cfg.np_max)
    return [row]


def _static_task(task) -> list[dict]:
    cfg, p = task
    man = solve(p, cfg.deg_tol)
    rho = man.density()
    ps = trace_out_center(rho, p)
    rows = []
    for k in n_prime_values(cfg.n_prime, p.np):
        bp = Bipartition(p.np, k)
        r = log_negativity(ps, bp)
        base = dict(_meta_row(cfg, p, k), ground=man.kind, gap=man.gap,
                    rule="pure" if man.kind == ND else "tgs")
        rows.append(dict(base, kind="partial-trace", value_negativity=r.negativity,
                         value_log_negativity=r.log_negativity))
        if cfg.measured and p.n0 == 1:
            le = localizable_entanglement(rho, p, bp)
            rows.append(dict(base, kind="measured-average", value_negativity=le.negativity,
                             value_log_negativity=le.log_negativity,
                             theta=le.setting.theta, phi=le.setting.phi))
    return rows


def _edd_task(task) -> list[dict]:
    cfg, p = task
    man = solve(p, math.inf if cfg.force_pair else cfg.deg_tol)
    real_kind = solve(p, cfg.deg_tol).kind if cfg.force_pair else man.kind
    rows = []
    for k in n_prime_values(cfg.n_prime, p.np):
        dE, dLE = edd_entanglement_gap(p, Bipartition(p.np, k), man, force=cfg.force_pair)
        rows.append(dict(_meta_row(cfg, p, k), ground=real_kind, gap=man.gap, dE=dE, dLE=dLE))
    return rows


def _dynamics_task(task) -> list[dict]:
    cfg, p = task
    q = cfg.quench
    rows = []
    for k in n_prime_values(cfg.n_prime, p.np):
        bp = Bipartition(p.np, k)
        for quantity in cfg.quantities:
            s = entanglement_series(p.replace(h=0.0), bp, q, quantity)
            avg = long_time_average(s, q.avg_window)
            meta = dict(_meta_row(cfg, p, k), h=q.h)
            for t, v in zip(s.times, s.values):
                rows.append(dict(meta, record="series", t=float(t), value=float(v), quantity=quantity))
            rows.append(dict(meta, record="average", value=avg, quantity=quantity,
                             t_max=q.t_max, dt=q.dt, avg_window=q.avg_window))
    return rows


# --- oracle check --------------------------------------------------------------

ORACLE_SIZES = [(1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (1, 7), (1, 8), (2, 2), (2, 3), (3, 3)]


def oracle_rows(seed: int = 0, samples: int = 20, sizes=ORACLE_SIZES,
                energy_tol: float = 1e-9, ent_tol: float = 1e-8) -> list[dict]:
    """Compare the Dicke pipeline against the 2^n oracle on seeded random points."""
    rng = np.random.default_rng(seed)
    points = rng.uniform(0.0, 1.0, size=(samples, 2))
    rows = []
    for (g, dl), (n0, n) in itertools.product(points, sizes):
        p = SpinStarParams(n0=n0, np=n, gamma=float(g), delta=float(dl))
        man = solve(p)
        w, rho = oracle.ground_object(p)
        base = dict(n0=n0, np=n, gamma=p.gamma, delta=p.delta, sign=p.sign, h=0.0, seed=seed,
                    deg_tol=1e-4, tool_version=__version__)
        err = abs(w[0] - man.energies[0])
        rows.append(dict(base, check="ground_energy", dicke=man.energies[0], oracle=w[0],
                         abs_err=err, passed=err <= energy_tol))
        ps = trace_out_center(man.density(), p)
        rho_p = oracle.trace_center(rho, n0, n)
        for k in range(1, n // 2 + 1):
            a = log_negativity(ps, Bipartition(n, k)).log_negativity
            b = oracle.log_negativity(rho_p, n, k)
            rows.append(dict(base, n_prime=k, check="log_negativity", dicke=a, oracle=b,
                             abs_err=abs(a - b), passed=abs(a - b) <= ent_tol))
    return rows


# --- fit report ----------------------------------------------------------------

FIT_COLUMNS = ["figure_tag", "model", "window", "a", "b", "m", "rmse", "n_points", "converged",
               "ref_a", "ref_b", "ref_m"] + META_COLUMNS


def _matches(row: dict, where: dict) -> bool:
    for k, v in where.items():
        cell = row.get(k, "")
        if isinstance(v, str):
            if cell != v:
                return False
        elif cell == "" or not math.isclose(float(cell), float(v), rel_tol=0, abs_tol=1e-12):
            return False
    return True


def fit_rows(rows: list[dict], fits: list[dict], seed: int = 0) -> list[dict]:
    """Fit each requested model to a filtered ``(x, y)`` column pair.

    A fit spec has ``tag``, ``model``, ``x``, ``y``, optional ``where``
    (column filters), ``window`` ``[lo, hi]`` on x, ``parity`` (``"even"`` /
    ``"odd"`` on x) and ``reference`` ``[a, b, m]``.
    """
    out = []
    for f in fits:
        model = FitModel(f["model"]) if f["model"] in {m.value for m in FitModel} else FitModel[f["model"]]
        lo, hi = f.get("window", [-math.inf, math.inf])
        lo = -math.inf if lo is None else lo
        hi = math.inf if hi is None else hi
        data = []
        for r in rows:
            if r.get("error") or not _matches(r, f.get("where", {})):
                continue
            x, y = float(r[f["x"]]), float(r[f["y"]])
            if not lo <= x <= hi:
                continue
            if f.get("parity") == "even" and int(x) % 2:
                continue
            if f.get("parity") == "odd" and not int(x) % 2:
                continue
            data.append((x, y))
        where = f.get("where", {})
        row = {c: where.get(c) for c in META_COLUMNS}
        row.update(figure_tag=f.get("tag", ""), model=model.name, window=f"[{lo}, {hi}]",
                   seed=seed, tool_version=__version__)
        ref = f.get("reference") or [None] * 3
        row.update(ref_a=ref[0], ref_b=ref[1], ref_m=ref[2] if len(ref) > 2 else None)
        try:
            r = fit(model, data)
            row.update(a=r.a, b=r.b, m=r.m, rmse=r.rmse, n_points=r.n_points, converged=r.converged)
        except ValueError as exc:
            row.update(n_points=len(data), converged=False, error=str(exc))
        out.append(row)
    return out


# --- runner --------------------------------------------------------------------

_TASKS = {
    "spectrum": (_spectrum_task, ["index", "energy", "kind"]),
    "gap-scan": (_gap_task, ["E0", "E1", "gap", "kind"]),
    "npc-map": (_npc_task, ["npc", "threshold", "np_max"]),
    "static-entanglement": (_static_task, ["ground", "rule", "gap", "kind", "value_negativity",
                                           "value_log_negativity", "theta", "phi"]),
    "edd-gap": (_edd_task, ["ground", "gap", "dE", "dLE"]),
    "dynamics": (_dynamics_task, ["record", "t", "value", "quantity", "t_max", "dt", "avg_window"]),
}


class _Guarded:
    def __init__(self, fn):
        self.fn = fn

    def __call__(self, task):
        return _guard(self.fn, task)


def _tasks(cfg: ExperimentConfig) -> list:
    if cfg.experiment == "npc-map":
        pts = [SpinStarParams(1, 1, g, dl, cfg.sign) for g in cfg.gamma for dl in cfg.delta]
    else:
        pts = cfg.points()
    return [(cfg, p) for p in pts]


def collect(cfg: ExperimentConfig) -> list[dict]:
    """Evaluate every grid point and return rows in canonical order."""
    fn, _ = _TASKS[cfg.experiment]
    results = _map(_Guarded(fn), _tasks(cfg), cfg.workers)
    return [row for rows in results for row in rows]


def run(cfg: ExperimentConfig, out_dir, emit_plot_script: bool = False) -> list[Path]:
    """Execute a config and write its CSV file(s) into ``out_dir``."""
    out_dir = Path(out_dir)
    meta = {"tool": f"dicke_star {__version__}", "experiment": cfg.experiment,
            "config": cfg.to_json()}
    stem = out_dir / cfg.output
    if cfg.experiment == "oracle-check":
        rows = oracle_rows(cfg.seed, cfg.oracle_samples)
        cols = META_COLUMNS + ["check", "dicke", "oracle", "abs_err", "passed"]
        paths = [write_csv(stem.with_suffix(".csv"), rows, cols, meta)]
    elif cfg.experiment == "fit-report":
        rows = fit_rows(read_csv(cfg.input), cfg.fits, cfg.seed)
        paths = [write_csv(stem.with_suffix(".csv"), rows, FIT_COLUMNS + ["error"], meta)]
    else:
        rows = collect(cfg)
        cols = META_COLUMNS + _TASKS[cfg.experiment][1] + ["error"]
        paths = [write_csv(stem.with_suffix(".csv"), rows, cols, meta)]
    if emit_plot_script:
        paths.append(write_plot_script(paths[0], cfg.experiment))
    return paths


_PLOT_AXES = {
    "gap-scan": ("np", "gap", ["gamma", "delta"], True),
    "npc-map": ("gamma", "npc", ["delta"], False),
    "static-entanglement": ("np", "value_log_negativity", ["gamma", "kind", "n_prime"], False),
    "edd-gap": ("np", "dE", ["gamma", "delta"], True),
    "dynamics": ("t", "value", ["np", "quantity"], False),
    "spectrum": ("index", "energy", ["np"], False),
    "oracle-check": ("np", "abs_err", ["check"], True),
    "fit-report": ("b", "a", ["model"], False),
}


def write_plot_script(csv_path: Path, experiment: str) -> Path:
    """Write a standalone matplotlib script that plots ``csv_path``."""
    x, y, group, logy = _PLOT_AXES[experiment]
    script = f'''"""Plot {csv_path.name}. Requires pandas and matplotlib."""
import pandas as pd
import matplotlib.pyplot as plt

df = pd.read_csv("{csv_path.name}", comment="#")
if "record" in df:
    df = df[df["record"] == "series"]
fig, ax = plt.subplots()
keys = [k for k in {group!r} if k in df and df[k].nunique() > 1]
groups = df.groupby(keys) if keys else [("all", df)]
for key, sub in groups:
    ax.plot(sub["{x}"], sub["{y}"], "o-", ms=3, label=str(key))
ax.set_xlabel("{x}")
ax.set_ylabel("{y}")
{"ax.set_yscale('log')" if logy else ""}
ax.legend(fontsize="small")
fig.savefig("{csv_path.stem}.png", dpi=150)
'''
    path = csv_path.with_name(f"plot_{csv_path.stem}.py")
    path.write_text(script)
    return path

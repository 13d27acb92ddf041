"""Seeded Monte-Carlo sweeps over the three evaluation scenarios."""

from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np
from scipy import stats

from .assignment import AssignmentResult, SolverOptions
from .baselines import get_algorithm, run_algorithm
from .errors import InsufficientSamples, InvalidArgument
from .rf import ChannelModel, rf_eligible
from .topology import build_rate_table, generate_cell, split_catalog

ALL_ALGORITHMS = ("donsa_wbz_lmn", "dorsa_wbz_l", "sorsa_w_l", "ditosa_l")
SWEEP_UNITS = {"n_sources": "count", "cell_radius": "m", "requested_bw": "hz"}


@dataclass(frozen=True)
class ScenarioSpec:
    id: str
    sweep_variable: str
    sweep_points: tuple[float, ...]
    n_sources: int = 150
    n_relays: int = 150
    n_machines: int | None = None  # when set, relays = n_machines - n_sources
    n_bs: int = 1
    cell_radius: float = 500.0
    requested_bw: float = 200e3
    runs: int = 200
    algorithms: tuple[str, ...] = ALL_ALGORITHMS
    base_seed: int = 0

    def __post_init__(self):
        if self.sweep_variable not in SWEEP_UNITS:
            raise InvalidArgument(f"sweep_variable must be one of {sorted(SWEEP_UNITS)}")
        pts = list(self.sweep_points)
        if not pts:
            raise InvalidArgument("sweep_points must be non-empty")
        diffs = np.diff(pts)
        if not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise InvalidArgument("sweep_points must be strictly monotone")
        if self.runs < 1:
            raise InvalidArgument("runs must be >= 1")
        for name in self.algorithms:
            get_algorithm(name)

    def point_params(self, value) -> dict:
        p = {"n_sources": self.n_sources, "n_relays": self.n_relays,
             "cell_radius": self.cell_radius, "requested_bw": self.requested_bw}
        p[self.sweep_variable] = value
        p["n_sources"] = int(p["n_sources"])
        if self.n_machines is not None:
            p["n_relays"] = self.n_machines - p["n_sources"]
            if p["n_relays"] < 0:
                raise InvalidArgument("n_sources exceeds n_machines")
        return p


PRESETS = {
    "s1": ScenarioSpec("s1", "n_sources", tuple(range(30, 300, 30)), n_machines=300),
    "s2": ScenarioSpec("s2", "cell_radius", tuple(float(r) for r in range(100, 1001, 100))),
    "s3": ScenarioSpec("s3", "requested_bw",
                       (20e3, 50e3, 100e3, 200e3, 500e3, 1e6, 2e6, 5e6, 10e6, 20e6)),
}


def preset(name: str, **overrides) -> ScenarioSpec:
    try:
        return replace(PRESETS[name.lower()], **overrides)
    except KeyError:
        raise InvalidArgument(f"unknown scenario {name!r}; choose from {sorted(PRESETS)}") from None


def run_seed(base_seed: int, point_index: int, run_index: int) -> np.random.SeedSequence:
    """Independent stream per (point, run); adding points leaves others unchanged."""
    return np.random.SeedSequence([base_seed, point_index, run_index])


def compute_adr(result: AssignmentResult, n_sources: int) -> float:
    """Mean rate over all sources, unmatched ones counted as 0."""
    if n_sources < 1:
        raise InvalidArgument("n_sources must be >= 1")
    return result.objective_total / n_sources


def confidence_interval(samples, level: float = 0.95) -> tuple[float, float]:
    """Student-t interval: returns ``(mean, halfwidth as % of mean)``."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise InsufficientSamples("need at least two samples")
    mean = math.fsum(x) / x.size
    if np.all(x == x[0]):
        return mean, 0.0
    sem = float(np.std(x, ddof=1)) / math.sqrt(x.size)
    half = float(stats.t.ppf(0.5 + level / 2.0, x.size - 1)) * sem
    if half == 0.0:
        return mean, 0.0
    return mean, 100.0 * half / mean


def eligible_rf_count(catalog, requested_bw: float) -> tuple[int, int]:
    m2m, m2b = split_catalog(catalog)
    return (sum(rf_eligible(rf, requested_bw) for rf in m2m),
            sum(rf_eligible(rf, requested_bw) for rf in m2b))


@dataclass
class MetricsReport:
    """Aggregated metrics; ``*_runs[alg]`` arrays are shaped (points, runs)."""

    scenario: ScenarioSpec
    sweep_values: list[float]
    adr_runs: dict[str, np.ndarray]
    nus_runs: dict[str, np.ndarray]
    aet_runs: dict[str, np.ndarray]
    capacity: dict[str, list[int]]
    eligible_rfs: list[tuple[int, int]]

    @property
    def algorithms(self) -> list[str]:
        return list(self.adr_runs)

    def _mean(self, table, alg):
        return [math.fsum(row) / len(row) for row in table[alg]]

    def adr(self, alg: str) -> list[float]:
        return self._mean(self.adr_runs, alg)

    def nus(self, alg: str) -> list[float]:
        return self._mean(self.nus_runs, alg)

    def aet_ms(self, alg: str) -> list[float]:
        return self._mean(self.aet_runs, alg)

    def ci_pct(self, table: str, alg: str) -> list[float | None]:
        rows = getattr(self, f"{table}_runs")[alg]
        if rows.shape[1] < 2:
            return [None] * len(rows)
        return [confidence_interval(row)[1] for row in rows]


def _run_once(job):
    spec, catalog, cm, options, point_index, run_index, value = job
    p = spec.point_params(value)
    rng = np.random.default_rng(run_seed(spec.base_seed, point_index, run_index))
    topo = generate_cell(p["n_sources"], p["n_relays"], spec.n_bs, p["cell_radius"],
                         p["requested_bw"], rng)
    table = build_rate_table(topo, catalog, cm, rng)
    out = {}
    for name in spec.algorithms:
        t0 = time.perf_counter()
        res = run_algorithm(get_algorithm(name), topo, table, catalog, options)
        elapsed = (time.perf_counter() - t0) * 1e3
        adr = compute_adr(res, p["n_sources"]) if p["n_sources"] else 0.0
        out[name] = (adr, res.unmatched, elapsed, spec.n_bs * res.quota.total)
    return out


def run_scenario(spec: ScenarioSpec, catalog, cm: ChannelModel,
                 options: SolverOptions | None = None, jobs: int = 1) -> MetricsReport:
    """Paired sweep: every algorithm sees the same topology and fading per run."""
    options = options or SolverOptions()
    pts = list(spec.sweep_points)
    jobs_list = [(spec, catalog, cm, options, pi, ri, v)
                 for pi, v in enumerate(pts) for ri in range(spec.runs)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_once, jobs_list, chunksize=max(1, spec.runs // jobs)))
    else:
        results = [_run_once(j) for j in jobs_list]

    shape = (len(pts), spec.runs)
    adr = {a: np.zeros(shape) for a in spec.algorithms}
    nus = {a: np.zeros(shape) for a in spec.algorithms}
    aet = {a: np.zeros(shape) for a in spec.algorithms}
    cap = {a: [0] * len(pts) for a in spec.algorithms}
    for (_, _, _, _, pi, ri, _), out in zip(jobs_list, results):
        for a, (x, u, t, c) in out.items():
            adr[a][pi, ri], nus[a][pi, ri], aet[a][pi, ri] = x, u, t
            cap[a][pi] = c
    elig = [eligible_rf_count(catalog, spec.point_params(v)["requested_bw"]) for v in pts]
    return MetricsReport(spec, pts, adr, nus, aet, cap, elig)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def metric_csv(report: MetricsReport, metric: str) -> str:
    unit = {"adr": "bits_per_s", "nus": "count", "aet": "ms"}[metric]
    algs = report.algorithms
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    var = report.scenario.sweep_variable
    w.writerow([f"sweep_value_{var}_{SWEEP_UNITS[var]}"]
               + [f"{a}_{unit}" for a in algs] + [f"{a}_ci_pct" for a in algs])
    means = {a: getattr(report, "aet_ms" if metric == "aet" else metric)(a) for a in algs}
    cis = {a: report.ci_pct(metric, a) for a in algs}
    for i, v in enumerate(report.sweep_values):
        w.writerow([_fmt(v)] + [_fmt(means[a][i]) for a in algs] + [_fmt(cis[a][i]) for a in algs])
    return buf.getvalue()


def capacity_csv(report: MetricsReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    var = report.scenario.sweep_variable
    w.writerow([f"sweep_value_{var}_{SWEEP_UNITS[var]}", "eligible_m2m_count", "eligible_m2b_count"]
               + [f"{a}_capacity_count" for a in report.algorithms])
    for i, v in enumerate(report.sweep_values):
        m, b = report.eligible_rfs[i]
        w.writerow([_fmt(v), m, b] + [report.capacity[a][i] for a in report.algorithms])
    return buf.getvalue()


def read_metric_csv(path) -> dict[str, list[float | None]]:
    """Parse a metric CSV back into columns (empty cells become ``None``)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return {h: [float(r[i]) if r[i] != "" else None for r in body] for i, h in enumerate(header)}


# Files compared byte-for-byte across reruns; aet.csv holds wall-clock timings.
DETERMINISTIC_FILES = ("adr.csv", "nus.csv", "capacity.csv")


def emit_results(report: MetricsReport, out_dir, manifest: dict | None = None) -> list[Path]:
    """Write CSVs, ``manifest.json``, an SVG figure and a script that redraws it."""
    import json

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for metric in ("adr", "nus", "aet"):
        path = out / f"{metric}.csv"
        path.write_text(metric_csv(report, metric))
        written.append(path)
    path = out / "capacity.csv"
    path.write_text(capacity_csv(report))
    written.append(path)

    doc = dict(manifest or {})
    doc.setdefault("manifest", {})
    doc["manifest"] = {
        **doc["manifest"],
        "code_version": _version(),
        "scenario": asdict(report.scenario),
        "seed_schedule": "numpy SeedSequence([base_seed, point_index, run_index])",
        "files": [p.name for p in written] + ["adr_nus.svg", "plot_results.py"],
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n")
    written.append(path)

    script = out / "plot_results.py"
    script.write_text(PLOT_SCRIPT)
    written.append(script)
    if len(report.sweep_values):
        plot_folder(out)
        written.append(out / "adr_nus.svg")
    return written


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(type(o))


def _version() -> str:
    from . import __version__

    return __version__


PLOT_SCRIPT = '''"""Redraw adr_nus.svg from the CSVs in this folder."""
import sys

from donsa.experiments import plot_folder

plot_folder(sys.argv[1] if len(sys.argv) > 1 else ".")
'''


def _load_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def plot_folder(folder) -> None:
    """Render ADR and NUS versus the sweep variable as SVG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    folder = Path(folder)
    with matplotlib.rc_context({"svg.hashsalt": "donsa"}):
        fig, axes = plt.subplots(1, 2, figsize=(10, 4))
        for ax, name, label in zip(axes, ("adr", "nus"), ("ADR (bits/s)", "NUS")):
            header, body = _load_csv(folder / f"{name}.csv")
            x = [float(r[0]) for r in body]
            algs = [h for h in header[1:] if not h.endswith("_ci_pct")]
            for i, h in enumerate(algs, start=1):
                alg = h.removesuffix("_bits_per_s").removesuffix("_count")
                ax.plot(x, [float(r[i]) for r in body], marker="o", label=alg)
            ax.set_xlabel(header[0])
            ax.set_ylabel(label)
            ax.grid(True, alpha=0.3)
        axes[0].legend(fontsize=7)
        fig.tight_layout()
        fig.savefig(folder / "adr_nus.svg", metadata={"Date": None})
        plt.close(fig)


def default_jobs() -> int:
    return os.cpu_count() or 1

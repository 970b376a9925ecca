"""End-to-end runs: plan, measure (exactly or by sampling), assemble, denoise, report."""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import __version__
from .denoise import DENOISE_MODES, ThresholdParams, denoise
from .entropy import EntropyReport, Quantity, bootstrap, entropy_quantities
from .fermion import DIAGONAL_IDS
from .ordm import Ordm1, Ordm2, assemble_1ordm, assemble_2ordm, dumps, element_values, required_positions
from .planner import MeasurementPlan, Target, default_targets, plan
from .state import (
    NoiseModel,
    ShotTable,
    build_state,
    derive_rng,
    estimate_expectations,
    exact_expectations,
    load_fixture,
    sample_set,
)

OUTPUT_ENV = "ORBENT_OUTPUT_DIR"
DEFAULT_P = 0.02


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    fixture: str = "singlet-image-12"
    ssr: bool = True
    shots: int = 10_000
    p: float = DEFAULT_P
    seed: int = 0
    mode: str = "exact"  # exact | simulate
    noise_reduction: str = "on"  # on | raw-baseline | off
    bootstrap: int = 0
    hermitize: str = "mirror"
    pairs: tuple[tuple[int, int], ...] | None = None  # None: all pairs

    def validate(self) -> list[str]:
        """Raise on invalid combinations; return warnings for ignored settings."""
        if self.mode not in ("exact", "simulate"):
            raise ConfigError(f"mode must be 'exact' or 'simulate', got {self.mode!r}")
        if self.noise_reduction not in DENOISE_MODES:
            raise ConfigError(f"noise_reduction must be one of {DENOISE_MODES}")
        if self.shots < 1:
            raise ConfigError("shots must be positive")
        if not 0 <= self.p <= 1:
            raise ConfigError("p must be in [0, 1]")
        if self.bootstrap < 0:
            raise ConfigError("bootstrap count must be non-negative")
        if self.mode == "simulate" and self.noise_reduction == "off":
            raise ConfigError("noise_reduction=off needs mode=exact; sampled ORDMs can have negative weights")
        warnings = []
        if self.mode == "exact" and self.bootstrap:
            warnings.append("bootstrap with mode=exact yields zero-width intervals")
        return warnings


def targets_for(config: RunConfig, n_orbitals: int) -> list[Target]:
    if config.pairs is None:
        return default_targets(n_orbitals)
    ones = sorted({i for p in config.pairs for i in p})
    return [Target((i,)) for i in ones] + [Target(tuple(sorted(p))) for p in config.pairs]


def _threshold(target: Target, ssr: bool, shots: int | None) -> ThresholdParams:
    if target.is_pair:
        return ThresholdParams.for_shots(16, 18 if ssr else 36, shots)
    return ThresholdParams.for_shots(4, 4, shots)


@dataclass
class Analysis:
    ordms: dict[Target, Ordm1 | Ordm2]
    denoised: dict[Target, np.ndarray]
    reports: dict[Target, dict]
    values: dict[str, float]


def analyze(p: MeasurementPlan, expectations: Mapping, noise_reduction: str, shots: int | None,
            hermitize: str = "mirror") -> Analysis:
    """Assemble, denoise and evaluate entropies from per-set string expectations.

    ``shots=None`` marks exact data: the threshold is zero, so noise
    reduction leaves physical matrices untouched.
    """
    ordms, denoised, reports = {}, {}, {}
    one_spectra, pair_spectra = {}, {}
    for t in p.targets:
        vals = element_values(p.binding[t], expectations)
        if t.is_pair:
            need = required_positions(p.ssr, hermitize)
            o = assemble_2ordm(t.orbitals, {pos: vals[pos] for pos in need}, p.ssr, hermitize)
        else:
            o = assemble_1ordm(t.orbitals[0], {k: vals[(n, n)] for n, k in enumerate(DIAGONAL_IDS, start=1)})
        res = denoise(o.matrix, _threshold(t, p.ssr, shots), noise_reduction)
        ordms[t], denoised[t], reports[t] = o, res.matrix, res.report
        if t.is_pair:
            pair_spectra[t.orbitals] = np.linalg.eigvalsh(res.matrix)
        else:
            # denoising a diagonal matrix keeps it diagonal, so the spectrum stays positional
            one_spectra[t.orbitals[0]] = np.real(np.diag(res.matrix))
    return Analysis(ordms, denoised, reports, entropy_quantities(one_spectra, pair_spectra, p.ssr))


def sample_plan(state: np.ndarray, p: MeasurementPlan, noise: NoiseModel, tag: str = "") -> list[ShotTable]:
    return [
        sample_set(state, group, noise, derive_rng(noise.seed, "sample", tag, k))
        for k, group in enumerate(p.sets)
    ]


def set_estimates(tables: Sequence[ShotTable]) -> dict:
    """Sample means keyed by (set index, string)."""
    out = {}
    for k, table in enumerate(tables):
        for s, (mean, _) in estimate_expectations(table).items():
            out[(k, s)] = mean
    return out


def exact_set_values(state: np.ndarray, p: MeasurementPlan) -> dict:
    exact = exact_expectations(state, {s for g in p.sets for s in g})
    return {(k, s): exact[s] for k, g in enumerate(p.sets) for s in g}


@dataclass
class RunResult:
    config: RunConfig
    plan: MeasurementPlan
    report: EntropyReport
    analysis: Analysis
    warnings: list[str] = field(default_factory=list)
    files: dict[str, str] = field(default_factory=dict)


def output_dir(base: str | Path | None, config: RunConfig) -> Path:
    root = Path(base or os.environ.get(OUTPUT_ENV) or "orbent-out")
    return root / f"{Path(config.fixture).stem}-{'ssr' if config.ssr else 'nossr'}-{config.mode}"


def run(config: RunConfig, out: str | Path | None = None, write: bool = True) -> RunResult:
    warnings = config.validate()
    ci = load_fixture(config.fixture)
    state = build_state(ci)
    n = ci.n_qubits
    p = plan(targets_for(config, n // 2), ssr=config.ssr, scope="per-ordm", n_qubits=n)
    label = ci.label or Path(config.fixture).stem

    if config.mode == "exact":
        result = analyze(p, exact_set_values(state, p), config.noise_reduction, None, config.hermitize)
        tables = None
    else:
        noise = NoiseModel(config.p, config.shots, config.seed)
        tables = sample_plan(state, p, noise, label)
        result = analyze(p, set_estimates(tables), config.noise_reduction, config.shots, config.hermitize)

    report = EntropyReport(label, config.ssr, {k: Quantity(v) for k, v in result.values.items()})
    if config.bootstrap:
        if tables is None:
            report.attach_intervals({k: (v, v) for k, v in result.values.items()}, config.bootstrap)
        else:
            bounds, _ = bootstrap(tables, lambda ts: analyze(p, set_estimates(ts), config.noise_reduction,
                                                                 config.shots, config.hermitize).values,
                                  config.bootstrap, config.seed)
            report.attach_intervals(bounds, config.bootstrap)

    res = RunResult(config, p, report, result, warnings)
    if write:
        res.files = write_artifacts(res, output_dir(out, config))
    return res


def _plot_series(report: EntropyReport) -> dict:
    series: dict[str, dict] = {}
    for k, q in report.quantities.items():
        name, idx = k.split("[")
        series.setdefault(name, {"index": [], "value": [], "lo": [], "hi": []})
        s = series[name]
        s["index"].append(idx.rstrip("]"))
        s["value"].append(q.value)
        s["lo"].append(q.lo)
        s["hi"].append(q.hi)
    return series


def write_artifacts(res: RunResult, directory: Path) -> dict[str, str]:
    directory.mkdir(parents=True, exist_ok=True)
    texts = {
        "plan.json": res.plan.to_json(),
        "ordms.json": dumps([res.analysis.ordms[t] for t in res.plan.targets]),
        "denoising.json": json.dumps({t.label: res.analysis.reports[t] for t in res.plan.targets},
                                     indent=2, sort_keys=True) + "\n",
        "report.json": res.report.to_json(),
        "report.csv": res.report.to_csv(),
        "plot_data.json": json.dumps(_plot_series(res.report), indent=2) + "\n",
    }
    digests = {}
    for name, text in texts.items():
        (directory / name).write_text(text)
        digests[name] = hashlib.sha256(text.encode()).hexdigest()
    cfg = asdict(res.config)
    manifest = {"version": __version__, "config": cfg, "seed": res.config.seed,
                "warnings": res.warnings, "files": digests}
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return {name: str(directory / name) for name in list(texts) + ["manifest.json"]}

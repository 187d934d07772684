"""Запуск моделирования по RunConfig и запись артефактов.

Запуск:
    python -m bicouple run --preset cosine [--out ./runs/cosine] [--plot] [--kahan]
"""

from __future__ import annotations

import csv
import json
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from ..config import CSV_SIGNIFICANT_DIGITS, MANIFEST_VERSION, PIPELINE_VERSION
from ..solver.conservation import (
    DriftReport,
    MassLedger,
    discretization_error,
    drift,
    initial_library,
    side_masses,
)
from ..solver.grid import BiDomainState, discretize_initial
from ..solver.stepper import StepReport, run
from .checks import CheckReport, compute_checks
from .preset_store import PresetStore
from .run_config import CheckSpec, RunConfig

# Сколько раз за прогон печатать прогресс одной связи
PROGRESS_PARTS = 10


@dataclass
class CouplingResult:
    name: str
    tag: str
    scheme: str
    boundary: str
    stencil: str | None
    dt: float
    nu_minus: float
    nu_plus: float
    final: BiDomainState
    ledger: MassLedger
    drift: DriftReport
    elapsed: float
    initial_error: float                    # |C̄(0) − ∫f| при компенсированной сумме
    side_delta: tuple[float, float]         # ΔC̄ левого и правого поддомена за прогон
    snapshots: list[BiDomainState] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


@dataclass
class PipelineResult:
    config: RunConfig
    results: list[CouplingResult]
    report: CheckReport
    paths: list[Path] = field(default_factory=list)

    def by_name(self) -> dict[str, CouplingResult]:
        return {r.name: r for r in self.results}


def simulate_coupling(
    config: RunConfig,
    name: str,
    on_step: Callable[[StepReport], None] | None = None,
) -> CouplingResult:
    """Один запуск решателя для связи name (вызывается и в дочерних процессах).

    Предупреждения при сборке схемы (неконсервативная граница, экспериментальная
    связь) не печатаются, а возвращаются в CouplingResult.warnings.
    """
    coupling = config.coupling(name)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        scheme = config.scheme_for(coupling)
    data = initial_library(config.initial)
    initial = discretize_initial(
        scheme.grid, data.f_left, data.f_right, exact_averages=config.exact_averages
    )
    started = time.perf_counter()
    result = run(
        initial,
        scheme,
        n_steps=config.n_steps,
        audit_every=config.audit_every,
        summation=config.summation,
        snapshot_every=config.snapshot_every,
        on_step=on_step,
    )
    elapsed = time.perf_counter() - started
    left0, right0 = side_masses(initial)
    left1, right1 = side_masses(result.final)
    return CouplingResult(
        name=coupling.name,
        tag=coupling.tag.value,
        scheme=scheme.kind.value,
        boundary=scheme.boundary.value,
        stencil=scheme.stencil.value if scheme.coupling.is_flux else None,
        dt=scheme.dt,
        nu_minus=scheme.nu_minus,
        nu_plus=scheme.nu_plus,
        final=result.final,
        ledger=result.ledger,
        drift=drift(result.ledger),
        elapsed=elapsed,
        initial_error=discretization_error(initial, data),
        side_delta=(left1 - left0, right1 - right0),
        snapshots=result.snapshots,
        warnings=[str(w.message) for w in caught],
    )


def _progress(log: Callable[[str], None], name: str, n_steps: int) -> Callable[[StepReport], None]:
    """on_step для run: строка лога примерно через каждую 1/PROGRESS_PARTS прогона."""
    stride = n_steps / PROGRESS_PARTS
    next_mark = stride

    def on_step(report: StepReport):
        nonlocal next_mark
        if report.step < next_mark or report.step >= n_steps:
            return
        log(f"    {name}: шаг {report.step}/{n_steps}, ΔC с прошлого аудита = {report.drift:+.3e}")
        while next_mark <= report.step:
            next_mark += stride

    return on_step


def run_pipeline(
    config: RunConfig,
    output_dir: Path | None = None,
    checks: list[CheckSpec] | None = None,
    plot: bool = False,
    jobs: int = 1,
    verbose: bool = True,
    notes: list[str] | None = None,
) -> PipelineResult:
    """Прогнать все связи конфигурации, проверить допуски, записать артефакты.

    Args:
        notes: замечания сборки конфигурации (например, отключённые проверки
            пресета); попадают в предупреждения отчёта

    Returns:
        PipelineResult; результаты связей в порядке конфигурации
    """

    def log(msg: str):
        if verbose:
            print(f"[run] {msg}")

    log(f"Конфигурация: {config.name}")
    log(f"Раскладка: {config.scheme.value}, D− = {config.d_minus}, D+ = {config.d_plus}, "
        f"начальные данные: {config.initial}")

    # --- Шаг 1: Моделирование ---
    names = [c.name for c in config.couplings]
    log(f"Шаг 1: Моделирование ({len(names)} связей, {config.n_steps} шагов)...")
    if jobs > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(names))) as pool:
            results = list(pool.map(simulate_coupling, [config] * len(names), names))
    else:
        results = []
        for name in names:
            progress = _progress(log, name, config.n_steps) if verbose else None
            results.append(simulate_coupling(config, name, on_step=progress))
    for res in results:
        entries = res.ledger.entries
        log(f"  {res.name}: C̄(0) = {entries[0].cbar:.16g}, C̄(T) = {entries[-1].cbar:.16g}, "
            f"|ΔC̄| = {res.drift.abs_drift:.6e} ({res.elapsed:.2f} с)")
        log(f"  {res.name}: ошибка дискретизации C̄(0) = {res.initial_error:.6e}, "
            f"ΔC̄ слева = {res.side_delta[0]:+.6e}, справа = {res.side_delta[1]:+.6e}")
        for w in res.warnings:
            log(f"  WARN [{res.name}]: {w}")

    # --- Шаг 2: Проверки ---
    log("Шаг 2: Проверка допусков...")
    report = compute_checks(checks or [], {r.name: r for r in results})
    report.warnings[:0] = list(notes or [])
    for line in report.lines():
        log(f"  {line}")
    for w in report.warnings:
        log(f"  WARN: {w}")

    pipeline = PipelineResult(config=config, results=results, report=report)

    # --- Шаг 3: Сохранение ---
    if output_dir is not None:
        log("Шаг 3: Сохранение файлов...")
        pipeline.paths = emit_outputs(results, Path(output_dir), plot=plot, config=config, report=report)
        for path in pipeline.paths:
            log(f"  -> {path}")

    log("Готово!" if report.passed else f"Готово, проверок не пройдено: {len(report.failed)}")
    return pipeline


def run_preset(
    name: str,
    output_dir: Path | None = None,
    plot: bool = False,
    jobs: int = 1,
    verbose: bool = True,
    store: PresetStore | None = None,
) -> PipelineResult:
    """Запустить пресет по имени с его проверками."""
    store = store or PresetStore()
    preset = store.get_preset(name)
    return run_pipeline(
        preset.config, output_dir=output_dir, checks=preset.checks, plot=plot, jobs=jobs, verbose=verbose
    )


# ---------------------------------------------------------------------------
# Артефакты
# ---------------------------------------------------------------------------

def _num(x: float) -> str:
    return format(float(x), f".{CSV_SIGNIFICANT_DIGITS}g")


def _safe(name: str) -> str:
    return name.replace("/", "_").replace("\\", "_").replace(" ", "_")


def write_profile(res: CouplingResult, path: Path) -> Path:
    """x,value,side; узловой интерфейс даёт две строки при x = 0.5."""
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "value", "side"])
        writer.writerows(_profile_rows(res.final))
    return path


def _profile_rows(state: BiDomainState) -> list[list[str]]:
    x_left, x_right = state.grid.coordinates()
    rows = [[_num(x), _num(value), "u"] for x, value in zip(x_left, state.u)]
    rows += [[_num(x), _num(value), "v"] for x, value in zip(x_right, state.v)]
    return rows


def write_snapshots(res: CouplingResult, path: Path) -> Path:
    """step,t,x,value,side: профили, сохранённые каждые snapshot_every шагов."""
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["step", "t", "x", "value", "side"])
        for state in res.snapshots:
            for row in _profile_rows(state):
                writer.writerow([state.step, _num(state.t), *row])
    return path


def write_ledger(res: CouplingResult, path: Path) -> Path:
    """step,t,C,Cbar,drift; drift = C̄_n − C̄_0."""
    entries = res.ledger.entries
    cbar0 = entries[0].cbar
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["step", "t", "C", "Cbar", "drift"])
        for e in entries:
            writer.writerow([e.step, _num(e.t), _num(e.c), _num(e.cbar), _num(e.cbar - cbar0)])
    return path


def write_summary(results: list[CouplingResult], path: Path) -> Path:
    """coupling,C0bar,CTbar,abs_drift,init_error; init_error = |C̄(0) − ∫f|."""
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["coupling", "C0bar", "CTbar", "abs_drift", "init_error"])
        for res in results:
            entries = res.ledger.entries
            writer.writerow([
                res.name, _num(entries[0].cbar), _num(entries[-1].cbar), _num(res.drift.abs_drift),
                _num(res.initial_error),
            ])
    return path


def _manifest(config: RunConfig | None, results: list[CouplingResult], report: CheckReport | None) -> dict:
    return {
        "manifest_version": MANIFEST_VERSION,
        "pipeline_version": PIPELINE_VERSION,
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "config": config.model_dump(mode="json") if config is not None else None,
        "summary": [
            {
                "coupling": r.name,
                "tag": r.tag,
                "scheme": r.scheme,
                "boundary": r.boundary,
                "stencil": r.stencil,
                "dt": r.dt,
                "nu_minus": r.nu_minus,
                "nu_plus": r.nu_plus,
                "steps": r.final.step,
                "C0bar": r.ledger.entries[0].cbar,
                "CTbar": r.ledger.entries[-1].cbar,
                "abs_drift": r.drift.abs_drift,
                "init_error": r.initial_error,
                "left_delta": r.side_delta[0],
                "right_delta": r.side_delta[1],
                "warnings": r.warnings,
                "elapsed_s": round(r.elapsed, 3),
            }
            for r in results
        ],
        "checks": {
            "passed": report.passed,
            "warnings": report.warnings,
            "results": [
                {
                    "kind": c.spec.kind,
                    "coupling": c.spec.coupling,
                    "other": c.spec.other,
                    "observed": c.observed,
                    "passed": c.passed,
                    "message": c.message,
                }
                for c in report.results
            ],
        } if report is not None else None,
    }


def emit_outputs(
    results: list[CouplingResult],
    output_dir: Path,
    plot: bool = False,
    config: RunConfig | None = None,
    report: CheckReport | None = None,
) -> list[Path]:
    """Записать профили, снимки, журналы массы, сводку, манифест и (опционально) SVG."""
    output_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for res in results:
        paths.append(write_profile(res, output_dir / f"profile_{_safe(res.name)}.csv"))
        if res.snapshots:
            paths.append(write_snapshots(res, output_dir / f"snapshots_{_safe(res.name)}.csv"))
        paths.append(write_ledger(res, output_dir / f"ledger_{_safe(res.name)}.csv"))
    paths.append(write_summary(results, output_dir / "summary.csv"))

    if plot:
        from .plotting import plot_profiles, save_figure
        title = config.name if config is not None else "profiles"
        paths.append(save_figure(plot_profiles(results, title), output_dir / "profile.svg"))

    manifest_path = output_dir / "run_manifest.json"
    manifest_path.write_text(
        json.dumps(_manifest(config, results, report), ensure_ascii=False, indent=2, allow_nan=True),
        encoding="utf-8",
    )
    paths.append(manifest_path)
    return paths

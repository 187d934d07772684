"""Модели конфигурации запуска (pydantic).

RunConfig: полный блок параметров одного запуска: сетка, шаг по времени,
коэффициенты, начальные данные и список связей. Каждая связь может
переопределить раскладку сетки и граничное условие.
CheckSpec: допуск, с которым сравнивается результат пресета.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..config import CFL_LIMIT, CFL_SAFETY_FRACTION, CHANNEL_EPS_DEN, DEFAULT_AUDIT_EVERY
from ..errors import ConfigError
from ..solver.conservation import INITIAL_DATA, SummationMode
from ..solver.fluxes import CouplingKind, CouplingSpec, FluxStencil
from ..solver.grid import BoundaryKind, Grid, GridKind, SchemeConfig, build_grid, grid_from_dx
from ..solver.stepper import cfl_limit


class CouplingParams(BaseModel):
    """Одна связь внутри запуска."""

    model_config = ConfigDict(extra="forbid")

    name: str = Field(..., min_length=1, description="Имя в именах файлов и сводке")
    tag: CouplingKind
    stencil: Optional[FluxStencil] = Field(None, description="central | one-sided (только потоковые связи)")
    H: float = 1.0
    theta: float = 1.0
    psi: float = 0.0
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 0.0
    delta: float = 0.0
    p_l: float = 0.0
    p_p: float = 0.0
    k_d: float = 1.0
    r: float = Field(1.0, gt=0.0)
    eps_den: float = Field(CHANNEL_EPS_DEN, gt=0.0)
    scheme: Optional[GridKind] = Field(None, description="Переопределить раскладку сетки")
    boundary: Optional[BoundaryKind] = Field(None, description="Переопределить граничное условие")

    def to_spec(self) -> CouplingSpec:
        return CouplingSpec(
            kind=self.tag,
            stencil=self.stencil,
            H=self.H,
            theta=self.theta,
            psi=self.psi,
            alpha=self.alpha,
            beta=self.beta,
            gamma=self.gamma,
            delta=self.delta,
            p_l=self.p_l,
            p_p=self.p_p,
            k_d=self.k_d,
            r=self.r,
            eps_den=self.eps_den,
        )


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = "adhoc"
    scheme: GridKind = GridKind.NODAL
    d_minus: float = Field(..., gt=0.0)
    d_plus: float = Field(..., gt=0.0)
    m: Optional[int] = Field(None, ge=2)
    dx: Optional[float] = Field(None, gt=0.0)
    dt: Optional[float] = Field(None, gt=0.0)
    cfl_fraction: Optional[float] = Field(None, gt=0.0)
    n_steps: int = Field(..., ge=1)
    boundary: Optional[BoundaryKind] = None
    couplings: list[CouplingParams] = Field(..., min_length=1)
    initial: str = "cosine"
    exact_averages: bool = False
    audit_every: int = Field(DEFAULT_AUDIT_EVERY, ge=1)
    summation: SummationMode = SummationMode.SEQUENTIAL
    snapshot_every: Optional[int] = Field(None, ge=1, description="Шагов между снимками профиля")
    allow_mixed_boundary: bool = False
    allow_cfl_violation: bool = False

    @model_validator(mode="after")
    def _check_consistency(self) -> "RunConfig":
        if (self.m is None) == (self.dx is None):
            raise ValueError("нужно задать ровно одно из m и dx")
        if self.dt is not None and self.cfl_fraction is not None:
            raise ValueError("нужно задать не более одного из dt и cfl_fraction")
        if (
            self.cfl_fraction is not None
            and self.cfl_fraction > CFL_LIMIT
            and not self.allow_cfl_violation
        ):
            raise ValueError(
                f"cfl_fraction = {self.cfl_fraction} даёт ν > {CFL_LIMIT}; "
                "нужен allow_cfl_violation"
            )
        if self.initial.strip().lower() not in INITIAL_DATA:
            known = ", ".join(sorted(INITIAL_DATA))
            raise ValueError(f"неизвестные начальные данные '{self.initial}'. Доступные: {known}")
        if INITIAL_DATA[self.initial.strip().lower()].single_domain and self.d_minus != self.d_plus:
            raise ValueError(
                f"начальные данные '{self.initial}' заданы в одной среде: нужно d_minus == d_plus, "
                f"получено {self.d_minus} и {self.d_plus}"
            )
        names = [c.name for c in self.couplings]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise ValueError(f"имена связей повторяются: {', '.join(duplicates)}")
        return self

    # -- Производные объекты решателя ---------------------------------------

    def grid_for(self, coupling: CouplingParams) -> Grid:
        kind = coupling.scheme or self.scheme
        if self.m is not None:
            return build_grid(self.m, kind)
        return grid_from_dx(self.dx, kind)

    def time_step(self, grid: Grid) -> float:
        if self.dt is not None:
            return self.dt
        fraction = self.cfl_fraction if self.cfl_fraction is not None else CFL_SAFETY_FRACTION
        return cfl_limit(self.d_minus, self.d_plus, grid.dx, fraction).safety_dt

    def scheme_for(self, coupling: CouplingParams) -> SchemeConfig:
        grid = self.grid_for(coupling)
        return SchemeConfig(
            grid=grid,
            d_minus=self.d_minus,
            d_plus=self.d_plus,
            dt=self.time_step(grid),
            coupling=coupling.to_spec(),
            boundary=coupling.boundary or self.boundary,
            allow_cfl_violation=self.allow_cfl_violation,
            allow_mixed_boundary=self.allow_mixed_boundary,
        )

    def coupling(self, name: str) -> CouplingParams:
        for c in self.couplings:
            if c.name == name:
                return c
        raise ConfigError(f"связь '{name}' не найдена в конфигурации '{self.name}'")


CheckKind = Literal[
    "abs_drift", "initial_cbar", "final_cbar", "interface_gap", "drift_ratio", "left_delta", "right_delta",
]


class CheckSpec(BaseModel):
    """Проверка результата: expected ± tolerance и/или границы [lower, upper]."""

    model_config = ConfigDict(extra="forbid")

    kind: CheckKind
    coupling: str
    other: Optional[str] = Field(None, description="Вторая связь для interface_gap и drift_ratio")
    expected: Optional[float] = None
    tolerance: Optional[float] = Field(None, ge=0.0)
    lower: Optional[float] = None
    upper: Optional[float] = None
    note: str = ""

    @model_validator(mode="after")
    def _check_bounds(self) -> "CheckSpec":
        if self.kind in ("interface_gap", "drift_ratio") and not self.other:
            raise ValueError(f"проверка {self.kind} требует поле other")
        if (self.expected is None) != (self.tolerance is None):
            raise ValueError("expected и tolerance задаются вместе")
        if self.expected is None and self.lower is None and self.upper is None:
            raise ValueError("нужно задать expected ± tolerance или lower/upper")
        return self


class Preset(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    description: str = ""
    aliases: list[str] = Field(default_factory=list, description="Другие имена для resolve_name")
    tier: Literal["ci", "full"] = "ci"
    config: RunConfig
    checks: list[CheckSpec] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_references(self) -> "Preset":
        names = {c.name for c in self.config.couplings}
        for check in self.checks:
            for ref in (check.coupling, check.other):
                if ref is not None and ref not in names:
                    raise ValueError(f"проверка {check.kind} ссылается на неизвестную связь '{ref}'")
        return self


# ---------------------------------------------------------------------------
# Разбор
# ---------------------------------------------------------------------------

def format_validation_error(exc: ValidationError, source: str = "config") -> str:
    """Ошибки pydantic в виде строк 'путь.к.ключу: сообщение'."""
    lines = []
    for err in exc.errors():
        path = ".".join(str(p) for p in err.get("loc", ())) or "<корень>"
        lines.append(f"  {source}: {path}: {err.get('msg', '')}")
    return "некорректная конфигурация:\n" + "\n".join(lines)


def read_json_file(path: Path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"не удалось прочитать {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: строка {exc.lineno}, столбец {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: ожидался JSON-объект верхнего уровня")
    return data


# Ключи, которые не меняют результат моделирования: проверки пресета остаются в силе
_NEUTRAL_KEYS = frozenset({
    "name", "audit_every", "snapshot_every", "summation", "allow_mixed_boundary", "allow_cfl_violation",
})


def _preset_checks(preset: Preset, config: RunConfig) -> tuple[list[CheckSpec], list[str]]:
    """Проверки пресета, которые ещё относятся к итоговой конфигурации.

    Изменение сетки, шага, числа шагов, коэффициентов или начальных данных
    отключает все проверки; изменённая или удалённая связь отключает
    только проверки, которые на неё ссылаются.
    """
    exclude = set(_NEUTRAL_KEYS) | {"couplings"}
    before = preset.config.model_dump(mode="json", exclude=exclude)
    after = config.model_dump(mode="json", exclude=exclude)
    changed = sorted(k for k in before.keys() | after.keys() if before.get(k) != after.get(k))
    if changed:
        return [], [
            f"проверки пресета '{preset.name}' отключены: перекрыты {', '.join(changed)}"
        ]

    old = {c.name: c for c in preset.config.couplings}
    new = {c.name: c for c in config.couplings}
    kept = [
        check for check in preset.checks
        if all(ref is None or (ref in new and new[ref] == old.get(ref)) for ref in (check.coupling, check.other))
    ]
    notes = []
    if len(kept) < len(preset.checks):
        notes.append(
            f"отброшено проверок пресета '{preset.name}': {len(preset.checks) - len(kept)} "
            "(связи изменены или удалены)"
        )
    return kept, notes


def load_run(
    path: str | Path | None = None,
    flags: dict[str, Any] | None = None,
    store=None,
) -> tuple[RunConfig, list[CheckSpec], list[str]]:
    """Собрать RunConfig из файла и/или плоских флагов вместе с проверками.

    Ключ "preset" подставляет конфигурацию пресета, остальные ключи
    перекрывают её поверх. Флаги перекрывают файл. Ключ "checks" добавляет
    собственные проверки запуска к проверкам пресета.

    Returns:
        (config, checks, notes); notes: почему часть проверок пресета отключена
    """
    data: dict[str, Any] = {}
    source = "flags"
    if path is not None:
        data.update(read_json_file(Path(path)))
        source = str(path)
    if flags:
        data.update({k: v for k, v in flags.items() if v is not None})

    preset = None
    preset_name = data.pop("preset", None)
    raw_checks = data.pop("checks", [])
    if preset_name is not None:
        if store is None:
            from .preset_store import PresetStore
            store = PresetStore()
        preset = store.get_preset(preset_name)
        base = preset.config.model_dump(mode="json", exclude_none=True)
        # m и dx, dt и cfl_fraction взаимоисключающие: перекрытие одного убирает другое
        for a, b in (("m", "dx"), ("dt", "cfl_fraction")):
            if a in data:
                base.pop(b, None)
            if b in data:
                base.pop(a, None)
        base.update(data)
        data = base

    try:
        config = RunConfig.model_validate(data)
        own_checks = [CheckSpec.model_validate(c) for c in raw_checks]
    except ValidationError as exc:
        raise ConfigError(format_validation_error(exc, source)) from exc

    names = {c.name for c in config.couplings}
    for check in own_checks:
        for ref in (check.coupling, check.other):
            if ref is not None and ref not in names:
                raise ConfigError(f"{source}: проверка {check.kind} ссылается на неизвестную связь '{ref}'")

    checks, notes = _preset_checks(preset, config) if preset is not None else ([], [])
    return config, checks + own_checks, notes


def parse_config(
    path: str | Path | None = None,
    flags: dict[str, Any] | None = None,
    store=None,
) -> RunConfig:
    """Собрать и проверить RunConfig (см. load_run)."""
    return load_run(path, flags, store)[0]

"""Аудит дискретной массы, точные решения и метрики ошибок.

Узловая сумма:  C_n = ½u_0 + u_1 + … + u_{m−1} + ½u_m + ½v_m + v_{m+1} + … + ½v_N
Конечные объёмы: C_n = u_1 + … + u_m + v_{m+1} + … + v_N
Полная масса:   C̄_n = Δx·C_n
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy import integrate

from ..errors import ConfigError, LayoutMismatch
from .fluxes import CouplingKind, FluxStencil
from .grid import BiDomainState, BoundaryKind, GridKind, SchemeConfig


class SummationMode(str, Enum):
    SEQUENTIAL = "sequential"
    COMPENSATED = "compensated"


# ---------------------------------------------------------------------------
# Суммирование
# ---------------------------------------------------------------------------

class CompensatedSum:
    """Бегущая сумма Кахана–Бабушки (вариант Ноймайера).

    Хранит поправку отдельно, поэтому не теряет малые слагаемые на фоне большой суммы.
    """

    def __init__(self):
        self.sum = 0.0
        self.carry = 0.0

    def add(self, value: float) -> None:
        s = self.sum + value
        if abs(self.sum) >= abs(value):
            self.carry += (self.sum - s) + value
        else:
            self.carry += (value - s) + self.sum
        self.sum = s

    @property
    def value(self) -> float:
        return self.sum + self.carry


def total_sum(values: np.ndarray, mode: SummationMode | str = SummationMode.SEQUENTIAL) -> float:
    """Сумма слева направо (SEQUENTIAL) или с компенсацией (COMPENSATED).

    np.add.accumulate строго последовательна, в отличие от попарной np.sum.
    """
    mode = SummationMode(mode)
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return 0.0
    if mode is SummationMode.SEQUENTIAL:
        return float(np.add.accumulate(values)[-1])
    acc = CompensatedSum()
    for x in values.tolist():
        acc.add(x)
    return acc.value


def mass_nodal(state: BiDomainState, mode: SummationMode | str = SummationMode.SEQUENTIAL) -> float:
    """Взвешенная узловая сумма C_n (половинные веса на краях и в двойном узле)."""
    if state.grid.kind is not GridKind.NODAL:
        raise LayoutMismatch("mass_nodal: ожидалась узловая раскладка")
    u, v = state.u, state.v
    terms = np.concatenate((
        [0.5 * u[0]], u[1:-1], [0.5 * u[-1], 0.5 * v[0]], v[1:-1], [0.5 * v[-1]],
    ))
    return total_sum(terms, mode)


def mass_fv(state: BiDomainState, mode: SummationMode | str = SummationMode.SEQUENTIAL) -> float:
    """Простая сумма по ячейкам C_n."""
    if state.grid.kind is not GridKind.FINITE_VOLUME:
        raise LayoutMismatch("mass_fv: ожидалась раскладка конечных объёмов")
    return total_sum(np.concatenate((state.u, state.v)), mode)


def mass(state: BiDomainState, mode: SummationMode | str = SummationMode.SEQUENTIAL) -> float:
    if state.grid.kind is GridKind.NODAL:
        return mass_nodal(state, mode)
    return mass_fv(state, mode)


def initial_mass(state: BiDomainState) -> float:
    """C̄ = Δx·C с компенсированным суммированием.

    Для сравнения с точной массой начальных данных: последовательная сумма
    на 10⁵ ячейках уже даёт ошибку порядка 1e−12.
    """
    return state.grid.dx * mass(state, SummationMode.COMPENSATED)


def side_masses(
    state: BiDomainState, mode: SummationMode | str = SummationMode.COMPENSATED
) -> tuple[float, float]:
    """Масса каждого поддомена (Δx·Σ), левая и правая.

    Веса те же, что в mass; в узловой раскладке двойной узел делится поровну.
    """
    u_w, v_w = _weights(state.grid)
    dx = state.grid.dx
    return dx * total_sum(u_w * state.u, mode), dx * total_sum(v_w * state.v, mode)


# ---------------------------------------------------------------------------
# Журнал массы
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LedgerEntry:
    step: int
    t: float
    c: float          # C_n
    cbar: float       # Δx·C_n


@dataclass
class MassLedger:
    dx: float
    summation_mode: SummationMode = SummationMode.SEQUENTIAL
    entries: list[LedgerEntry] = field(default_factory=list)

    def record(self, step: int, t: float, c: float) -> LedgerEntry:
        if self.entries and step <= self.entries[-1].step:
            raise ValueError(
                f"шаги журнала должны строго возрастать: {step} после {self.entries[-1].step}"
            )
        if not math.isfinite(c):
            raise ValueError(f"C_n не конечна на шаге {step}: {c!r}")
        entry = LedgerEntry(step=step, t=t, c=c, cbar=self.dx * c)
        self.entries.append(entry)
        return entry

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class DriftReport:
    intervals: list[float]    # C̄_{k+1} − C̄_k между соседними записями
    abs_drift: float          # |C̄_last − C̄_0|
    abs_drift_raw: float      # |C_last − C_0|


def drift(ledger: MassLedger) -> DriftReport:
    """Приращения массы между записями журнала и итоговый дрейф."""
    entries = ledger.entries
    if len(entries) < 2:
        raise ValueError("для дрейфа нужно минимум две записи журнала")
    intervals = [b.cbar - a.cbar for a, b in zip(entries, entries[1:])]
    return DriftReport(
        intervals=intervals,
        abs_drift=abs(entries[-1].cbar - entries[0].cbar),
        abs_drift_raw=abs(entries[-1].c - entries[0].c),
    )




# ---------------------------------------------------------------------------
# Потоковая форма шага (проверка телескопичности)
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FaceFluxes:
    """Шаг, записанный через потоки на гранях.

    Для каждого хранимого значения w_j: weight_j·(w_j^{n+1} − w_j^n) = right_j − left_j.
    Внутренние грани общие для соседей (right_j = left_{j+1}), поэтому
    C_{n+1} − C_n = Σ(right − left) + source, и в сумме остаются только
    граничные и интерфейсные несовпадения.

    source: вклад переноса v_m ← u_m в двойном узле узловой сетки,
    ½(u_m − v_m); в остальных случаях 0.
    """

    u_left: np.ndarray
    u_right: np.ndarray
    v_left: np.ndarray
    v_right: np.ndarray
    u_weights: np.ndarray
    v_weights: np.ndarray
    source: float = 0.0

    def balance(self) -> float:
        """Σ(right − left) + source, знаковая сумма слева направо."""
        terms = np.concatenate((self.u_right - self.u_left, self.v_right - self.v_left))
        return total_sum(terms) + self.source


def _giles_factors(config: SchemeConfig) -> tuple[float, float]:
    """Множители (a, b) при ν+(v − u_m) и ν−(u_m − u_{m−1})."""
    kind = config.coupling.kind
    r = config.coupling.r
    if kind is CouplingKind.GILES_INCONSISTENT:
        return 2.0 * r, 2.0
    if kind is CouplingKind.GILES_CORRECT:
        return 2.0 * r / (1.0 + r), 2.0 / (1.0 + r)
    return 1.0, 1.0


def face_fluxes(state: BiDomainState, config: SchemeConfig) -> FaceFluxes:
    """Разложить один шаг advance на потоки через грани.

    F_{j+½} = ν(w_{j+1} − w_j) внутри каждого поддомена; на внешних границах
    поток нулевой, а численное граничное условие даёт несовпадение,
    если оно не консервативно для раскладки.
    """
    if state.grid != config.grid:
        raise LayoutMismatch("face_fluxes: состояние построено на другой сетке")
    u, v = state.u, state.v
    num, nup = config.nu_minus, config.nu_plus
    nodal = config.kind is GridKind.NODAL
    fu = num * (u[1:] - u[:-1])
    fv = nup * (v[1:] - v[:-1])

    u_left = np.concatenate(([0.0], fu))
    u_right = np.concatenate((fu, [0.0]))
    v_left = np.concatenate(([0.0], fv))
    v_right = np.concatenate((fv, [0.0]))
    u_w = np.ones_like(u)
    v_w = np.ones_like(v)
    if nodal:
        u_w[0] = u_w[-1] = 0.5
        v_w[0] = v_w[-1] = 0.5

    edge = 2.0 if config.boundary is BoundaryKind.CENTRAL else 1.0
    u_right[0] = u_w[0] * edge * fu[0]
    v_left[-1] = v_w[-1] * edge * fv[-1]

    source = 0.0
    if config.coupling.is_flux:
        if nodal:
            s = 2.0 if config.stencil is FluxStencil.CENTRAL else 1.0
        else:
            s = 1.0
        kJ = config.dt_over_dx * config.coupling.flux(float(u[-1]), float(v[0]))
        u_left[-1] = u_w[-1] * s * fu[-1]
        u_right[-1] = -u_w[-1] * s * kJ
        v_left[0] = -v_w[0] * s * kJ
        v_right[0] = v_w[0] * s * fv[0]
    else:
        a, b = _giles_factors(config)
        # v_{m+1}: первый v справа от интерфейса в обеих раскладках
        v_next = v[1] if nodal else v[0]
        u_left[-1] = b * fu[-1]
        u_right[-1] = a * nup * (v_next - u[-1])
        if nodal:
            # Двойной узел сливается в одно значение веса 1: ½u_m + ½v_m → u_m^{n+1}
            u_w[-1] = 1.0
            v_w[0] = 0.0
            v_left[0] = v_right[0] = 0.0
            source = 0.5 * (float(u[-1]) - float(v[0]))
        else:
            v_left[0] = nup * (v[0] - u[-1])
    return FaceFluxes(u_left, u_right, v_left, v_right, u_w, v_w, source)


# ---------------------------------------------------------------------------
# Точные решения и начальные данные
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExactSolution:
    """w_n(x, t) = exp(−D(nπ)²t)·cos(nπx) + 1, однородный Нейман на x = 0, 1."""

    n: int = 1
    D: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError(f"номер моды должен быть натуральным, получено {self.n!r}")
        if not self.D > 0.0:
            raise ConfigError(f"коэффициент диффузии должен быть положительным, получено {self.D!r}")


def exact_eval(sol: ExactSolution, x, t: float):
    k = sol.n * math.pi
    return np.exp(-sol.D * k * k * t) * np.cos(k * np.asarray(x, dtype=np.float64)) + 1.0


@dataclass(frozen=True)
class InitialData:
    """Начальные данные по обе стороны интерфейса.

    reference_mass: точная ∫₀¹ f, с ней сравнивается дискретная C̄(0).
    single_domain: одна среда без интерфейса, допускается только при D− = D+.
    """

    name: str
    f_left: Callable
    f_right: Callable
    reference_mass: float
    single_domain: bool = False
    description: str = ""


def discretization_error(state: BiDomainState, data: InitialData) -> float:
    """|C̄(0) − ∫₀¹ f|: ошибка дискретизации начальных данных."""
    return abs(initial_mass(state) - data.reference_mass)


def _cosine(x):
    return np.cos(math.pi * np.asarray(x, dtype=np.float64)) + 1.0


def _sqrt_bump(x):
    x = np.asarray(x, dtype=np.float64)
    return 100.0 * np.sqrt(x * (1.0 - x))


def _constant(c: float) -> Callable:
    return lambda x: np.full(np.shape(x), c, dtype=np.float64)


INITIAL_DATA = {
    "cosine": InitialData(
        name="cosine",
        f_left=_cosine,
        f_right=_cosine,
        reference_mass=1.0,
        description="cos(πx) + 1 в обоих поддоменах",
    ),
    "piecewise": InitialData(
        name="piecewise",
        f_left=_constant(1.0),
        f_right=_constant(0.06),
        reference_mass=0.53,
        description="u ≡ 1, v ≡ 0.06 (разрыв на интерфейсе)",
    ),
    "sqrt": InitialData(
        name="sqrt",
        f_left=_sqrt_bump,
        f_right=_sqrt_bump,
        reference_mass=100.0 * math.pi / 8.0,
        single_domain=True,
        description="100·√(x(1 − x)), одна область",
    ),
}


def initial_library(name: str) -> InitialData:
    """Начальные данные по имени (регистр не важен)."""
    key = name.strip().lower()
    if key not in INITIAL_DATA:
        known = ", ".join(sorted(INITIAL_DATA))
        raise ConfigError(f"неизвестные начальные данные '{name}'. Доступные: {known}")
    return INITIAL_DATA[key]


def integrated_mass(data: InitialData) -> float:
    """∫₀^½ f_left + ∫_½^1 f_right через scipy.integrate.quad."""
    left, _ = integrate.quad(lambda s: float(data.f_left(s)), 0.0, 0.5)
    right, _ = integrate.quad(lambda s: float(data.f_right(s)), 0.5, 1.0)
    return left + right


# ---------------------------------------------------------------------------
# Метрики ошибок
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ErrorMetrics:
    max_error: float
    l2_error: float


def _weights(grid) -> tuple[np.ndarray, np.ndarray]:
    u_w = np.ones(grid.left_size)
    v_w = np.ones(grid.right_size)
    if grid.kind is GridKind.NODAL:
        u_w[0] = u_w[-1] = 0.5
        v_w[0] = v_w[-1] = 0.5
    return u_w, v_w


def error_metrics(state: BiDomainState, sol: ExactSolution) -> ErrorMetrics:
    """Ошибка в max-норме и дискретной L2-норме √(Δx·Σ w_j e_j²).

    Веса w_j те же, что в сумме массы, поэтому двойной узел не учитывается дважды.
    """
    x_left, x_right = state.grid.coordinates()
    err_u = state.u - exact_eval(sol, x_left, state.t)
    err_v = state.v - exact_eval(sol, x_right, state.t)
    u_w, v_w = _weights(state.grid)
    errors = np.concatenate((err_u, err_v))
    weights = np.concatenate((u_w, v_w))
    return ErrorMetrics(
        max_error=float(np.max(np.abs(errors))),
        l2_error=math.sqrt(state.grid.dx * total_sum(weights * errors * errors)),
    )

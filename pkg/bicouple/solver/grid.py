"""Равномерная двухдоменная сетка на [0, 1] и дискретное состояние.

Узловая раскладка: x_j = j·Δx, j = 0..N, двойной узел в x_m = 1/2
(u_m слева, v_m справа). Конечные объёмы: центры ячеек x_j = (j − 1/2)·Δx,
j = 1..N, интерфейс совпадает с гранью x_{m+1/2} = 1/2.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy import integrate

from ..config import CFL_LIMIT
from ..errors import CFLViolation, ConfigError
from .fluxes import CouplingKind, CouplingSpec, FluxStencil


class GridKind(str, Enum):
    NODAL = "nodal"
    FINITE_VOLUME = "fv"


class BoundaryKind(str, Enum):
    """Численное однородное условие Неймана на x = 0 и x = 1."""

    CENTRAL = "central"
    ONE_SIDED = "one-sided"


# Консервативный выбор для каждой раскладки
DEFAULT_BOUNDARY = {
    GridKind.NODAL: BoundaryKind.CENTRAL,
    GridKind.FINITE_VOLUME: BoundaryKind.ONE_SIDED,
}

DEFAULT_STENCIL = {
    GridKind.NODAL: FluxStencil.CENTRAL,
    GridKind.FINITE_VOLUME: FluxStencil.ONE_SIDED,
}


# ---------------------------------------------------------------------------
# Сетка
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Grid:
    m: int                 # узлов/ячеек на поддомен
    kind: GridKind

    @property
    def N(self) -> int:
        return 2 * self.m

    @property
    def dx(self) -> float:
        return 1.0 / self.N

    @property
    def left_size(self) -> int:
        return self.m + 1 if self.kind is GridKind.NODAL else self.m

    @property
    def right_size(self) -> int:
        return self.N - self.m + 1 if self.kind is GridKind.NODAL else self.m

    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """Координаты значений u и v (в узловом случае x_m входит в оба массива)."""
        dx = self.dx
        if self.kind is GridKind.NODAL:
            j_left = np.arange(0, self.m + 1)
            j_right = np.arange(self.m, self.N + 1)
            return j_left * dx, j_right * dx
        j_left = np.arange(1, self.m + 1)
        j_right = np.arange(self.m + 1, self.N + 1)
        return (j_left - 0.5) * dx, (j_right - 0.5) * dx


def build_grid(m: int, kind: GridKind | str) -> Grid:
    """Построить сетку с N = 2m и Δx = 1/(2m)."""
    kind = GridKind(kind)
    if int(m) != m or m < 2:
        raise ConfigError(f"сетка слишком грубая для шаблона: m = {m!r}, нужно m ≥ 2")
    return Grid(m=int(m), kind=kind)


def grid_from_dx(dx: float, kind: GridKind | str) -> Grid:
    """Построить сетку по шагу Δx; 1/(2Δx) должно быть целым."""
    if not dx > 0.0:
        raise ConfigError(f"Δx должно быть положительным, получено {dx!r}")
    m = int(round(0.5 / dx))
    if m < 1 or abs(2 * m * dx - 1.0) > 1e-9:
        raise ConfigError(f"Δx = {dx!r} не делит [0, 1] на чётное число интервалов")
    return build_grid(m, kind)


# ---------------------------------------------------------------------------
# Состояние
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BiDomainState:
    """Значения u (слева) и v (справа) на одном временном слое.

    Массивы только для чтения: шаг по времени всегда строит новое состояние.
    """

    grid: Grid
    u: np.ndarray
    v: np.ndarray
    t: float = 0.0
    step: int = 0

    def __post_init__(self):
        u = np.array(self.u, dtype=np.float64)
        v = np.array(self.v, dtype=np.float64)
        if u.shape != (self.grid.left_size,) or v.shape != (self.grid.right_size,):
            raise ConfigError(
                f"размеры массивов {u.shape}/{v.shape} не соответствуют сетке "
                f"{self.grid.kind.value} с m = {self.grid.m}"
            )
        u.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)


def _sample(f: Callable, x: np.ndarray) -> np.ndarray:
    values = np.asarray(f(x), dtype=np.float64)
    return np.broadcast_to(values, x.shape).copy()


def _cell_averages(f: Callable, centers: np.ndarray, dx: float) -> np.ndarray:
    h = 0.5 * dx
    return np.array(
        [integrate.quad(lambda s: float(f(s)), c - h, c + h)[0] / dx for c in centers]
    )


def discretize_initial(
    grid: Grid,
    f_left: Callable,
    f_right: Callable,
    exact_averages: bool = False,
) -> BiDomainState:
    """Дискретизировать начальные данные.

    Узловая сетка: значения в узлах, u_m = f_left(1/2), v_m = f_right(1/2).
    Конечные объёмы: значения в центрах ячеек (формула средней точки) или,
    при exact_averages=True, точные средние по ячейкам через scipy.integrate.quad.
    """
    x_left, x_right = grid.coordinates()
    if exact_averages:
        if grid.kind is not GridKind.FINITE_VOLUME:
            raise ConfigError("точные средние по ячейкам определены только для конечных объёмов")
        u = _cell_averages(f_left, x_left, grid.dx)
        v = _cell_averages(f_right, x_right, grid.dx)
    else:
        u = _sample(f_left, x_left)
        v = _sample(f_right, x_right)
    return BiDomainState(grid=grid, u=u, v=v, t=0.0, step=0)


# ---------------------------------------------------------------------------
# Параметры схемы
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchemeConfig:
    """Коэффициенты, шаг по времени и выбор граничных условий и связи."""

    grid: Grid
    d_minus: float
    d_plus: float
    dt: float
    coupling: CouplingSpec
    boundary: BoundaryKind | None = None
    allow_cfl_violation: bool = False
    allow_mixed_boundary: bool = False
    # Производные величины заполняются в __post_init__
    nu_minus: float = field(init=False)
    nu_plus: float = field(init=False)
    dt_over_dx: float = field(init=False)

    def __post_init__(self):
        boundary = DEFAULT_BOUNDARY[self.grid.kind] if self.boundary is None else BoundaryKind(self.boundary)
        object.__setattr__(self, "boundary", boundary)
        dx = self.grid.dx
        object.__setattr__(self, "nu_minus", self.d_minus * self.dt / (dx * dx))
        object.__setattr__(self, "nu_plus", self.d_plus * self.dt / (dx * dx))
        object.__setattr__(self, "dt_over_dx", self.dt / dx)
        self.validate()
        if boundary is not DEFAULT_BOUNDARY[self.kind]:
            # warn → __post_init__ → __init__ → место создания конфигурации
            warnings.warn(
                f"неконсервативное граничное условие {boundary.value} "
                f"для раскладки {self.kind.value}",
                stacklevel=3,
            )

    @property
    def kind(self) -> GridKind:
        return self.grid.kind

    @property
    def stencil(self) -> FluxStencil:
        """Дискретизация потоковой связи с учётом значения по умолчанию."""
        return self.coupling.stencil or DEFAULT_STENCIL[self.grid.kind]

    @property
    def is_conservative(self) -> bool:
        """Сохраняет ли конфигурация дискретную массу точно (на равномерной сетке)."""
        if self.boundary is not DEFAULT_BOUNDARY[self.kind]:
            return False
        kind = self.coupling.kind
        if kind is CouplingKind.GILES_INCONSISTENT:
            return False
        if kind is CouplingKind.GILES_CORRECT:
            return self.coupling.r == 1.0
        if self.coupling.is_flux:
            return self.stencil is DEFAULT_STENCIL[self.kind]
        return True

    def validate(self) -> None:
        if not (self.d_minus > 0.0 and self.d_plus > 0.0 and self.dt > 0.0):
            raise ConfigError(
                f"недопустимые физические параметры: D− = {self.d_minus!r}, "
                f"D+ = {self.d_plus!r}, Δt = {self.dt!r}"
            )
        nu_max = max(self.nu_minus, self.nu_plus)
        if nu_max > CFL_LIMIT and not self.allow_cfl_violation:
            raise CFLViolation(
                f"нарушено условие CFL: ν = {nu_max!r} > {CFL_LIMIT} "
                "(allow_cfl_violation=True снимает проверку)"
            )
        if self.boundary is not DEFAULT_BOUNDARY[self.kind] and not self.allow_mixed_boundary:
            raise ConfigError(
                f"граница {self.boundary.value} не консервативна для раскладки "
                f"{self.kind.value}; нужен allow_mixed_boundary=True"
            )
        if (
            self.kind is GridKind.FINITE_VOLUME
            and self.coupling.is_flux
            and self.stencil is FluxStencil.CENTRAL
        ):
            raise ConfigError(
                "несовместимая конфигурация: центральная потоковая связь "
                "определена только для узловой сетки"
            )

"""Явные шаги по времени: внутренние узлы, внешние границы, связь на интерфейсе.

Скалярные формулы (interior_step, boundary_step_*, couple_*) работают и с
числами, и с массивами numpy; advance и run собирают из них полный шаг
с двойной буферизацией: новое состояние считается только по старому.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from ..config import CFL_LIMIT, CFL_SAFETY_FRACTION, DEFAULT_AUDIT_EVERY
from ..errors import BlowUpError, ConfigError, LayoutMismatch
from .conservation import MassLedger, SummationMode, mass
from .fluxes import CouplingKind, FluxStencil
from .grid import BiDomainState, BoundaryKind, GridKind, SchemeConfig

Side = Literal["left", "right"]


# ---------------------------------------------------------------------------
# Устойчивость
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CFLBound:
    max_dt: float        # Δx²/(2·max D)
    safety_dt: float     # fraction·Δx²/max D


def cfl_limit(
    d_minus: float,
    d_plus: float,
    dx: float,
    fraction: float = CFL_SAFETY_FRACTION,
) -> CFLBound:
    """Предельный шаг явной схемы и шаг с запасом (по умолчанию 0.4·Δx²/max D)."""
    if not (d_minus > 0.0 and d_plus > 0.0 and dx > 0.0):
        raise ConfigError(
            f"недопустимые физические параметры: D− = {d_minus!r}, D+ = {d_plus!r}, Δx = {dx!r}"
        )
    if not 0.0 < fraction <= 2.0 * CFL_LIMIT:
        raise ConfigError(f"доля CFL должна лежать в (0, {2.0 * CFL_LIMIT}], получено {fraction!r}")
    d_max = max(d_minus, d_plus)
    return CFLBound(
        max_dt=CFL_LIMIT * dx * dx / d_max,
        safety_dt=fraction * dx * dx / d_max,
    )


# ---------------------------------------------------------------------------
# Формулы шаблонов
# ---------------------------------------------------------------------------

def interior_step(left, center, right, nu):
    return center + nu * (right - center) - nu * (center - left)


def boundary_step_central(edge, neighbor, nu, side: Side = "left"):
    """Однородный Нейман через центральную разность: фиктивный узел равен соседу."""
    if side == "left":
        return edge + 2.0 * nu * (neighbor - edge)
    return edge - 2.0 * nu * (edge - neighbor)


def boundary_step_onesided(edge, neighbor, nu, side: Side = "left"):
    """Однородный Нейман через одностороннюю разность (без множителя 2)."""
    if side == "left":
        return edge + nu * (neighbor - edge)
    return edge - nu * (edge - neighbor)


def couple_dirichlet_neumann(u_prev, u_m, v_next, nu_minus, nu_plus):
    """Непрерывность решения и потока; возвращает (u_m, v_m) нового слоя, v_m = u_m."""
    u_new = u_m + nu_plus * (v_next - u_m) - nu_minus * (u_m - u_prev)
    return u_new, u_new


def couple_giles_inconsistent(u_prev, u_m, v_next, nu_minus, nu_plus, r=1.0):
    """Вариант с лишним множителем 2: масса не сохраняется."""
    u_new = u_m + 2.0 * r * nu_plus * (v_next - u_m) - 2.0 * nu_minus * (u_m - u_prev)
    return u_new, u_new


def couple_giles_correct(u_prev, u_m, v_next, nu_minus, nu_plus, r=1.0):
    """Исправленная связь; при r = 1 совпадает с couple_dirichlet_neumann побитово."""
    if not r > 0.0:
        raise ConfigError(f"недопустимое отношение r = {r!r}: нужно r > 0")
    a = 2.0 * r * nu_plus / (1.0 + r)
    b = 2.0 * nu_minus / (1.0 + r)
    u_new = u_m + a * (v_next - u_m) - b * (u_m - u_prev)
    return u_new, u_new


def couple_flux_onesided(u_prev, u_m, v_m, v_next, nu_minus, nu_plus, dt_over_dx, J):
    """Потоковая связь с односторонними разностями.

    На сетке конечных объёмов вызывается с парой (u_m, v_{m+1}) вместо (u_m, v_m).
    """
    u_new = u_m - nu_minus * (u_m - u_prev) - dt_over_dx * J
    v_new = v_m + nu_plus * (v_next - v_m) + dt_over_dx * J
    return u_new, v_new


def couple_flux_central(u_prev, u_m, v_m, v_next, nu_minus, nu_plus, dt_over_dx, J):
    u_new = u_m - 2.0 * nu_minus * (u_m - u_prev) - 2.0 * dt_over_dx * J
    v_new = v_m + 2.0 * nu_plus * (v_next - v_m) + 2.0 * dt_over_dx * J
    return u_new, v_new


def couple_fv_dirichlet_neumann(u_prev, u_m, v_next, v_next2, nu_minus, nu_plus):
    """Связь Дирихле–Неймана на гранях конечных объёмов: (u_m, v_{m+1}) нового слоя."""
    u_new = u_m + nu_plus * (v_next - u_m) - nu_minus * (u_m - u_prev)
    v_new = v_next + nu_plus * (v_next2 - v_next) - nu_plus * (v_next - u_m)
    return u_new, v_new


def couple_fv_giles(u_prev, u_m, v_next, v_next2, nu_minus, nu_plus, r=1.0, correct=False):
    """Связь Джайлса для u_m и обновление v_{m+1} как в couple_fv_dirichlet_neumann."""
    if correct:
        u_new, _ = couple_giles_correct(u_prev, u_m, v_next, nu_minus, nu_plus, r)
    else:
        u_new, _ = couple_giles_inconsistent(u_prev, u_m, v_next, nu_minus, nu_plus, r)
    v_new = v_next + nu_plus * (v_next2 - v_next) - nu_plus * (v_next - u_m)
    return u_new, v_new


# ---------------------------------------------------------------------------
# Полный шаг
# ---------------------------------------------------------------------------

_BOUNDARY_OPS = {
    BoundaryKind.CENTRAL: boundary_step_central,
    BoundaryKind.ONE_SIDED: boundary_step_onesided,
}


def advance_single_domain(w: np.ndarray, nu: float, boundary: BoundaryKind | str = BoundaryKind.CENTRAL) -> np.ndarray:
    """Один шаг FTCS для одной области [0, 1] с однородным условием Неймана."""
    w = np.asarray(w, dtype=np.float64)
    if w.size < 3:
        raise ConfigError(f"для шаблона нужно минимум три узла, получено {w.size}")
    op = _BOUNDARY_OPS[BoundaryKind(boundary)]
    out = np.empty_like(w)
    out[1:-1] = interior_step(w[:-2], w[1:-1], w[2:], nu)
    out[0] = op(w[0], w[1], nu, "left")
    out[-1] = op(w[-1], w[-2], nu, "right")
    return out


def _step_arrays(
    u: np.ndarray,
    v: np.ndarray,
    config: SchemeConfig,
    u_out: np.ndarray,
    v_out: np.ndarray,
) -> None:
    """Записать новый слой в u_out, v_out; u и v только читаются."""
    num, nup = config.nu_minus, config.nu_plus
    nodal = config.kind is GridKind.NODAL
    coupling = config.coupling
    op = _BOUNDARY_OPS[config.boundary]

    u_out[1:-1] = interior_step(u[:-2], u[1:-1], u[2:], num)
    v_out[1:-1] = interior_step(v[:-2], v[1:-1], v[2:], nup)
    u_out[0] = op(u[0], u[1], num, "left")
    v_out[-1] = op(v[-1], v[-2], nup, "right")

    # Интерфейс: в обеих раскладках u[-1] = u_m, v[0] = v_m (узлы) или v_{m+1} (ячейки)
    u_prev, u_m, v_0, v_1 = u[-2], u[-1], v[0], v[1]
    kind = coupling.kind
    if coupling.is_flux:
        J = coupling.flux(float(u_m), float(v_0))
        if nodal and config.stencil is FluxStencil.CENTRAL:
            u_out[-1], v_out[0] = couple_flux_central(
                u_prev, u_m, v_0, v_1, num, nup, config.dt_over_dx, J
            )
        else:
            u_out[-1], v_out[0] = couple_flux_onesided(
                u_prev, u_m, v_0, v_1, num, nup, config.dt_over_dx, J
            )
    elif nodal:
        if kind is CouplingKind.DIRICHLET_NEUMANN:
            u_out[-1], v_out[0] = couple_dirichlet_neumann(u_prev, u_m, v_1, num, nup)
        elif kind is CouplingKind.GILES_CORRECT:
            u_out[-1], v_out[0] = couple_giles_correct(u_prev, u_m, v_1, num, nup, coupling.r)
        else:
            u_out[-1], v_out[0] = couple_giles_inconsistent(u_prev, u_m, v_1, num, nup, coupling.r)
    else:
        if kind is CouplingKind.DIRICHLET_NEUMANN:
            u_out[-1], v_out[0] = couple_fv_dirichlet_neumann(u_prev, u_m, v_0, v_1, num, nup)
        else:
            u_out[-1], v_out[0] = couple_fv_giles(
                u_prev, u_m, v_0, v_1, num, nup, coupling.r,
                correct=kind is CouplingKind.GILES_CORRECT,
            )


def advance(state: BiDomainState, config: SchemeConfig) -> BiDomainState:
    """Один полный шаг по времени; входное состояние не изменяется."""
    if state.grid != config.grid:
        raise LayoutMismatch(
            f"несовместимая конфигурация: состояние на сетке {state.grid}, схема на {config.grid}"
        )
    u_out = np.empty_like(state.u)
    v_out = np.empty_like(state.v)
    _step_arrays(state.u, state.v, config, u_out, v_out)
    return BiDomainState(
        grid=state.grid, u=u_out, v=v_out, t=state.t + config.dt, step=state.step + 1
    )


# ---------------------------------------------------------------------------
# Цикл моделирования
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepReport:
    step: int
    t: float
    drift: float | None = None     # C_{n} − C предыдущего аудита


@dataclass
class RunResult:
    final: BiDomainState
    ledger: MassLedger
    snapshots: list[BiDomainState] = field(default_factory=list)


def _first_non_finite(u: np.ndarray, v: np.ndarray, config: SchemeConfig, start: int, stop: int) -> int:
    """Повторить шаги start+1..stop от сохранённого состояния и найти первый
    слой с NaN или Inf; если такого нет (переполнилась только сумма), stop.
    """
    u, v = u.copy(), v.copy()
    u_next, v_next = np.empty_like(u), np.empty_like(v)
    for n in range(start + 1, stop + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            _step_arrays(u, v, config, u_next, v_next)
        u, u_next = u_next, u
        v, v_next = v_next, v
        if not (np.isfinite(u).all() and np.isfinite(v).all()):
            return n
    return stop


def run(
    initial: BiDomainState,
    config: SchemeConfig,
    n_steps: int,
    audit_every: int = DEFAULT_AUDIT_EVERY,
    summation: SummationMode | str = SummationMode.SEQUENTIAL,
    snapshot_every: int | None = None,
    on_step: Callable[[StepReport], None] | None = None,
) -> RunResult:
    """Выполнить n_steps шагов, записывая C_n в журнал на шаге 0, каждые
    audit_every шагов и на последнем шаге.

    Время слоя n считается как t_0 + n·Δt, без накопления суммы.
    Неконечная C_n на аудите означает разрушение решения: шаги после
    предыдущего аудита повторяются, и BlowUpError получает номер первого
    слоя с NaN или Inf.
    """
    if int(n_steps) != n_steps or n_steps < 1:
        raise ConfigError(f"число шагов должно быть ≥ 1, получено {n_steps!r}")
    if int(audit_every) != audit_every or audit_every < 1:
        raise ConfigError(f"audit_every должно быть ≥ 1, получено {audit_every!r}")
    if snapshot_every is not None and snapshot_every < 1:
        raise ConfigError(f"snapshot_every должно быть ≥ 1, получено {snapshot_every!r}")
    if initial.grid != config.grid:
        raise LayoutMismatch("несовместимая конфигурация: начальное состояние на другой сетке")

    summation = SummationMode(summation)
    grid, t0, step0 = initial.grid, initial.t, initial.step
    ledger = MassLedger(dx=grid.dx, summation_mode=summation)
    c_prev = mass(initial, summation)
    if not math.isfinite(c_prev):
        raise BlowUpError(step0, "начальные данные содержат NaN или Inf")
    ledger.record(step0, t0, c_prev)
    snapshots = [initial] if snapshot_every else []

    # Два буфера на каждую сторону; после шага они меняются ролями
    u, v = initial.u.copy(), initial.v.copy()
    u_next, v_next = np.empty_like(u), np.empty_like(v)
    # Последний слой, прошедший аудит
    good_u, good_v, good_n = u.copy(), v.copy(), 0
    for n in range(1, int(n_steps) + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            _step_arrays(u, v, config, u_next, v_next)
        u, u_next = u_next, u
        v, v_next = v_next, v
        audit = n % audit_every == 0 or n == n_steps
        snap = snapshot_every is not None and n % snapshot_every == 0
        if not (audit or snap):
            continue
        state = BiDomainState(grid=grid, u=u, v=v, t=t0 + n * config.dt, step=step0 + n)
        if audit:
            c = mass(state, summation)
            if not math.isfinite(c):
                raise BlowUpError(step0 + _first_non_finite(good_u, good_v, config, good_n, n))
            ledger.record(state.step, state.t, c)
            if on_step is not None:
                on_step(StepReport(step=state.step, t=state.t, drift=c - c_prev))
            c_prev = c
            good_u[:], good_v[:], good_n = u, v, n
        if snap:
            snapshots.append(state)

    final = BiDomainState(grid=grid, u=u, v=v, t=t0 + n_steps * config.dt, step=step0 + int(n_steps))
    return RunResult(final=final, ledger=ledger, snapshots=snapshots)

"""Потоки через интерфейс x = 1/2.

Соглашение о знаке: −J = D·∂/∂x(·), т.е. положительный наклон решения
соответствует отрицательному потоку. Функции возвращают J; шаговые формулы
вычитают (Δt/Δx)·J в обновлении слева и прибавляют справа.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

from ..config import CHANNEL_EPS_DEN
from ..errors import ConfigError, FluxSingularity


class CouplingKind(str, Enum):
    DIRICHLET_NEUMANN = "dirichlet-neumann"
    GILES_INCONSISTENT = "giles-inconsistent"
    GILES_CORRECT = "giles-correct"
    HEAT = "heat"
    GENERAL = "general"
    CHANNEL = "channel"
    MEMBRANE = "membrane"


class FluxStencil(str, Enum):
    """Дискретизация потоковой связи: центральная (с множителями 2) или односторонняя."""

    CENTRAL = "central"
    ONE_SIDED = "one-sided"


FLUX_KINDS = frozenset({
    CouplingKind.HEAT, CouplingKind.GENERAL, CouplingKind.CHANNEL, CouplingKind.MEMBRANE,
})


# ---------------------------------------------------------------------------
# Функции потока
# ---------------------------------------------------------------------------

def heat_flux(u: float, v: float, H: float) -> float:
    """J_heat(u, v) = H·(u − v). H может быть отрицательным (активный перенос)."""
    return H * (u - v)


def general_flux(u: float, v: float, H: float, theta: float) -> float:
    """J_gen(u, v) = −H·(θv − u); при θ = 1 совпадает с heat_flux побитово."""
    return -H * (theta * v - u)


def channel_flux(
    u: float,
    v: float,
    psi: float,
    alpha: float,
    beta: float,
    gamma: float,
    delta: float,
    eps_den: float = CHANNEL_EPS_DEN,
) -> float:
    """Поток кластера каналов Ψ(u − αv)/(β + γu + δv)."""
    den = beta + gamma * u + delta * v
    if abs(den) < eps_den:
        raise FluxSingularity(
            f"вырожденный знаменатель канального потока: |{den!r}| < {eps_den!r}"
        )
    return psi * (u - alpha * v) / den


def membrane_flux(u: float, v: float, p_l: float, p_p: float, k_d: float) -> float:
    """Мембранная накачка P_l(u − v) − P_p·v²/(K_d² + v²), u = E (ЭР), v = c (цитозоль)."""
    v2 = v * v
    den = k_d * k_d + v2
    if den == 0.0:
        raise FluxSingularity("мембранный поток сингулярен: K_d = 0 и v = 0")
    return p_l * (u - v) - p_p * v2 / den


# ---------------------------------------------------------------------------
# Описание связи
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CouplingSpec:
    """Выбранное условие связи и его параметры.

    stencil задаётся только для потоковых связей; None означает значение по умолчанию для
    раскладки (узловая → central, конечные объёмы → one-sided).
    """

    kind: CouplingKind
    stencil: FluxStencil | None = None
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
    r: float = 1.0
    eps_den: float = CHANNEL_EPS_DEN

    def __post_init__(self):
        object.__setattr__(self, "kind", CouplingKind(self.kind))
        if self.stencil is not None:
            object.__setattr__(self, "stencil", FluxStencil(self.stencil))
            if self.kind not in FLUX_KINDS:
                raise ConfigError(
                    f"stencil задаётся только для потоковых связей, а не для {self.kind.value}"
                )
        if self.kind is CouplingKind.MEMBRANE and self.k_d == 0.0:
            raise ConfigError("мембранный поток требует K_d ≠ 0")
        if self.kind in (CouplingKind.GILES_CORRECT, CouplingKind.GILES_INCONSISTENT) and self.r <= 0.0:
            raise ConfigError(f"недопустимое отношение r = {self.r!r}: нужно r > 0")
        if self.kind is CouplingKind.GILES_CORRECT and self.r != 1.0:
            warnings.warn(
                f"giles-correct с r = {self.r!r} экспериментальна: на равномерной сетке "
                "сохранение массы гарантировано только при r = 1",
                stacklevel=3,
            )

    @property
    def is_flux(self) -> bool:
        return self.kind in FLUX_KINDS

    def flux(self, u: float, v: float) -> float:
        """Вычислить J(u, v) для потоковой связи."""
        if self.kind is CouplingKind.HEAT:
            return heat_flux(u, v, self.H)
        if self.kind is CouplingKind.GENERAL:
            return general_flux(u, v, self.H, self.theta)
        if self.kind is CouplingKind.CHANNEL:
            return channel_flux(
                u, v, self.psi, self.alpha, self.beta, self.gamma, self.delta, self.eps_den
            )
        if self.kind is CouplingKind.MEMBRANE:
            return membrane_flux(u, v, self.p_l, self.p_p, self.k_d)
        raise ConfigError(f"связь {self.kind.value} не задаётся потоком")

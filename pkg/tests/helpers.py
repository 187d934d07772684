"""Общие данные тестов: параметры потоков и точные двоичные состояния."""

from __future__ import annotations

from bicouple.solver.fluxes import CouplingKind, CouplingSpec, FluxStencil
from bicouple.solver.grid import BiDomainState, GridKind

CHANNEL = dict(psi=9.3954e-7, alpha=1.497, beta=1.1949e-4, gamma=1.1556e-7, delta=1.1444e-7)
MEMBRANE = dict(p_l=0.02, p_p=1.0, k_d=0.2)


def dyadic_state(grid, rng, interface_equal: bool = False) -> BiDomainState:
    """Случайное состояние из чисел k/64: все операции шага точны в binary64."""
    u = rng.integers(0, 65, size=grid.left_size) / 64.0
    v = rng.integers(0, 65, size=grid.right_size) / 64.0
    if interface_equal and grid.kind is GridKind.NODAL:
        v[0] = u[-1]
    return BiDomainState(grid=grid, u=u, v=v)


def coupling_specs(kind: GridKind) -> list[CouplingSpec]:
    """Все связи, допустимые для раскладки."""
    specs = [
        CouplingSpec(CouplingKind.DIRICHLET_NEUMANN),
        CouplingSpec(CouplingKind.GILES_INCONSISTENT),
        CouplingSpec(CouplingKind.GILES_CORRECT),
        CouplingSpec(CouplingKind.HEAT, H=0.5),
        CouplingSpec(CouplingKind.GENERAL, H=0.25, theta=2.0),
        CouplingSpec(CouplingKind.CHANNEL, **CHANNEL),
        CouplingSpec(CouplingKind.MEMBRANE, **MEMBRANE),
    ]
    if kind is GridKind.NODAL:
        specs.append(CouplingSpec(CouplingKind.HEAT, stencil=FluxStencil.ONE_SIDED, H=0.5))
    return specs

import math

import numpy as np
import pytest

from bicouple.errors import CFLViolation, ConfigError
from bicouple.solver.fluxes import CouplingKind, CouplingSpec, FluxStencil
from bicouple.solver.grid import (
    BiDomainState,
    BoundaryKind,
    GridKind,
    SchemeConfig,
    build_grid,
    discretize_initial,
    grid_from_dx,
)


def cosine(x):
    return np.cos(math.pi * x) + 1.0


class TestBuildGrid:
    def test_nodal_layout(self):
        grid = build_grid(2, GridKind.NODAL)
        assert grid.N == 4
        assert grid.dx == 0.25
        x_left, x_right = grid.coordinates()
        np.testing.assert_array_equal(x_left, [0.0, 0.25, 0.5])
        np.testing.assert_array_equal(x_right, [0.5, 0.75, 1.0])

    def test_fv_layout(self):
        grid = build_grid(2, "fv")
        assert grid.kind is GridKind.FINITE_VOLUME
        x_left, x_right = grid.coordinates()
        np.testing.assert_array_equal(x_left, [0.125, 0.375])
        np.testing.assert_array_equal(x_right, [0.625, 0.875])

    @pytest.mark.parametrize("m", [1, 0, -3, 2.5])
    def test_too_coarse(self, m):
        with pytest.raises(ConfigError):
            build_grid(m, GridKind.NODAL)

    def test_sizes(self, grid_kind):
        grid = build_grid(5, grid_kind)
        extra = 1 if grid_kind is GridKind.NODAL else 0
        assert grid.left_size == 5 + extra
        assert grid.right_size == 5 + extra
        assert grid.dx * grid.N == 1.0

    def test_deterministic(self):
        assert build_grid(7, GridKind.NODAL) == build_grid(7, GridKind.NODAL)

    def test_from_dx(self):
        assert grid_from_dx(0.01, GridKind.NODAL).m == 50
        assert grid_from_dx(1e-4, GridKind.FINITE_VOLUME).m == 5000

    @pytest.mark.parametrize("dx", [0.3, 0.0, -0.1])
    def test_from_dx_rejects(self, dx):
        with pytest.raises(ConfigError):
            grid_from_dx(dx, GridKind.NODAL)


class TestDiscretize:
    def test_cosine_nodal(self):
        state = discretize_initial(build_grid(2, GridKind.NODAL), cosine, cosine)
        half = math.sqrt(2.0) / 2.0
        np.testing.assert_allclose(state.u, [2.0, 1.0 + half, 1.0], atol=1e-15)
        np.testing.assert_allclose(state.v, [1.0, 1.0 - half, 0.0], atol=1e-15)
        assert state.t == 0.0

    def test_piecewise_double_node(self):
        grid = build_grid(4, GridKind.NODAL)
        state = discretize_initial(grid, lambda x: np.ones_like(x), lambda x: np.full_like(x, 0.06))
        assert state.u[-1] == 1.0
        assert state.v[0] == 0.06

    def test_constant_scalar_broadcast(self, grid_kind):
        grid = build_grid(3, grid_kind)
        state = discretize_initial(grid, lambda x: 0.75, lambda x: 0.75)
        assert np.all(state.u == 0.75)
        assert np.all(state.v == 0.75)

    def test_fv_midpoint_values(self):
        grid = build_grid(2, GridKind.FINITE_VOLUME)
        state = discretize_initial(grid, cosine, cosine)
        np.testing.assert_allclose(state.u, cosine(np.array([0.125, 0.375])))

    def test_fv_exact_averages(self):
        grid = build_grid(4, GridKind.FINITE_VOLUME)
        state = discretize_initial(grid, cosine, cosine, exact_averages=True)
        x_left, _ = grid.coordinates()
        h = grid.dx / 2
        expected = 1.0 + (np.sin(math.pi * (x_left + h)) - np.sin(math.pi * (x_left - h))) / (math.pi * grid.dx)
        np.testing.assert_allclose(state.u, expected, rtol=1e-12)

    def test_exact_averages_nodal_rejected(self):
        with pytest.raises(ConfigError):
            discretize_initial(build_grid(2, GridKind.NODAL), cosine, cosine, exact_averages=True)


class TestState:
    def test_read_only(self):
        state = BiDomainState(build_grid(2, GridKind.NODAL), np.zeros(3), np.zeros(3))
        with pytest.raises(ValueError):
            state.u[0] = 1.0

    def test_copies_input(self):
        u = np.zeros(3)
        state = BiDomainState(build_grid(2, GridKind.NODAL), u, np.zeros(3))
        u[0] = 5.0
        assert state.u[0] == 0.0

    def test_shape_mismatch(self):
        with pytest.raises(ConfigError):
            BiDomainState(build_grid(2, GridKind.FINITE_VOLUME), np.zeros(3), np.zeros(2))


class TestSchemeConfig:
    def dn(self):
        return CouplingSpec(CouplingKind.DIRICHLET_NEUMANN)

    def test_derived_ratios(self):
        grid = build_grid(4, GridKind.NODAL)
        cfg = SchemeConfig(grid, d_minus=0.5, d_plus=1.0, dt=1.0 / 256, coupling=self.dn())
        assert cfg.nu_minus == 0.125
        assert cfg.nu_plus == 0.25
        assert cfg.dt_over_dx == 1.0 / 32
        assert cfg.boundary is BoundaryKind.CENTRAL

    def test_default_boundary_fv(self):
        cfg = SchemeConfig(build_grid(4, "fv"), 0.5, 1.0, 1.0 / 256, self.dn())
        assert cfg.boundary is BoundaryKind.ONE_SIDED
        assert cfg.stencil is FluxStencil.ONE_SIDED

    def test_cfl_violation(self):
        grid = build_grid(5, GridKind.NODAL)
        dt = 0.6 * grid.dx ** 2
        with pytest.raises(CFLViolation):
            SchemeConfig(grid, 1.0, 1.0, dt, self.dn())
        cfg = SchemeConfig(grid, 1.0, 1.0, dt, self.dn(), allow_cfl_violation=True)
        assert cfg.nu_plus > 0.5

    @pytest.mark.parametrize("d_minus,d_plus,dt", [(0.0, 1.0, 1e-3), (1.0, -1.0, 1e-3), (1.0, 1.0, 0.0)])
    def test_invalid_physical(self, d_minus, d_plus, dt):
        with pytest.raises(ConfigError):
            SchemeConfig(build_grid(5, GridKind.NODAL), d_minus, d_plus, dt, self.dn())

    def test_mixed_boundary_needs_flag(self):
        grid = build_grid(5, GridKind.NODAL)
        with pytest.raises(ConfigError):
            SchemeConfig(grid, 1.0, 1.0, 1e-3, self.dn(), boundary=BoundaryKind.ONE_SIDED)
        with pytest.warns(UserWarning, match="неконсервативное") as record:
            cfg = SchemeConfig(
                grid, 1.0, 1.0, 1e-3, self.dn(), boundary="one-sided", allow_mixed_boundary=True
            )
        assert record[0].filename == __file__
        assert not cfg.is_conservative

    def test_central_flux_on_fv_rejected(self):
        spec = CouplingSpec(CouplingKind.HEAT, stencil=FluxStencil.CENTRAL)
        with pytest.raises(ConfigError, match="несовместимая"):
            SchemeConfig(build_grid(5, "fv"), 1.0, 1.0, 1e-3, spec)

    def test_is_conservative(self):
        nodal = build_grid(5, GridKind.NODAL)
        fv = build_grid(5, GridKind.FINITE_VOLUME)
        heat_one = CouplingSpec(CouplingKind.HEAT, stencil=FluxStencil.ONE_SIDED)
        assert SchemeConfig(nodal, 1.0, 1.0, 1e-3, self.dn()).is_conservative
        assert SchemeConfig(fv, 1.0, 1.0, 1e-3, self.dn()).is_conservative
        assert SchemeConfig(fv, 1.0, 1.0, 1e-3, heat_one).is_conservative
        assert not SchemeConfig(nodal, 1.0, 1.0, 1e-3, heat_one).is_conservative
        giles = CouplingSpec(CouplingKind.GILES_INCONSISTENT)
        assert not SchemeConfig(nodal, 1.0, 1.0, 1e-3, giles).is_conservative

import math

import numpy as np
import pytest
from scipy import special

from src.mesh.generators import generate_cartesian, generate_distorted
from src.models.errors import InvalidArgumentError
from src.models.mesh import Aabb, CellField
from src.models.vortex import VortexPairConfig
from src.sources import (
    LighthillOperator,
    SnapshotSeries,
    bessel_j2,
    bessel_y2,
    farfield_at_points,
    farfield_pressure,
    lighthill_divergence,
    potential_velocity,
    radial_taper,
    smoothing_factor,
    vortex_centers,
    vortex_velocity,
)
from src.utils.tables import loglog_slope


@pytest.fixture
def cfg():
    return VortexPairConfig()


@pytest.fixture
def plate():
    """Single-layer Cartesian plate; z fluxes of an in-plane field vanish."""
    return generate_cartesian(Aabb((-1.0, -1.0, -0.1), (1.0, 1.0, 0.1)), (10, 10, 1))


class TestVortexPairConfig:
    def test_derived_quantities(self, cfg):
        assert cfg.omega == pytest.approx(0.0785397, abs=1e-6)
        assert cfg.mach == pytest.approx(0.0785397, abs=1e-6)
        assert cfg.acoustic_period == pytest.approx(40.0, abs=1e-4)
        assert cfg.fluid_period == pytest.approx(2.0 * cfg.acoustic_period)
        assert cfg.wavenumber == pytest.approx(2.0 * cfg.omega / cfg.c0)

    def test_still_pair(self):
        still = VortexPairConfig(gamma=0.0)
        assert still.omega == 0.0
        assert math.isinf(still.acoustic_period)


class TestBessel:
    ARGS = np.concatenate([np.geomspace(0.01, 11.9, 40), [12.0, 12.1], np.linspace(12.5, 200.0, 60)])

    def test_j2_against_scipy(self):
        np.testing.assert_allclose(bessel_j2(self.ARGS), special.jv(2, self.ARGS), rtol=1e-9, atol=1e-10)

    def test_y2_against_scipy(self):
        np.testing.assert_allclose(bessel_y2(self.ARGS), special.yv(2, self.ARGS), rtol=1e-9, atol=1e-10)

    def test_at_one(self):
        assert bessel_j2(1.0) == pytest.approx(0.11490348493190048, abs=1e-10)
        assert bessel_y2(1.0) == pytest.approx(-1.6506826068162546, abs=1e-10)

    def test_shapes_and_parity(self):
        assert isinstance(bessel_j2(3.0), float)
        assert bessel_j2(-3.0) == bessel_j2(3.0)
        assert bessel_y2(np.ones((2, 3))).shape == (2, 3)

    @pytest.mark.parametrize("x", [0.0, -1.0])
    def test_y2_domain(self, x):
        with pytest.raises(InvalidArgumentError):
            bessel_y2(x)


class TestVortexVelocity:
    def test_midpoint_is_at_rest(self, cfg):
        np.testing.assert_allclose(vortex_velocity(cfg, [[0.0, 0.0]], 0.0), [[0.0, 0.0]], atol=1e-15)

    def test_centres_rotate(self, cfg):
        quarter = 0.25 * cfg.fluid_period
        np.testing.assert_allclose(vortex_centers(cfg, quarter), [[0.0, 1.0], [0.0, -1.0]], atol=1e-12)

    def test_core_sees_only_partner(self, cfg):
        u = vortex_velocity(cfg, [[1.0, 0.0, 0.0]], 0.0)
        partner = cfg.gamma * 2.0 / (2.0 * math.pi * (cfg.rc**2 + 4.0))
        np.testing.assert_allclose(u, [[0.0, partner]], atol=1e-15)

    def test_matches_potential_flow_far_from_cores(self, cfg, rng):
        angles = rng.uniform(0, 2 * math.pi, 20)
        pts = 10.0 * np.column_stack([np.cos(angles), np.sin(angles)])
        np.testing.assert_allclose(vortex_velocity(cfg, pts, 3.0), potential_velocity(cfg, pts, 3.0), rtol=1e-3, atol=1e-5)

    def test_decay(self, cfg):
        speed = np.linalg.norm(vortex_velocity(cfg, [[1000.0, 0.0]], 0.0))
        assert speed == pytest.approx(cfg.gamma / (math.pi * 1000.0), rel=1e-5)

    def test_rotational_covariance(self, cfg, rng):
        alpha = 0.7
        rot = np.array([[math.cos(alpha), -math.sin(alpha)], [math.sin(alpha), math.cos(alpha)]])
        x = rng.uniform(-3, 3, size=(25, 2))
        t = 5.0
        rotated = vortex_velocity(cfg, x @ rot.T, t + alpha / cfg.omega)
        np.testing.assert_allclose(rotated, vortex_velocity(cfg, x, t) @ rot.T, atol=1e-12)

    def test_incompressible_away_from_cores(self, cfg):
        h = 0.02
        axis = np.arange(-5.0, 5.0 + h / 2, h)
        gx, gy = np.meshgrid(axis, axis, indexing="ij")
        u = vortex_velocity(cfg, np.column_stack([gx.ravel(), gy.ravel()]), 0.0).reshape(len(axis), len(axis), 2)
        div = np.gradient(u[..., 0], h, axis=0) + np.gradient(u[..., 1], h, axis=1)
        keep = np.ones_like(gx, dtype=bool)
        for c in vortex_centers(cfg, 0.0):
            keep &= np.hypot(gx - c[0], gy - c[1]) > 3.0 * cfg.rc
        keep[[0, -1], :] = keep[:, [0, -1]] = False
        scale = np.linalg.norm(u, axis=-1).max() / h
        assert np.abs(div[keep]).max() <= 1e-3 * scale

    def test_negative_time(self, cfg):
        with pytest.raises(InvalidArgumentError):
            vortex_velocity(cfg, [[1.0, 1.0]], -0.1)


class TestFarfield:
    def test_angular_period(self, cfg):
        theta = np.linspace(0, math.pi, 13)
        np.testing.assert_allclose(
            farfield_pressure(cfg, 30.0, theta, 50.0), farfield_pressure(cfg, 30.0, theta + math.pi, 50.0), atol=1e-15
        )

    def test_temporal_period(self, cfg):
        theta = np.linspace(0, 2 * math.pi, 9)
        p = farfield_pressure(cfg, 25.0, theta, 12.0)
        later = farfield_pressure(cfg, 25.0, theta, 12.0 + cfg.acoustic_period)
        np.testing.assert_allclose(p, later, atol=1e-12 * np.abs(p).max())

    def test_printed_phase(self, cfg):
        theta = np.array([0.3, 1.1])
        np.testing.assert_allclose(
            farfield_pressure(cfg, 30.0, theta, 0.0, phase="printed"), farfield_pressure(cfg, 30.0, theta, 0.0)
        )
        assert not np.allclose(
            farfield_pressure(cfg, 30.0, theta, 7.0, phase="printed"), farfield_pressure(cfg, 30.0, theta, 7.0)
        )

    def test_points_match_polar(self, cfg):
        pts = np.array([[30.0, 0.0, 0.0], [0.0, 20.0, 0.5]])
        expected = [farfield_pressure(cfg, 30.0, 0.0, 4.0), farfield_pressure(cfg, 20.0, math.pi / 2, 4.0)]
        np.testing.assert_allclose(farfield_at_points(cfg, pts, 4.0), expected)

    def test_cylindrical_spreading(self, cfg):
        radii = np.linspace(50.0, 150.0, 11)
        theta = np.linspace(0, math.pi, 721)
        envelope = [np.abs(farfield_pressure(cfg, r, theta, 0.0)).max() for r in radii]
        assert loglog_slope(radii, envelope) == pytest.approx(-0.5, abs=0.05)

    def test_errors_and_still_pair(self, cfg):
        with pytest.raises(InvalidArgumentError):
            farfield_pressure(cfg, 0.0, 0.0, 0.0)
        with pytest.raises(InvalidArgumentError):
            farfield_pressure(cfg, 1.0, 0.0, 0.0, phase="other")
        assert np.all(farfield_pressure(VortexPairConfig(gamma=0.0), np.array([1.0, 2.0]), 0.0, 1.0) == 0.0)


class TestSmoothing:
    def test_profile(self):
        assert smoothing_factor(5.0, 10.0, 15.0) == 1.0
        assert smoothing_factor(12.5, 10.0, 15.0) == pytest.approx(0.5)
        assert smoothing_factor(15.0, 10.0, 15.0) == pytest.approx(0.0, abs=1e-16)
        assert smoothing_factor(30.0, 10.0, 15.0) == pytest.approx(0.0, abs=1e-16)
        values = smoothing_factor(np.linspace(0, 20, 41), 10.0, 15.0)
        assert np.all(np.diff(values) <= 0.0)

    def test_order(self):
        with pytest.raises(InvalidArgumentError):
            smoothing_factor(1.0, 2.0, 2.0)

    def test_radial_taper_ignores_z(self):
        pts = np.array([[3.0, 4.0, 100.0], [0.0, 0.0, -7.0]])
        np.testing.assert_allclose(radial_taper(pts, 4.0, 6.0), [0.5, 1.0])


class TestLighthill:
    def test_constant_velocity(self, plate):
        u = np.tile([0.3, -1.2, 0.0], (plate.n_cells, 1))
        np.testing.assert_allclose(lighthill_divergence(plate, u).values, 0.0, atol=1e-12)

    def test_strain_field(self, plate):
        c = plate.geometry.cell_centroid
        u = np.column_stack([c[:, 0], -c[:, 1]])
        div = LighthillOperator(plate).divergence(u)
        interior = (np.abs(c[:, 0]) < 0.8) & (np.abs(c[:, 1]) < 0.8)
        expected = np.column_stack([c[:, 0], c[:, 1], np.zeros(len(c))])
        np.testing.assert_allclose(div[interior], expected[interior], atol=1e-10)

    def test_discrete_divergence_theorem(self, rng):
        mesh = generate_distorted(generate_cartesian(Aabb((0, 0, 0), (1, 1, 0.2)), (6, 6, 1)), 0.2, seed=4)
        geo = mesh.geometry
        u = rng.normal(size=(mesh.n_cells, 3))
        div = lighthill_divergence(mesh, CellField.on(mesh, u), rho0=1.3).values
        total = (geo.cell_volume[:, None] * div).sum(axis=0)

        flux = np.zeros(3)
        for f in geo.boundary_faces:
            owner = geo.face_cells[f, 0]
            normal = geo.face_normal[f]
            if np.dot(geo.face_centroid[f] - geo.cell_centroid[owner], normal) < 0:
                normal = -normal
            flux += 1.3 * np.outer(u[owner], u[owner]) @ normal * geo.face_area[f]
        np.testing.assert_allclose(total, flux, atol=1e-10)

    def test_field_checks(self, plate, cube_4):
        with pytest.raises(InvalidArgumentError):
            LighthillOperator(plate).divergence(np.zeros((3, 3)))
        with pytest.raises(InvalidArgumentError):
            lighthill_divergence(plate, CellField.on(cube_4, np.zeros((cube_4.n_cells, 3))))


class TestSnapshotSeries:
    def test_default_cadence(self, cfg, plate):
        series = SnapshotSeries(cfg, plate)
        assert series.count == 2000
        assert series.time_of(2000) == 0.0
        assert series.time_of(2001) == pytest.approx(0.02)

    def test_periodic_replay_and_interpolation(self, cfg, plate):
        series = SnapshotSeries(cfg, plate, dt_f=0.5, cache=True)
        period = series.count * series.dt_f
        np.testing.assert_array_equal(series.source(1.5), series.source(1.5 + period))
        np.testing.assert_allclose(series.source(1.0, "linear"), series.source(1.0))
        blended = series.source(1.25, "linear")
        np.testing.assert_allclose(blended, 0.5 * (series.divergence(2) + series.divergence(3)))
        assert series.divergence(2) is series.divergence(2)

    def test_in_plane_snapshot(self, cfg, plate):
        snap = SnapshotSeries(cfg, plate).snapshot(7)
        assert snap.time == pytest.approx(0.14)
        assert np.all(snap.velocity.values[:, 2] == 0.0)
        assert np.isfinite(snap.velocity.values).all()

    def test_taper_zeroes_outer_cells(self, cfg, plate):
        series = SnapshotSeries(cfg, plate, taper=(0.3, 0.6))
        r = np.hypot(*plate.geometry.cell_centroid[:, :2].T)
        assert np.all(series.divergence(0)[r >= 0.6] == 0.0)

    def test_arguments(self, cfg, plate):
        with pytest.raises(InvalidArgumentError):
            SnapshotSeries(cfg, plate, dt_f=0.0)
        series = SnapshotSeries(cfg, plate)
        with pytest.raises(InvalidArgumentError):
            series.source(-1.0)
        with pytest.raises(InvalidArgumentError):
            series.source(1.0, "cubic")

    def test_still_pair_has_one_snapshot(self, plate):
        assert SnapshotSeries(VortexPairConfig(gamma=0.0), plate).count == 1

    def test_write(self, tmp_path, cfg, plate):
        out = SnapshotSeries(cfg, plate).write_snapshots(tmp_path / "snaps", count=3)
        assert sorted(p.name for p in out.iterdir()) == [
            "snapshot_00000.txt",
            "snapshot_00001.txt",
            "snapshot_00002.txt",
            "times.csv",
        ]
        assert (out / "snapshot_00001.txt").read_text().splitlines()[0] == "cell_id ux uy uz"
        assert len((out / "times.csv").read_text().splitlines()) == 4

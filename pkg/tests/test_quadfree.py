import numpy as np
import pytest

from src.config.settings import load_config
from src.intersect.clipping import clip_convex
from src.intersect.engine import compute_intersection
from src.mesh.factory import build_mesh
from src.mesh.generators import generate_cartesian, generate_distorted
from src.models.errors import InvalidArgumentError
from src.models.mesh import Aabb
from src.models.polytope import Monomial, Polytope
from src.quadfree import (
    HomogeneousIntegrator,
    MonomialCache,
    box_moment_tensor,
    box_monomial_integral,
    integrate_monomial,
    integrate_over_cutmesh,
    integrate_over_mesh,
    integrate_polynomial,
    integrate_tessellated,
    integration_check,
    moment_tensor,
    relative_error,
)
from tests.fixtures.polytopes import random_convex_polytope
from tests.fixtures.voronoi import random_voronoi

MONOMIALS = [(0, 0, 0), (1, 0, 0), (0, 2, 1), (2, 2, 2), (3, 1, 0), (4, 4, 0), (0, 0, 6)]


class TestBox:
    """Closed forms over axis-aligned boxes."""

    @pytest.mark.parametrize("exps", MONOMIALS)
    def test_matches_closed_form(self, exps):
        box = Aabb((0.2, -1.0, 0.5), (1.3, 0.4, 2.0))
        poly = Polytope.box(box.min, box.max)
        exact = box_monomial_integral(box, exps)
        assert integrate_monomial(poly, exps) == pytest.approx(exact, rel=1e-12, abs=1e-14)

    def test_moment_tensor(self):
        lo, hi = (-0.5, 0.0, 1.0), (0.5, 2.0, 1.5)
        expected = box_moment_tensor(lo, hi, 3)
        np.testing.assert_allclose(moment_tensor(Polytope.box(lo, hi), 3), expected, rtol=1e-12, atol=1e-14)

    @pytest.mark.parametrize("exps", [(6, 4, 2), (12, 0, 0), (0, 0, 12), (0, 7, 5)])
    def test_degree_twelve(self, exps):
        box = Aabb((0.2, -1.0, 0.5), (1.3, 0.4, 2.0))
        exact = box_monomial_integral(box, exps)
        assert integrate_monomial(Polytope.box(box.min, box.max), exps) == pytest.approx(exact, rel=1e-11)

    def test_odd_monomial_vanishes_on_centred_box(self):
        poly = Polytope.box((-1, -1, -1), (1, 1, 1))
        assert abs(integrate_monomial(poly, (3, 2, 0))) < 1e-14


class TestHomogeneousIntegrator:
    @pytest.mark.parametrize("exps", MONOMIALS)
    def test_agrees_with_tessellation(self, rng, exps):
        m = Monomial.parse(exps)
        for _ in range(3):
            poly = random_convex_polytope(rng, n_points=14, centre=rng.uniform(-1, 1, size=3))
            value = integrate_monomial(poly, m)
            reference = integrate_tessellated(poly, m, m.degree)
            assert value == pytest.approx(reference, rel=1e-10, abs=1e-13)

    def test_constant_gives_volume(self, rng):
        poly = random_convex_polytope(rng)
        assert integrate_monomial(poly, (0, 0, 0)) == pytest.approx(poly.volume, rel=1e-12)

    def test_face_integrals_of_one_are_areas(self, rng):
        poly = random_convex_polytope(rng)
        np.testing.assert_allclose(HomogeneousIntegrator(poly).face_integrals((0, 0, 0)), poly.face_areas, rtol=1e-12)

    def test_anchor_independence(self, rng):
        poly = random_convex_polytope(rng, n_points=16, centre=(0.3, -0.2, 0.1))
        plain = HomogeneousIntegrator(poly)
        anchored = HomogeneousIntegrator(
            poly,
            face_anchors=rng.uniform(-2, 2, size=(poly.n_faces, 3)),
            edge_anchors=rng.uniform(0, 1, size=len(poly.edges)),
        )
        for exps in MONOMIALS:
            assert anchored.integrate(exps) == pytest.approx(plain.integrate(exps), rel=1e-10, abs=1e-13)

    def test_planar_table_grows_on_demand(self):
        integrator = HomogeneousIntegrator(Polytope.box((0, 0, 0), (1, 1, 1)))
        assert integrator.planar_degree == -1
        integrator.integrate((1, 1, 0))
        assert integrator.planar_degree == 2
        integrator.integrate((1, 0, 0))
        assert integrator.planar_degree == 2

    def test_translation_keeps_volume(self, rng):
        poly = random_convex_polytope(rng)
        moved = poly.translated((5.0, -3.0, 2.0))
        assert integrate_monomial(moved, (0, 0, 0)) == pytest.approx(poly.volume, rel=1e-10)

    def test_translation_shifts_first_moment(self, rng):
        poly = random_convex_polytope(rng, n_points=16)
        shift = np.array([5.0, -3.0, 2.0])
        moved = integrate_monomial(poly.translated(shift), (1, 0, 0))
        expected = integrate_monomial(poly, (1, 0, 0)) + shift[0] * poly.volume
        assert moved == pytest.approx(expected, rel=1e-10, abs=1e-12)

    def test_agrees_with_tessellation_on_cut_cells(self):
        slab = Aabb((-1.0, -1.0, 0.0), (1.0, 1.0, 0.5))
        acoustic = generate_distorted(generate_cartesian(slab, (5, 5, 1)), 0.2, seed=21)
        fluid = generate_distorted(generate_cartesian(slab, (9, 8, 1)), 0.2, seed=22)
        cut = compute_intersection(acoustic, fluid)
        assert len(cut) >= 100
        for i in range(100):
            poly = cut.polytope(i)
            for exps in MONOMIALS:
                m = Monomial.parse(exps)
                reference = integrate_tessellated(poly, m, m.degree)
                assert integrate_monomial(poly, m) == pytest.approx(reference, rel=1e-11, abs=1e-15)

    def test_polynomial_terms(self):
        poly = Polytope.box((0, 0, 0), (1, 1, 1))
        # 3 + 2x - y z over the unit cube
        terms = [(3.0, (0, 0, 0)), (2.0, (1, 0, 0)), (-1.0, (0, 1, 1))]
        assert integrate_polynomial(poly, terms) == pytest.approx(3.0 + 1.0 - 0.25)
        assert integrate_polynomial(poly, terms, cache=MonomialCache()) == pytest.approx(3.75)

    @pytest.mark.parametrize("exps", [(1, 2), (1, -1, 0), (0, 0, 0, 0)])
    def test_bad_exponents(self, exps):
        with pytest.raises(InvalidArgumentError):
            Monomial.parse(exps)

    def test_negative_order(self):
        with pytest.raises(InvalidArgumentError):
            moment_tensor(Polytope.box((0, 0, 0), (1, 1, 1)), -1)


class TestMonomialCache:
    def test_hits_on_repeated_geometry(self):
        cache = MonomialCache()
        a = Polytope.box((0, 0, 0), (1, 1, 1))
        b = Polytope.box((0, 0, 0), (1, 1, 1))
        first = cache.integrate(a, (2, 0, 0))
        assert cache.integrate(b, (2, 0, 0)) == first
        assert (cache.hits, cache.misses) == (1, 1)
        cache.integrate(a.translated((1, 0, 0)), (2, 0, 0))
        assert cache.misses == 2
        assert cache.hit_rate == pytest.approx(1 / 3)

    def test_tensor_fills_scalar_entries(self):
        cache = MonomialCache()
        poly = Polytope.box((0, 0, 0), (1, 2, 1))
        tensor = cache.moment_tensor(poly, 2)
        assert len(cache) == 27
        assert cache.integrate(poly, (1, 2, 0)) == tensor[1, 2, 0]
        assert cache.hits == 1
        with pytest.raises(ValueError):
            tensor[0, 0, 0] = 1.0

    def test_clear(self):
        cache = MonomialCache()
        cache.integrate(Polytope.box((0, 0, 0), (1, 1, 1)), (0, 0, 0))
        cache.clear()
        assert len(cache) == 0
        assert cache.hit_rate == 0.0


class TestMeshSums:
    def test_cartesian_mesh(self, cube_4, unit_box):
        for exps in [(0, 0, 0), (2, 0, 2), (4, 4, 4)]:
            exact = box_monomial_integral(unit_box, exps)
            assert relative_error(integrate_over_mesh(cube_4, exps), exact) <= 1e-12

    def test_voronoi_cells_tile_the_box(self):
        box = Aabb((0, 0, 0), (1, 1, 1))
        cells = random_voronoi(20, box, seed=3)
        for exps in [(0, 0, 0), (2, 1, 0), (2, 2, 2)]:
            total = sum(integrate_monomial(c, exps) for c in cells)
            assert total == pytest.approx(box_monomial_integral(box, exps), rel=1e-10)

    def test_voronoi_intersection_tiles_the_box(self):
        box = Aabb((0, 0, 0), (1, 1, 1))
        acoustic = random_voronoi(8, box, seed=4)
        fluid = random_voronoi(12, box, seed=5)
        cuts = [c for p in acoustic for q in fluid if (c := clip_convex(p, q)) is not None]
        for exps in [(0, 0, 0), (2, 2, 2), (4, 4, 4)]:
            total = sum(integrate_monomial(c, exps) for c in cuts)
            assert relative_error(total, box_monomial_integral(box, exps)) <= 1e-10

    def test_relative_error_of_zero_reference(self):
        assert relative_error(1e-16, 0.0) == 1e-16
        assert relative_error(1.1, 1.0) == pytest.approx(0.1)


class TestIntegrationCheck:
    @pytest.fixture
    def meshes(self):
        cfg = load_config().integrate_check
        acoustic = build_mesh(cfg.acoustic, 0)
        fluid = build_mesh(cfg.fluid, 0)
        return acoustic, fluid, compute_intersection(acoustic, fluid, keep_polytopes=True), cfg.monomials

    def test_default_meshes_are_exact(self, meshes):
        acoustic, fluid, cut, monomials = meshes
        table = integration_check(acoustic, fluid, cut, monomials)
        assert list(table["mesh"].unique()) == ["acoustic", "fluid", "cut"]
        assert len(table) == 3 * len(monomials)
        assert table["E_rel"].max() <= 1e-10
        assert table["E_rel_tessellation"].max() <= 1e-10
        assert "x^4y^4z^0" in set(table["monomial"])

    def test_cut_mesh_sum_matches_acoustic(self, meshes):
        acoustic, _, cut, _ = meshes
        for exps in [(0, 0, 0), (2, 2, 0)]:
            assert integrate_over_cutmesh(cut, exps) == pytest.approx(integrate_over_mesh(acoustic, exps), rel=1e-10)

    def test_without_tessellation(self, meshes):
        acoustic, fluid, cut, _ = meshes
        table = integration_check(acoustic, fluid, cut, [(0, 0, 0)], tessellation=False)
        assert table["E_rel_tessellation"].isna().all()
        assert table["E_rel"].max() <= 1e-12

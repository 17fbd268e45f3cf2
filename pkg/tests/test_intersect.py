import numpy as np
import pytest

from src.intersect import (
    aabb_overlap,
    broad_phase,
    clip_convex,
    clip_halfspace,
    compute_intersection,
    intersection_report,
    inverse_trilinear,
    inverse_trilinear_many,
    sat_intersects,
    write_cutmesh,
)
from src.mesh.cells import cell_polytope, hex_element
from src.mesh.generators import generate_cartesian, generate_o_grid
from src.models.mesh import Aabb, Provenance
from src.models.polytope import Polytope
from tests.fixtures.polytopes import random_convex_polytope


class TestBroadPhase:
    def test_closed_boxes(self):
        a = Aabb((0, 0, 0), (1, 1, 1))
        assert aabb_overlap(a, Aabb((1, 0, 0), (2, 1, 1)))
        assert not aabb_overlap(a, Aabb((1.0 + 1e-9, 0, 0), (2, 1, 1)))

    def test_tree_matches_brute_force(self, slab_pair):
        acoustic, fluid = slab_pair
        tree = broad_phase(acoustic, fluid)
        brute = broad_phase(acoustic, fluid, brute_force=True)
        assert len(tree) == acoustic.n_cells
        for t, b in zip(tree, brute):
            np.testing.assert_array_equal(t, b)

    def test_nested_candidates_include_touching_cells(self, cube_4, cube_8):
        cand = broad_phase(cube_4, cube_8)
        # a corner cell sees its 2x2x2 children plus the touching layer
        assert len(cand[0]) == 27


class TestSat:
    def test_separated_touching_and_overlapping(self):
        p = Polytope.box((0, 0, 0), (1, 1, 1))
        assert not sat_intersects(p, Polytope.box((1.5, 0, 0), (2, 1, 1)))
        assert sat_intersects(p, Polytope.box((1, 0, 0), (2, 1, 1)))
        assert sat_intersects(p, Polytope.box((0.5, 0.5, 0.5), (2, 2, 2)))

    def test_edge_edge_separation(self):
        # boxes rotated so that only an edge cross product separates them
        c, s = np.cos(np.pi / 4), np.sin(np.pi / 4)
        rot = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
        p = Polytope.box((-0.5, -0.5, -0.5), (0.5, 0.5, 0.5)).affine_image(rot)
        q = Polytope.box((0.3, 0.3, -0.5), (1.3, 1.3, 0.5))
        assert sat_intersects(p, q) == (clip_convex(p, q) is not None)

    def test_agrees_with_clipping(self, rng):
        verdicts = []
        for _ in range(1000):
            p = random_convex_polytope(rng, centre=rng.uniform(-2.0, 2.0, size=3))
            q = random_convex_polytope(rng)
            overlap = clip_convex(p, q, eps_vol=0.0) is not None
            assert sat_intersects(p, q) == overlap
            verdicts.append(overlap)
        assert any(verdicts) and not all(verdicts)


class TestClipping:
    def test_halfspace(self):
        cube = Polytope.box((-0.5, -0.5, -0.5), (0.5, 0.5, 0.5))
        half = clip_halfspace(cube, np.array([1.0, 0.0, 0.0]), 0.25)
        assert half.volume == pytest.approx(0.75)
        assert half.is_convex()
        assert half.euler_characteristic() == 2
        assert clip_halfspace(cube, np.array([1.0, 0.0, 0.0]), 0.5) is cube
        assert clip_halfspace(cube, np.array([1.0, 0.0, 0.0]), -0.5) is None

    def test_oblique_corner(self):
        cube = Polytope.box((0, 0, 0), (1, 1, 1))
        normal = np.ones(3) / np.sqrt(3.0)
        corner = clip_halfspace(cube, normal, 1.0 / np.sqrt(3.0))
        assert corner.volume == pytest.approx(1.0 / 6.0)
        assert corner.n_faces == 4

    def test_box_overlap_volume(self):
        p = Polytope.box((0, 0, 0), (1, 1, 1))
        q = Polytope.box((0.25, 0.5, -1), (2, 2, 0.5))
        assert clip_convex(p, q).volume == pytest.approx(0.75 * 0.5 * 0.5)

    def test_touching_boxes_are_empty(self):
        p = Polytope.box((0, 0, 0), (1, 1, 1))
        assert clip_convex(p, Polytope.box((1, 0, 0), (2, 1, 1))) is None

    def test_result_lies_in_both(self, rng):
        p = random_convex_polytope(rng, centre=(0.3, 0.0, 0.0))
        q = random_convex_polytope(rng)
        cut = clip_convex(p, q)
        assert cut is not None
        assert p.contains(cut.vertices, tol=1e-9).all()
        assert q.contains(cut.vertices, tol=1e-9).all()
        assert cut.volume <= min(p.volume, q.volume) * (1 + 1e-12)

    def test_volume_matches_hit_count(self, rng):
        n_samples = 200_000
        for _ in range(10):
            p = random_convex_polytope(rng, centre=rng.uniform(-0.3, 0.3, size=3))
            q = random_convex_polytope(rng)
            cut = clip_convex(p, q)
            box = p.aabb
            points = box.min + rng.uniform(size=(n_samples, 3)) * box.extent
            hits = np.count_nonzero(p.contains(points) & q.contains(points))
            if cut is None:
                assert hits == 0
                continue
            fraction = cut.volume / box.volume
            sigma = box.volume * np.sqrt(fraction * (1.0 - fraction) / n_samples)
            assert abs(box.volume * hits / n_samples - cut.volume) <= 4.0 * sigma


class TestTrilinear:
    def test_round_trip_on_curved_cell(self):
        mesh = generate_o_grid(half_width=2.0, block_cells=4, outer_radius=6.0, rings=3)
        element = hex_element(mesh, mesh.n_cells - 1)
        assert not element.is_affine
        xi = np.array([[0.0, 0.0, 0.0], [0.5, -0.3, 0.9], [-1.0, 1.0, 1.0]])
        back, ok = inverse_trilinear_many(element, element.map(xi))
        assert ok.all()
        np.testing.assert_allclose(back, xi, atol=1e-9)

    def test_affine_single_point(self, cube_4):
        element = hex_element(cube_4, 0)
        np.testing.assert_allclose(inverse_trilinear(element, [-0.375, -0.375, -0.375]), [0, 0, 0], atol=1e-14)


class TestComputeIntersection:
    def test_nested_grids_are_all_contained(self, cube_4, cube_8):
        cut = compute_intersection(cube_4, cube_8)
        assert len(cut) == 512
        assert cut.n_contained == 512
        assert cut.n_clipped == 0
        assert cut.acoustic_residuals().max() <= 1e-12
        assert cut.fluid_residuals().max() <= 1e-12
        # eight children per acoustic cell, in (acoustic, fluid) order
        assert all(len(cut.records_of(a)) == 8 for a in range(cube_4.n_cells))
        keys = list(zip(cut.acoustic_cell.tolist(), cut.fluid_cell.tolist()))
        assert keys == sorted(keys)

    def test_volume_partition(self, slab_pair):
        acoustic, fluid = slab_pair
        cut = compute_intersection(acoustic, fluid)
        assert cut.n_clipped > 0
        assert cut.acoustic_residuals().max() <= 1e-10
        assert cut.fluid_residuals().max() <= 1e-10
        assert cut.volume.sum() == pytest.approx(2.0 * 2.0 * 0.5, rel=1e-12)

    def test_records_rebuild_polytopes(self, slab_pair):
        acoustic, fluid = slab_pair
        kept = compute_intersection(acoustic, fluid, keep_polytopes=True)
        dropped = compute_intersection(acoustic, fluid, keep_polytopes=False)
        assert dropped.cuts is None
        for i in range(0, len(kept), 7):
            assert dropped.polytope(i).volume == pytest.approx(kept.volume[i], rel=1e-12)
        record = kept.record(0)
        assert record.provenance in (Provenance.CONTAINED, Provenance.CLIPPED)
        assert record.cut.volume == pytest.approx(record.volume, rel=1e-12)

    def test_brute_force_gives_same_cut(self, slab_pair):
        acoustic, fluid = slab_pair
        assert compute_intersection(acoustic, fluid).rows() == compute_intersection(acoustic, fluid, brute_force=True).rows()

    def test_worker_count_does_not_change_result(self, slab_pair):
        acoustic, fluid = slab_pair
        one = compute_intersection(acoustic, fluid, workers=1)
        two = compute_intersection(acoustic, fluid, workers=2)
        assert one.rows() == two.rows()
        assert len(two.worker_stats) == 2
        assert [s.worker for s in two.worker_stats] == [0, 1]
        assert intersection_report(one).counts() == intersection_report(two).counts()

    def test_every_sampled_overlap_is_recorded(self, slab_pair):
        acoustic, fluid = slab_pair
        cut = compute_intersection(acoustic, fluid)
        points = np.random.default_rng(5).uniform((-1.0, -1.0, 0.0), (1.0, 1.0, 0.5), size=(100_000, 3))

        def owner(mesh):
            inside = np.stack([cell_polytope(mesh, c).contains(points) for c in range(mesh.n_cells)], axis=1)
            assert inside.any(axis=1).all()
            return inside.argmax(axis=1)

        sampled = set(zip(owner(acoustic).tolist(), owner(fluid).tolist()))
        assert sampled <= set(zip(cut.acoustic_cell.tolist(), cut.fluid_cell.tolist()))

    def test_disjoint_meshes(self, cube_4):
        far = generate_cartesian(Aabb((5, 5, 5), (6, 6, 6)), (2, 2, 2))
        cut = compute_intersection(cube_4, far)
        assert len(cut) == 0
        assert cut.acoustic_residuals().min() == pytest.approx(1.0)


class TestReportAndExport:
    def test_report(self, cube_4, cube_8):
        report = intersection_report(compute_intersection(cube_4, cube_8))
        assert report.records == report.contained == 512
        assert report.empty_clips > 0
        assert report.candidates == report.records + report.rejected_by_sat + report.empty_clips
        assert set(report.counts()) == {
            "acoustic_cells",
            "fluid_cells",
            "candidates",
            "records",
            "contained",
            "clipped",
            "rejected_by_sat",
            "empty_clips",
        }

    def test_cutmesh_file(self, tmp_path, cube_4, cube_8):
        cut = compute_intersection(cube_4, cube_8)
        lines = write_cutmesh(cut, tmp_path / "cut.txt").read_text().splitlines()
        assert len(lines) == 512
        a, f, volume, provenance = lines[0].split()
        assert (int(a), int(f), provenance) == (0, int(cut.fluid_cell[0]), "contained")
        assert float(volume) == pytest.approx(0.125**3)

    def test_polytope_dump(self, tmp_path, slab_pair):
        acoustic, fluid = slab_pair
        cut = compute_intersection(acoustic, fluid, keep_polytopes=True)
        text = write_cutmesh(cut, tmp_path / "cut.txt", dump_polytopes=True).read_text()
        records = [line for line in text.splitlines() if not line.startswith("  ")]
        assert len(records) == len(cut)
        assert text.count("  vertices ") == len(cut)
        assert text.count("  faces ") == len(cut)

    def test_export_does_not_depend_on_workers(self, tmp_path, slab_pair):
        acoustic, fluid = slab_pair
        one = write_cutmesh(compute_intersection(acoustic, fluid, workers=1), tmp_path / "one.txt")
        three = write_cutmesh(compute_intersection(acoustic, fluid, workers=3), tmp_path / "three.txt")
        assert one.read_bytes() == three.read_bytes()


class TestCensus:
    @pytest.mark.slow
    def test_unit_cube_32_against_65(self, unit_box):
        acoustic = generate_cartesian(unit_box, (32, 32, 32))
        fluid = generate_cartesian(unit_box, (65, 65, 65))
        cut = compute_intersection(acoustic, fluid, workers=0)
        # per axis 34 fluid cells sit inside one acoustic cell and 31 straddle a face
        assert len(cut) == 96**3
        assert cut.n_contained == 34**3
        assert cut.n_clipped == 96**3 - 34**3
        assert cut.acoustic_residuals().max() <= 1e-10
        assert cut.fluid_residuals().max() <= 1e-10

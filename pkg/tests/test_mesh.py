import numpy as np
import pytest

from src.mesh.cells import cell_polytope, hex_corner_ids, hex_element, hex_elements
from src.mesh.factory import build_mesh
from src.mesh.generators import (
    extrude_polygons,
    generate_cartesian,
    generate_distorted,
    generate_o_grid,
    restrict_to_disk,
    submesh,
)
from src.mesh.io import MeshFileParser, read_mesh, write_mesh
from src.mesh.validation import validate_mesh
from src.models.config import MeshKind, MeshSpec
from src.models.errors import GeometryError, InvalidArgumentError, MeshParseError
from src.models.mesh import Aabb, CellKind, HexElement, PolyMesh


class TestCartesian:
    """Axis-aligned generator and the geometry it produces."""

    def test_counts(self, cube_4):
        assert cube_4.n_cells == 64
        assert cube_4.n_vertices == 125
        # 5*4*4 faces per axis direction
        assert cube_4.n_faces == 3 * 80
        assert cube_4.kind is CellKind.HEXAHEDRAL

    def test_volumes_and_centroids(self, cube_4):
        geo = cube_4.geometry
        np.testing.assert_allclose(geo.cell_volume, 0.25**3, rtol=1e-12)
        assert geo.cell_volume.sum() == pytest.approx(1.0, rel=1e-12)
        np.testing.assert_allclose(geo.cell_centroid[0], [-0.375, -0.375, -0.375], atol=1e-14)
        assert geo.axis_aligned.all()

    def test_shared_faces(self, cube_4):
        geo = cube_4.geometry
        interior = geo.face_cells[:, 1] >= 0
        # every interior face touches two cells; boundary faces one
        assert int(interior.sum()) == 3 * 3 * 16
        assert len(geo.boundary_faces) == 6 * 16

    def test_validates(self, cube_4):
        report = validate_mesh(cube_4)
        assert report.valid
        assert report.volume == pytest.approx(1.0)
        assert report.split_faces == 0

    def test_rejects_bad_counts(self, unit_box):
        with pytest.raises(InvalidArgumentError):
            generate_cartesian(unit_box, (0, 2, 2))


class TestDistorted:
    """Random interior perturbation of structured grids."""

    def test_same_seed_same_mesh(self, cube_4):
        a = generate_distorted(cube_4, 0.2, seed=3)
        b = generate_distorted(cube_4, 0.2, seed=3)
        assert a == b
        assert a != cube_4

    def test_boundary_fixed_and_volume_kept(self, cube_4):
        mesh = generate_distorted(cube_4, 0.2, seed=5)
        on_boundary = np.any(np.isclose(np.abs(cube_4.vertices), 0.5), axis=1)
        np.testing.assert_array_equal(mesh.vertices[on_boundary], cube_4.vertices[on_boundary])
        assert mesh.geometry.cell_volume.sum() == pytest.approx(1.0, rel=1e-12)

    def test_extruded_grid_keeps_planar_faces(self):
        base = generate_cartesian(Aabb((-2, -2, -0.05), (2, 2, 0.05)), (8, 8, 1))
        mesh = generate_distorted(base, 0.2, seed=1)
        report = validate_mesh(mesh)
        assert report.split_faces == 0
        np.testing.assert_array_equal(mesh.vertices[:, 2], base.vertices[:, 2])

    def test_amplitude_range(self, cube_4):
        with pytest.raises(InvalidArgumentError):
            generate_distorted(cube_4, 0.3, seed=0)

    def test_zero_amplitude_is_a_copy(self, cube_4):
        assert generate_distorted(cube_4, 0.0, seed=0) == cube_4


class TestOGrid:
    """Extruded O-grid used for the vortex-pair acoustic domain."""

    def test_structure(self):
        mesh = generate_o_grid(half_width=2.0, block_cells=4, outer_radius=6.0, rings=3)
        assert mesh.n_cells == 16 + 3 * 16
        report = validate_mesh(mesh)
        assert report.valid
        assert report.split_faces == 0

    def test_outer_nodes_on_circle(self):
        mesh = generate_o_grid(half_width=2.0, block_cells=4, outer_radius=6.0, rings=3)
        r = np.hypot(mesh.vertices[:, 0], mesh.vertices[:, 1])
        assert r.max() == pytest.approx(6.0, rel=1e-12)
        assert np.count_nonzero(np.isclose(r, 6.0)) == 2 * 16

    def test_block_elements_affine(self):
        mesh = generate_o_grid(half_width=2.0, block_cells=4, outer_radius=6.0, rings=3)
        elements = hex_elements(mesh)
        assert all(e.is_affine for e in elements[:16])

    def test_outer_radius_must_clear_block(self):
        with pytest.raises(InvalidArgumentError):
            generate_o_grid(half_width=2.0, block_cells=4, outer_radius=2.5, rings=3)


class TestSubmesh:
    def test_disk(self):
        grid = generate_cartesian(Aabb((-1, -1, -0.1), (1, 1, 0.1)), (10, 10, 1))
        disk = restrict_to_disk(grid, 0.75)
        r = np.hypot(*disk.geometry.cell_centroid[:, :2].T)
        assert disk.n_cells == int(np.count_nonzero(np.hypot(*grid.geometry.cell_centroid[:, :2].T) <= 0.75))
        assert r.max() <= 0.75
        assert validate_mesh(disk).valid

    def test_mask_shape(self, cube_4):
        with pytest.raises(InvalidArgumentError):
            submesh(cube_4, np.ones(3, dtype=bool))


class TestExtrusion:
    def test_triangle_and_square(self):
        points = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [2, 0.5]])
        mesh = extrude_polygons(points, [(0, 1, 2, 3), (1, 4, 2)], [0.0, 0.5, 1.0])
        assert mesh.n_cells == 4
        assert mesh.kind is CellKind.GENERAL
        assert mesh.geometry.cell_volume.sum() == pytest.approx(1.5 * 1.0)
        assert validate_mesh(mesh).valid

    def test_levels_increase(self):
        with pytest.raises(InvalidArgumentError):
            extrude_polygons(np.zeros((3, 2)), [(0, 1, 2)], [0.0, 0.0])


class TestValidation:
    def test_open_cell(self, cube_4):
        broken = PolyMesh(cube_4.vertices, cube_4.faces, (cube_4.cell_faces[0][:5],), (cube_4.cell_signs[0][:5],))
        with pytest.raises(GeometryError) as info:
            validate_mesh(broken)
        assert info.value.cell == 0

    def test_non_strict_report(self, cube_4):
        broken = PolyMesh(cube_4.vertices, cube_4.faces, (cube_4.cell_faces[0][:5],), (cube_4.cell_signs[0][:5],))
        report = validate_mesh(broken, strict=False)
        assert not report.valid
        assert "cell 0" in report.first_error

    def test_inverted_orientation(self, cube_4):
        flipped = tuple(tuple(-s for s in ss) for ss in cube_4.cell_signs)
        broken = PolyMesh(cube_4.vertices, cube_4.faces, cube_4.cell_faces, flipped)
        with pytest.raises(GeometryError):
            validate_mesh(broken)


class TestCells:
    def test_polytope_matches_geometry(self, cube_4):
        poly = cell_polytope(cube_4, 21)
        assert poly.volume == pytest.approx(cube_4.geometry.cell_volume[21], rel=1e-12)
        np.testing.assert_allclose(poly.centroid, cube_4.geometry.cell_centroid[21], atol=1e-14)
        assert poly.euler_characteristic() == 2

    def test_hex_element_corner_order(self, cube_4):
        element = hex_element(cube_4, 0)
        np.testing.assert_allclose(element.corners[0], [-0.5, -0.5, -0.5])
        np.testing.assert_allclose(element.corners[6], [-0.25, -0.25, -0.25])
        assert element.is_affine
        np.testing.assert_allclose(element.affine_matrix, 0.125 * np.eye(3), atol=1e-15)

    def test_folded_corner_is_rejected(self):
        cube = generate_cartesian(Aabb((0, 0, 0), (1, 1, 1)), (1, 1, 1))
        vertices = np.array(cube.vertices)
        vertices[np.argmax(vertices.sum(axis=1))] = (0.2, 0.2, 0.2)
        folded = PolyMesh(vertices, cube.faces, cube.cell_faces, cube.cell_signs)
        ids = hex_corner_ids(folded, 0)
        element = HexElement(folded.vertices[list(ids)], ids, 0)
        # 0.5 I - 0.1 at the centre, 0.5 I - 0.4 at the moved corner
        assert np.linalg.det(element.jacobian(np.zeros(3))[0]) > 0.0
        assert np.linalg.det(element.jacobian(np.ones(3))[0]) < 0.0
        with pytest.raises(GeometryError):
            hex_element(folded, 0)

    def test_warped_face_split(self):
        base = generate_cartesian(Aabb((0, 0, 0), (1, 1, 1)), (2, 2, 2))
        mesh = generate_distorted(base, 0.2, seed=7)
        polys = [cell_polytope(mesh, c) for c in range(mesh.n_cells)]
        assert validate_mesh(mesh).split_faces > 0
        assert all(p.is_convex() for p in polys)
        for c, p in enumerate(polys):
            assert p.volume == pytest.approx(mesh.geometry.cell_volume[c], rel=0.05)


class TestMeshIO:
    def test_round_trip(self, tmp_path, cube_4):
        mesh = generate_distorted(cube_4, 0.1, seed=2)
        path = write_mesh(mesh, tmp_path / "mesh.txt")
        assert read_mesh(path) == mesh

    def test_negative_codes_mean_reversed(self):
        text = MeshFileParser.format(generate_cartesian(Aabb((0, 0, 0), (1, 1, 1)), (1, 1, 1)))
        assert "\n6 -1 1 -3 3 -5 5\n" in text

    @pytest.mark.parametrize(
        "text, line",
        [
            ("polymesh 2\n", 1),
            ("polymesh 1\nvertices 1\n0 0\n", 3),
            ("polymesh 1\nvertices 0\nfaces 1\n3 0 1 2\n", 4),
            ("polymesh 1\nvertices x\n", 2),
        ],
    )
    def test_parse_errors_carry_line(self, text, line):
        with pytest.raises(MeshParseError) as info:
            MeshFileParser.parse(text)
        assert info.value.line == line

    def test_comments_and_blank_lines(self):
        text = MeshFileParser.format(generate_cartesian(Aabb((0, 0, 0), (1, 1, 1)), (1, 1, 1)))
        lines = text.splitlines()
        noisy = "\n".join(["# generated", lines[0], ""] + [l + "  # row" for l in lines[1:]]) + "\n"
        assert MeshFileParser.parse(noisy) == MeshFileParser.parse(text)


class TestFactory:
    def test_kinds(self):
        assert build_mesh(MeshSpec(cells=(2, 2, 2))).n_cells == 8
        distorted = build_mesh(MeshSpec(kind=MeshKind.DISTORTED, cells=(3, 3, 3), amplitude=0.1), seed=4)
        assert distorted == build_mesh(MeshSpec(kind=MeshKind.DISTORTED, cells=(3, 3, 3), amplitude=0.1, seed=4))
        ogrid = build_mesh(MeshSpec(kind=MeshKind.O_GRID, half_width=2.0, block_cells=2, outer_radius=4.0, rings=1))
        assert ogrid.n_cells == 4 + 8

    def test_file(self, tmp_path, cube_4):
        path = write_mesh(cube_4, tmp_path / "m.txt")
        mesh = build_mesh(MeshSpec(kind=MeshKind.FILE, path=str(path), name="renamed"))
        assert mesh == cube_4
        assert mesh.name == "renamed"

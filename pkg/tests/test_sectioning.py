import numpy as np
import pytest

from sectionlab.core import (Axis, BuildingModel, CameraPose, Element,
                             LayerSpec, SectionBox, Sign, TriMesh, aabb,
                             is_watertight, signed_volume)
from sectionlab.errors import UnknownElement
from sectionlab.sectioning import (RenderLayer, SectionMode, classify_layers,
                                   clip_model, kept_with_caps, set_plane)

from .conftest import (CUBE_TRIANGLES, CUBE_VERTICES, cube_mesh,
                       random_active_box, random_hull_mesh, random_scene)
from .oracles import clip_volume_halfspace


def make_model(mesh, eid="m"):
    return BuildingModel((Element(eid, meshes=((LayerSpec(0, "stone"), mesh),)),))


class TestSetPlane:
    def test_inactive_plane_is_identity(self, unit_cube_model):
        box = SectionBox.for_model(unit_cube_model)
        box = box.with_plane(Axis.X, Sign.POS, -100.0, active=False)
        result = clip_model(unit_cube_model, box)
        assert result.kept_volume() == pytest.approx(1.0, abs=1e-12)
        assert result.discarded_volume() == pytest.approx(0.0, abs=1e-12)
        assert result.caps == ()

    def test_set_beyond_paired_plane_clamps(self, unit_cube_model):
        box = SectionBox.for_model(unit_cube_model)
        box = set_plane(box, Axis.X, Sign.NEG, 0.4)
        box = set_plane(box, Axis.X, Sign.POS, 0.9)
        assert box.plane(Axis.X, Sign.POS).offset == 0.4

    def test_model_bounds_clamp(self, unit_cube_model):
        box = SectionBox.for_model(unit_cube_model)
        box = set_plane(box, Axis.X, Sign.NEG, 99.0, model=unit_cube_model)
        assert box.plane(Axis.X, Sign.NEG).offset == 1.0

    def test_sweep_monotone_volume(self, unit_cube_model):
        volumes = []
        for offset in np.linspace(-0.1, 1.1, 100):
            box = SectionBox.for_model(unit_cube_model)
            box = box.with_plane(Axis.X, Sign.POS, float(offset), active=True)
            volumes.append(clip_model(unit_cube_model, box).kept_volume())
        diffs = np.diff(volumes)
        assert (diffs <= 1e-12).all()


class TestHalfCube:
    def test_volumes_and_cap(self, unit_cube_model):
        box = set_plane(SectionBox.for_model(unit_cube_model),
                        Axis.X, Sign.POS, 0.5)
        result = clip_model(unit_cube_model, box)
        assert result.kept_volume() == pytest.approx(0.5, abs=1e-12)
        assert result.discarded_volume() == pytest.approx(0.5, abs=1e-12)
        assert len(result.caps) == 1
        cap = result.caps[0]
        assert cap.area() == pytest.approx(1.0, abs=1e-12)
        assert len(cap.triangles) == 2
        assert not cap.open_profile

    def test_cap_coplanar_and_oriented(self, unit_cube_model):
        box = set_plane(SectionBox.for_model(unit_cube_model),
                        Axis.X, Sign.POS, 0.5)
        cap = clip_model(unit_cube_model, box).caps[0]
        assert (np.abs(cap.points3d[:, 0] - 0.5) <= 1e-6).all()
        from sectionlab.core import triangle_normals
        normals = triangle_normals(cap.points3d, cap.triangles)
        assert np.allclose(normals, [[-1, 0, 0]] * len(normals), atol=1e-12)

    def test_kept_is_behind_plane(self, unit_cube_model):
        box = set_plane(SectionBox.for_model(unit_cube_model),
                        Axis.X, Sign.POS, 0.5)
        result = clip_model(unit_cube_model, box)
        lay = result.layer("cube-1", 0)
        used = np.unique(lay.kept)
        assert (lay.vertices[used][:, 0] >= 0.5 - 1e-12).all()


class TestConvexOracle:
    def test_volumes_match_halfspace_oracle(self):
        rng = np.random.default_rng(101)
        for trial in range(25):
            mesh = random_hull_mesh(rng)
            model = make_model(mesh, f"e{trial}")
            box = random_active_box(rng, model)
            result = clip_model(model, box)
            expected = clip_volume_halfspace(mesh.vertices, mesh.triangles, box)
            got = result.kept_volume()
            ref = max(expected, 1e-12)
            assert got == pytest.approx(expected, rel=1e-7, abs=1e-9), \
                f"trial {trial}: {got} vs oracle {expected}"

    def test_conservation_and_watertight(self):
        rng = np.random.default_rng(103)
        for trial in range(25):
            mesh = random_hull_mesh(rng)
            model = make_model(mesh, f"e{trial}")
            box = random_active_box(rng, model)
            result = clip_model(model, box)
            vin = signed_volume(np.asarray(mesh.vertices),
                                np.asarray(mesh.triangles))
            total = result.kept_volume() + result.discarded_volume()
            assert abs(total - vin) / vin <= 1e-9
            lay = result.layer(f"e{trial}", 0)
            if len(lay.kept):
                pts, tris = kept_with_caps(result, f"e{trial}", 0)
                assert is_watertight(tris)

    def test_cap_coplanarity_and_orientation_random(self):
        from sectionlab.core import triangle_normals
        rng = np.random.default_rng(109)
        checked = 0
        while checked < 40:
            mesh = random_hull_mesh(rng)
            model = make_model(mesh, "e")
            box = random_active_box(rng, model)
            result = clip_model(model, box)
            for cap in result.caps:
                if len(cap.triangles) == 0:
                    continue
                axis = cap.plane.axis.value
                assert np.abs(cap.points3d[:, axis] - cap.plane.offset).max() \
                    <= 1e-6
                normals = triangle_normals(cap.points3d, cap.triangles)
                assert np.allclose(normals, cap.plane.normal[None, :],
                                   atol=1e-9)
                checked += 1


class TestComposition:
    def test_two_single_axis_clips_equal_joint_clip(self, unit_cube_model):
        """clip(clip(m, X), Y) matches clip(m, X and Y) in volume and
        per-plane cut area (composition closes the first cut with its caps)."""
        box_x = set_plane(SectionBox.for_model(unit_cube_model),
                          Axis.X, Sign.POS, 0.3)
        box_y = set_plane(SectionBox.for_model(unit_cube_model),
                          Axis.Y, Sign.NEG, 0.6)
        box_xy = set_plane(box_x, Axis.Y, Sign.NEG, 0.6)

        first = clip_model(unit_cube_model, box_x)
        pts, tris = kept_with_caps(first, "cube-1", 0)
        closed = TriMesh(pts, tris, watertight=True)
        staged = clip_model(make_model(closed, "cube-1"), box_y)
        joint = clip_model(unit_cube_model, box_xy)

        assert staged.kept_volume() == pytest.approx(joint.kept_volume(), rel=1e-9)

        def on_plane_area(result, axis, offset):
            total = 0.0
            for lay in result.layers:
                v, t = lay.vertices, lay.kept
                if len(t) == 0:
                    continue
                on = np.abs(v[:, axis] - offset) <= 1e-9
                sel = on[t].all(axis=1)
                tt = np.asarray(t)[sel]
                if len(tt):
                    a = v[tt[:, 0]]
                    total += 0.5 * np.linalg.norm(
                        np.cross(v[tt[:, 1]] - a, v[tt[:, 2]] - a), axis=1).sum()
            for cap in result.caps:
                if cap.plane.axis.value == axis and cap.plane.offset == offset:
                    total += cap.area()
            return total

        # the X cut region is identical whether it arrived as caps or surface
        assert on_plane_area(staged, 0, 0.3) == \
            pytest.approx(on_plane_area(joint, 0, 0.3), rel=1e-9)
        assert on_plane_area(staged, 1, 0.6) == \
            pytest.approx(on_plane_area(joint, 1, 0.6), rel=1e-9)


class TestDegenerateSlab:
    def test_zero_width_slab_empty_volume_coincident_caps(self, unit_cube_model):
        box = SectionBox.for_model(unit_cube_model)
        box = set_plane(box, Axis.X, Sign.NEG, 0.5)
        box = set_plane(box, Axis.X, Sign.POS, 0.5)
        result = clip_model(unit_cube_model, box)
        assert result.kept_volume() == pytest.approx(0.0, abs=1e-12)
        assert result.discarded_volume() == pytest.approx(1.0, abs=1e-12)
        tokens = sorted(c.plane.token for c in result.caps)
        assert tokens == ["x-neg", "x-pos"]
        for cap in result.caps:
            assert cap.area() == pytest.approx(1.0, abs=1e-12)


class TestNonWatertight:
    def test_open_mesh_flags_caps_without_crashing(self):
        # cube missing its top face: open profile, best-effort caps
        open_tris = CUBE_TRIANGLES[:2].tolist() + CUBE_TRIANGLES[4:].tolist()
        mesh = TriMesh(CUBE_VERTICES, open_tris)
        model = make_model(mesh, "open-1")
        box = set_plane(SectionBox.for_model(model), Axis.X, Sign.POS, 0.5)
        result = clip_model(model, box)
        assert all(cap.open_profile for cap in result.caps)


class TestClassifyLayers:
    def _section(self, model, highlight=None, mode=SectionMode.SECTION,
                 camera=None, context_ids=None):
        box = set_plane(SectionBox.for_model(model), Axis.X, Sign.POS, 0.5)
        result = clip_model(model, box)
        return result, classify_layers(result, mode, highlight=highlight,
                                       camera=camera, context_ids=context_ids)

    def test_inspect_everything_kept_solid(self, two_cube_model):
        box = SectionBox.for_model(two_cube_model)
        result = clip_model(two_cube_model, box)
        layers = classify_layers(result, SectionMode.INSPECT)
        assert layers.triangle_count(RenderLayer.KEPT_SOLID) == 24
        for layer in RenderLayer:
            if layer is not RenderLayer.KEPT_SOLID:
                assert layers.triangle_count(layer) == 0

    def test_section_mode_routing(self, two_cube_model):
        result, layers = self._section(two_cube_model)
        assert layers.triangle_count(RenderLayer.KEPT_SOLID) > 0
        assert layers.triangle_count(RenderLayer.DISCARDED_WIREFRAME) > 0
        assert layers.triangle_count(RenderLayer.CAP_POCHE) > 0

    def test_section_highlight_red_solid_caps_stay_poche(self, two_cube_model):
        result, layers = self._section(two_cube_model, highlight=("cube-a", None))
        assert layers.triangle_count(RenderLayer.HIGHLIGHT_RED_SOLID) > 0
        # highlighted element's caps still render as poche
        poche_elements = {b.element_id for b in layers[RenderLayer.CAP_POCHE]}
        assert "cube-a" in poche_elements
        kept_elements = {b.element_id for b in layers[RenderLayer.KEPT_SOLID]}
        assert "cube-a" not in kept_elements

    def test_inspect_highlight_red_wire(self, two_cube_model):
        box = SectionBox.for_model(two_cube_model)
        result = clip_model(two_cube_model, box)
        layers = classify_layers(result, SectionMode.INSPECT,
                                 highlight=("cube-b", None))
        assert layers.triangle_count(RenderLayer.HIGHLIGHT_RED_WIRE) == 12
        assert layers.triangle_count(RenderLayer.KEPT_SOLID) == 12

    def test_unknown_highlight_raises(self, two_cube_model):
        with pytest.raises(UnknownElement):
            self._section(two_cube_model, highlight=("ghost", None))

    def test_partition_property_random_scenes(self):
        rng = np.random.default_rng(107)
        for _ in range(10):
            model = random_scene(rng)
            box = random_active_box(rng, model)
            result = clip_model(model, box)
            mode = [SectionMode.SECTION, SectionMode.INSPECT][int(rng.integers(2))]
            layers = classify_layers(result, mode)
            total = sum(layers.triangle_count(layer) for layer in RenderLayer)
            expected = sum(len(l.kept) + len(l.discarded) for l in result.layers)
            if mode is SectionMode.SECTION:
                expected += sum(len(c.triangles) for c in result.caps)
            assert total == expected

    def test_reveal_solid_only_in_reveal_mode(self, two_cube_model):
        camera = CameraPose(position=[-3, 0.5, 0.5], rotation=np.array([
            [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]), focal_px=500)
        result, layers = self._section(two_cube_model, mode=SectionMode.REVEAL,
                                       camera=camera)
        # cube-b sits entirely deeper than the nearest discarded geometry
        reveal = {b.element_id for b in layers[RenderLayer.REVEAL_SOLID]}
        assert "cube-b" in reveal
        _, plain = self._section(two_cube_model)
        assert plain.triangle_count(RenderLayer.REVEAL_SOLID) == 0

    def test_reveal_context_ids_override(self, two_cube_model):
        result, layers = self._section(two_cube_model, mode=SectionMode.REVEAL,
                                       context_ids={"cube-b"})
        reveal = {b.element_id for b in layers[RenderLayer.REVEAL_SOLID]}
        assert reveal == {"cube-b"}

    def test_reveal_needs_camera_or_ids(self, two_cube_model):
        with pytest.raises(ValueError):
            self._section(two_cube_model, mode=SectionMode.REVEAL)

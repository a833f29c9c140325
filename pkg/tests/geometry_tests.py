import math

import numpy as np
import pytest

from app.models.geometry import (Annulus, Ball, Box, CappedBody, Domain, MollifiedPolygon, StarShape, compute_cn,
                                 connected_to_infinity, make_curvature_cap, nesting_check)
from app.utils.errors import ConfigError, InadmissiblePerturbation, ResolutionTooCoarse


def _area(domain, spacing=0.02):
    _, weights = domain.quadrature(spacing)
    return float(np.sum(weights))


def test_compute_cn_matches_closed_form():
    for n in (2, 3):
        expected = (n - 1) ** 1.5 / 6.0
        assert compute_cn(n) == pytest.approx(expected, rel=1e-9), f"c_{n} should be (n-1)^1.5/6"


def test_curvature_cap_nesting_holds():
    cap = make_curvature_cap(10.0, {"radial": 0.5})
    assert cap.K_minus < cap.K < cap.K_plus, "a cubic perturbation should spread K_minus < K < K_plus"
    assert cap.b == pytest.approx(math.sqrt(2.0) / 10.0)
    assert cap.h == pytest.approx(0.1)
    report = nesting_check(cap)
    assert report.violations == 0, f"nesting violated at {report.violations} grid points"
    assert report.slice_nonempty and report.slice_star_shaped, f"slice checks failed: {report.to_dict()}"


def test_unperturbed_cap_is_exact_paraboloid():
    cap = make_curvature_cap(50.0)
    assert cap.K_minus == cap.K_plus == 50.0, "no perturbation means no spread"
    assert cap.violations() == [], "the pure paraboloid satisfies every cap condition"


def test_curvature_cap_rejects_large_perturbation():
    with pytest.raises(InadmissiblePerturbation):
        make_curvature_cap(10.0, {"radial": 100.0})


def test_curvature_cap_rejects_small_curvature():
    with pytest.raises(InadmissiblePerturbation):
        make_curvature_cap(2.0)


def test_monomial_keys_must_be_cubic():
    with pytest.raises(ConfigError):
        make_curvature_cap(10.0, {"monomials": {"21": 0.1}}, n=2)


def test_shape_areas():
    assert _area(Domain([Ball([0.0, 0.0], 1.0)])) == pytest.approx(math.pi, rel=1e-10), "unit disk"
    assert _area(Domain([Annulus([0.0, 0.0], 1.0, 2.0)])) == pytest.approx(3.0 * math.pi, rel=1e-10), "annulus"
    assert _area(Domain([Box([0.0, 0.0], [2.0, 0.5])])) == pytest.approx(1.0, rel=1e-12), "box"
    assert _area(Domain([StarShape.from_fourier([0.0, 0.0], [1.0])])) == pytest.approx(math.pi, rel=1e-10), \
        "constant polar radius is a disk"
    volume = float(np.sum(Domain([Ball([0.0, 0.0, 0.0], 1.0)]).quadrature(0.1)[1]))
    assert volume == pytest.approx(4.0 * math.pi / 3.0, rel=1e-10), "unit ball"


def test_mollified_polygon_area():
    r = 0.05
    polygon = MollifiedPolygon([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], r)
    core = polygon.core
    core_area = 0.5 * abs(np.cross(core[1] - core[0], core[2] - core[0]))
    perimeter = np.sum(np.linalg.norm(np.roll(core, -1, axis=0) - core, axis=1))
    expected = core_area + perimeter * r + math.pi * r * r
    assert _area(Domain([polygon]), 0.01) == pytest.approx(expected, rel=1e-4), "rounded triangle area"


def test_mollified_polygon_corner_apexes_lie_on_boundary():
    polygon = MollifiedPolygon([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], 0.05)
    apexes, normals = polygon.corner_apexes()
    assert apexes.shape == (3, 2)
    assert np.all(polygon.contains(apexes - 1e-6 * normals)), "just inside each apex is the polygon"
    assert not np.any(polygon.contains(apexes + 1e-6 * normals)), "just outside each apex is the complement"
    assert polygon.curvature == pytest.approx(20.0)


def test_capped_body_orientation():
    cap = make_curvature_cap(20.0)
    body = CappedBody(cap, apex=[1.0, 2.0], normal=[0.0, -1.0], bulk_radius=0.5)
    apex = np.array([1.0, 2.0])
    normal = np.array([0.0, -1.0])
    assert body.contains(apex + 0.5 * cap.h * normal)[0], "the interior normal points into the body"
    assert not body.contains(apex - 0.5 * cap.h * normal)[0], "behind the apex is outside"
    assert np.allclose(body.to_world(body.to_local(apex[None, :])), apex[None, :]), "frame round trip"


def test_capped_body_volume_matches_cell_count():
    cap = make_curvature_cap(10.0, {"radial": 0.5})
    body = CappedBody(cap, bulk_radius=0.6)
    volume = float(np.sum(body.quadrature(0.01)[1]))
    lo, hi = body.bounding_box()
    step = 2e-3
    axes = [np.arange(a + 0.5 * step, b, step) for a, b in zip(lo, hi)]
    cells = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 2)
    counted = float(np.count_nonzero(body.contains(cells))) * step * step
    assert volume == pytest.approx(counted, rel=5e-3), f"quadrature {volume} against cell count {counted}"


def test_capped_body_requires_room_for_cap_box():
    cap = make_curvature_cap(10.0)
    with pytest.raises(ConfigError):
        CappedBody(cap, bulk_radius=0.1)


def test_cap_box_stays_inside_local_box():
    cap = make_curvature_cap(10.0)
    body = CappedBody(cap, apex=[0.5, 0.0], normal=[-1.0, 0.0], bulk_radius=1.0)
    box = body.cap_box()
    nodes, weights = box.quadrature(cap.b / 24.0)
    local = body.to_local(nodes)
    assert np.all(np.abs(local[:, 0]) < cap.b + 1e-12) and np.all(local[:, 1] < cap.h + 1e-12), \
        "cap box nodes must stay in B(0,b) x (-h,h)"
    assert np.sum(weights) > 0


def test_domain_diameter_and_gap():
    domain = Domain([Ball([-2.0, 0.0], 0.5), Ball([2.0, 0.0], 0.5)], well_separated=True)
    assert domain.diameter == pytest.approx(5.0, rel=1e-12), "outer extent of two disks"
    assert domain.min_gap() == pytest.approx(3.0, rel=1e-12), "gap between facing points"
    assert domain.validate_separation(1.0) == pytest.approx(3.0)
    with pytest.raises(ConfigError):
        domain.validate_separation(2.0)


def test_overlapping_components_have_zero_gap():
    domain = Domain([Ball([0.0, 0.0], 1.0), Ball([0.5, 0.0], 1.0)])
    assert domain.min_gap() == 0.0


def test_domain_rejects_mixed_dimensions():
    with pytest.raises(ConfigError):
        Domain([Ball([0.0, 0.0], 1.0), Ball([0.0, 0.0, 0.0], 1.0)])


def test_connected_to_infinity():
    domain = Domain([Annulus([0.0, 0.0], 0.5, 1.0)])
    assert not connected_to_infinity([0.0, 0.0], domain, 0.05), "the hole of an annulus is enclosed"
    assert connected_to_infinity([1.5, 0.0], domain, 0.05), "points outside reach infinity"


def test_connected_to_infinity_needs_complement_cells():
    domain = Domain([Ball([0.0, 0.0], 1.0)])
    with pytest.raises(ResolutionTooCoarse):
        connected_to_infinity([0.0, 0.0], domain, 0.05)

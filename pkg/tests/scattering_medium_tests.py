import math

import numpy as np
import pytest

from app.models.geometry import Ball, Box, Domain
from app.models.scattering_medium import (IncidentField, MediumScene, born_far_field, c0_young_bound, estimate_c0,
                                          optical_theorem_defect, scatter_visibility_ratio, scattered_far_field,
                                          series_far_field, solve_ls, solve_series)
from app.models.specfun import bessel_j
from app.service.suite_base import contraction_factor, iteration_rate, relative_difference
from app.utils.errors import ConfigError, InvalidScene


def _disk_scene(radius, contrast, k, spacing=0.02, center=(0.0, 0.0), direction=(1.0, 0.0)):
    return MediumScene(Domain([Ball(list(center), radius)]), contrast, k,
                       IncidentField.plane_wave(k, list(direction)), spacing=spacing)


def test_zero_contrast_returns_the_incident_field():
    scene = _disk_scene(0.5, 0.0, 1.0, spacing=0.05)
    solution = solve_ls(scene)
    _, shape, centres, _ = scene.grid
    assert solution.iterations == 1 and solution.method == "neumann"
    assert np.allclose(solution.u.values, scene.incident(centres).reshape(shape), atol=0)
    assert scattered_far_field(scene, solution, 16).sup() == 0.0


def test_small_contrast_converges_geometrically():
    scene = _disk_scene(1.0, 0.1, 0.5, spacing=0.05)
    solution = solve_ls(scene, tol=1e-10)
    _, shape, centres, _ = scene.grid
    assert solution.converged and solution.method == "neumann"
    q = contraction_factor(scene)
    assert q < 0.5, f"k^2 C0 |V| = {q} should be in the contractive regime"
    assert iteration_rate(solution) <= 1.1 * q, f"observed rate {iteration_rate(solution)} against {q}"
    ui = scene.incident(centres).reshape(shape)
    assert np.linalg.norm(solution.u.values) <= 2.0 * np.linalg.norm(ui)


def test_ls_far_field_matches_series_for_a_disk():
    scene = _disk_scene(0.5, 0.5, 2.0)
    ls = scattered_far_field(scene, solve_ls(scene), 16)
    series = series_far_field(scene, 16)
    difference = relative_difference(ls, series)
    assert difference < 1e-3, f"LS and series far fields differ by {difference}"


def test_ls_far_field_matches_series_for_a_ball():
    k = 2.0
    scene = MediumScene(Domain([Ball([0.0, 0.0, 0.0], 0.5)]), 0.5, k, IncidentField.plane_wave(k, [0.0, 0.0, 1.0]),
                        spacing=0.025)
    difference = relative_difference(scattered_far_field(scene, solve_ls(scene), 8), series_far_field(scene, 8))
    assert difference < 1e-3, f"LS and series far fields differ by {difference} in 3D"


def test_strong_contrast_falls_back_to_gmres():
    scene = _disk_scene(0.5, 5.0, 2.0, spacing=0.01)
    solution = solve_ls(scene, tol=1e-6)
    assert solution.method == "gmres", "Neumann iteration should diverge at this contrast"
    assert solution.log[-1]["residual"] <= 1e-6
    difference = relative_difference(scattered_far_field(scene, solution, 16), series_far_field(scene, 16))
    assert difference < 1e-3, f"GMRES far field is {difference} away from the series"


def test_born_approximation_in_weak_regime():
    scene = _disk_scene(0.5, 0.01, 1.0, spacing=0.025)
    full = scattered_far_field(scene, solve_ls(scene), 16)
    born = born_far_field(scene, 16)
    assert relative_difference(full, born) < 5e-2, "first-order Born term should dominate"
    assert born.sup() > 0


@pytest.mark.parametrize("n,direction", [(2, [1.0, 0.0]), (3, [0.0, 0.0, 1.0])])
def test_optical_theorem_for_series_far_field(n, direction):
    scene = MediumScene(Domain([Ball(np.zeros(n), 0.8)]), 0.6, 1.5, IncidentField.plane_wave(1.5, direction),
                        spacing=0.1)
    far = series_far_field(scene, 64 if n == 2 else 24)
    forward = series_far_field(scene, directions=[direction]).values[0]
    defect = optical_theorem_defect(far, forward)
    assert defect < 1e-8, f"optical theorem defect {defect:.2e} in {n}D"


def test_series_far_field_reciprocity_off_centre():
    k = 1.2
    theta = np.array([math.cos(0.5), math.sin(0.5)])
    xhat = np.array([math.cos(2.0), math.sin(2.0)])
    forward = _disk_scene(0.4, 0.8, k, spacing=0.1, center=(0.3, -0.2), direction=theta)
    backward = _disk_scene(0.4, 0.8, k, spacing=0.1, center=(0.3, -0.2), direction=-xhat)
    a = series_far_field(forward, directions=[xhat]).values[0]
    b = series_far_field(backward, directions=[-theta]).values[0]
    assert abs(a - b) < 1e-10 * abs(a), f"u_inf(xhat; theta) = {a} but u_inf(-theta; -xhat) = {b}"


def test_estimate_c0_properties():
    coarse = estimate_c0(1.0, 1.0, 2, spacing=1.0 / 16.0)
    fine = estimate_c0(1.0, 1.0, 2, spacing=1.0 / 32.0)
    assert abs(coarse - fine) < 0.1 * fine, f"resolutions disagree: {coarse} against {fine}"
    assert estimate_c0(1.0, 0.5, 2) < fine, "the operator norm grows with the ball"
    assert fine <= c0_young_bound(1.0, 1.0, 2), "power iteration cannot exceed Young's bound"
    assert estimate_c0(1.0, 1.0, 2, seed=5) == estimate_c0(1.0, 1.0, 2, seed=5)
    with pytest.raises(ConfigError):
        estimate_c0(1.0, 1.0, 2, n_iterations=3)


def test_scatter_visibility_ratio():
    scene = _disk_scene(0.5, 0.3, 1.0, spacing=0.05)
    assert scatter_visibility_ratio(scene, 0.5) == pytest.approx(0.3, rel=1e-6), "|c| / (2R)^alpha with 2R = 1"
    vanishing = MediumScene(Domain([Ball([0.0, 0.0], 1.0)]), lambda x: 1.0 - np.sum(np.atleast_2d(x) ** 2, axis=1),
                            1.0, IncidentField.plane_wave(1.0, [1.0, 0.0]), spacing=0.05)
    assert scatter_visibility_ratio(vanishing, 0.5) < 1e-12


def test_incident_field_kinds():
    k, tau = 2.0, 1.5
    rho = np.array([1j * math.sqrt(k * k + tau * tau), -tau])
    cgo = IncidentField.cgo(k, rho)
    assert cgo(np.zeros((1, 2)))[0] == 1.0
    with pytest.raises(ConfigError):
        IncidentField.cgo(k, np.array([1j * tau, -tau]))
    with pytest.raises(ConfigError):
        cgo.modal(10)
    wave = IncidentField.herglotz(k, 2, {0: 1.0})
    points = np.array([[0.3, 0.4]])
    assert abs(wave(points)[0] - 2.0 * math.pi * bessel_j(0, k * 0.5)) < 1e-12, "constant density gives 2 pi J0(k|x|)"
    with pytest.raises(ConfigError):
        IncidentField("spherical", k, 2)


def test_scene_validation():
    with pytest.raises(InvalidScene):
        _disk_scene(0.5, 0.1 - 0.2j, 1.0, spacing=0.05)
    with pytest.raises(ConfigError):
        _disk_scene(0.5, 0.1, 0.0, spacing=0.05)
    box = MediumScene(Domain([Box([0.0, 0.0], [1.0, 1.0])]), 0.1, 1.0, IncidentField.plane_wave(1.0, [1.0, 0.0]),
                      spacing=0.05)
    with pytest.raises(ConfigError):
        solve_series(box)

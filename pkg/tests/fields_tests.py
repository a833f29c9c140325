import numpy as np
import pytest

from app.models.cgo import CgoVector
from app.models.fields import (BoxBump, CapBump, CgoField, ConstantField, FlatWallField, PlaneWave,
                               RadiationlessCapBump, TransmissionPair, ZeroField)
from app.models.geometry import make_curvature_cap

CUBICS = {2: {"monomials": {"3": 0.5}}, 3: {"monomials": {"30": 0.5, "12": 0.2}}}


def _fd_gradient(field, x, step=1e-5):
    out = np.zeros(x.shape, dtype=complex)
    for i in range(x.shape[1]):
        e = np.zeros(x.shape[1])
        e[i] = step
        out[:, i] = (field(x + e) - field(x - e)) / (2.0 * step)
    return out


def _fd_laplacian(field, x, step=1e-3):
    out = np.zeros(x.shape[0], dtype=complex)
    for i in range(x.shape[1]):
        e = np.zeros(x.shape[1])
        e[i] = step
        out += field(x + e) - 2.0 * field(x) + field(x - e)
    return out / step ** 2


def _points(n, lo, hi, count=25, seed=5):
    rng = np.random.default_rng(seed)
    return lo + (hi - lo) * rng.random((count, n))


def _check_derivatives(field, x, tol):
    grad_err = np.max(np.abs(field.gradient(x) - _fd_gradient(field, x)))
    lap_err = np.max(np.abs(field.laplacian(x) - _fd_laplacian(field, x)))
    scale = float(np.max(np.abs(field.laplacian(x)))) + 1.0
    assert grad_err < tol * scale, f"{type(field).__name__}: gradient off by {grad_err:.2e}"
    assert lap_err < tol * scale, f"{type(field).__name__}: Laplacian off by {lap_err:.2e}"


@pytest.mark.parametrize("field", [
    BoxBump([0.0, 0.0], [1.0, 1.0]),
    FlatWallField(),
    PlaneWave(2.0, [1.0, 2.0]),
    CgoField(CgoVector.canonical(1.5, 2)),
], ids=["box-bump", "flat-wall", "plane-wave", "cgo"])
def test_closed_form_derivatives_in_two_dimensions(field):
    _check_derivatives(field, _points(2, 0.1, 0.9), 1e-5)


def test_closed_form_derivatives_in_three_dimensions():
    for field in (BoxBump([0.0, 0.0, 0.0], [1.0, 1.0, 1.0]), CgoField(CgoVector.canonical(1.0, 3))):
        _check_derivatives(field, _points(3, 0.1, 0.9), 1e-5)


@pytest.mark.parametrize("n", [2, 3])
def test_cap_fields_derivatives(n):
    cap = make_curvature_cap(10.0, CUBICS[n], n=n)
    x = _points(n, -0.5 * cap.b, 0.5 * cap.b)
    x[:, -1] = np.abs(x[:, -1]) + 0.2 * cap.h
    for field in (CapBump(cap), RadiationlessCapBump(cap)):
        _check_derivatives(field, x, 1e-5)


def test_cgo_field_is_harmonic():
    field = CgoField(CgoVector.canonical(3.0, 3))
    x = _points(3, -1.0, 1.0)
    assert np.max(np.abs(_fd_laplacian(field, x))) < 1e-4 * np.max(np.abs(field(x))), "rho . rho = 0"


def test_cgo_field_accepts_raw_vectors():
    field = CgoField(np.array([2j, -2.0]))
    assert field.rho.tau == 2.0
    assert field(np.zeros((1, 2)))[0] == 1.0


def test_cap_bump_vanishes_on_the_graph():
    cap = make_curvature_cap(10.0, {"radial": 0.5})
    xp = np.linspace(-cap.b, cap.b, 11)[:, None]
    graph = np.column_stack([xp, cap.omega(xp)])
    for field in (CapBump(cap), RadiationlessCapBump(cap)):
        assert np.max(np.abs(field(graph))) < 1e-14
        assert np.max(np.abs(field.gradient(graph))) < 1e-12, "second-order vanishing on the graph"


def test_radiationless_cap_bump_vanishes_on_the_box():
    cap = make_curvature_cap(10.0)
    field = RadiationlessCapBump(cap)
    top = np.column_stack([np.linspace(-cap.b, cap.b, 9), np.full(9, cap.h)])
    side = np.column_stack([np.full(9, cap.b), np.linspace(0.0, cap.h, 9)])
    for face in (top, side):
        assert np.max(np.abs(field(face))) < 1e-14
        assert np.max(np.abs(field.gradient(face))) < 1e-12


def test_exact_and_stencil_sources_agree_to_second_order():
    field = BoxBump([0.0, 0.0], [1.0, 1.0])
    x = _points(2, 0.2, 0.8)
    exact = field.source(1.0)(x)
    errors = [np.max(np.abs(field.source(1.0, spacing=h)(x) - exact)) for h in (0.02, 0.01)]
    assert errors[1] < 0.3 * errors[0], f"stencil error should drop by about 4 per halving, got {errors}"


def test_trivial_fields():
    x = _points(2, 0.0, 1.0, count=3)
    assert np.all(ZeroField()(x) == 0) and np.all(ZeroField().gradient(x) == 0)
    assert np.all(ConstantField(2.0)(x) == 2.0) and np.all(ConstantField(2.0).laplacian(x) == 0)


def test_transmission_pair_solves_the_medium_equation():
    cap = make_curvature_cap(10.0)
    pair = TransmissionPair(2.0, [1.0, 0.0], RadiationlessCapBump(cap), scale=1e5)
    x = _points(2, -0.5 * cap.b, 0.5 * cap.b)
    x[:, -1] = 0.5 * cap.h + 0.1 * cap.h * x[:, 0] / cap.b
    residual = _fd_laplacian(pair.u, x, step=1e-4) + pair.k ** 2 * (1.0 + pair.contrast(x)) * pair.u(x)
    assert np.max(np.abs(residual)) < 1e-3 * np.max(np.abs(pair.k ** 2 * pair.u(x))), \
        "the induced contrast should make u a solution"

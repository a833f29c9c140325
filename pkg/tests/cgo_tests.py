import math

import numpy as np
import pytest
from scipy.integrate import quad

from app.models.cgo import (CgoVector, cgo_over_parabola, cgo_sliced, cgo_tail_bound, cgo_weighted_cap_bound,
                            complex_gaussian_integral, curvature_envelope, curvature_estimate_rhs,
                            curvature_estimate_terms, decay_threshold, identity_split_terms)
from app.models.fields import CapBump, ConstantField
from app.models.geometry import Box, Domain, make_curvature_cap
from app.models.grid import sample
from app.models.quadrature_oracle import Region, graph_cap_rule, integrate
from app.utils.errors import BudgetExceeded, ConfigError, DomainError, PrecondViolated


def test_cgo_vector_validation():
    with pytest.raises(ConfigError):
        CgoVector(np.array([1.0, -1.0]), 1.0)
    with pytest.raises(ConfigError):
        CgoVector(np.array([1j, -1.0]), 0.0)
    rho = CgoVector.canonical(2.0, 3)
    assert abs(np.sum(rho.rho * rho.rho)) == 0.0, "canonical vectors are isotropic"


def test_parabola_integral_known_value():
    value = cgo_over_parabola(CgoVector.canonical(1.0, 2), 1.0)
    expected = math.sqrt(math.pi) * math.exp(-0.25)
    assert value == pytest.approx(expected, rel=1e-14), f"got {value}, expected {expected}"


@pytest.mark.parametrize("n", [2, 3])
def test_parabola_integral_matches_oracle(n):
    tau, K = 2.0, 3.0
    rho = CgoVector.canonical(tau, n)
    closed = cgo_over_parabola(rho, K)
    brute = integrate(rho, Region.paraboloid_cap(K, n, decay=tau), tol=1e-9, scale=abs(closed))
    assert abs(brute - closed) < 1e-7 * abs(closed), f"oracle {brute} against closed form {closed}"


def test_parabola_integral_homogeneity():
    for n in (2, 3):
        base = cgo_over_parabola(CgoVector.canonical(1.5, n), 4.0)
        scaled = cgo_over_parabola(CgoVector.canonical(3.0, n), 8.0)
        assert scaled == pytest.approx(2.0 ** -n * base, rel=1e-13), f"scaling (tau, K) by 2 gives 2^-{n}"


def test_parabola_integral_domain():
    with pytest.raises(DomainError):
        cgo_over_parabola(np.array([1j, 1.0]), 1.0)
    with pytest.raises(DomainError):
        cgo_over_parabola(CgoVector.canonical(1.0, 2), 0.0)


@pytest.mark.parametrize("n", [2, 3])
def test_sliced_integral_matches_oracle(n):
    tau, K_minus, K_plus, h = 4.0, 9.0, 11.0, 0.1
    exact = cgo_sliced(tau, K_minus, K_plus, h, n)
    brute = integrate(lambda x: np.exp(-tau * x[:, -1]), Region.annular_paraboloid(K_minus, K_plus, h, n),
                      tol=1e-10, scale=exact)
    assert abs(brute.real - exact) < 1e-8 * exact, f"oracle {brute} against {exact}"
    assert cgo_sliced(tau, 10.0, 10.0, h, n) == 0.0, "equal curvatures leave nothing between them"


def test_sliced_integral_rejects_unordered_curvatures():
    with pytest.raises(DomainError):
        cgo_sliced(1.0, 5.0, 4.0, 0.1, 2)


@pytest.mark.parametrize("n,tau,K,h", [(2, 5.0, 10.0, 0.1), (2, 1.0, 3.0, 1.0), (3, 4.0, 20.0, 0.05)])
def test_tail_bound_dominates_the_tail(n, tau, K, h):
    bound = cgo_tail_bound(tau, K, h, n)
    tail = integrate(lambda x: np.exp(-tau * x[:, -1]), Region.paraboloid_cap(K, n, floor=h, decay=tau),
                     tol=1e-9, scale=bound).real
    assert 0.0 < tail <= bound * (1.0 + 1e-8), f"tail {tail} exceeds bound {bound}"


@pytest.mark.parametrize("s", [0.0, 2.0])
def test_weighted_cap_bound_dominates(s):
    n, K, h = 2, 10.0, 0.1
    bound = cgo_weighted_cap_bound(5.0, K, h, s, n)
    value = integrate(lambda x: np.sum(x * x, axis=1) ** (s / 2.0), Region.paraboloid_cap(K, n, h=h),
                      tol=1e-10).real
    assert 0.0 < value <= bound, f"weighted integral {value} exceeds bound {bound}"


def test_complex_gaussian_against_quadrature():
    A, B = complex(-1.0, 2.0), complex(1.0, -0.5)

    def part(fn):
        return quad(lambda t: fn(np.exp(A * t * t + B * t)), -np.inf, np.inf, epsabs=1e-13, limit=400)[0]

    reference = complex(part(np.real), part(np.imag))
    assert abs(complex_gaussian_integral(A, B) - reference) < 1e-9
    with pytest.raises(DomainError):
        complex_gaussian_integral(1.0, 0.0)


def test_identity_split_closes_for_cap_bump():
    cap = make_curvature_cap(10.0, {"radial": 0.5})
    w = CapBump(cap)
    k = 1.0
    terms = identity_split_terms(w, w.source(k), cap, CgoVector.canonical(5.0, 2), k)
    assert terms.phi0 == pytest.approx(2.0), "(Delta + k^2) w is 2 at the apex"
    assert abs(terms.residual) < 1e-6 * abs(terms.lhs), f"split residual {terms.to_dict()}"


def test_identity_split_of_zero_fields_vanishes():
    cap = make_curvature_cap(5.0)
    terms = identity_split_terms(ConstantField(0.0), lambda x: np.zeros(np.atleast_2d(x).shape[0]), cap,
                                 CgoVector.canonical(10.0, 2), 1.0)
    assert terms.lhs == 0 and terms.phi0 == 0 and terms.I3 == 0 and terms.I4 == 0
    assert terms.residual == 0


def test_identity_split_closes_on_pure_paraboloid():
    cap = make_curvature_cap(5.0)
    w = CapBump(cap)
    terms = identity_split_terms(w, w.source(1.0), cap, CgoVector.canonical(10.0, 2), 1.0)
    assert abs(terms.residual) < 1e-6, f"split residual {terms.to_dict()}"


def test_identity_split_converges_for_sampled_source():
    cap = make_curvature_cap(5.0)
    w = CapBump(cap)
    k = 1.0
    rho = CgoVector.canonical(10.0, 2)
    box = Domain([Box([-cap.b, 0.0], [cap.b, cap.h])])
    residuals, steps = [], []
    for spacing in (0.04, 0.02, 0.01):
        phi = sample(w.source(k), box, spacing, method="linear")
        residuals.append(abs(identity_split_terms(w, phi, cap, rho, k).residual))
        steps.append(float(phi.steps[0]))
    orders = [math.log(residuals[i] / residuals[i + 1]) / math.log(steps[i] / steps[i + 1]) for i in range(2)]
    assert min(orders) >= 1.8, f"observed orders {orders} for residuals {residuals}"
    assert residuals[-1] < 1e-3


def test_graph_cap_rule_integrates_polynomials_exactly():
    cap = make_curvature_cap(5.0)
    axes = [np.linspace(-cap.b, cap.b, 9), np.linspace(0.0, cap.h, 5)]
    points, weights = graph_cap_rule(cap.omega, cap.b, cap.h, 2, axes)
    reference = integrate(lambda x: x[:, 0] ** 2 * x[:, 1], Region.graph_cap(cap.omega, cap.b, cap.h, 2),
                          tol=1e-12).real
    assert np.dot(weights, points[:, 0] ** 2 * points[:, 1]) == pytest.approx(reference, rel=1e-10)

    cap3 = make_curvature_cap(5.0, n=3)
    axes3 = [np.linspace(-cap3.b, cap3.b, 9)] * 2 + [np.linspace(0.0, cap3.h, 5)]
    points, weights = graph_cap_rule(cap3.omega, cap3.b, cap3.h, 3, axes3)
    volume = math.pi * cap3.h ** 2 / (2.0 * cap3.K)
    assert np.sum(weights) == pytest.approx(volume, rel=1e-4), "volume of the paraboloid cap below h"


def test_identity_split_rejects_tilted_cgo_vector():
    cap = make_curvature_cap(10.0)
    w = CapBump(cap)
    tilted = CgoVector(np.array([0.5 + 5j, -5.0 + 0.5j]), 5.0)
    with pytest.raises(PrecondViolated):
        identity_split_terms(w, w.source(1.0), cap, tilted, 1.0)


def test_identity_split_rejects_wrong_source():
    cap = make_curvature_cap(10.0)
    with pytest.raises(PrecondViolated):
        identity_split_terms(CapBump(cap), lambda x: np.ones(np.atleast_2d(x).shape[0]), cap,
                             CgoVector.canonical(5.0, 2), 1.0)


def test_identity_split_needs_matching_dimensions():
    cap = make_curvature_cap(10.0)
    w = CapBump(cap)
    with pytest.raises(ConfigError):
        identity_split_terms(w, w.source(1.0), cap, CgoVector.canonical(5.0, 3), 1.0)


def test_oracle_integrates_polynomials():
    disk = integrate(lambda x: np.sum(x * x, axis=1), Region.ball([0.0, 0.0], 1.0), tol=1e-12)
    assert disk.real == pytest.approx(math.pi / 2.0, rel=1e-11), "int_disk |x|^2 = pi/2"
    ball = integrate(lambda x: np.ones(x.shape[0]), Region.ball([1.0, 0.0, 0.0], 1.0), tol=1e-12)
    assert ball.real == pytest.approx(4.0 * math.pi / 3.0, rel=1e-11)
    box = integrate(lambda x: x[:, 0] * x[:, 1], Region.box([0.0, 0.0], [1.0, 2.0]), tol=1e-12)
    assert box.real == pytest.approx(1.0, rel=1e-12)


def test_oracle_raises_when_budget_runs_out():
    with pytest.raises(BudgetExceeded):
        integrate(lambda x: np.exp(200j * x[:, 0] * x[:, 1]), Region.box([0.0, 0.0], [1.0, 1.0]),
                  tol=1e-13, budget=1)


def test_region_validation():
    with pytest.raises(ConfigError):
        Region.paraboloid_cap(1.0, 2)
    with pytest.raises(ConfigError):
        Region.box([0.0, 0.0], [1.0, 0.0])
    with pytest.raises(ConfigError):
        Region.annular_paraboloid(2.0, 1.0, 0.1, 2)


def test_curvature_estimate_decreases_past_threshold():
    alpha = delta = 0.5
    K_star = decay_threshold(alpha, delta, 2)
    assert K_star == pytest.approx(math.exp(10.0))
    values = curvature_estimate_rhs(K_star * np.array([1.0, 2.0, 4.0, 8.0]), alpha, delta, 1.0, 2.0, 2, 1.0)
    assert np.all(np.diff(values) < 0), f"estimate should decrease beyond K*, got {values}"


def test_curvature_estimate_stays_below_envelope():
    K = np.geomspace(math.e, 1e8, 60)
    for n in (2, 3):
        rhs = curvature_estimate_rhs(K, 0.5, 0.5, 1.0, 2.0, n, 1.0)
        envelope = curvature_envelope(K, 0.5, 0.5, n)
        assert np.all(rhs <= envelope), f"rhs exceeds the envelope in {n}D"


def test_curvature_estimate_terms():
    terms = curvature_estimate_terms(100.0, 0.5, 0.5, 1.0, 2.0, 2, 1.0)
    assert terms.tau == pytest.approx(4.0 * 0.25 * 100.0 * math.log(100.0))
    assert terms.total == pytest.approx(terms.paraboloid + terms.sliced + terms.holder + terms.flux)
    assert all(value > 0 for value in terms[1:])


def test_curvature_estimate_domain():
    with pytest.raises(DomainError):
        curvature_estimate_rhs(2.0, 0.5, 0.5, 1.0, 2.0, 2, 1.0)
    with pytest.raises(DomainError):
        curvature_envelope(10.0, 1.5, 0.5, 2)

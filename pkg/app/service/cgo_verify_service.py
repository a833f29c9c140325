# app/service/cgo_verify_service.py
"""Closed-form CGO integrals against the brute-force quadrature oracle on seeded random draws."""
import math

import numpy as np

from app.models.cgo import (CgoVector, cgo_over_parabola, cgo_sliced, cgo_tail_bound, cgo_weighted_cap_bound,
                            complex_gaussian_integral)
from app.models.quadrature_oracle import Region, integrate
from app.service.suite_base import sweep
from app.utils.errors import SuiteAssertionError
from app.utils.export import write_csv
from app.utils.logger import logger
from app.utils.seed import make_rng, random_cgo_draws

HEADER = ["check", "n", "tau", "K", "h", "closed_form", "oracle", "error", "ok"]


def _decay(tau):
    return lambda x: np.exp(-tau * x[:, -1]).astype(complex)


class CgoVerifyService:
    def __init__(self, tol=1e-8, seed=None):
        self.tol = tol
        self.seed = seed
        self.oracle_tol = tol * 1e-2

    def _row(self, check, n, tau, K, h, closed, oracle, error, ok):
        return {"check": check, "n": n, "tau": tau, "K": K, "h": h, "closed_form": closed, "oracle": oracle,
                "error": error, "ok": bool(ok)}

    def parabola(self, n, tau, K):
        rho = CgoVector.canonical(tau, n)
        closed = cgo_over_parabola(rho, K, n)
        oracle = integrate(rho, Region.paraboloid_cap(K, n, decay=tau), self.oracle_tol, scale=abs(closed))
        error = abs(closed - oracle) / abs(closed)
        return self._row("parabola", n, tau, K, 0.0, abs(closed), abs(oracle), error, error <= self.tol)

    def sliced(self, n, tau, K, h, spread):
        closed = cgo_sliced(tau, K, K * spread, h, n)
        oracle = integrate(_decay(tau), Region.annular_paraboloid(K, K * spread, h, n), self.oracle_tol,
                           scale=closed).real
        error = abs(closed - oracle) / closed
        return self._row("sliced", n, tau, K, h, closed, oracle, error, error <= self.tol)

    def tail(self, n, tau, K, h):
        bound = cgo_tail_bound(tau, K, h, n)
        oracle = integrate(_decay(tau), Region.paraboloid_cap(K, n, floor=h, decay=tau), self.oracle_tol,
                           scale=bound).real
        return self._row("tail_bound", n, tau, K, h, bound, oracle, bound - oracle, bound >= oracle)

    def weighted(self, n, tau, K, h, s):
        bound = cgo_weighted_cap_bound(tau, K, h, s, n)

        def integrand(x):
            return (np.exp(-tau * x[:, -1]) * np.linalg.norm(x, axis=1) ** s).astype(complex)

        oracle = integrate(integrand, Region.paraboloid_cap(K, n, h=h), self.oracle_tol, scale=bound).real
        return self._row("weighted_cap_bound", n, tau, K, h, bound, oracle, bound - oracle, bound >= oracle)

    def gaussian(self, A, B):
        closed = complex_gaussian_integral(A, B)
        # |integrand| = exp(Re A t^2 + Re B t) is below 1e-20 of its peak outside this window
        centre = -B.real / (2.0 * A.real)
        half = math.sqrt(50.0 / -A.real)
        oracle = integrate(lambda t: np.exp(A * t[:, 0] ** 2 + B * t[:, 0]),
                           Region.box([centre - half], [centre + half]), self.oracle_tol, scale=abs(closed))
        error = abs(closed - oracle) / abs(closed)
        return self._row("complex_gaussian", 1, abs(A), 0.0, 0.0, abs(closed), abs(oracle), error,
                         error <= self.tol)

    def run(self, dimensions=(2, 3), samples=50, out=None):
        jobs = []
        for n in dimensions:
            draws = random_cgo_draws(samples, n, seed=self.seed)
            rng = make_rng(f"cgo-bounds-{n}", self.seed)
            for tau, K in draws:
                jobs.append(lambda n=n, tau=tau, K=K: self.parabola(n, tau, K))
            for _ in range(samples):
                tau, K = float(rng.uniform(0.5, 20.0)), float(rng.uniform(0.5, 20.0))
                h, spread, s = float(rng.uniform(0.1, 2.0)), float(rng.uniform(1.05, 3.0)), float(rng.uniform(0, 2))
                jobs.append(lambda n=n, tau=tau, K=K, h=h, spread=spread: self.sliced(n, tau, K, h, spread))
                jobs.append(lambda n=n, tau=tau, K=K, h=h: self.tail(n, tau, K, h))
                jobs.append(lambda n=n, tau=tau, K=K, h=h, s=s: self.weighted(n, tau, K, h, s))
        rng = make_rng("cgo-gaussian", self.seed)
        for _ in range(20):
            A = complex(-rng.uniform(0.2, 5.0), rng.uniform(-5.0, 5.0))
            B = complex(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0))
            jobs.append(lambda A=A, B=B: self.gaussian(A, B))

        rows = sweep(lambda job: job(), jobs)
        failures = [row for row in rows if not row["ok"]]
        if out:
            write_csv(out, HEADER, ([row[column] for column in HEADER] for row in rows))
        logger.info(f"CGO verification: {len(rows) - len(failures)} of {len(rows)} checks passed")
        if failures:
            raise SuiteAssertionError(f"{len(failures)} of {len(rows)} CGO checks failed", failures)
        return {"items": rows, "total": len(rows)}

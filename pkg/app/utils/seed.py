# app/utils/seed.py
import zlib

import numpy as np

from app.config import Config


def make_rng(label="", seed=None):
    """Deterministic generator for a named purpose.

    The label is folded into the seed so different draws (CGO samples, power-iteration
    starts, candidate layouts) never share a stream.
    """
    base = Config.SEED if seed is None else int(seed)
    return np.random.default_rng([base, zlib.crc32(label.encode("utf-8"))])


def random_cgo_draws(count, n, seed=None, tau_range=(0.5, 50.0), k_range=(0.5, 100.0), max_ratio=4.0):
    """(tau, K) pairs with tau/(4K) <= max_ratio, log-uniform in both."""
    rng = make_rng(f"cgo-{n}", seed)
    draws = []
    while len(draws) < count:
        tau = float(np.exp(rng.uniform(np.log(tau_range[0]), np.log(tau_range[1]))))
        K = float(np.exp(rng.uniform(np.log(k_range[0]), np.log(k_range[1]))))
        if tau / (4.0 * K) <= max_ratio:
            draws.append((tau, K))
    return draws


def random_trig_polynomials(count, n, degree=3, seed=None):
    """Coefficient tables for sum_j a_j cos(w_j . x + p_j)."""
    rng = make_rng(f"trig-{n}-{degree}", seed)
    tables = []
    for _ in range(count):
        tables.append({
            "amplitudes": rng.normal(size=degree),
            "frequencies": rng.normal(scale=2.0, size=(degree, n)),
            "phases": rng.uniform(0.0, 2.0 * np.pi, size=degree),
        })
    return tables

"""Shared oracles and generators, independent of the code paths they check."""

from __future__ import annotations

import math

import numpy as np

from majorfix import MajorantProfile, PowerSumModulus, scale_modulus


def quadratic_radii(a: float, c: float, radius: float) -> dict:
    """Closed forms for the quadratic family upper(r) = a + c r^2
    (modulus k(r) = 2 c r), straight from the quadratic formula."""
    out: dict = {}
    out["inner"] = (math.sqrt(1.0 + 4.0 * a * c) - 1.0) / (2.0 * c)
    r_cr = 1.0 / (2.0 * c)
    out["contraction"] = r_cr if r_cr <= radius else None
    disc = 1.0 - 4.0 * a * c
    if disc < 0.0:
        out["convergence"] = None
        out["gap"] = a - 1.0 / (4.0 * c)      # a - max_r (r - c r^2)
        out["gap_argmin"] = r_cr
        return out
    r1 = (1.0 - math.sqrt(disc)) / (2.0 * c)
    r2 = (1.0 + math.sqrt(disc)) / (2.0 * c)
    out["convergence"] = r1
    end_gap = a + c * radius**2 - radius
    if end_gap < 0.0:
        out["uniqueness"] = (radius, True, False)
    elif disc == 0.0:
        out["uniqueness"] = (r1, False, True)
    else:
        out["uniqueness"] = (r2, False, False)
    return out


def random_existence_profile(rng) -> tuple[MajorantProfile, float]:
    """Random power-sum profile built around a known smallest root.

    Pick the root rho and the slope k(rho) < 1 first, then set the
    displacement a = rho - K(rho); since k is nondecreasing and stays below
    1 up to rho, the gap a + K(r) - r is strictly decreasing there and rho
    is exactly the smallest fixed point of the upper majorant.
    """
    nterms = int(rng.integers(1, 4))
    exponents = np.sort(rng.uniform(0.0, 3.0, nterms))
    coefficients = rng.uniform(0.1, 2.0, nterms)
    rho = float(rng.uniform(0.1, 2.0))
    rate = float(rng.uniform(0.05, 0.95))
    raw = PowerSumModulus(tuple(zip(coefficients.tolist(), exponents.tolist())))
    modulus = scale_modulus(raw, rate / raw(rho))
    a = rho - modulus.primitive(rho)
    radius = rho * float(rng.uniform(1.3, 3.0))
    return MajorantProfile(a, modulus, radius), rho


def sample_with_norm(rng, op, bound: float) -> np.ndarray:
    """Random vector with op.norm at most bound."""
    direction = rng.normal(size=op.center.shape)
    nrm = float(op.norm(direction))
    if nrm == 0.0:
        return np.zeros_like(op.center)
    return direction * (bound * float(rng.uniform(0.0, 1.0)) / nrm)


def lipschitz_increment_holds(op, rng, count: int = 200,
                              slack: float = 1e-9) -> float:
    """Check ||A(x+h) - A(x)|| <= K(r+delta) - K(r) on random samples.

    Returns the worst observed excess (negative when everything holds);
    asserts inside so a failure points at the offending sample.
    """
    profile = op.profile
    R = profile.radius
    worst = -math.inf
    for i in range(count):
        r = float(rng.uniform(0.0, 0.98 * R))
        delta = float(rng.uniform(0.0, R - r))
        x = op.center + sample_with_norm(rng, op, r)
        h = sample_with_norm(rng, op, delta)
        lhs = float(op.norm(np.asarray(op.apply(x + h), dtype=float)
                            - np.asarray(op.apply(x), dtype=float)))
        rhs = profile.modulus_integral(min(r + delta, R)) - profile.modulus_integral(r)
        excess = lhs - rhs
        worst = max(worst, excess)
        assert excess <= slack, (
            f"sample {i}: increment {lhs} exceeds K({r + delta}) - K({r}) = {rhs}"
        )
    return worst


def picard_reference(op, steps: int = 3000) -> np.ndarray:
    """Plain Picard iteration from the center, independent of the engine."""
    x = op.center.copy()
    for _ in range(steps):
        x = np.asarray(op.apply(x), dtype=float)
    return x

"""Builders for the concrete operator families.

Each builder returns an OperatorHandle: grid-discretized apply, the ambient
norm, a center, and the majorant profile assembled from the family's
Lipschitz modulus.  Moduli that need quadrature (Urysohn, composition) are
sampled on a radius grid and wrapped as tabulated moduli so the scalar core
keeps its exact-primitive contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .discretize import Grid, KernelTable, lp_norm
from .iteration import OperatorHandle, make_operator
from .majorant import MajorantProfile
from .moduli import (
    ConstantModulus,
    LipschitzModulus,
    PowerSumModulus,
    combine_moduli,
    modulus_from_samples,
    recenter_modulus,
)

__all__ = [
    "MultilinearSpec",
    "HammersteinTerm",
    "HammersteinSpec",
    "LipschitzPairSet",
    "UrysohnSpec",
    "CompositionSpec",
    "PowerGrowthModulusSpec",
    "build_multilinear",
    "multilinear_critical_shift",
    "build_hammerstein_sup",
    "build_hammerstein_lp",
    "build_superposition_modulus",
    "build_urysohn",
    "build_composition",
    "build_power_modulus",
    "build_self_majorizing",
]

_NORM_SAMPLES = 2000
_NORM_INFLATION = 1.10
_RADIUS_SAMPLES = 257


# ---------------------------------------------------------------------------
# polynomial (multilinear) equations x = eta + T(x, ..., x)
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MultilinearSpec:
    """Symmetric m-linear map T plus constant term eta on R^d.

    operator_norm is the norm C of T; exact for d = 1, otherwise supplied
    or estimated by seeded random sampling (inflated 10%, since an
    over-estimate only shrinks the certified zones).
    """

    dimension: int
    degree: int
    tensor: np.ndarray | float
    constant: np.ndarray | float
    operator_norm: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.degree < 2 or int(self.degree) != self.degree:
            raise ValueError("degree must be an integer >= 2")
        if self.operator_norm is not None and self.operator_norm < 0.0:
            raise ValueError("operator_norm must be >= 0")


def _contract(tensor: np.ndarray, vectors) -> np.ndarray:
    out = tensor
    for v in vectors:
        out = np.tensordot(out, v, axes=([out.ndim - 1], [0]))
    return out


def _estimate_multilinear_norm(tensor: np.ndarray, degree: int,
                               seed: int) -> float:
    rng = np.random.default_rng(seed)
    d = tensor.shape[0]
    best = 0.0
    for _ in range(_NORM_SAMPLES):
        vectors = rng.normal(size=(degree, d))
        norms = np.linalg.norm(vectors, axis=1)
        if np.any(norms == 0.0):
            continue
        vectors /= norms[:, None]
        best = max(best, float(np.linalg.norm(_contract(tensor, vectors))))
    return best


def build_multilinear(spec: MultilinearSpec, radius: float) -> OperatorHandle:
    """Handle for x -> eta + T(x, ..., x) centered at the origin.

    The modulus is C * m * r**(m-1) in the Euclidean norm (absolute value
    for d = 1).
    """
    d, m = spec.dimension, int(spec.degree)
    eta = np.atleast_1d(np.asarray(spec.constant, dtype=float))
    if eta.shape != (d,):
        raise ValueError(f"constant term shape {eta.shape} does not match dimension {d}")
    if d == 1:
        tensor = np.asarray(spec.tensor, dtype=float)
        if tensor.size != 1:
            raise ValueError("dimension 1 expects a scalar coefficient")
        coef = float(tensor.reshape(()))
        norm_c = abs(coef) if spec.operator_norm is None else float(spec.operator_norm)

        def apply(x: np.ndarray) -> np.ndarray:
            return eta + coef * x**m
    else:
        tensor = np.asarray(spec.tensor, dtype=float)
        if tensor.shape != (d,) * (m + 1):
            raise ValueError(
                f"tensor shape {tensor.shape} does not match (d,)*(m+1) = {(d,) * (m + 1)}"
            )
        if spec.operator_norm is None:
            norm_c = _NORM_INFLATION * _estimate_multilinear_norm(tensor, m, spec.seed)
        else:
            norm_c = float(spec.operator_norm)

        def apply(x: np.ndarray) -> np.ndarray:
            return eta + _contract(tensor, [x] * m)

    modulus = PowerSumModulus(((norm_c * m, float(m - 1)),))
    norm = lambda v: float(np.linalg.norm(v))
    return make_operator(apply, np.zeros(d), norm, modulus, radius)


def multilinear_critical_shift(norm_c: float, degree: int) -> float:
    """Largest ||eta|| for which x = eta + T(x,...,x) still has a root.

    Equals max_r (r - C r**m), the peak clearance of the bisectrix over the
    power curve.
    """
    if norm_c <= 0.0:
        raise ValueError("operator norm must be > 0")
    if degree < 2 or int(degree) != degree:
        raise ValueError("degree must be an integer >= 2")
    m = int(degree)
    return (1.0 / (norm_c * m)) ** (1.0 / (m - 1)) * (m - 1) / m


# ---------------------------------------------------------------------------
# Hammerstein sums x(t) = f(t) + lambda * sum_j int k_j(t,s) h_j(x(s)) ds
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HammersteinTerm:
    """One summand: kernel k_j, nonlinearity h_j, and h_j's scalar modulus."""

    kernel: Callable[[float, float], float] | np.ndarray
    nonlinearity: Callable
    modulus: LipschitzModulus | None = None


@dataclass(frozen=True, eq=False)
class HammersteinSpec:
    interval: tuple[float, float]
    terms: tuple[HammersteinTerm, ...]
    lam: float
    forcing: Callable[[float], float] | np.ndarray

    def __post_init__(self):
        if not self.terms:
            raise ValueError("need at least one Hammerstein term")
        a, b = self.interval
        if not (b > a):
            raise ValueError("interval must have positive length")


def _sample_kernel(kernel, grid: Grid) -> np.ndarray:
    if isinstance(kernel, np.ndarray):
        if kernel.shape != (grid.n, grid.n):
            raise ValueError(
                f"kernel array shape {kernel.shape} does not match grid ({grid.n}, {grid.n})"
            )
        return np.asarray(kernel, dtype=float)
    return KernelTable.from_function(grid, grid, kernel).values


def _sample_forcing(forcing, grid: Grid) -> np.ndarray:
    if isinstance(forcing, np.ndarray):
        if forcing.shape != (grid.n,):
            raise ValueError("forcing array length does not match the grid")
        return np.asarray(forcing, dtype=float)
    values = np.asarray(forcing(grid.nodes), dtype=float)
    if values.shape != (grid.n,):
        values = np.array([float(forcing(t)) for t in grid.nodes])
    return values


def _pointwise(fn, x: np.ndarray) -> np.ndarray:
    values = np.asarray(fn(x), dtype=float)
    if values.shape != x.shape:
        values = np.array([float(fn(v)) for v in x])
    return values


def _nystrom_apply(mats, nonlinearities, fvec, weights, lam):
    def apply(x: np.ndarray) -> np.ndarray:
        out = fvec.copy()
        for mat, h in zip(mats, nonlinearities):
            out += lam * (mat @ (weights * _pointwise(h, x)))
        return out
    return apply


def _resolve_center(center, grid: Grid) -> np.ndarray:
    if center is None:
        return np.zeros(grid.n)
    arr = np.atleast_1d(np.asarray(center, dtype=float))
    if arr.size == 1:
        return np.full(grid.n, float(arr[0]))
    if arr.shape != (grid.n,):
        raise ValueError("center length does not match the grid")
    return arr


def build_hammerstein_sup(spec: HammersteinSpec, grid: Grid, radius: float,
                          center=None) -> OperatorHandle:
    """Nystrom discretization in the sup norm.

    Kernel norms are row sums max_i sum_l w_l |k_j(t_i, s_l)| and the
    modulus is |lambda| * sum_j ||K_j|| * w_j(r).
    """
    if not (math.isclose(grid.lower, spec.interval[0])
            and math.isclose(grid.upper, spec.interval[1])):
        raise ValueError("grid does not cover the spec interval")
    mats = [_sample_kernel(term.kernel, grid) for term in spec.terms]
    if any(term.modulus is None for term in spec.terms):
        raise ValueError("every term needs a scalar modulus for the sup-norm build")
    fvec = _sample_forcing(spec.forcing, grid)
    knorms = [float(np.max(np.abs(mat) @ grid.weights)) for mat in mats]
    lam_abs = abs(spec.lam)
    modulus = combine_moduli([term.modulus for term in spec.terms],
                             [lam_abs * kn for kn in knorms], radius=radius)
    x0 = _resolve_center(center, grid)
    norm = lambda v: float(np.max(np.abs(v)))
    shift = float(np.max(np.abs(x0)))
    if shift > 0.0:
        modulus = recenter_modulus(modulus, shift, radius)
    apply = _nystrom_apply(mats, [t.nonlinearity for t in spec.terms],
                           fvec, grid.weights, spec.lam)
    return make_operator(apply, x0, norm, modulus, radius)


def build_hammerstein_lp(spec: HammersteinSpec, moduli, zaanen_norms,
                         p: float, grid: Grid, radius: float,
                         center=None) -> OperatorHandle:
    """Nystrom discretization in the discrete L_p norm.

    moduli are the superposition moduli of the nonlinearities (see
    build_superposition_modulus) and zaanen_norms the kernel norms pairing
    L_{q_j} against L_{p'}; the modulus is |lambda| * sum_j norm_j * h_j(r).
    """
    p = float(p)
    if p <= 1.0:
        raise ValueError("p must be > 1")
    moduli = list(moduli)
    zaanen_norms = [float(z) for z in zaanen_norms]
    if len(moduli) != len(spec.terms) or len(zaanen_norms) != len(spec.terms):
        raise ValueError("moduli and zaanen_norms must match the term count")
    if any(z < 0.0 for z in zaanen_norms):
        raise ValueError("Zaanen norms must be >= 0")
    mats = [_sample_kernel(term.kernel, grid) for term in spec.terms]
    fvec = _sample_forcing(spec.forcing, grid)
    lam_abs = abs(spec.lam)
    modulus = combine_moduli(moduli, [lam_abs * z for z in zaanen_norms],
                             radius=radius)
    x0 = _resolve_center(center, grid)
    norm = lambda v: lp_norm(grid, v, p)
    shift = norm(x0)
    if shift > 0.0:
        modulus = recenter_modulus(modulus, shift, radius)
    apply = _nystrom_apply(mats, [t.nonlinearity for t in spec.terms],
                           fvec, grid.weights, spec.lam)
    return make_operator(apply, x0, norm, modulus, radius)


# ---------------------------------------------------------------------------
# superposition moduli for L_p nonlinearities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LipschitzPairSet:
    """Candidate (weight, slope) pairs whose lower envelope bounds a
    superposition operator between L_p and L_q."""

    pairs: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("pair set must be nonempty")
        cleaned = []
        for first, second in self.pairs:
            first, second = float(first), float(second)
            if first < 0.0 or second < 0.0:
                raise ValueError("pairs must be nonnegative")
            cleaned.append((first, second))
        object.__setattr__(self, "pairs", tuple(cleaned))


def build_superposition_modulus(pair_set: LipschitzPairSet, p: float, q: float,
                                length: float, *, radius: float | None = None,
                                samples: int = _RADIUS_SAMPLES
                                ) -> LipschitzModulus:
    """Pointwise minimum over the pair set of weight * length**e0 + slope * r**e
    with e0 = (p-q)/(pq) and e = (p-q)/q.

    Exact (constant or power-sum) for a single pair or when the exponents
    vanish; otherwise the finite lower envelope is tabulated on [0, radius]
    with every pairwise breakpoint included as a node.
    """
    p, q, length = float(p), float(q), float(length)
    if p <= 1.0:
        raise ValueError("p must be > 1")
    if not (0.0 < q <= p):
        raise ValueError("q must lie in (0, p]")
    if length <= 0.0:
        raise ValueError("interval length must be > 0")
    e0 = (p - q) / (p * q)
    e = (p - q) / q
    curves = [(first * length**e0, second) for first, second in pair_set.pairs]
    if e == 0.0:
        return ConstantModulus(min(a + b for a, b in curves))
    if len(curves) == 1:
        a0, b0 = curves[0]
        if b0 == 0.0:
            return ConstantModulus(a0)
        terms = ((b0, e),) if a0 == 0.0 else ((a0, 0.0), (b0, e))
        return PowerSumModulus(terms)
    if radius is None:
        raise ValueError("radius required to tabulate a multi-pair envelope")
    nodes = set(np.linspace(0.0, radius, samples).tolist())
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            ai, bi = curves[i]
            aj, bj = curves[j]
            if bi == bj:
                continue
            ratio = (aj - ai) / (bi - bj)
            if ratio > 0.0:
                crossing = ratio ** (1.0 / e)
                if 0.0 < crossing < radius:
                    nodes.add(crossing)
    xs = np.array(sorted(nodes))
    powers = xs**e
    values = np.min(np.array([a + b * powers for a, b in curves]), axis=0)
    return modulus_from_samples(xs, values)


# ---------------------------------------------------------------------------
# Urysohn equations x(t) = int K(t, s, x(s), x(t)) ds
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class UrysohnSpec:
    """Kernel K(t,s,u,v) with its partial moduli l(t,s,r) (in u) and
    m(t,s,r) (in v), both nonnegative and nondecreasing in r."""

    interval: tuple[float, float]
    kernel: Callable
    u_modulus: Callable
    v_modulus: Callable


def _eval_ts(fn, tt: np.ndarray, ss: np.ndarray, *extra) -> np.ndarray:
    try:
        values = np.asarray(fn(tt, ss, *extra), dtype=float)
        return np.broadcast_to(values, tt.shape).copy()
    except Exception:
        return np.array(
            [[float(fn(t, s, *extra)) for s in ss[0]] for t in tt[:, 0]]
        )


def _tabulate_radius_modulus(sampler, radius: float, shift: float,
                             samples: int) -> LipschitzModulus:
    rs = np.linspace(0.0, radius, samples)
    ks = np.array([sampler(r + shift) for r in rs])
    if np.any(~np.isfinite(ks)) or np.any(ks < 0.0):
        raise ValueError("sampled modulus values must be finite and nonnegative")
    return modulus_from_samples(rs, ks)


def build_urysohn(spec: UrysohnSpec, grid: Grid, radius: float,
                  center=None, radius_samples: int = _RADIUS_SAMPLES
                  ) -> OperatorHandle:
    """Nystrom discretization in the sup norm.

    The modulus k(r) = max_t sum_l w_l (l(t, s_l, r) + m(t, s_l, r)) is
    sampled on a radius grid and tabulated; a non-monotone sample set is a
    construction error.
    """
    tt, ss = np.meshgrid(grid.nodes, grid.nodes, indexing="ij")
    weights = grid.weights

    def apply(x: np.ndarray) -> np.ndarray:
        u = np.broadcast_to(x, tt.shape)
        v = x[:, None]
        try:
            vals = np.asarray(spec.kernel(tt, ss, u, v), dtype=float)
            vals = np.broadcast_to(vals, tt.shape)
        except Exception:
            vals = np.array(
                [[float(spec.kernel(t, s, x[l], x[i]))
                  for l, s in enumerate(grid.nodes)]
                 for i, t in enumerate(grid.nodes)]
            )
        return vals @ weights

    def row_modulus(r: float) -> float:
        total = _eval_ts(spec.u_modulus, tt, ss, r) + _eval_ts(spec.v_modulus, tt, ss, r)
        return float(np.max(total @ weights))

    x0 = _resolve_center(center, grid)
    shift = float(np.max(np.abs(x0)))
    modulus = _tabulate_radius_modulus(row_modulus, radius, shift, radius_samples)
    norm = lambda v: float(np.max(np.abs(v)))
    return make_operator(apply, x0, norm, modulus, radius)


# ---------------------------------------------------------------------------
# composition equations x(t) = F(t, x(t), int K(t, s, x(s)) ds)
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CompositionSpec:
    """Outer map F(t,u,v) with moduli l(t,r,rho), m(t,r,rho); inner kernel
    K(t,s,u) with envelope n0(t,s,r) and modulus n(t,s,r)."""

    interval: tuple[float, float]
    outer: Callable
    outer_u_modulus: Callable
    outer_v_modulus: Callable
    inner_kernel: Callable
    inner_bound: Callable
    inner_modulus: Callable


def build_composition(spec: CompositionSpec, grid: Grid, radius: float,
                      center=None, radius_samples: int = _RADIUS_SAMPLES
                      ) -> OperatorHandle:
    """Nystrom discretization of the outer/inner split in the sup norm.

    The combined modulus k(r) = max_t [ l(t, r, rho(t,r)) +
    m(t, r, rho(t,r)) * int n(t,s,r) ds ] with rho(t,r) = int n0(t,s,r) ds
    is sampled over a radius grid and tabulated.
    """
    tt, ss = np.meshgrid(grid.nodes, grid.nodes, indexing="ij")
    weights = grid.weights
    t_nodes = grid.nodes

    def apply(x: np.ndarray) -> np.ndarray:
        u = np.broadcast_to(x, tt.shape)
        try:
            vals = np.asarray(spec.inner_kernel(tt, ss, u), dtype=float)
            vals = np.broadcast_to(vals, tt.shape)
        except Exception:
            vals = np.array(
                [[float(spec.inner_kernel(t, s, x[l]))
                  for l, s in enumerate(grid.nodes)]
                 for t in grid.nodes]
            )
        inner = vals @ weights
        try:
            out = np.asarray(spec.outer(t_nodes, x, inner), dtype=float)
            out = np.broadcast_to(out, x.shape).copy()
        except Exception:
            out = np.array(
                [float(spec.outer(t, x[i], inner[i]))
                 for i, t in enumerate(t_nodes)]
            )
        return out

    def _eval_t(fn, r, rho: np.ndarray) -> np.ndarray:
        try:
            values = np.asarray(fn(t_nodes, r, rho), dtype=float)
            return np.broadcast_to(values, t_nodes.shape)
        except Exception:
            return np.array(
                [float(fn(t, r, rho[i])) for i, t in enumerate(t_nodes)]
            )

    def row_modulus(r: float) -> float:
        rho = _eval_ts(spec.inner_bound, tt, ss, r) @ weights
        n_int = _eval_ts(spec.inner_modulus, tt, ss, r) @ weights
        combined = _eval_t(spec.outer_u_modulus, r, rho) \
            + _eval_t(spec.outer_v_modulus, r, rho) * n_int
        return float(np.max(combined))

    x0 = _resolve_center(center, grid)
    shift = float(np.max(np.abs(x0)))
    modulus = _tabulate_radius_modulus(row_modulus, radius, shift, radius_samples)
    norm = lambda v: float(np.max(np.abs(v)))
    return make_operator(apply, x0, norm, modulus, radius)


# ---------------------------------------------------------------------------
# power-growth moduli for the L_p variants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerGrowthModulusSpec:
    """Power-sum modulus data: terms (coefficient, exponent) with exponents
    strictly increasing within the stated range.

    The optional fields realize the combined L_p composition modulus
    offset + inf over pairs (weight + slope * G(r)**growth_exponent) * sum,
    where G is the inner power-growth sum.
    """

    terms: tuple[tuple[float, float], ...]
    max_exponent: float | None = None
    offset: float = 0.0
    pair_set: LipschitzPairSet | None = None
    growth_terms: tuple[tuple[float, float], ...] = ()
    growth_exponent: float = 0.0
    radius: float | None = None
    samples: int = _RADIUS_SAMPLES

    def __post_init__(self):
        for label, terms in (("terms", self.terms), ("growth_terms", self.growth_terms)):
            exponents = []
            for coef, exponent in terms:
                if coef < 0.0:
                    raise ValueError(f"{label}: coefficients must be >= 0")
                if exponent < 0.0:
                    raise ValueError(f"{label}: exponents must be >= 0")
                if self.max_exponent is not None and exponent > self.max_exponent:
                    raise ValueError(
                        f"{label}: exponent {exponent!r} beyond the allowed "
                        f"maximum {self.max_exponent!r}"
                    )
                exponents.append(exponent)
            if any(b <= a for a, b in zip(exponents, exponents[1:])):
                raise ValueError(f"{label}: exponents must be strictly increasing")
        if self.offset < 0.0:
            raise ValueError("offset must be >= 0")
        if self.growth_exponent < 0.0:
            raise ValueError("growth_exponent must be >= 0")


def _power_eval(terms, r):
    return sum(c * r**e for c, e in terms)


def build_power_modulus(spec: PowerGrowthModulusSpec) -> LipschitzModulus:
    """Assemble the power-growth modulus.

    Without a pair set the result is an exact power sum (offset folded in
    as an exponent-0 term).  With a pair set the envelope factor multiplies
    the term sum; the result stays exact when the factor is constant and is
    tabulated on [0, radius] otherwise.
    """
    base = tuple(spec.terms)
    if spec.pair_set is None:
        merged: dict[float, float] = {}
        for coef, exponent in base:
            merged[exponent] = merged.get(exponent, 0.0) + coef
        if spec.offset > 0.0:
            merged[0.0] = merged.get(0.0, 0.0) + spec.offset
        terms = tuple(sorted((c, e) for e, c in merged.items()))
        return PowerSumModulus(terms or ((0.0, 0.0),))

    pairs = spec.pair_set.pairs
    factor_is_constant = (
        spec.growth_exponent == 0.0
        or not spec.growth_terms
        or all(second == 0.0 for _, second in pairs)
    )
    if factor_is_constant:
        if spec.growth_exponent == 0.0:
            factor = min(first + second for first, second in pairs)
        else:
            # inner sum vanishes or every slope is zero
            factor = min(first for first, _ in pairs)
        merged = {}
        for coef, exponent in base:
            merged[exponent] = merged.get(exponent, 0.0) + factor * coef
        if spec.offset > 0.0:
            merged[0.0] = merged.get(0.0, 0.0) + spec.offset
        terms = tuple(sorted((c, e) for e, c in merged.items()))
        return PowerSumModulus(terms or ((0.0, 0.0),))

    if spec.radius is None:
        raise ValueError("radius required to tabulate the envelope factor")
    xs = np.linspace(0.0, spec.radius, spec.samples)
    growth = np.array([_power_eval(spec.growth_terms, x) for x in xs])
    term_sum = np.array([_power_eval(base, x) for x in xs])
    factor = np.min(
        np.array([
            first + second * growth**spec.growth_exponent
            for first, second in pairs
        ]),
        axis=0,
    )
    return modulus_from_samples(xs, spec.offset + factor * term_sum)


# ---------------------------------------------------------------------------
# the canonical scalar test operator
# ---------------------------------------------------------------------------

def build_self_majorizing(profile: MajorantProfile) -> OperatorHandle:
    """Scalar map x -> a + K(|x|): it coincides with its own upper majorant
    on the nonnegative axis, so every certified bound is an equality and the
    handle serves as the exact test oracle."""
    R = profile.radius

    def apply(x: np.ndarray) -> np.ndarray:
        r = min(abs(float(x[0])), R)
        return np.array([profile.center_shift + profile.modulus_integral(r)])

    norm = lambda v: float(np.max(np.abs(v)))
    return make_operator(apply, np.zeros(1), norm, profile.modulus, R,
                         center_shift=profile.center_shift)

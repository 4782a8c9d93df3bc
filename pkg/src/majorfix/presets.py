"""Named demo functions and shipped problem presets.

Configs refer to kernels, nonlinearities and forcings by identifier; no
dynamic code loading.  Every preset below is a complete problem config, so
each end-to-end scenario is reproducible from a single name.
"""

from __future__ import annotations

import numpy as np

from .moduli import ConstantModulus, PowerSumModulus

__all__ = [
    "KERNELS",
    "NONLINEARITIES",
    "FORCINGS",
    "URYSOHN_KERNELS",
    "COMPOSITION_OUTER",
    "COMPOSITION_INNER",
    "PRESETS",
    "preset_names",
    "get_preset",
]

KERNELS = {
    "product": lambda t, s: t * s,
    "one": lambda t, s: np.ones_like(np.asarray(t, dtype=float) * np.asarray(s, dtype=float)),
    "exp_product": lambda t, s: np.exp(t * s),
}

# nonlinearity name -> (h, scalar modulus of h on |u| <= r)
NONLINEARITIES = {
    "square": (lambda u: u**2, PowerSumModulus(((2.0, 1.0),))),
    "cube": (lambda u: u**3, PowerSumModulus(((3.0, 2.0),))),
    "identity": (lambda u: u, ConstantModulus(1.0)),
    "sin": (lambda u: np.sin(u), ConstantModulus(1.0)),
}

# L_p nonlinearity name -> (h, default pair set [(weight, slope)], q rule)
LP_NONLINEARITIES = {
    "linear": (lambda u: u, ((1.0, 0.0),), "same_as_p"),
}

FORCINGS = {
    "identity": lambda t: np.asarray(t, dtype=float),
    "zero": lambda t: np.zeros_like(np.asarray(t, dtype=float)),
    "one": lambda t: np.ones_like(np.asarray(t, dtype=float)),
    "sin_pi": lambda t: np.sin(np.pi * np.asarray(t, dtype=float)),
}

# Urysohn kernel demos: K(t,s,u,v) with partial moduli l(t,s,r), m(t,s,r)
URYSOHN_KERNELS = {
    "mixed_quadratic": {
        "kernel": lambda t, s, u, v: 0.2 * t + 0.1 * s * u**2 + 0.05 * v,
        "u_modulus": lambda t, s, r: 0.2 * s * r + 0.0 * t,
        "v_modulus": lambda t, s, r: 0.05 + 0.0 * (t + s),
    },
}

# composition outer maps F(t,u,v) with moduli l(t,r,rho), m(t,r,rho)
COMPOSITION_OUTER = {
    "affine_mix": {
        "outer": lambda t, u, v: 0.1 * t + 0.5 * u + 0.25 * v,
        "u_modulus": lambda t, r, rho: 0.5 + 0.0 * np.asarray(t, dtype=float),
        "v_modulus": lambda t, r, rho: 0.25 + 0.0 * np.asarray(t, dtype=float),
    },
}

# composition inner kernels K(t,s,u) with envelope n0 and modulus n
COMPOSITION_INNER = {
    "weighted_square": {
        "kernel": lambda t, s, u: s * u**2 + 0.0 * t,
        "bound": lambda t, s, r: s * r**2 + 0.0 * t,
        "modulus": lambda t, s, r: 2.0 * s * r + 0.0 * t,
    },
}

_T2D = [[[0.0, 0.5], [0.5, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
# symmetric bilinear map T(x, y) = ((x1 y2 + x2 y1)/2 ... ) with exact norm;
# first output component is sym(x1 y2), second is zero

PRESETS: dict[str, dict] = {
    "quadratic": {
        "kind": "scalar_profile",
        "center_shift": 0.1875,
        "modulus": {"type": "power_sum", "terms": [[2.0, 1.0]]},
        "radius": 1.0,
    },
    "tangency": {
        "kind": "scalar_profile",
        "center_shift": 0.25,
        "modulus": {"type": "power_sum", "terms": [[2.0, 1.0]]},
        "radius": 1.0,
    },
    "contraction": {
        "kind": "scalar_profile",
        "center_shift": 1.0,
        "modulus": {"type": "constant", "value": 0.5},
        "radius": 10.0,
    },
    "supercritical": {
        "kind": "scalar_profile",
        "center_shift": 0.5,
        "modulus": {"type": "power_sum", "terms": [[2.0, 1.0]]},
        "radius": 1.0,
    },
    "multilinear-quadratic": {
        "kind": "multilinear",
        "dimension": 1,
        "degree": 2,
        "coefficient": 1.0,
        "constant": 0.1875,
        "radius": 1.0,
    },
    "multilinear-cubic": {
        "kind": "multilinear",
        "dimension": 1,
        "degree": 3,
        "coefficient": 1.0,
        "constant": 0.2,
        "radius": 1.0,
    },
    "multilinear-2d": {
        "kind": "multilinear",
        "dimension": 2,
        "degree": 2,
        "tensor": _T2D,
        "constant": [0.05, 0.08],
        "operator_norm": 0.5,
        "radius": 1.0,
    },
    "hammerstein-separable": {
        "kind": "hammerstein_c",
        "interval": [0.0, 1.0],
        "lambda": 0.1,
        "grid": {"rule": "simpson", "n": 201},
        "radius": 3.0,
        "terms": [{"kernel": "product", "nonlinearity": "square"}],
        "forcing": "identity",
    },
    "hammerstein-lp": {
        "kind": "hammerstein_lp",
        "interval": [0.0, 1.0],
        "lambda": 0.3,
        "p": 2.0,
        "grid": {"rule": "simpson", "n": 101},
        "radius": 2.0,
        "terms": [{"kernel": "product", "nonlinearity": "linear", "q": 2.0}],
        "forcing": "identity",
    },
    "urysohn": {
        "kind": "urysohn",
        "interval": [0.0, 1.0],
        "kernel": "mixed_quadratic",
        "grid": {"rule": "simpson", "n": 101},
        "radius": 1.0,
    },
    "composition": {
        "kind": "composition",
        "interval": [0.0, 1.0],
        "outer": "affine_mix",
        "inner": "weighted_square",
        "grid": {"rule": "simpson", "n": 101},
        "radius": 1.0,
    },
}


def preset_names() -> list[str]:
    return sorted(PRESETS)


def get_preset(name: str) -> dict:
    if name not in PRESETS:
        known = ", ".join(preset_names())
        raise KeyError(f"unknown preset {name!r}; available: {known}")
    # deep-ish copy so callers may tweak without mutating the registry
    import copy

    return copy.deepcopy(PRESETS[name])

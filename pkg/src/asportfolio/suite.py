"""BBOB-like noiseless suite: 24 functions, arbitrary instances.

The functions keep the five BBOB groups (separable, low/moderate
conditioning, high conditioning unimodal, multimodal with adequate global
structure, multimodal with weak global structure) but are instantiated by a
plain shift-and-rotate. Oscillation and asymmetry transforms are not used.

Every raw function is exactly zero at the optimum, so
``evaluate(inst, inst.x_opt) == inst.f_opt`` holds bit for bit.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from ._seeding import derive_seed

LOWER, UPPER = -5.0, 5.0
FUNCTION_IDS = tuple(range(1, 25))
SEPARABLE_IDS = (1, 2, 3, 4, 5)
PENALTY_WEIGHT = 1e4

FUNCTION_NAMES = {
    1: "sphere",
    2: "ellipsoid_separable",
    3: "rastrigin_separable",
    4: "bueche_rastrigin",
    5: "linear_slope",
    6: "attractive_sector",
    7: "step_ellipsoid",
    8: "rosenbrock",
    9: "rosenbrock_rotated",
    10: "ellipsoid",
    11: "discus",
    12: "bent_cigar",
    13: "sharp_ridge",
    14: "different_powers",
    15: "rastrigin",
    16: "weierstrass",
    17: "schaffers_f7",
    18: "schaffers_f7_ill",
    19: "griewank_rosenbrock",
    20: "schwefel",
    21: "gallagher_101",
    22: "gallagher_21",
    23: "katsuura",
    24: "lunacek_bi_rastrigin",
}


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """An instantiated test function. Immutable; arrays are read-only."""

    function_id: int
    instance_id: int
    dim: int
    x_opt: np.ndarray
    f_opt: float
    rotation: np.ndarray
    rotation2: np.ndarray
    extras: dict = field(default_factory=dict)

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return np.full(self.dim, LOWER), np.full(self.dim, UPPER)

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.function_id, self.instance_id, self.dim)

    def __eq__(self, other):
        if not isinstance(other, ProblemInstance):
            return NotImplemented
        if self.key != other.key or self.f_opt != other.f_opt:
            return False
        if not (
            np.array_equal(self.x_opt, other.x_opt)
            and np.array_equal(self.rotation, other.rotation)
            and np.array_equal(self.rotation2, other.rotation2)
        ):
            return False
        if self.extras.keys() != other.extras.keys():
            return False
        return all(np.array_equal(self.extras[k], other.extras[k]) for k in self.extras)

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return (
            f"ProblemInstance(f{self.function_id}, i{self.instance_id}, "
            f"n={self.dim}, f_opt={self.f_opt!r})"
        )


def instance_seed(function_id: int, instance_id: int, dim: int) -> int:
    """splitmix64(splitmix64(splitmix64(fid) ^ iid) ^ dim)."""
    return derive_seed(function_id, instance_id, dim)


def seeded_rotation(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Orthogonalize a standard-normal matrix (QR with positive diag(R))."""
    g = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    signs = np.where(np.diag(r) < 0, -1.0, 1.0)
    return q * signs


def _readonly(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def make_instance(function_id: int, instance_id: int, dim: int) -> ProblemInstance:
    """Build the deterministic instance for (function_id, instance_id, dim).

    Draw order from ``default_rng(instance_seed(...))``: x_opt ~ U[-4, 4]^n,
    f_opt ~ U[-100, 100], two n x n Gaussian matrices (rotation, rotation2),
    then function-specific parameters.
    """
    if not isinstance(function_id, (int, np.integer)) or not 1 <= function_id <= 24:
        raise ValueError(f"function_id must be in 1..24, got {function_id!r}")
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if instance_id < 1:
        raise ValueError(f"instance_id must be >= 1, got {instance_id}")
    function_id, instance_id, dim = int(function_id), int(instance_id), int(dim)

    rng = np.random.default_rng(instance_seed(function_id, instance_id, dim))
    x_opt = rng.uniform(-4.0, 4.0, dim)
    f_opt = float(rng.uniform(-100.0, 100.0))
    rot = seeded_rotation(rng, dim)
    rot2 = seeded_rotation(rng, dim)
    extras = {}

    if function_id in SEPARABLE_IDS:
        rot = np.eye(dim)
        rot2 = np.eye(dim)
    if function_id == 5:
        # optimum sits on a corner of the box
        x_opt = np.where(x_opt >= 0.0, UPPER, LOWER)
    elif function_id in (21, 22):
        n_peaks = 101 if function_id == 21 else 21
        others = rng.uniform(-4.9, 4.9, (n_peaks - 1, dim))
        peaks = np.vstack([x_opt[None, :], others])
        weights = np.empty(n_peaks)
        weights[0] = 10.0
        weights[1:] = 1.1 + 8.0 * np.arange(n_peaks - 1) / max(n_peaks - 2, 1)
        alpha_top = 1000.0 if function_id == 21 else 1e6
        log_alpha = np.empty(n_peaks)
        log_alpha[0] = np.log10(alpha_top)
        log_alpha[1:] = rng.uniform(0.0, 6.0, n_peaks - 1)
        perms = np.argsort(rng.random((n_peaks, dim)), axis=1)
        expo = _exponents(dim)[perms]
        scales = 10.0 ** (log_alpha[:, None] * (expo - 0.25))
        extras = {"peaks": peaks, "weights": weights, "scales": scales}

    return ProblemInstance(
        function_id=function_id,
        instance_id=instance_id,
        dim=dim,
        x_opt=_readonly(x_opt),
        f_opt=f_opt,
        rotation=_readonly(rot),
        rotation2=_readonly(rot2),
        extras={k: _readonly(v) for k, v in extras.items()},
    )


@lru_cache(maxsize=4096)
def get_instance(function_id: int, instance_id: int, dim: int) -> ProblemInstance:
    """Memoized ``make_instance``; safe because instances are immutable."""
    return make_instance(function_id, instance_id, dim)


def optimum_value(instance: ProblemInstance) -> float:
    return instance.f_opt


# -- raw functions -----------------------------------------------------------
# Each takes the instance and X (m x n) and returns m values >= 0 (except f5),
# exactly 0 where X == x_opt.


def _exponents(n):
    if n == 1:
        return np.zeros(1)
    return np.arange(n) / (n - 1)


def _lam(alpha, n):
    return alpha ** (0.5 * _exponents(n))


def _rastrigin_terms(z):
    return np.sum(10.0 * (1.0 - np.cos(2.0 * np.pi * z)) + z * z, axis=1)


def _pairs(z):
    if z.shape[1] == 1:
        return z[:, :1], z[:, :1]
    return z[:, :-1], z[:, 1:]


def _f1(inst, X):
    return np.sqrt(np.sum((X - inst.x_opt) ** 2, axis=1))


def _f2(inst, X):
    z = X - inst.x_opt
    return np.sum(10.0 ** (6.0 * _exponents(inst.dim)) * z * z, axis=1)


def _f3(inst, X):
    z = _lam(10.0, inst.dim) * (X - inst.x_opt)
    return _rastrigin_terms(z)


def _f4(inst, X):
    z = X - inst.x_opt
    s = np.broadcast_to(10.0 ** (0.5 * _exponents(inst.dim)), z.shape).copy()
    odd = (np.arange(inst.dim) % 2 == 0)[None, :] & (z > 0)
    s[odd] *= 10.0
    return _rastrigin_terms(s * z)


def _f5(inst, X):
    c = 10.0 ** _exponents(inst.dim)
    sgn = np.sign(inst.x_opt)
    return np.sum(c * sgn * (inst.x_opt - X), axis=1)


def _rot(inst, X, lam=None):
    """z = Q diag(lam) R (x - x_opt), rows as points."""
    z = (X - inst.x_opt) @ inst.rotation.T
    if lam is not None:
        z = z * lam
        z = z @ inst.rotation2.T
    return z


def _f6(inst, X):
    z = _rot(inst, X, _lam(10.0, inst.dim))
    s = np.where(z * inst.x_opt > 0, 100.0, 1.0)
    return np.sum((s * z) ** 2, axis=1) ** 0.9


def _f7(inst, X):
    zhat = ((X - inst.x_opt) @ inst.rotation.T) * _lam(10.0, inst.dim)
    ztil = np.where(
        np.abs(zhat) > 0.5, np.floor(0.5 + zhat), np.floor(0.5 + 10.0 * zhat) / 10.0
    )
    z = ztil @ inst.rotation2.T
    ell = np.sum(10.0 ** (2.0 * _exponents(inst.dim)) * z * z, axis=1)
    return 0.1 * np.maximum(np.abs(zhat[:, 0]) / 1e4, ell)


def _rosen(y):
    a, b = _pairs(y)
    return np.sum(100.0 * (a * a - b) ** 2 + (a - 1.0) ** 2, axis=1)


def _f8(inst, X):
    c = max(1.0, np.sqrt(inst.dim) / 8.0)
    return _rosen(c * (X - inst.x_opt) + 1.0)


def _f9(inst, X):
    c = max(1.0, np.sqrt(inst.dim) / 8.0)
    return _rosen(c * _rot(inst, X) + 1.0)


def _f10(inst, X):
    z = _rot(inst, X)
    return np.sum(10.0 ** (6.0 * _exponents(inst.dim)) * z * z, axis=1)


def _f11(inst, X):
    z = _rot(inst, X)
    return 1e6 * z[:, 0] ** 2 + np.sum(z[:, 1:] ** 2, axis=1)


def _f12(inst, X):
    z = _rot(inst, X)
    return z[:, 0] ** 2 + 1e6 * np.sum(z[:, 1:] ** 2, axis=1)


def _f13(inst, X):
    z = _rot(inst, X, _lam(10.0, inst.dim))
    return z[:, 0] ** 2 + 100.0 * np.sqrt(np.sum(z[:, 1:] ** 2, axis=1))


def _f14(inst, X):
    z = _rot(inst, X)
    return np.sqrt(np.sum(np.abs(z) ** (2.0 + 4.0 * _exponents(inst.dim)), axis=1))


def _f15(inst, X):
    z = (X - inst.x_opt) @ inst.rotation2.T
    z = (z * _lam(10.0, inst.dim)) @ inst.rotation.T
    return _rastrigin_terms(z)


_WEIER_K = np.arange(12)


def _weier(t):
    a = 0.5 ** _WEIER_K
    b = 3.0 ** _WEIER_K
    return np.sum(a * np.cos(2.0 * np.pi * b * (t[..., None] + 0.5)), axis=-1)


def _f16(inst, X):
    z = (X - inst.x_opt) @ inst.rotation2.T
    z = (z * _lam(0.01, inst.dim)) @ inst.rotation.T
    w0 = _weier(np.zeros(1))[0]
    inner = np.mean(_weier(z) - w0, axis=1)
    return 10.0 * inner**3


def _schaffers(inst, X, cond):
    z = (X - inst.x_opt) @ inst.rotation.T
    z = (z @ inst.rotation2.T) * _lam(cond, inst.dim)
    a, b = _pairs(z)
    s = np.sqrt(a * a + b * b) if inst.dim > 1 else np.abs(a)
    rs = np.sqrt(s)
    return np.mean(rs + rs * np.sin(50.0 * s**0.2) ** 2, axis=1) ** 2


def _f17(inst, X):
    return _schaffers(inst, X, 10.0)


def _f18(inst, X):
    return _schaffers(inst, X, 1000.0)


def _f19(inst, X):
    c = max(1.0, np.sqrt(inst.dim) / 8.0)
    y = c * _rot(inst, X) + 1.0
    a, b = _pairs(y)
    s = 100.0 * (a * a - b) ** 2 + (a - 1.0) ** 2
    return 10.0 * (np.mean(s / 4000.0 - np.cos(s), axis=1) + 1.0)


_SCHWEFEL_CENTER = 420.9687462275036
_SCHWEFEL_SCALE = 25.0
_SCHWEFEL_CLIP = 9.0


def _schwefel_h(y):
    return -y * np.sin(np.sqrt(np.abs(y)))


def _f20(inst, X):
    # clipping keeps every coordinate inside the window where the centre is
    # the global minimiser of h
    z = np.clip(_rot(inst, X), -_SCHWEFEL_CLIP, _SCHWEFEL_CLIP)
    y = _SCHWEFEL_CENTER + _SCHWEFEL_SCALE * z
    h0 = _schwefel_h(np.array([_SCHWEFEL_CENTER]))[0]
    return np.mean(_schwefel_h(y) - h0, axis=1)


def _gallagher(inst, X):
    peaks = inst.extras["peaks"]
    d = (X[:, None, :] - peaks[None, :, :]) @ inst.rotation.T
    q = np.sum(inst.extras["scales"][None, :, :] * d * d, axis=2)
    g = inst.extras["weights"][None, :] * np.exp(-q / (2.0 * inst.dim))
    return (10.0 - np.max(g, axis=1)) ** 2


def _f23(inst, X):
    z = (X - inst.x_opt) @ inst.rotation.T
    z = (z * _lam(100.0, inst.dim)) @ inst.rotation2.T
    p = 2.0 ** np.arange(1, 33)
    tz = z[..., None] * p
    inner = np.sum(np.abs(tz - np.round(tz)) / p, axis=-1)
    n = inst.dim
    prod = np.prod((1.0 + np.arange(1, n + 1) * inner) ** (10.0 / n**1.2), axis=1)
    return 10.0 / n**2 * (prod - 1.0)


def _f24(inst, X):
    n = inst.dim
    mu0, d = 2.5, 1.0
    # the original depth formula goes negative for n < 5
    s = 1.0 - 1.0 / (2.0 * np.sqrt(max(n, 5) + 20.0) - 8.2)
    mu1 = -np.sqrt((mu0**2 - d) / s)
    u = X - inst.x_opt
    sgn = np.where(inst.x_opt >= 0, 1.0, -1.0)
    first = np.sum(u * u, axis=1)
    v = u - (mu1 - mu0) * sgn
    second = d * n + s * np.sum(v * v, axis=1)
    z = (u @ inst.rotation2.T) * _lam(100.0, n)
    z = z @ inst.rotation.T
    return np.minimum(first, second) + np.sum(10.0 * (1.0 - np.cos(2.0 * np.pi * z)), axis=1)


_RAW: dict[int, Callable] = {
    1: _f1, 2: _f2, 3: _f3, 4: _f4, 5: _f5, 6: _f6, 7: _f7, 8: _f8,
    9: _f9, 10: _f10, 11: _f11, 12: _f12, 13: _f13, 14: _f14, 15: _f15,
    16: _f16, 17: _f17, 18: _f18, 19: _f19, 20: _f20, 21: _gallagher,
    22: _gallagher, 23: _f23, 24: _f24,
}  # fmt: skip


def boundary_penalty(X: np.ndarray) -> np.ndarray:
    excess = np.maximum(0.0, np.abs(X) - UPPER)
    return PENALTY_WEIGHT * np.sum(excess * excess, axis=1)


def evaluate_batch(instance: ProblemInstance, X) -> np.ndarray:
    """Evaluate every row of X. Out-of-bounds rows get a quadratic penalty."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != instance.dim:
        raise ValueError(
            f"expected points of shape (m, {instance.dim}), got {X.shape}"
        )
    raw = _RAW[instance.function_id](instance, X)
    pen = boundary_penalty(X)
    return instance.f_opt + raw + pen


def evaluate(instance: ProblemInstance, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != instance.dim:
        raise ValueError(f"expected a vector of length {instance.dim}, got shape {x.shape}")
    return float(evaluate_batch(instance, x[None, :])[0])


def out_of_bounds(x) -> bool:
    x = np.asarray(x)
    return bool(np.any(np.abs(x) > UPPER))


def write_manifest(path, instances, reveal_optima: bool = False) -> None:
    """Suite manifest CSV: function_id, instance_id, dim, f_opt[, x_opt]."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = ["function_id", "instance_id", "dim", "f_opt"]
        if reveal_optima:
            header.append("x_opt")
        w.writerow(header)
        for inst in instances:
            row = [inst.function_id, inst.instance_id, inst.dim, repr(inst.f_opt)]
            if reveal_optima:
                row.append(" ".join(repr(float(v)) for v in inst.x_opt))
            w.writerow(row)

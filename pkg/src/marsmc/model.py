"""Model specification, parameter vector layout, filtering and stationarity.

A mixed causal-noncausal autoregression of orders (r, s) in n dimensions is

    (I - Psi_1 L - ... - Psi_r L^r)(I - Phi_1 L^-1 - ... - Phi_s L^-s) y_t = u_t

with L the lag operator. Both matrix polynomials must have all roots outside
the unit circle; the errors u_t are i.i.d. heavy tailed. All parameters live
in one flat real vector so samplers can treat the model as a black box.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

# Margin below 1 for the spectral-radius test; keeps the boundary from
# flapping under floating-point noise.
STATIONARITY_MARGIN = 1e-8


class Dist(str, enum.Enum):
    """Supported error-term families."""

    CAUCHY = "cauchy"
    STUDENT_T = "student_t"
    SKEWED_T = "skewed_t"


def _as_dist(value) -> Dist:
    if isinstance(value, Dist):
        return value
    return Dist(str(value).lower())


@dataclass(frozen=True)
class ModelSpec:
    """Dimensions and error family of a vector MAR(r, s) model.

    Attributes:
        n: series dimension (>= 1).
        r: causal (lag) order.
        s: noncausal (lead) order. r + s >= 1.
        dist: error distribution tag.
    """

    n: int
    r: int
    s: int
    dist: Dist

    def __post_init__(self):
        object.__setattr__(self, "dist", _as_dist(self.dist))
        if self.n < 1:
            raise ValueError(f"series dimension must be >= 1, got n={self.n}")
        if self.r < 0 or self.s < 0:
            raise ValueError(f"orders must be non-negative, got r={self.r}, s={self.s}")
        if self.r + self.s < 1:
            raise ValueError("at least one of r, s must be positive")

    @property
    def p(self) -> int:
        return self.r + self.s

    @property
    def has_nu(self) -> bool:
        return self.dist in (Dist.STUDENT_T, Dist.SKEWED_T)

    @property
    def has_alpha(self) -> bool:
        return self.dist is Dist.SKEWED_T

    @property
    def k(self) -> int:
        """Total length of the flat parameter vector."""
        n = self.n
        k = n * n * (self.r + self.s) + n * (n + 1) // 2
        if self.has_nu:
            k += 1
        if self.has_alpha:
            k += n
        return k


@dataclass(frozen=True)
class ParamLayout:
    """Index ranges of each block inside the flat vector."""

    psi: slice
    phi: slice
    scale: slice
    nu: int | None
    alpha: slice | None
    k: int


@lru_cache(maxsize=None)
def layout(spec: ModelSpec) -> ParamLayout:
    n = spec.n
    off = 0
    psi = slice(off, off + n * n * spec.r)
    off = psi.stop
    phi = slice(off, off + n * n * spec.s)
    off = phi.stop
    scale = slice(off, off + n * (n + 1) // 2)
    off = scale.stop
    nu = None
    if spec.has_nu:
        nu = off
        off += 1
    alpha = None
    if spec.has_alpha:
        alpha = slice(off, off + n)
        off = alpha.stop
    return ParamLayout(psi=psi, phi=phi, scale=scale, nu=nu, alpha=alpha, k=off)


def param_names(spec: ModelSpec) -> list[str]:
    """Human-readable name per slot, in vector order."""
    n = spec.n
    names = []
    for lag in range(1, spec.r + 1):
        names += [f"psi{lag}_{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    for lead in range(1, spec.s + 1):
        names += [f"phi{lead}_{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    rows, cols = np.tril_indices(n)
    names += [f"sigma_{i + 1}{j + 1}" for i, j in zip(rows, cols)]
    if spec.has_nu:
        names.append("nu")
    if spec.has_alpha:
        names += [f"alpha_{i + 1}" for i in range(n)]
    return names


@dataclass(frozen=True)
class ParamVector:
    """Flat parameter vector plus its block layout.

    The coefficient blocks are stored row-major; the scale matrix is stored
    as its lower triangle (vech). Use :func:`encode_params` to build one from
    structured matrices and the ``psi_mats``/``phi_mats``/... properties to
    read the blocks back.
    """

    theta: np.ndarray
    spec: ModelSpec
    layout: ParamLayout = field(compare=False)

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        if theta.ndim != 1 or theta.size != self.layout.k:
            raise ValueError(
                f"parameter vector must have length {self.layout.k}, got shape {theta.shape}"
            )
        object.__setattr__(self, "theta", theta)

    @property
    def psi_mats(self) -> np.ndarray:
        n = self.spec.n
        return self.theta[self.layout.psi].reshape(self.spec.r, n, n)

    @property
    def phi_mats(self) -> np.ndarray:
        n = self.spec.n
        return self.theta[self.layout.phi].reshape(self.spec.s, n, n)

    @property
    def sigma(self) -> np.ndarray:
        return _vech_to_sym(self.theta[self.layout.scale], self.spec.n)

    @property
    def nu(self) -> float | None:
        if self.layout.nu is None:
            return None
        return float(self.theta[self.layout.nu])

    @property
    def alpha(self) -> np.ndarray | None:
        if self.layout.alpha is None:
            return None
        return self.theta[self.layout.alpha]


@lru_cache(maxsize=None)
def _tril_idx(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.tril_indices(n)


def _vech(sym: np.ndarray) -> np.ndarray:
    rows, cols = _tril_idx(sym.shape[0])
    return sym[rows, cols]


def _vech_to_sym(v: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros((n, n))
    rows, cols = _tril_idx(n)
    out[rows, cols] = v
    out[cols, rows] = v
    return out


def wrap_params(spec: ModelSpec, theta: np.ndarray) -> ParamVector:
    """View a raw vector as a ParamVector without validation of its content."""
    return ParamVector(theta=np.asarray(theta, dtype=float), spec=spec, layout=layout(spec))


def encode_params(
    psi_mats,
    phi_mats,
    sigma,
    nu=None,
    alpha=None,
    *,
    spec: ModelSpec,
) -> ParamVector:
    """Pack structured parameters into the flat vector for ``spec``.

    Args:
        psi_mats: sequence of r causal coefficient matrices (n x n).
        phi_mats: sequence of s noncausal coefficient matrices (n x n).
        sigma: n x n symmetric positive-definite scale matrix.
        nu: degrees of freedom, required for Student-t / skewed-t.
        alpha: skewness (n-vector, or positive scalar when n = 1),
            required for skewed-t.

    Raises:
        ValueError: on dimension mismatch, non-SPD sigma, missing or
            out-of-range nu/alpha.
    """
    n = spec.n
    psi_mats = [np.asarray(m, dtype=float).reshape(n, n) for m in psi_mats]
    phi_mats = [np.asarray(m, dtype=float).reshape(n, n) for m in phi_mats]
    if len(psi_mats) != spec.r:
        raise ValueError(f"expected {spec.r} causal matrices, got {len(psi_mats)}")
    if len(phi_mats) != spec.s:
        raise ValueError(f"expected {spec.s} noncausal matrices, got {len(phi_mats)}")
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    if sigma.shape != (n, n):
        raise ValueError(f"scale matrix must be {n}x{n}, got {sigma.shape}")
    if not np.allclose(sigma, sigma.T):
        raise ValueError("scale matrix must be symmetric")
    if spd_cholesky(sigma) is None:
        raise ValueError("scale matrix must be positive definite")

    pieces = [np.concatenate([m.ravel() for m in psi_mats]) if spec.r else np.empty(0)]
    pieces.append(np.concatenate([m.ravel() for m in phi_mats]) if spec.s else np.empty(0))
    pieces.append(_vech(sigma))
    if spec.has_nu:
        if nu is None:
            raise ValueError(f"{spec.dist.value} requires a degrees-of-freedom value")
        if nu <= 2:
            raise ValueError(f"degrees of freedom must exceed 2, got {nu}")
        pieces.append(np.array([float(nu)]))
    elif nu is not None and nu != 1:
        raise ValueError("cauchy errors have no free degrees-of-freedom slot")
    if spec.has_alpha:
        if alpha is None:
            raise ValueError("skewed-t requires a skewness parameter")
        alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
        if alpha.shape != (n,):
            raise ValueError(f"skewness must have length {n}, got {alpha.shape}")
        if n == 1 and alpha[0] <= 0:
            raise ValueError("univariate skewness must be positive")
        pieces.append(alpha)
    elif alpha is not None:
        raise ValueError(f"{spec.dist.value} errors take no skewness parameter")

    return wrap_params(spec, np.concatenate(pieces))


def spd_cholesky(sigma: np.ndarray) -> np.ndarray | None:
    """Lower Cholesky factor of ``sigma``, or None if not positive definite."""
    if not np.all(np.isfinite(sigma)):
        return None
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        return None


def _companion_spectral_radius(mats: np.ndarray) -> float:
    """Spectral radius of the companion matrix stacking an order-q polynomial."""
    q, n, _ = mats.shape
    if q == 0:
        return 0.0
    if q == 1:
        comp = mats[0]
    else:
        comp = np.zeros((n * q, n * q))
        comp[:n, :] = np.hstack(list(mats))
        comp[n:, : n * (q - 1)] = np.eye(n * (q - 1))
    if not np.all(np.isfinite(comp)):
        return np.inf
    return float(np.max(np.abs(np.linalg.eigvals(comp))))


def coeffs_stationary(psi_mats: np.ndarray, phi_mats: np.ndarray) -> bool:
    """Stationarity of raw (r, n, n) and (s, n, n) coefficient stacks."""
    bound = 1.0 - STATIONARITY_MARGIN
    if len(psi_mats) and _companion_spectral_radius(np.asarray(psi_mats)) >= bound:
        return False
    if len(phi_mats) and _companion_spectral_radius(np.asarray(phi_mats)) >= bound:
        return False
    return True


def is_stationary(spec: ModelSpec, params: ParamVector) -> bool:
    """True iff both coefficient polynomials have all roots outside the unit circle.

    Equivalent to both companion matrices having spectral radius below
    1 - STATIONARITY_MARGIN; an order-0 polynomial passes trivially.
    """
    return coeffs_stationary(params.psi_mats, params.phi_mats)


@dataclass(frozen=True)
class SeriesData:
    """An observed T x n sample, oldest row first.

    ``columns`` and ``dates`` are optional presentation metadata carried
    through the I/O layer; they play no role in any computation.
    """

    values: np.ndarray
    columns: tuple[str, ...] | None = None
    dates: tuple[str, ...] | None = None

    def __post_init__(self):
        values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if values.ndim != 2:
            raise ValueError("data must be a T x n matrix")
        if not np.all(np.isfinite(values)):
            raise ValueError("data contains missing or non-finite entries")
        object.__setattr__(self, "values", values)

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]


def residuals(spec: ModelSpec, params: ParamVector, data: SeriesData) -> np.ndarray:
    """Filter the sample down to model errors.

    Applies the noncausal (lead) filter first, v_t = y_t - sum_q Phi_q y_{t+q},
    then the causal (lag) filter u_t = v_t - sum_i Psi_i v_{t-i}. The first r
    and last s observations are consumed, so the output has T - r - s rows;
    row 0 corresponds to time index r + 1 of the sample in 1-based terms.
    """
    y = data.values
    T, n = y.shape
    if n != spec.n:
        raise ValueError(f"data has {n} series but the model expects {spec.n}")
    r, s = spec.r, spec.s
    if T <= r + s:
        raise ValueError(f"need more than r + s = {r + s} observations, got {T}")

    # v_t defined for t = 0 .. T-1-s (0-based); each lead term shifts forward.
    v = y[: T - s].copy()
    for q, phi in enumerate(params.phi_mats, start=1):
        v -= y[q : T - s + q] @ phi.T
    # u_t defined for t = r .. T-1-s.
    u = v[r:].copy()
    for i, psi in enumerate(params.psi_mats, start=1):
        u -= v[r - i : v.shape[0] - i] @ psi.T
    return u

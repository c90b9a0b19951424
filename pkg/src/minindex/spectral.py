"""Perron-Frobenius data, minimal index and canonical states.

For a connected dimension matrix D the Gram matrices D^t D and D D^t share
a simple top eigenvalue d^2 (d = ||D||, the scalar dimension) with unique
positive l2-normalized eigenvectors nu^{1/2} and mu^{1/2}:

    D nu^{1/2} = d mu^{1/2},      D^t mu^{1/2} = d nu^{1/2}.

The minimal index of the inclusion is c = d^2.  The minimal expectation
weights, the left/right/spherical states and the standard-solution
coefficients are all closed forms in (D, d, nu^{1/2}, mu^{1/2}) and are
recomputed from them here; nothing is cached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DimensionMatrix,
    NoConvergence,
    NotConnected,
    ShapeMismatch,
    is_connected,
)

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000

# largest k scanned for a Jones discrete-series match 4 cos^2(pi/k)
K_MAX = 10**6


@dataclass(frozen=True, eq=False)
class PFData:
    """Perron-Frobenius eigendata of a connected dimension matrix.

    d is the scalar dimension ||D||; nu_sqrt and mu_sqrt are the positive
    l2-normalized eigenvectors of D^t D and D D^t; residual is the max
    infinity-norm defect of the two coupled eigenvalue equations.
    """

    d: float
    nu_sqrt: np.ndarray
    mu_sqrt: np.ndarray
    residual: float
    iterations: int


@dataclass(frozen=True, eq=False)
class ExpectationMatrix:
    """Column-stochastic weight matrices of an expectation and its dual.

    weights[i, j] is the mass the expectation sends from the i-th upper
    central projection to the j-th lower one; dual_weights[j, i] plays the
    symmetric role for the dual expectation.  Both are column-stochastic
    and supported exactly on the support of D.
    """

    weights: np.ndarray       # m x n
    dual_weights: np.ndarray  # n x m


@dataclass(frozen=True, eq=False)
class CanonicalStates:
    """Left, right and spherical states evaluated on central projections."""

    left: np.ndarray       # length n, nu
    right: np.ndarray      # length m, mu
    spherical: np.ndarray  # m x n table on the products p_i q_j


@dataclass(frozen=True)
class IndexClassification:
    """Position of an index value relative to the quantized range.

    kind is one of "JonesDiscrete" (with k such that the value matches
    4 cos^2(pi/k)), "ContinuousRange" (>= 4), "GapForbidden" (in [1, 4)
    but off the discrete series) or "BelowOneInvalid".
    """

    kind: str
    k: int | None = None

    def __str__(self):
        return f"{self.kind}({self.k})" if self.k is not None else self.kind


def _power_iteration(D: np.ndarray, tol: float, max_iter: int):
    """Power iteration on the smaller Gram matrix of D.

    Returns (d, nu_sqrt, mu_sqrt, residual, iterations).  The eigenvalue is
    taken as a Rayleigh quotient, which is quadratically more accurate than
    the iterate itself.  Iteration stops at the residual tolerance, at
    max_iter, or when the residual stops improving (roundoff floor).
    """
    m, n = D.shape
    if m < n:
        d, nu, mu, res, it = _power_iteration(D.T, tol, max_iter)
        return d, mu, nu, res, it
    G = D.T @ D
    v = np.full(n, 1.0 / math.sqrt(n))
    iterations = 0
    best = np.inf
    stall = 0
    d = 0.0
    res = np.inf
    u = None
    while iterations < max_iter:
        for _ in range(8):
            w = G @ v
            v = w / np.linalg.norm(w)
        iterations += 8
        d = math.sqrt(float(v @ G @ v))
        u = D @ v
        u = u / np.linalg.norm(u)
        res = max(float(np.abs(D @ v - d * u).max()),
                  float(np.abs(D.T @ u - d * v).max()))
        if res <= tol:
            break
        if res < 0.999 * best:
            best = res
            stall = 0
        else:
            stall += 1
            if stall > 50:
                break
    return d, v, u, res, iterations


def operator_norm(D: DimensionMatrix, tol: float = DEFAULT_TOL,
                  max_iter: int = DEFAULT_MAX_ITER) -> float:
    """l2 operator norm of a connected dimension matrix."""
    d, _, _, _, _ = _power_iteration(D.entries, tol, max_iter)
    return d


def pf_data(D: DimensionMatrix, tol: float = DEFAULT_TOL,
            max_iter: int = DEFAULT_MAX_ITER) -> PFData:
    """Compute the Perron-Frobenius eigendata of a connected matrix.

    Raises NotConnected on non-connected input and NoConvergence if the
    coupled-equation residual cannot reach tol (possible only for
    near-reducible float inputs, not for validated connected matrices).
    """
    if not is_connected(D):
        raise NotConnected("Perron-Frobenius data requires a connected matrix")
    d, nu, mu, res, it = _power_iteration(D.entries, tol, max_iter)
    if res > tol:
        raise NoConvergence(it, res, tol)
    return PFData(d=d, nu_sqrt=nu, mu_sqrt=mu, residual=res, iterations=it)


def minimal_index(D: DimensionMatrix, tol: float = DEFAULT_TOL,
                  max_iter: int = DEFAULT_MAX_ITER) -> float:
    """Minimal index of the inclusion: the squared operator norm of D."""
    pf = pf_data(D, tol, max_iter)
    return pf.d * pf.d


def _check_pf_shape(D: DimensionMatrix, pf: PFData):
    if pf.nu_sqrt.shape != (D.n,) or pf.mu_sqrt.shape != (D.m,):
        raise ShapeMismatch(
            f"eigendata of shape ({pf.mu_sqrt.shape}, {pf.nu_sqrt.shape}) "
            f"does not fit a {D.m}x{D.n} matrix"
        )


def minimal_expectation(D: DimensionMatrix, pf: PFData) -> ExpectationMatrix:
    """Weight matrices of the minimal expectation and its dual.

    lambda_ij = (d_ij / d) * mu_i^{1/2} / nu_j^{1/2} on the support, and the
    dual exchanges mu and nu.  Columns are renormalized to sum exactly to
    one, absorbing the eigenvector residual.
    """
    _check_pf_shape(D, pf)
    a = D.entries
    S = a > 0
    ratio = pf.mu_sqrt[:, None] / pf.nu_sqrt[None, :]
    lam = np.where(S, a / pf.d * ratio, 0.0)
    lam /= lam.sum(axis=0, keepdims=True)
    dual = np.where(S.T, a.T / pf.d / ratio.T, 0.0)
    dual /= dual.sum(axis=0, keepdims=True)
    return ExpectationMatrix(weights=lam, dual_weights=dual)


def canonical_states(D: DimensionMatrix, pf: PFData) -> CanonicalStates:
    """Left, right and spherical states determined by the eigendata.

    left_j = nu_j, right_i = mu_i, spherical[i, j] = d_ij mu_i^{1/2}
    nu_j^{1/2} / d.  Row sums of the spherical table reproduce the right
    state, column sums the left state.
    """
    _check_pf_shape(D, pf)
    spherical = D.entries * np.outer(pf.mu_sqrt, pf.nu_sqrt) / pf.d
    return CanonicalStates(
        left=pf.nu_sqrt**2,
        right=pf.mu_sqrt**2,
        spherical=spherical,
    )


def weighted_additivity_check(D: DimensionMatrix, pf: PFData) -> float:
    """Defect of the weighted additivity formula d = sum d_ij nu_j^{1/2} mu_i^{1/2}."""
    _check_pf_shape(D, pf)
    total = float(pf.mu_sqrt @ D.entries @ pf.nu_sqrt)
    return abs(pf.d - total)


def standard_solution_weights(D: DimensionMatrix, pf: PFData) -> dict:
    """Coefficients of the standard solution and their scalar identities.

    The standard solution weights each factorial summand by
    (mu_i / nu_j)^{1/4}; its conjugate uses the reciprocal.  Normalization
    forces, for every row i and column j,

        sum_j (nu_j^{1/2} / mu_i^{1/2}) d_ij = d,
        sum_i (mu_i^{1/2} / nu_j^{1/2}) d_ij = d,

    and the returned residuals are the worst deviations from these.
    """
    if not is_connected(D):
        raise NotConnected("standard solutions are defined blockwise; decompose first")
    _check_pf_shape(D, pf)
    a = D.entries
    S = a > 0
    quarter = np.outer(pf.mu_sqrt, 1.0 / pf.nu_sqrt) ** 0.25
    r = np.where(S, quarter, 0.0)
    rbar = np.where(S, 1.0 / quarter, 0.0)
    row = (a * (pf.nu_sqrt[None, :] / pf.mu_sqrt[:, None])).sum(axis=1)
    col = (a * (pf.mu_sqrt[:, None] / pf.nu_sqrt[None, :])).sum(axis=0)
    return {
        "r_coeffs": r,
        "rbar_coeffs": rbar,
        "row_identity_residual": float(np.abs(row - pf.d).max()),
        "col_identity_residual": float(np.abs(col - pf.d).max()),
    }


def _cos_series(k: int) -> float:
    return 4.0 * math.cos(math.pi / k) ** 2


def classify_index(c: float, tol: float = 1e-6) -> IndexClassification:
    """Classify an index value against the quantized admissible range.

    Values below 4 must lie on the discrete series 4 cos^2(pi/k), k >= 3;
    the smallest matching k is reported.  Values >= 4 (within tol) fall in
    the continuous range; values in [1, 4) off the series are flagged as
    forbidden, and values below 1 are invalid outright.
    """
    if c < 1.0 - tol:
        return IndexClassification("BelowOneInvalid")
    if c < 4.0:
        # smallest k with 4 cos^2(pi/k) >= c - tol, found analytically
        lo = max(c - tol, 0.0)
        if lo <= 1.0:
            cand = 3
        else:
            cand = math.ceil(math.pi / math.acos(math.sqrt(lo) / 2.0) - 1e-9)
        for k in (cand - 1, cand, cand + 1):
            if 3 <= k <= K_MAX and abs(c - _cos_series(k)) <= tol:
                return IndexClassification("JonesDiscrete", k)
    if c >= 4.0 - tol:
        return IndexClassification("ContinuousRange")
    return IndexClassification("GapForbidden")

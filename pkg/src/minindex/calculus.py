"""Composition, towers and additivity of dimension matrices.

The dimension matrix of a composed inclusion is the matrix product of the
two constituent matrices, so the scalar dimension is submultiplicative and
the minimal index satisfies c3 <= c1 c2.  Equality holds whenever the left
eigenvector of the upper inclusion matches the right eigenvector of the
lower one, which is automatic along a Jones tower where the matrices
alternate between D and D^t.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DimensionMatrix, NotConnected, ShapeMismatch, is_connected
from .spectral import PFData, minimal_expectation, pf_data

EIGENVECTOR_TOL = 1e-9
MULTIPLICATIVE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CompositionReport:
    """Minimal-index bookkeeping for a composed inclusion."""

    composed: DimensionMatrix
    upper_index: float
    lower_index: float
    composed_index: float
    multiplicative: bool
    sufficient_condition_holds: bool
    cos2_angle: float | None  # set when both outer algebras are factors


@dataclass(frozen=True, eq=False)
class Tower:
    """Jones tower data: alternating matrices and their index ladder.

    matrices[k] is D for even k and D^t for odd k; every level has the same
    minimal index d^2, and the cumulative index of the composition up to
    level k is d^{2(k+1)}.  cross_check_residuals compares the norm of the
    composed matrix against the product of the per-level indices.
    """

    matrices: tuple[DimensionMatrix, ...]
    level_indices: tuple[float, ...]
    cumulative_indices: tuple[float, ...]
    cross_check_residuals: tuple[float, ...]


def _require_connected(D: DimensionMatrix, which: str):
    if not is_connected(D):
        raise NotConnected(f"{which} matrix is not connected; decompose it first")


def sufficient_condition(upper: DimensionMatrix, lower: DimensionMatrix,
                         tol: float = EIGENVECTOR_TOL) -> bool:
    """True when the upper left eigenvector equals the lower right one.

    This is the sufficient condition for the minimal index to multiply
    under composition.
    """
    if upper.n != lower.m:
        raise ShapeMismatch(
            f"cannot compose {upper.m}x{upper.n} with {lower.m}x{lower.n}"
        )
    _require_connected(upper, "upper")
    _require_connected(lower, "lower")
    pf_up = pf_data(upper)
    pf_low = pf_data(lower)
    return float(np.abs(pf_up.nu_sqrt - pf_low.mu_sqrt).max()) <= tol


def compose(upper: DimensionMatrix, lower: DimensionMatrix) -> CompositionReport:
    """Compose two inclusions and compare indices.

    The composed matrix is the product upper @ lower (an m x l matrix);
    its index never exceeds the product of the constituent indices and the
    report flags when it attains it.  When both outer algebras are factors
    (m = l = 1) the index deficit is exactly the squared cosine of the
    angle between the two matrices seen as vectors.
    """
    if upper.n != lower.m:
        raise ShapeMismatch(
            f"cannot compose {upper.m}x{upper.n} with {lower.m}x{lower.n}"
        )
    _require_connected(upper, "upper")
    _require_connected(lower, "lower")
    pf_up = pf_data(upper)
    pf_low = pf_data(lower)
    composed = DimensionMatrix(upper.entries @ lower.entries)
    pf_comp = pf_data(composed)
    c1 = pf_up.d**2
    c2 = pf_low.d**2
    c3 = pf_comp.d**2
    sufficient = float(np.abs(pf_up.nu_sqrt - pf_low.mu_sqrt).max()) <= EIGENVECTOR_TOL
    multiplicative = abs(c3 - c1 * c2) <= MULTIPLICATIVE_TOL * max(1.0, c1 * c2)
    cos2 = None
    if upper.m == 1 and lower.n == 1:
        u = upper.entries[0]
        v = lower.entries[:, 0]
        cos2 = float((u @ v) ** 2 / ((u @ u) * (v @ v)))
    return CompositionReport(
        composed=composed,
        upper_index=c1,
        lower_index=c2,
        composed_index=c3,
        multiplicative=multiplicative,
        sufficient_condition_holds=sufficient,
        cos2_angle=cos2,
    )


def compose_expectations(upper: DimensionMatrix, lower: DimensionMatrix) -> np.ndarray:
    """Product of the two minimal expectation matrices (m x l).

    Shapes force the order: the upper m x n weights multiply the lower
    n x l ones.  Under the sufficient condition this product equals the
    minimal expectation matrix of the composed inclusion.
    """
    up = minimal_expectation(upper, pf_data(upper)).weights
    low = minimal_expectation(lower, pf_data(lower)).weights
    return up @ low


def jones_tower(D: DimensionMatrix, levels: int) -> Tower:
    """Tower of iterated basic extensions above a connected inclusion.

    Level matrices alternate between D and its transpose; the cumulative
    composed index at level k is computed both as the squared norm of the
    composed matrix and as the product of per-level indices, with the
    relative disagreement reported.
    """
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    _require_connected(D, "tower base")
    base_index = pf_data(D).d ** 2
    matrices = []
    cumulative = []
    residuals = []
    product = None
    for k in range(levels):
        level = D if k % 2 == 0 else D.transpose()
        matrices.append(level)
        product = level.entries if product is None else product @ level.entries
        cum = pf_data(DimensionMatrix(product)).d ** 2
        expected = base_index ** (k + 1)
        cumulative.append(cum)
        residuals.append(abs(cum - expected) / expected)
    return Tower(
        matrices=tuple(matrices),
        level_indices=tuple([base_index] * levels),
        cumulative_indices=tuple(cumulative),
        cross_check_residuals=tuple(residuals),
    )


def additivity_check(D: DimensionMatrix, parts) -> np.ndarray:
    """Entrywise residual D - sum(parts) for a user-supplied split.

    The dimension matrix is additive over any partition of unity by
    projections in the relative commutant; this verifies a proposed
    decomposition and returns the (ideally zero) residual matrix.
    """
    total = np.zeros_like(D.entries)
    for part in parts:
        entries = part.entries if isinstance(part, DimensionMatrix) else np.asarray(part, dtype=float)
        if entries.shape != D.entries.shape:
            raise ShapeMismatch(
                f"part of shape {entries.shape} does not match {D.entries.shape}"
            )
        total = total + entries
    return D.entries - total


def factor_case_additivity(D: DimensionMatrix) -> dict:
    """Index additivity when one side of the inclusion is a factor.

    For a 1 x n or m x 1 matrix with entries d_k the minimal index is the
    plain sum of the d_k^2, the nontrivial eigenvector is proportional to
    the entries, and the minimal expectation weights are d_k^2 / sum d_l^2.
    """
    if D.m != 1 and D.n != 1:
        raise ShapeMismatch(
            f"one side must be a factor (1 x n or m x 1), got {D.m}x{D.n}"
        )
    entries = D.entries.ravel()
    sum_sq = float(entries @ entries)
    index = pf_data(D).d ** 2
    return {
        "lambda": entries**2 / sum_sq,
        "index": index,
        "sum_of_squares": sum_sq,
    }

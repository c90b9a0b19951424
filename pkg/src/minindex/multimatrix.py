"""Bratteli-diagram inclusions of multi-matrix algebras.

A multi-matrix inclusion is encoded by an integer inclusion matrix D
together with the summand sizes beta (lower algebra) and alpha (upper
algebra) subject to the single constraint D beta = alpha.  The inclusion
matrix coincides with the dimension matrix of the inclusion, so the
spectral machinery applies verbatim; on top of it this module computes the
Markov trace vectors and the extremality / super-extremality
classification, including the integer-index realization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DimensionMatrix, NotConnected, is_connected, validate_dimension_matrix
from .spectral import PFData, pf_data

COMPARISON_TOL = 1e-9


class DimensionMismatch(ValueError):
    """beta/alpha lengths do not fit the inclusion matrix."""


class BetaAlphaViolation(ValueError):
    def __init__(self, i: int, expected: int, got: int):
        self.i, self.expected, self.got = i, expected, got
        super().__init__(
            f"(D beta)_{i} = {expected} but alpha_{i} = {got}; "
            "a Bratteli diagram requires D beta = alpha exactly"
        )


class NonIntegerEntry(ValueError):
    """Bratteli data must be integral."""


@dataclass(frozen=True, eq=False)
class BratteliDiagram:
    """Integer inclusion matrix with matching summand-size vectors."""

    D: DimensionMatrix
    beta: np.ndarray   # length n, sizes of the lower full-matrix summands
    alpha: np.ndarray  # length m, sizes of the upper full-matrix summands

    def __post_init__(self):
        for name in ("beta", "alpha"):
            a = np.array(getattr(self, name), dtype=np.int64)
            a.setflags(write=False)
            object.__setattr__(self, name, a)


@dataclass(frozen=True, eq=False)
class MarkovTraceData:
    """Markov trace evaluated on the minimal central projections.

    upper[i] is the trace of the identity of the i-th upper summand,
    lower[j] the same for the lower algebra; divide by alpha_i (beta_j) to
    get the trace of a single minimal projection.  modulus is the trace
    modulus, equal to the minimal index d^2.
    """

    upper: np.ndarray
    lower: np.ndarray
    modulus: float


def _as_int_vector(v, name: str) -> np.ndarray:
    a = np.asarray(v)
    if a.ndim != 1 or a.size == 0:
        raise DimensionMismatch(f"{name} must be a nonempty vector, got shape {a.shape}")
    if not np.all(np.equal(np.mod(a, 1), 0)):
        raise NonIntegerEntry(f"{name} must have integer entries")
    a = a.astype(np.int64)
    if (a <= 0).any():
        raise NonIntegerEntry(f"{name} must have positive entries")
    return a


def validate_bratteli(D, beta, alpha) -> BratteliDiagram:
    """Validate (D, beta, alpha) as a Bratteli diagram.

    D must be a valid integer dimension matrix and D beta = alpha must hold
    exactly in integer arithmetic; that is the only constraint.
    """
    if not isinstance(D, DimensionMatrix):
        D = validate_dimension_matrix(D)
    if not np.all(np.equal(np.mod(D.entries, 1), 0)):
        raise NonIntegerEntry("inclusion matrix must have integer entries")
    b = _as_int_vector(beta, "beta")
    a = _as_int_vector(alpha, "alpha")
    if b.size != D.n or a.size != D.m:
        raise DimensionMismatch(
            f"matrix is {D.m}x{D.n} but |alpha| = {a.size}, |beta| = {b.size}"
        )
    product = D.entries.astype(np.int64) @ b
    for i in range(D.m):
        if product[i] != a[i]:
            raise BetaAlphaViolation(i, int(product[i]), int(a[i]))
    return BratteliDiagram(D=D, beta=b, alpha=a)


def markov_trace(diag: BratteliDiagram, pf: PFData) -> MarkovTraceData:
    """Markov trace vectors recovered from the Perron-Frobenius eigendata.

    The eigenvectors are proportional to the trace vectors divided by the
    summand sizes, so s_i = mu_i^{1/2} alpha_i (normalized) and
    t_j = nu_j^{1/2} beta_j (normalized).
    """
    if not is_connected(diag.D):
        raise NotConnected("the Markov trace is unique only for connected diagrams")
    s = pf.mu_sqrt * diag.alpha
    t = pf.nu_sqrt * diag.beta
    return MarkovTraceData(upper=s / s.sum(), lower=t / t.sum(),
                           modulus=pf.d * pf.d)


def restriction_residual(diag: BratteliDiagram, trace: MarkovTraceData) -> float:
    """Defect of the trace restriction identity t_j = beta_j sum_i D_ij s_i / alpha_i."""
    restricted = diag.beta * (diag.D.entries.T @ (trace.upper / diag.alpha))
    return float(np.abs(trace.lower - restricted).max())


def super_extremality(diag: BratteliDiagram, tol: float = COMPARISON_TOL) -> dict:
    """Test the super-extremality criterion D^t alpha = d^2 beta.

    Reports both sides of the criterion, the index d^2 and the dimension
    ratio ||alpha||^2 / ||beta||^2; for a super-extremal diagram the index
    equals the ratio and is an integer, and the corresponding defects are
    included for auditing.
    """
    if not is_connected(diag.D):
        raise NotConnected("super-extremality is defined for connected diagrams")
    pf = pf_data(diag.D)
    index = pf.d * pf.d
    lhs = diag.D.entries.T @ diag.alpha
    rhs = index * diag.beta
    defect = float(np.abs(lhs - rhs).max())
    is_super = defect <= tol * float(np.abs(diag.alpha).max())
    alpha2 = float(diag.alpha @ diag.alpha)
    beta2 = float(diag.beta @ diag.beta)
    ratio = alpha2 / beta2
    return {
        "is_super_extremal": bool(is_super),
        "lhs": lhs,
        "rhs": rhs,
        "index": index,
        "dim_ratio": ratio,
        "criterion_defect": defect,
        "ratio_defect": abs(index - ratio),
        "integer_defect": abs(index - round(index)),
    }


def extremality_report(diag: BratteliDiagram, pf: PFData,
                       tol: float = COMPARISON_TOL) -> dict:
    """Compare the left/right states with the restricted Markov trace.

    Multi-matrix inclusions are always extremal; the two reported flags
    refine this: the right state agrees with the trace iff
    mu_i = alpha_i^2 / sum alpha_k^2, and the left state iff
    nu_j = beta_j^2 / sum beta_k^2.
    """
    if not is_connected(diag.D):
        raise NotConnected("extremality comparison requires a connected diagram")
    nu = pf.nu_sqrt**2
    mu = pf.mu_sqrt**2
    nu_trace = diag.beta.astype(float) ** 2
    nu_trace /= nu_trace.sum()
    mu_trace = diag.alpha.astype(float) ** 2
    mu_trace /= mu_trace.sum()
    left = float(np.abs(nu - nu_trace).max()) <= tol * float(nu_trace.max())
    right = float(np.abs(mu - mu_trace).max()) <= tol * float(mu_trace.max())
    return {"omega_l_eq_trace": bool(left), "omega_r_eq_trace": bool(right)}


def realize_integer_index(target: int) -> BratteliDiagram:
    """A connected super-extremal diagram whose index is exactly target.

    The diagonal embedding of target copies of the scalars realizes it:
    D is a row of ones, beta = (1, ..., 1), alpha = (target).
    """
    if target < 1 or int(target) != target:
        raise ValueError(f"target index must be a positive integer, got {target!r}")
    target = int(target)
    D = validate_dimension_matrix([[1] * target])
    return validate_bratteli(D, [1] * target, [target])


def to_dot(diag: BratteliDiagram) -> str:
    """Render the Bratteli diagram as Graphviz DOT.

    Bipartite layout: lower nodes are labeled by the lower summand sizes,
    upper nodes by the upper ones, and each positive entry of the inclusion
    matrix becomes one edge carrying its multiplicity as label.  Node and
    edge order is fixed so the output is byte-stable.
    """
    lines = ["graph bratteli {", "  rankdir=BT;"]
    lower = " ".join(
        f'q{j} [label="M_{int(b)}"];' for j, b in enumerate(diag.beta)
    )
    upper = " ".join(
        f'p{i} [label="M_{int(a)}"];' for i, a in enumerate(diag.alpha)
    )
    lines.append("  { rank=same; " + lower + " }")
    lines.append("  { rank=same; " + upper + " }")
    entries = diag.D.entries.astype(np.int64)
    for j in range(diag.D.n):
        for i in range(diag.D.m):
            mult = int(entries[i, j])
            if mult > 0:
                lines.append(f'  q{j} -- p{i} [label="{mult}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"

"""Independent convex-optimization check of the minimal-index theorem.

The norm of the index of an expectation with weight matrix lambda is

    max_i sum_j d_ij^2 / lambda_ij

(sum over the support), and the minimal index is its minimum over all
column-stochastic lambda supported on the support of D.  The objective is
convex on a product of simplices, so the minimum is global and must equal
the squared operator norm of D; this module finds it numerically without
using any Perron-Frobenius data, giving an independent oracle for the
closed form.

The minimax structure is exploited through its concave dual over the
single simplex of row weights w: the inner per-column minimization has the
closed form lambda_ij ~ sqrt(w_i) d_ij, leaving the smooth concave dual

    phi(w) = sum_j ( sum_i sqrt(w_i) d_ij )^2,

whose gradient is the vector of row values of the induced lambda.  We
maximize phi by a damped Newton method on the simplex (multiplicative
fallback steps if a Newton step is rejected), from several perturbed
starting points.  The duality gap max_i g_i - <w, g> certifies global
optimality and is reported as the KKT residual.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import DimensionMatrix, NoConvergence, NotConnected, is_connected
from .spectral import minimal_expectation, minimal_index, pf_data


class SupportMismatch(ValueError):
    """Weight matrix support differs from the support of D."""


class NotStochastic(ValueError):
    """Weight matrix columns do not sum to one."""


STOCHASTIC_TOL = 1e-8


@dataclass(frozen=True)
class OracleConfig:
    tol: float = 1e-12          # absolute duality-gap target
    restarts: int = 5
    seed: int = 0
    noise: float = 0.1          # multiplicative perturbation of the uniform start
    max_rounds: int = 200
    jobs: int = 1
    track_trajectories: bool = False


@dataclass(frozen=True, eq=False)
class OracleResult:
    min_value: float
    argmin: np.ndarray
    kkt_residual: float
    restarts: int
    converged: bool
    trajectories: list | None = field(default=None, compare=False)


def index_of_expectation(D: DimensionMatrix, weights) -> float:
    """Norm of the index of the expectation with the given weight matrix."""
    lam = np.asarray(weights, dtype=float)
    if lam.shape != D.entries.shape:
        raise SupportMismatch(
            f"weights of shape {lam.shape} do not fit a {D.m}x{D.n} matrix"
        )
    S = D.entries > 0
    if ((lam > 0) != S).any():
        raise SupportMismatch("weights must be positive exactly on the support of D")
    colsums = lam.sum(axis=0)
    if np.abs(colsums - 1.0).max() > STOCHASTIC_TOL:
        raise NotStochastic(
            f"column sums deviate from 1 by {np.abs(colsums - 1.0).max():.3e}"
        )
    terms = np.zeros_like(lam)
    terms[S] = D.entries[S] ** 2 / lam[S]
    return float(terms.sum(axis=1).max())


def _solve_one(w: np.ndarray, S: np.ndarray, cS: np.ndarray, sqc: np.ndarray,
               tol: float, max_rounds: int, track: bool):
    """Maximize the dual from one starting point.  Returns (w, phi, g, ok, traj)."""
    m = w.size
    eps = np.finfo(float).eps

    def value_grad(w):
        A = np.sqrt(w)[:, None] * sqc
        Z = A.sum(axis=0)
        phi = float(Z @ Z)
        with np.errstate(divide="ignore", invalid="ignore"):
            g = np.where(S, cS * (Z[None, :] / np.where(S, A, 1.0)), 0.0).sum(axis=1)
        return phi, g

    def done(gap, phi):
        return gap <= max(tol, 8 * eps * (1.0 + phi))

    phi, g = value_grad(w)
    traj = [] if track else None
    fallback_eta = None
    tiny_rounds = 0
    for rounds in range(max_rounds):
        F = float(g.max())
        gap = F - phi
        if track:
            traj.append({"round": rounds, "dual": phi, "primal": F, "gap": gap})
        if done(gap, phi) or tiny_rounds >= 4:
            break
        # Newton step on the affine slice sum(delta) = 0
        Shat = sqc / np.sqrt(w)[:, None]
        H = 0.5 * (Shat @ Shat.T) - 0.5 * np.diag(g / w)
        K = np.zeros((m + 1, m + 1))
        K[:m, :m] = H
        K[:m, m] = 1.0
        K[m, :m] = 1.0
        rhs = np.zeros(m + 1)
        rhs[:m] = -(g - g @ w)
        try:
            delta = np.linalg.solve(K, rhs)[:m]
        except np.linalg.LinAlgError:
            delta = None
        moved = False
        if delta is not None and np.isfinite(delta).all():
            t = 1.0
            neg = delta < 0
            if neg.any():
                t = min(1.0, float(np.min(-0.9 * w[neg] / delta[neg])))
            if np.abs(delta).max() <= 1e-7 * w.max():
                # near convergence the quadratic step is below the resolution
                # of a monotonicity test; take it unguarded
                wn = np.maximum(w + t * delta, 1e-300)
                wn /= wn.sum()
                phi, g = value_grad(wn)
                w = wn
                moved = True
                tiny_rounds += 1
            else:
                for _ in range(40):
                    wn = w + t * delta
                    if (wn > 0).all():
                        wn = wn / wn.sum()
                        phin, gn = value_grad(wn)
                        if phin > phi:
                            w, phi, g = wn, phin, gn
                            moved = True
                            break
                    t *= 0.5
        if not moved:
            # entropic gradient ascent fallback
            if fallback_eta is None:
                fallback_eta = 1.0 / max(float(g.max() - g.min()), 1e-12)
            for _ in range(40):
                wn = w * np.exp(np.maximum(fallback_eta * (g - g.max()), -60.0))
                wn = np.maximum(wn, 1e-300)
                wn /= wn.sum()
                phin, gn = value_grad(wn)
                if phin > phi:
                    w, phi, g = wn, phin, gn
                    moved = True
                    fallback_eta *= 1.5
                    break
                fallback_eta *= 0.5
            if not moved:
                break
    F = float(g.max())
    return w, phi, g, done(F - phi, phi), traj


def minimize_index(D: DimensionMatrix, config: OracleConfig | None = None) -> OracleResult:
    """Minimize the index functional over column-stochastic weight matrices.

    Runs the dual solver from an unperturbed uniform start plus perturbed
    restarts (a safeguard only: the problem is convex), merges by the best
    primal value and certifies it with the duality gap.  Raises
    NoConvergence if no restart reaches the gap tolerance.
    """
    cfg = config or OracleConfig()
    if not is_connected(D):
        raise NotConnected("the index minimization is posed for connected matrices")
    a = D.entries
    S = a > 0
    cS = np.where(S, a * a, 0.0)
    sqc = np.sqrt(cS)
    m = D.m
    rng = np.random.default_rng(cfg.seed)
    starts = [np.full(m, 1.0 / m)]
    for _ in range(max(1, cfg.restarts) - 1):
        w = starts[0] * (1.0 + cfg.noise * rng.uniform(-1.0, 1.0, size=m))
        starts.append(w / w.sum())

    def run(w0):
        return _solve_one(w0.copy(), S, cS, sqc, cfg.tol, cfg.max_rounds,
                          cfg.track_trajectories)

    if cfg.jobs > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            outcomes = list(pool.map(run, starts))
    else:
        outcomes = [run(w0) for w0 in starts]

    best = None
    trajectories = [] if cfg.track_trajectories else None
    for w, phi, g, ok, traj in outcomes:
        if cfg.track_trajectories:
            trajectories.append(traj)
        F = float(g.max())
        if best is None or F < best[0]:
            best = (F, w, phi, ok)
    F, w, phi, ok = best
    if not any(out[3] for out in outcomes):
        raise NoConvergence(cfg.max_rounds, F - phi, cfg.tol)
    A = np.sqrt(w)[:, None] * sqc
    argmin = np.where(S, A / A.sum(axis=0, keepdims=True), 0.0)
    return OracleResult(
        min_value=F,
        argmin=argmin,
        kkt_residual=max(F - phi, 0.0),
        restarts=len(starts),
        converged=ok,
        trajectories=trajectories,
    )


def cross_validate(D: DimensionMatrix, config: OracleConfig | None = None,
                   gap_tol: float = 1e-4, argmin_tol: float = 1e-3) -> dict:
    """Compare the oracle minimum with the closed-form minimal index.

    Reports the two values, their gap, and the infinity-distance between
    the oracle argmin and the closed-form minimal expectation weights,
    together with a success flag at the configured thresholds.
    """
    closed = minimal_index(D)
    expected = minimal_expectation(D, pf_data(D)).weights
    result = minimize_index(D, config)
    gap = abs(result.min_value - closed)
    distance = float(np.abs(result.argmin - expected).max())
    return {
        "closed_form": closed,
        "oracle": result.min_value,
        "gap": gap,
        "argmin_distance": distance,
        "success": bool(gap <= gap_tol and distance <= argmin_tol),
    }

"""Domain types and support-graph analysis for dimension matrices.

A dimension matrix is a nonnegative m x n matrix whose entry (i, j) is the
square root of the minimal index of the factorial sub-inclusion cut by the
i-th upper and j-th lower minimal central projection.  Every nonzero entry
is >= 1 (minimal indices are >= 1), and no row or column may vanish.  The
bipartite support graph of the matrix decides connectedness of the
inclusion, and its connected components give the block decomposition used
for non-connected inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

STOCHASTIC_TOL = 1e-9


class ValidationError(ValueError):
    """Input fails the dimension-matrix contract."""


class EntryBelowOne(ValidationError):
    def __init__(self, i: int, j: int, value: float):
        self.i, self.j, self.value = i, j, value
        super().__init__(
            f"entry ({i},{j}) = {value!r} lies in (0,1); nonzero entries must be >= 1"
        )


class ZeroRow(ValidationError):
    def __init__(self, i: int):
        self.i = i
        super().__init__(f"row {i} is identically zero")


class ZeroColumn(ValidationError):
    def __init__(self, j: int):
        self.j = j
        super().__init__(f"column {j} is identically zero")


class NonFinite(ValidationError):
    def __init__(self, i: int, j: int):
        self.i, self.j = i, j
        super().__init__(f"entry ({i},{j}) is not finite")


class ShapeMismatch(ValueError):
    """Operands have incompatible shapes."""


class NotConnected(ValueError):
    """Operation requires a connected dimension matrix."""


class NoConvergence(RuntimeError):
    """Iterative solver failed to reach the requested tolerance."""

    def __init__(self, iterations: int, residual: float, tol: float):
        self.iterations = iterations
        self.residual = residual
        self.tol = tol
        super().__init__(
            f"no convergence after {iterations} iterations "
            f"(residual {residual:.3e} > tol {tol:.3e})"
        )


@dataclass(frozen=True, eq=False)
class DimensionMatrix:
    """Validated m x n matrix of subfactor scalar dimensions."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    @property
    def support(self) -> "SupportPattern":
        return SupportPattern(self.entries > 0)

    def transpose(self) -> "DimensionMatrix":
        return DimensionMatrix(self.entries.T)

    def __repr__(self):
        return f"DimensionMatrix({self.entries.tolist()!r})"


@dataclass(frozen=True, eq=False)
class SupportPattern:
    """Boolean mask of the nonzero entries of a dimension matrix."""

    mask: np.ndarray

    def __post_init__(self):
        a = np.array(self.mask, dtype=bool)
        a.setflags(write=False)
        object.__setattr__(self, "mask", a)


@dataclass(frozen=True)
class Block:
    """One connected component: row/column index subsets plus the submatrix."""

    rows: tuple[int, ...]
    cols: tuple[int, ...]
    matrix: DimensionMatrix


@dataclass(frozen=True)
class ConnectedDecomposition:
    """Connected blocks of a dimension matrix, ordered by smallest row index."""

    blocks: tuple[Block, ...]
    vector_dimension: tuple[float, ...]

    @property
    def scalar_dimension(self) -> float:
        # overall operator norm = max over connected components
        return max(self.vector_dimension)


def validate_dimension_matrix(raw, *, quantization_floor: bool = True) -> DimensionMatrix:
    """Validate a raw rectangular array as a dimension matrix.

    Entries must be finite and >= 0; nonzero entries must be >= 1 unless
    ``quantization_floor=False`` (exploratory mode that only demands
    positivity).  Zero rows or columns are rejected: central projections
    invisible to the inclusion must be trimmed before building the matrix.
    """
    a = np.array(raw, dtype=float)
    if a.ndim != 2 or a.size == 0:
        raise ValidationError(f"expected a nonempty 2-d array, got shape {a.shape}")
    bad = ~np.isfinite(a)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise NonFinite(int(i), int(j))
    if (a < 0).any():
        i, j = np.argwhere(a < 0)[0]
        raise ValidationError(f"entry ({i},{j}) = {a[i, j]!r} is negative")
    if quantization_floor:
        below = (a > 0) & (a < 1)
        if below.any():
            i, j = np.argwhere(below)[0]
            raise EntryBelowOne(int(i), int(j), float(a[i, j]))
    row_zero = ~(a > 0).any(axis=1)
    if row_zero.any():
        raise ZeroRow(int(np.argmax(row_zero)))
    col_zero = ~(a > 0).any(axis=0)
    if col_zero.any():
        raise ZeroColumn(int(np.argmax(col_zero)))
    return DimensionMatrix(a)


def _components(mask: np.ndarray) -> list[tuple[list[int], list[int]]]:
    """Connected components of the bipartite support graph, by BFS."""
    m, n = mask.shape
    row_comp = [-1] * m
    col_comp = [-1] * n
    comps: list[tuple[list[int], list[int]]] = []
    for start in range(m):
        if row_comp[start] >= 0:
            continue
        k = len(comps)
        rows, cols = [start], []
        row_comp[start] = k
        queue = [("r", start)]
        while queue:
            kind, idx = queue.pop()
            if kind == "r":
                for j in np.nonzero(mask[idx])[0]:
                    if col_comp[j] < 0:
                        col_comp[j] = k
                        cols.append(int(j))
                        queue.append(("c", int(j)))
            else:
                for i in np.nonzero(mask[:, idx])[0]:
                    if row_comp[i] < 0:
                        row_comp[i] = k
                        rows.append(int(i))
                        queue.append(("r", int(i)))
        comps.append((sorted(rows), sorted(cols)))
    return comps


def is_connected(D: DimensionMatrix) -> bool:
    """True iff the bipartite support graph on rows and columns is connected.

    Equivalent to irreducibility of S S^t for the support pattern S.
    """
    return len(_components(D.entries > 0)) == 1


def decompose_connected(D: DimensionMatrix) -> ConnectedDecomposition:
    """Split a dimension matrix into its connected blocks.

    Blocks partition the rows and columns and are ordered by their smallest
    row index; the vector dimension collects the operator norm of each block.
    """
    from .spectral import operator_norm

    blocks = []
    dims = []
    for rows, cols in _components(D.entries > 0):
        sub = DimensionMatrix(D.entries[np.ix_(rows, cols)])
        blocks.append(Block(tuple(rows), tuple(cols), sub))
        dims.append(operator_norm(sub))
    return ConnectedDecomposition(tuple(blocks), tuple(dims))


def norm_diagnostics(D: DimensionMatrix) -> dict:
    """Report the l1, l-infinity and l2 operator norms plus stochasticity flags.

    The flags say whether D/d has unit row sums and/or unit column sums
    (within 1e-9 per sum), i.e. whether the unweighted direct sum of
    normalized solutions would itself be normalized/standard.
    """
    a = D.entries
    norm_1 = float(a.sum(axis=0).max())
    norm_inf = float(a.sum(axis=1).max())
    norm_2 = decompose_connected(D).scalar_dimension
    row = bool(np.abs(a.sum(axis=1) / norm_2 - 1.0).max() <= STOCHASTIC_TOL)
    col = bool(np.abs(a.sum(axis=0) / norm_2 - 1.0).max() <= STOCHASTIC_TOL)
    return {
        "norm_1": norm_1,
        "norm_inf": norm_inf,
        "norm_2": norm_2,
        "row_stochastic_after_scaling": row,
        "col_stochastic_after_scaling": col,
    }

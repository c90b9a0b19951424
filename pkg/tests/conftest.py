import numpy as np

from minindex import DimensionMatrix, is_connected, validate_bratteli


def random_connected_entries(rng, mmax=5, nmax=5, emax=3):
    """Random connected integer matrix with no zero rows or columns."""
    while True:
        m = int(rng.integers(1, mmax + 1))
        n = int(rng.integers(1, nmax + 1))
        a = rng.integers(0, emax + 1, size=(m, n)).astype(float)
        if (a.sum(axis=1) == 0).any() or (a.sum(axis=0) == 0).any():
            continue
        if is_connected(DimensionMatrix(a)):
            return a


def random_connected_matrix(rng, mmax=5, nmax=5, emax=3):
    return DimensionMatrix(random_connected_entries(rng, mmax, nmax, emax))


def random_bratteli(rng, mmax=4, nmax=4, emax=3, bmax=3):
    """Random connected Bratteli diagram: alpha is derived as D beta."""
    a = random_connected_entries(rng, mmax, nmax, emax)
    beta = rng.integers(1, bmax + 1, size=a.shape[1])
    alpha = a.astype(np.int64) @ beta
    return validate_bratteli(a, beta, alpha)

"""
`ptlattice.oracle` is an independent numerical ground truth for the closed forms in
`ptlattice.secular`. It shares no code path with them:

- `charpoly()` computes characteristic-polynomial coefficients with the Faddeev–LeVerrier
  trace recursion, `charpoly_exact()` does the same in rational arithmetic.
- `eig_dense()` finds the eigenvalues as roots of that polynomial with the Aberth–Ehrlich
  simultaneous iteration, started on a circle bounded by the companion matrix norm.

Both are meant for the small matrices of this package (dimension at most 16).
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

LOG = logging.getLogger(__name__)

MAX_DIMENSION = 16
"""Largest matrix dimension the oracle accepts."""

MAX_ITERATIONS = 200
"""Iteration cap of the Aberth–Ehrlich iteration."""

DEFAULT_ORACLE_TOL = 1e-12
"""
Default backward-error tolerance for accepting a root together with a step
below `tol·(1+|z|)`.
"""

EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class EigenResult:
    """Eigenvalues sorted by descending real part, then imaginary part.

    `residual_norms[i]` is the backward error of `eigenvalues[i]` as a root of the
    characteristic polynomial. `eigenvectors[:, i]` (if requested) belongs to `eigenvalues[i]`.
    """
    eigenvalues: Tuple[complex, ...]
    residual_norms: Tuple[float, ...]
    iterations: int
    eigenvectors: Optional[np.ndarray] = None


def _check_matrix(m) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] > MAX_DIMENSION:
        raise OracleDimensionException(
            f"dimension {m.shape[0]} exceeds the oracle limit of {MAX_DIMENSION}")
    return m


def charpoly(m) -> np.ndarray:
    """Return the coefficients of `det(E·I - M)`, monic and highest degree first.

    Args:
        m: a square matrix of dimension at most 16

    Returns:
        np.ndarray: `n + 1` float coefficients
    """
    m = _check_matrix(m).astype(float)
    n = m.shape[0]
    identity = np.eye(n)
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    adjugate = np.zeros((n, n))
    for k in range(1, n + 1):
        adjugate = m @ adjugate + coeffs[k - 1] * identity
        coeffs[k] = -np.trace(m @ adjugate) / k
    return coeffs


def _exact_entry(value, scale: int) -> Fraction:
    if isinstance(value, Fraction):
        entry = value
    elif isinstance(value, (int, np.integer)):
        entry = Fraction(int(value))
    else:
        entry = Fraction(str(float(value)))
    if (entry * scale).denominator != 1:
        raise InexactEntryException(
            f"entry {value} is not an integer multiple of 10^-{len(str(scale)) - 1}")
    return entry


def charpoly_exact(m, decimals: int = 0) -> List[Fraction]:
    """Return the characteristic polynomial in exact rational arithmetic.

    Every entry must be an integer once multiplied by `10**decimals`. Float entries are
    read through their shortest decimal representation, so `0.1` means `1/10`.

    Args:
        m: a square matrix of dimension at most 16
        decimals (int, optional): number of decimal places the entries may carry. Defaults to 0.

    Returns:
        List[Fraction]: `n + 1` coefficients, monic and highest degree first
    """
    m = _check_matrix(m)
    n = m.shape[0]
    scale = 10 ** decimals
    rows = [[_exact_entry(m[i, j], scale) for j in range(n)] for i in range(n)]

    def multiply(left, right):
        return [[sum((left[i][l] * right[l][j] for l in range(n)), Fraction(0)) for j in range(n)]
                for i in range(n)]

    coeffs = [Fraction(1)]
    adjugate = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        adjugate = multiply(rows, adjugate)
        for i in range(n):
            adjugate[i][i] += coeffs[k - 1]
        product = multiply(rows, adjugate)
        coeffs.append(-sum((product[i][i] for i in range(n)), Fraction(0)) / k)
    return coeffs


def _initial_radius(coeffs: np.ndarray) -> float:
    """Return the smaller of the 1- and ∞-norms of the companion matrix."""
    tail = np.abs(coeffs[1:])
    norm_inf = max(tail.sum(), 1.0)
    norm_one = max(np.max(tail[:-1] + 1.0) if tail.size > 1 else 0.0, tail[-1])
    return float(min(norm_inf, norm_one))


def _backward_errors(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    return np.abs(np.polyval(coeffs, z)) / np.polyval(np.abs(coeffs), np.abs(z))


def _aberth(coeffs: np.ndarray, tol: float) -> Tuple[np.ndarray, int]:
    degree = coeffs.size - 1
    derivative = np.polyder(coeffs)
    radius = _initial_radius(coeffs)
    z = radius * np.exp(1j * (2 * np.pi * np.arange(degree) / degree + 0.4))
    converged = np.zeros(degree, dtype=bool)
    best, best_error = z.copy(), np.inf

    for iteration in range(1, MAX_ITERATIONS + 1):
        with np.errstate(divide='ignore', invalid='ignore'):
            ratio = np.polyval(coeffs, z) / np.polyval(derivative, z)
            differences = z[:, None] - z[None, :]
            np.fill_diagonal(differences, np.inf)
            repulsion = (1.0 / differences).sum(axis=1)
            step = ratio / (1.0 - ratio * repulsion)
        step = np.where(np.isfinite(step) & ~converged, step, 0.0)
        z = z - step

        errors = _backward_errors(coeffs, z)
        if errors.max() < best_error:
            best, best_error = z.copy(), errors.max()
        size = np.abs(step)
        scale = 1.0 + np.abs(z)
        converged |= errors <= 16 * EPS
        converged |= (errors <= tol) & (size <= tol * scale)
        converged |= size <= 16 * EPS * scale
        if converged.all():
            LOG.debug(f" Aberth iteration converged after {iteration} steps")
            return z, iteration

    raise OracleConvergenceException(
        f"Aberth iteration did not converge within {MAX_ITERATIONS} steps "
        f"(best backward error {best_error:.3e})", best=best)


def _newton_polish(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    derivative = np.polyder(coeffs)
    with np.errstate(divide='ignore', invalid='ignore'):
        candidate = z - np.polyval(coeffs, z) / np.polyval(derivative, z)
    better = np.isfinite(candidate) & (np.abs(np.polyval(coeffs, candidate)) < np.abs(np.polyval(coeffs, z)))
    if not better.all():
        LOG.debug(f" Newton polish rejected for {int((~better).sum())} root(s)")
    return np.where(better, candidate, z)


def eig_dense(m, tol: float = DEFAULT_ORACLE_TOL, vectors: bool = False) -> EigenResult:
    """Return the eigenvalues of `m` as roots of its characteristic polynomial.

    Args:
        m: a real square matrix of dimension at most 16
        tol (float, optional): backward-error tolerance. Defaults to DEFAULT_ORACLE_TOL.
        vectors (bool, optional): also compute eigenvectors. Defaults to False.

    Returns:
        EigenResult: the sorted eigenvalues with their backward errors
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    m = _check_matrix(m)
    coeffs = charpoly(m)

    zeros = 0
    while coeffs.size > 1 and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
        zeros += 1

    iterations = 0
    roots = np.zeros(0, dtype=complex)
    errors = np.zeros(0)
    if coeffs.size > 1:
        roots, iterations = _aberth(coeffs, tol)
        roots = _newton_polish(coeffs, roots)
        errors = _backward_errors(coeffs, roots)

    values = list(roots) + [0j] * zeros
    residuals = list(errors) + [0.0] * zeros
    order = sorted(range(len(values)), key=lambda i: (-values[i].real, -values[i].imag))
    eigenvalues = tuple(complex(values[i]) for i in order)
    residual_norms = tuple(float(residuals[i]) for i in order)

    eigenvectors = None
    if vectors:
        n = m.shape[0]
        columns = []
        for value in eigenvalues:
            _, _, vh = np.linalg.svd(m.astype(complex) - value * np.eye(n))
            columns.append(vh[-1].conj())
        eigenvectors = np.array(columns).T

    return EigenResult(eigenvalues, residual_norms, iterations, eigenvectors)


class OracleDimensionException(Exception):
    pass


class OracleConvergenceException(Exception):

    def __init__(self, message: str, best: np.ndarray):
        super().__init__(message)
        self.best = best


class InexactEntryException(Exception):
    pass

"""
`ptlattice.lattice` builds the matrices of the six-site PT-symmetric lattice: the parity
matrix, the discrete Laplacean, the Hamiltonians H^(6)(x,y,z) and H^(4)(λ) and a real
representative for arbitrary pair-product couplings.

## Couplings

The Hamiltonian is parametrized by three real couplings `(x, y, z)` (innermost to
outermost). Its spectrum depends only on the pair products

```python
A = 1 - x**2
B = 1 - y**2
C = 1 - z**2
```

which is why most of the package works with `ProductCouplings` instead of the
`CartesianCouplings` the matrix is written in.

For products `> 1` the Cartesian matrix needs imaginary couplings. The representative built
by `build_product_representative()` is real for every `(A, B, C)` and has the same
characteristic polynomial, since the characteristic polynomial of a zero-diagonal tridiagonal
matrix only depends on the products of its opposing off-diagonal pairs.

## The N=4 chain

The four-site model is the six-site chain without its `B` links. Its points are carried as
`ProductCouplings(A=a, B=<unused>, C=λ)`, so that its pair products are `(C, A, C) = (λ, a, λ)`.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

LOG = logging.getLogger(__name__)

SUPPORTED_DIMENSIONS = (4, 6)
"""The chain lengths for which Hamiltonians and representatives are defined."""

FLOAT_SYMMETRY_TOLERANCE = 1e-14
"""Absolute tolerance for `check_pt_symmetry()` on floating-point matrices."""


@dataclass(frozen=True)
class CartesianCouplings:
    """The couplings `(x, y, z)` as they appear in the matrix entries -1 ± x etc."""
    x: float
    y: float
    z: float

    def __post_init__(self):
        _require_finite(self.x, self.y, self.z)


@dataclass(frozen=True)
class ProductCouplings:
    """The reduced couplings `A = 1-x²`, `B = 1-y²`, `C = 1-z²`."""
    A: float
    B: float
    C: float

    def __post_init__(self):
        _require_finite(self.A, self.B, self.C)

    def as_array(self) -> np.ndarray:
        return np.array([self.A, self.B, self.C], dtype=float)

    def shifted(self, direction: np.ndarray, distance: float) -> 'ProductCouplings':
        """Return the point `self + distance * direction`."""
        a, b, c = self.as_array() + distance * np.asarray(direction, dtype=float)
        return ProductCouplings(float(a), float(b), float(c))


def _require_finite(*values: float):
    if not all(math.isfinite(value) for value in values):
        raise ValueError(f"couplings must be finite, got {values}")


def _check_dimension(n: int):
    if not isinstance(n, (int, np.integer)) or n < 2 or n % 2:
        raise InvalidDimensionException(f"dimension must be an even integer >= 2, got {n}")


def build_parity(n: int) -> np.ndarray:
    """Return the antidiagonal `n` by `n` matrix of ones (integer-typed, so P·P = I exactly).

    Args:
        n (int): even dimension >= 2

    Returns:
        np.ndarray: the parity matrix
    """
    _check_dimension(n)
    return np.fliplr(np.eye(n, dtype=int))


def build_laplacean(n: int) -> np.ndarray:
    """Return the discrete Laplacean with -1 on both off-diagonals (integer-typed)."""
    _check_dimension(n)
    off_diagonal = -np.ones(n - 1, dtype=int)
    return np.diag(off_diagonal, 1) + np.diag(off_diagonal, -1)


def _tridiagonal(upper, lower) -> np.ndarray:
    return np.diag(np.asarray(upper, dtype=float), 1) + np.diag(np.asarray(lower, dtype=float), -1)


def build_hamiltonian6(c: CartesianCouplings) -> np.ndarray:
    """Return H^(6)(x,y,z).

    The superdiagonal is `(-1+z, -1+y, -1+x, -1+y, -1+z)`, the subdiagonal
    `(-1-z, -1-y, -1-x, -1-y, -1-z)`.
    """
    couplings = [c.z, c.y, c.x, c.y, c.z]
    return _tridiagonal([-1 + g for g in couplings], [-1 - g for g in couplings])


def build_hamiltonian4(lam: float, a: float) -> np.ndarray:
    """Return H^(4)(λ) with outer couplings √(1-λ) and inner coupling √(1-a).

    Args:
        lam (float): the outer product coupling λ, at most 1
        a (float): the inner product coupling, at most 1

    Returns:
        np.ndarray: the 4x4 matrix with entries -1 ± √(1-λ) and -1 ± √(1-a)
    """
    _require_finite(lam, a)
    if lam > 1 or a > 1:
        raise DomainException(
            f"H4 entries are complex for lambda={lam}, a={a}; use build_product_representative "
            f"with ProductCouplings(A={a}, B=..., C={lam}) and n=4 instead")
    outer = math.sqrt(1 - lam)
    inner = math.sqrt(1 - a)
    couplings = [outer, inner, outer]
    return _tridiagonal([-1 + g for g in couplings], [-1 - g for g in couplings])


def to_products(c: CartesianCouplings) -> ProductCouplings:
    return ProductCouplings(1 - c.x ** 2, 1 - c.y ** 2, 1 - c.z ** 2)


def from_products(p: ProductCouplings) -> CartesianCouplings:
    """Return the nonnegative Cartesian preimage `(√(1-A), √(1-B), √(1-C))`.

    Sign choices flip signs within an off-diagonal pair and leave every spectral
    quantity unchanged, so the nonnegative branch is as good as any.
    """
    for name, value in (('A', p.A), ('B', p.B), ('C', p.C)):
        if value > 1:
            raise NoRealPreimageException(f"{name}={value} > 1 has no real Cartesian coupling")
    return CartesianCouplings(math.sqrt(1 - p.A), math.sqrt(1 - p.B), math.sqrt(1 - p.C))


def pair_products(p: ProductCouplings, n: int) -> list:
    """Return the products of opposing off-diagonal pairs along the chain."""
    if n == 6:
        return [p.C, p.B, p.A, p.B, p.C]
    if n == 4:
        return [p.C, p.A, p.C]
    raise InvalidDimensionException(f"no lattice model for dimension {n}, use one of {SUPPORTED_DIMENSIONS}")


def build_product_representative(p: ProductCouplings, n: int) -> np.ndarray:
    """Return the real tridiagonal matrix with superdiagonal `-(products)` and subdiagonal -1.

    Args:
        p (ProductCouplings): arbitrary real products
        n (int): 4 or 6

    Returns:
        np.ndarray: a matrix with the same characteristic polynomial as the lattice
        Hamiltonian for these products
    """
    products = pair_products(p, n)
    return _tridiagonal([-value for value in products], [-1.0] * (n - 1))


def hamiltonian_for(p: ProductCouplings, dim: int = 6) -> np.ndarray:
    """Return the Cartesian-form Hamiltonian when it is real, the representative otherwise."""
    if dim == 6 and max(p.A, p.B, p.C) <= 1:
        return build_hamiltonian6(from_products(p))
    if dim == 4 and max(p.A, p.C) <= 1:
        return build_hamiltonian4(p.C, p.A)
    return build_product_representative(p, dim)


def check_pt_symmetry(h: np.ndarray) -> bool:
    """Return `True` if `P·H·P` equals the transpose of `H`.

    Integer matrices are compared exactly, floating-point matrices entrywise within
    an absolute tolerance of 1e-14.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] % 2:
        LOG.debug(f" matrix of shape {h.shape} is not square of even dimension")
        return False
    parity = build_parity(h.shape[0])
    mirrored = parity @ h @ parity
    if np.issubdtype(h.dtype, np.integer):
        return bool(np.array_equal(mirrored, h.T))
    return bool(np.allclose(mirrored, h.T, rtol=0.0, atol=FLOAT_SYMMETRY_TOLERANCE))


class InvalidDimensionException(Exception):
    pass


class DomainException(Exception):
    pass


class NoRealPreimageException(Exception):
    pass

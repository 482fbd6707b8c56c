"""Exact dense linear algebra over prime fields F_p.

Everything downstream (normal forms, homology, Hom spaces, resolutions)
reduces to rank / kernel / solve over a prime field, so these kernels are
kept dependency-light: numpy int64 arrays with explicit modular reduction.
Matrices are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DimensionMismatch(ValueError):
    """Shapes of operands are incompatible."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7):
        if n % q == 0:
            return n == q
    # Deterministic Miller-Rabin; bases 2,3,5,7 decide primality below 3.2e9,
    # which covers the allowed modulus range p <= 2^31 - 1.
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = (x * x) % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_p, 2 <= p <= 2^31 - 1."""

    p: int

    def __post_init__(self) -> None:
        if not (2 <= self.p <= 2**31 - 1):
            raise ValueError(f"modulus out of range: {self.p}")
        if not _is_prime(self.p):
            raise ValueError(f"modulus is not prime: {self.p}")

    def normalize(self, x: int) -> int:
        return x % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, self.p - 2, self.p)

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def __repr__(self) -> str:
        return f"F{self.p}"


class Matrix:
    """Immutable dense matrix over a prime field."""

    __slots__ = ("field", "a")

    def __init__(self, field: PrimeField, array) -> None:
        a = np.asarray(array, dtype=np.int64) % field.p
        if a.ndim != 2:
            raise DimensionMismatch(f"expected 2-d data, got ndim={a.ndim}")
        a.setflags(write=False)
        self.field = field
        self.a = a

    # -- constructors ---------------------------------------------------

    @classmethod
    def zeros(cls, field: PrimeField, rows: int, cols: int) -> Matrix:
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field: PrimeField, n: int) -> Matrix:
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def from_rows(cls, field: PrimeField, rows) -> Matrix:
        rows = list(rows)
        if not rows:
            return cls.zeros(field, 0, 0)
        return cls(field, np.array(rows, dtype=np.int64))

    # -- basic structure ------------------------------------------------

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def is_zero(self) -> bool:
        return not self.a.any()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.field == other.field
            and self.a.shape == other.a.shape
            and bool(np.array_equal(self.a, other.a))
        )

    def __hash__(self):
        return hash((self.field.p, self.a.shape, self.a.tobytes()))

    def __repr__(self) -> str:
        return f"Matrix({self.field}, {self.a.tolist()})"

    def transpose(self) -> Matrix:
        return Matrix(self.field, self.a.T)

    def take_cols(self, idx) -> Matrix:
        return Matrix(self.field, self.a[:, list(idx)])

    def take_rows(self, idx) -> Matrix:
        return Matrix(self.field, self.a[list(idx), :])

    def hstack(self, other: Matrix) -> Matrix:
        if self.rows != other.rows:
            raise DimensionMismatch("hstack: row counts differ")
        return Matrix(self.field, np.hstack([self.a, other.a]))

    def vstack(self, other: Matrix) -> Matrix:
        if self.cols != other.cols:
            raise DimensionMismatch("vstack: column counts differ")
        return Matrix(self.field, np.vstack([self.a, other.a]))

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other: Matrix) -> Matrix:
        self._check_same_shape(other)
        return Matrix(self.field, self.a + other.a)

    def __sub__(self, other: Matrix) -> Matrix:
        self._check_same_shape(other)
        return Matrix(self.field, self.a - other.a)

    def __neg__(self) -> Matrix:
        return Matrix(self.field, -self.a)

    def scale(self, c: int) -> Matrix:
        return Matrix(self.field, self.a * (c % self.field.p))

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.field != other.field:
            raise DimensionMismatch("matmul: fields differ")
        if self.cols != other.rows:
            raise DimensionMismatch(
                f"matmul: {self.rows}x{self.cols} @ {other.rows}x{other.cols}"
            )
        p = self.field.p
        # int64 accumulation is exact while cols * (p-1)^2 < 2^63.
        if self.cols * (p - 1) ** 2 < 2**63:
            return Matrix(self.field, self.a @ other.a)
        prod = self.a.astype(object) @ other.a.astype(object)
        return Matrix(self.field, np.asarray(prod % p, dtype=np.int64))

    def _check_same_shape(self, other: Matrix) -> None:
        if self.field != other.field or self.a.shape != other.a.shape:
            raise DimensionMismatch("shapes or fields differ")

    # -- elimination ----------------------------------------------------

    def rref(self) -> tuple[Matrix, tuple[int, ...], int]:
        """Reduced row echelon form.

        Returns (R, pivot_columns, rank); R is the unique RREF of self.
        """
        p = self.field.p
        A = self.a.copy()
        m, n = A.shape
        pivots: list[int] = []
        r = 0
        for c in range(n):
            if r == m:
                break
            nz = np.nonzero(A[r:, c])[0]
            if nz.size == 0:
                continue
            pr = r + int(nz[0])
            if pr != r:
                A[[r, pr]] = A[[pr, r]]
            A[r] = (A[r] * self.field.inv(int(A[r, c]))) % p
            col = A[:, c].copy()
            col[r] = 0
            if col.any():
                A = (A - np.outer(col, A[r])) % p
            pivots.append(c)
            r += 1
        return Matrix(self.field, A), tuple(pivots), len(pivots)

    def rank(self) -> int:
        return self.rref()[2]

    def kernel_basis(self) -> Matrix:
        """Matrix whose columns form a basis of the null space."""
        R, pivots, rank = self.rref()
        n = self.cols
        free = [c for c in range(n) if c not in set(pivots)]
        K = np.zeros((n, len(free)), dtype=np.int64)
        p = self.field.p
        for j, f in enumerate(free):
            K[f, j] = 1
            for i, c in enumerate(pivots):
                K[c, j] = (-int(R.a[i, f])) % p
        return Matrix(self.field, K)

    def solve(self, b: Matrix) -> Matrix | None:
        """Solve self @ x = b exactly; None when b is not in the column space.

        b may have several columns; every column must be solvable.
        """
        if b.rows != self.rows:
            raise DimensionMismatch("solve: right-hand side row count differs")
        aug = self.hstack(b)
        R, pivots, _ = aug.rref()
        n = self.cols
        if any(c >= n for c in pivots):
            return None
        X = np.zeros((n, b.cols), dtype=np.int64)
        for i, c in enumerate(pivots):
            X[c, :] = R.a[i, n:]
        return Matrix(self.field, X)

    def column_space_pivots(self) -> tuple[int, ...]:
        """Indices of columns forming a basis of the column space."""
        return self.rref()[1]


def pivot_split(base: Matrix, extra: Matrix) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Pivots of [base | extra], split into base-part and extra-part indices.

    The extra-part indices select columns of `extra` extending the column
    space of `base` to the span of both; used to build quotient-space bases.
    """
    if base.cols == 0:
        piv = extra.column_space_pivots()
        return (), piv
    _, pivots, _ = base.hstack(extra).rref()
    nb = base.cols
    return (
        tuple(c for c in pivots if c < nb),
        tuple(c - nb for c in pivots if c >= nb),
    )

"""Scalars, subspaces and the linear maps used by every set representation.

Two scalar flavours coexist.  :class:`Dyadic` is an exact rational of the
form ``mantissa * 2**exponent``; halving only decrements the exponent, so
``(A + R A) / 2`` never loses a bit on grids, interval unions and exact point
sets.  Everything else uses binary64 floats compared under an explicit
tolerance.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence, Union

import numpy as np

DEFAULT_TOL = 1e-9


class DimensionError(ValueError):
    pass


class NotDyadicError(ValueError):
    pass


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@functools.total_ordering
class Dyadic:
    """Exact dyadic rational ``mantissa * 2**exponent``, kept normalized.

    >>> Dyadic(3, -2) + Dyadic(1, -2)
    Dyadic(1, 0)
    >>> Dyadic.parse("-0.375").half()
    Dyadic(-3, -4)
    """

    __slots__ = ("mantissa", "exponent")

    def __init__(self, mantissa: int = 0, exponent: int = 0):
        mantissa = int(mantissa)
        exponent = int(exponent)
        if mantissa == 0:
            exponent = 0
        else:
            tz = (mantissa & -mantissa).bit_length() - 1
            mantissa >>= tz
            exponent += tz
        object.__setattr__(self, "mantissa", mantissa)
        object.__setattr__(self, "exponent", exponent)

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    # -- construction -------------------------------------------------

    @classmethod
    def from_float(cls, x: float) -> "Dyadic":
        if not math.isfinite(x):
            raise NotDyadicError(f"{x!r} is not finite")
        num, den = float(x).as_integer_ratio()
        return cls(num, -(den.bit_length() - 1))

    @classmethod
    def from_fraction(cls, q: Rational) -> "Dyadic":
        q = Fraction(q)
        if not _is_pow2(q.denominator):
            raise NotDyadicError(f"{q} has a non-dyadic denominator")
        return cls(q.numerator, -(q.denominator.bit_length() - 1))

    @classmethod
    def coerce(cls, x) -> "Dyadic":
        """Exact conversion from int, Fraction, float, str or Dyadic."""
        if isinstance(x, Dyadic):
            return x
        if isinstance(x, (bool, np.bool_)):
            raise TypeError("booleans are not scalars")
        if isinstance(x, (int, np.integer)):
            return cls(int(x), 0)
        if isinstance(x, (float, np.floating)):
            return cls.from_float(float(x))
        if isinstance(x, Rational):
            return cls.from_fraction(x)
        if isinstance(x, str):
            return cls.parse(x)
        raise TypeError(f"cannot convert {type(x).__name__} to Dyadic")

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        """Parse ``"3"``, ``"-0.375"``, ``"3/8"`` or ``"1e-3"``.

        Decimal literals that are not dyadic (``"0.1"``) round to the nearest
        binary64 value, which is itself dyadic.
        """
        text = text.strip()
        try:
            q = Fraction(text)
        except ValueError as exc:
            raise NotDyadicError(f"cannot parse {text!r}") from exc
        if _is_pow2(q.denominator):
            return cls.from_fraction(q)
        if "/" in text:
            raise NotDyadicError(f"{text!r} is not dyadic")
        return cls.from_float(float(text))

    # -- conversions ---------------------------------------------------

    def as_fraction(self) -> Fraction:
        if self.exponent >= 0:
            return Fraction(self.mantissa << self.exponent)
        return Fraction(self.mantissa, 1 << -self.exponent)

    @property
    def numerator(self) -> int:
        return self.as_fraction().numerator

    @property
    def denominator(self) -> int:
        return self.as_fraction().denominator

    def __float__(self) -> float:
        if self.exponent >= 0:
            return float(self.mantissa << self.exponent)
        return self.mantissa / (1 << -self.exponent) if -self.exponent < 1000 \
            else float(self.as_fraction())

    def is_integer(self) -> bool:
        return self.exponent >= 0

    def to_decimal(self) -> str:
        """Exact decimal expansion (always finite for a dyadic)."""
        if self.exponent >= 0:
            return str(self.mantissa << self.exponent)
        k = -self.exponent
        digits = str(abs(self.mantissa) * 5 ** k).rjust(k + 1, "0")
        sign = "-" if self.mantissa < 0 else ""
        return f"{sign}{digits[:-k]}.{digits[-k:]}"

    def __str__(self) -> str:
        f = float(self)
        if math.isfinite(f) and Dyadic.from_float(f) == self:
            return repr(f) if not f.is_integer() else str(int(f))
        return self.to_decimal()

    def __repr__(self) -> str:
        return f"Dyadic({self.mantissa}, {self.exponent})"

    # -- arithmetic ----------------------------------------------------

    def _align(self, other: "Dyadic") -> tuple[int, int, int]:
        e = min(self.exponent, other.exponent)
        return (self.mantissa << (self.exponent - e),
                other.mantissa << (other.exponent - e), e)

    def __add__(self, other):
        if isinstance(other, float):
            return float(self) + other
        try:
            other = Dyadic.coerce(other)
        except TypeError:
            return NotImplemented
        a, b, e = self._align(other)
        return Dyadic(a + b, e)

    __radd__ = __add__

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.mantissa, self.exponent)

    def __pos__(self) -> "Dyadic":
        return self

    def __abs__(self) -> "Dyadic":
        return Dyadic(abs(self.mantissa), self.exponent)

    def __sub__(self, other):
        if isinstance(other, float):
            return float(self) - other
        try:
            other = Dyadic.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, float):
            return float(self) * other
        try:
            other = Dyadic.coerce(other)
        except TypeError:
            return NotImplemented
        return Dyadic(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, float):
            return float(self) / other
        other = Dyadic.coerce(other)
        if other.mantissa not in (1, -1):
            raise NotDyadicError(f"division by {other} leaves the dyadic rationals")
        return Dyadic(self.mantissa * other.mantissa, self.exponent - other.exponent)

    def half(self) -> "Dyadic":
        return Dyadic(self.mantissa, self.exponent - 1)

    def ldexp(self, k: int) -> "Dyadic":
        return Dyadic(self.mantissa, self.exponent + k)

    # -- comparison ----------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Dyadic):
            return self.mantissa == other.mantissa and self.exponent == other.exponent
        if isinstance(other, (int, Fraction)):
            return self.as_fraction() == other
        if isinstance(other, float):
            return math.isfinite(other) and self == Dyadic.from_float(other)
        return NotImplemented

    def __lt__(self, other) -> bool:
        if isinstance(other, Dyadic):
            a, b, _ = self._align(other)
            return a < b
        if isinstance(other, (int, Fraction)):
            return self.as_fraction() < other
        if isinstance(other, float):
            return float(self) < other if not math.isfinite(other) \
                else self < Dyadic.from_float(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.as_fraction())

    def __bool__(self) -> bool:
        return self.mantissa != 0


Scalar = Union[Dyadic, float]
Vector = tuple


def as_scalar(x, exact: bool) -> Scalar:
    return Dyadic.coerce(x) if exact else float(x)


def close(a: Scalar, b: Scalar, tol: float = DEFAULT_TOL) -> bool:
    """Equality predicate: exact for two dyadics, tolerance-based otherwise."""
    if isinstance(a, Dyadic) and isinstance(b, Dyadic):
        return a == b
    return abs(float(a) - float(b)) <= tol


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of R^n given by an orthonormal basis.

    ``dim == 0`` is the origin, used for central symmetrization.  When every
    basis vector is a signed unit vector the subspace is flagged
    ``axis_aligned`` and projections/reflections stay exact on dyadics.
    """

    ambient_dim: int
    basis: tuple[tuple[float, ...], ...] = ()
    tol: float = DEFAULT_TOL
    axes: tuple[int, ...] | None = field(default=None, compare=False)
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        n = self.ambient_dim
        if n < 1:
            raise DimensionError("ambient dimension must be positive")
        basis = tuple(tuple(float(c) for c in b) for b in self.basis)
        if len(basis) > n - 1:
            raise DimensionError(f"subspace of R^{n} must have dim <= {n - 1}")
        for b in basis:
            if len(b) != n:
                raise DimensionError("basis vector length differs from ambient dimension")
        if basis:
            g = np.asarray(basis) @ np.asarray(basis).T
            if not np.allclose(g, np.eye(len(basis)), atol=self.tol * 10, rtol=0):
                raise ValueError("basis is not orthonormal")
        object.__setattr__(self, "basis", basis)
        axes = []
        for b in basis:
            nz = [i for i, c in enumerate(b) if c != 0.0]
            if len(nz) != 1 or abs(b[nz[0]]) != 1.0:
                axes = None
                break
            axes.append(nz[0])
        object.__setattr__(self, "axes", tuple(sorted(axes)) if axes is not None else None)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def axis_aligned(self) -> bool:
        return self.axes is not None

    @property
    def complement_axes(self) -> tuple[int, ...]:
        if self.axes is None:
            raise ValueError("complement axes only defined for axis-aligned subspaces")
        return tuple(i for i in range(self.ambient_dim) if i not in self.axes)

    # -- constructors --------------------------------------------------

    @classmethod
    def origin(cls, n: int) -> "Subspace":
        return cls(n, (), name="o")

    @classmethod
    def coordinate(cls, n: int, *axes: int) -> "Subspace":
        basis = []
        for a in sorted(set(axes)):
            if not 0 <= a < n:
                raise DimensionError(f"axis {a} out of range for R^{n}")
            e = [0.0] * n
            e[a] = 1.0
            basis.append(tuple(e))
        label = "".join("xyz"[a] if n <= 3 else str(a) for a in sorted(set(axes))) or "o"
        return cls(n, tuple(basis), name=label)

    @classmethod
    def line(cls, theta: float) -> "Subspace":
        """Line through the origin in R^2 at angle ``theta`` (radians)."""
        c, s = math.cos(theta), math.sin(theta)
        # snap exact axis directions so they keep the exact code path
        for ref in (0.0, 1.0, -1.0):
            if abs(c - ref) < 1e-15:
                c = ref
            if abs(s - ref) < 1e-15:
                s = ref
        return cls(2, ((c, s),), name=f"line({math.degrees(theta):.6g}deg)")

    @classmethod
    def span(cls, vectors: Sequence[Sequence[float]], tol: float = DEFAULT_TOL) -> "Subspace":
        a = np.atleast_2d(np.asarray(vectors, dtype=float))
        n = a.shape[1]
        q, r = np.linalg.qr(a.T)
        keep = np.abs(np.diag(r)) > tol
        if not keep.all():
            raise ValueError("spanning vectors are linearly dependent")
        return cls(n, tuple(map(tuple, q.T)), tol=tol)

    def basis_matrix(self) -> np.ndarray:
        return np.asarray(self.basis, dtype=float).reshape(self.dim, self.ambient_dim)

    def reflection_matrix(self) -> np.ndarray:
        b = self.basis_matrix()
        return 2.0 * b.T @ b - np.eye(self.ambient_dim)

    def projection_matrix(self) -> np.ndarray:
        b = self.basis_matrix()
        return b.T @ b

    def orthogonal_complement(self) -> "Subspace":
        n = self.ambient_dim
        if self.axis_aligned:
            return Subspace.coordinate(n, *self.complement_axes)
        p = np.eye(n) - self.projection_matrix()
        u, s, _ = np.linalg.svd(p)
        return Subspace(n, tuple(map(tuple, u[:, s > 0.5].T)), tol=self.tol)

    def __str__(self) -> str:
        return self.name or f"span{list(self.basis)}"


def _check_dim(x: Sequence, H: Subspace) -> None:
    if len(x) != H.ambient_dim:
        raise DimensionError(f"vector of length {len(x)} in R^{H.ambient_dim}")


def project(x: Sequence, H: Subspace) -> Vector:
    """Orthogonal projection ``x|H``; exact on dyadic input with axis-aligned H."""
    _check_dim(x, H)
    if H.axis_aligned:
        zero = Dyadic(0) if x and isinstance(x[0], Dyadic) else 0.0
        return tuple(c if i in H.axes else zero for i, c in enumerate(x))
    v = np.asarray([float(c) for c in x])
    return tuple((H.projection_matrix() @ v).tolist())


def reflect(x: Sequence, H: Subspace) -> Vector:
    """``R_H x = 2 (x|H) - x``."""
    _check_dim(x, H)
    if H.axis_aligned:
        return tuple(c if i in H.axes else -c for i, c in enumerate(x))
    v = np.asarray([float(c) for c in x])
    return tuple((H.reflection_matrix() @ v).tolist())


def rotation_2d(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def dot(x: Sequence, y: Sequence):
    return sum((a * b for a, b in zip(x, y)), start=type(x[0])(0) if x else 0)


def norm(x: Sequence) -> float:
    return math.sqrt(sum(float(c) ** 2 for c in x))

"""Integer-array helpers for values stored as ``ints * 2**exp``."""

from __future__ import annotations

import numpy as np

from ..core import Dyadic

_INT64_SAFE = 1 << 61


class SizeLimitError(RuntimeError):
    """Raised when an exact operation would exceed its element budget."""


def int_array(values) -> np.ndarray:
    """int64 array when every entry fits comfortably, else an object array."""
    arr = np.asarray(values, dtype=object)
    if arr.size == 0:
        return np.zeros(arr.shape, dtype=np.int64)
    flat = arr.ravel()
    lo, hi = min(flat), max(flat)
    if -_INT64_SAFE < lo and hi < _INT64_SAFE:
        return arr.astype(np.int64)
    return arr


def widen(a: np.ndarray) -> np.ndarray:
    """Promote to object dtype if a following add/shift could overflow int64."""
    if a.dtype == object or a.size == 0:
        return a
    m = int(np.abs(a).max())
    if m >= _INT64_SAFE >> 2:
        return a.astype(object)
    return a


def shift_left(a: np.ndarray, k: int) -> np.ndarray:
    if k == 0:
        return a
    if a.dtype != object and a.size and int(np.abs(a).max()).bit_length() + k >= 62:
        a = a.astype(object)
    if a.dtype == object:
        return np.vectorize(lambda v: int(v) << k, otypes=[object])(a) if a.size else a
    return a << k


def to_scaled(values) -> tuple[np.ndarray, int]:
    """Exact conversion of a nested list of scalars to ``(ints, exponent)``."""
    arr = np.asarray(values, dtype=object)
    flat = [Dyadic.coerce(v) for v in arr.ravel()]
    if not flat:
        return np.zeros(arr.shape, dtype=np.int64), 0
    e = min(d.exponent for d in flat)
    ints = [d.mantissa << (d.exponent - e) for d in flat]
    return normalize(int_array(np.asarray(ints, dtype=object).reshape(arr.shape)), e)


def normalize(ints: np.ndarray, exp: int) -> tuple[np.ndarray, int]:
    """Strip common factors of two so the representation is canonical."""
    if ints.size == 0:
        return ints, 0
    if ints.dtype == object:
        acc = 0
        for v in ints.ravel():
            acc |= int(v)
    else:
        acc = int(np.bitwise_or.reduce(np.abs(ints).ravel()))
    if acc == 0:
        return ints, 0
    tz = (acc & -acc).bit_length() - 1
    if tz:
        ints = ints >> tz if ints.dtype != object else \
            np.vectorize(lambda v: int(v) >> tz, otypes=[object])(ints)
        exp += tz
    return int_array(ints) if ints.dtype == object else ints, exp


def align(a: np.ndarray, ea: int, b: np.ndarray, eb: int):
    e = min(ea, eb)
    return shift_left(a, ea - e), shift_left(b, eb - e), e


def unique_rows(a: np.ndarray) -> np.ndarray:
    """Sorted distinct rows."""
    if a.dtype != object:
        if len(a) <= 1:
            return a
        lo = a.min(axis=0)
        span = a.max(axis=0) - lo + 1
        if float(np.prod(span.astype(float))) < 2.0 ** 62:
            # mixed-radix key: one int64 sort instead of a row sort
            radix = np.concatenate([np.cumprod(span[::-1])[::-1][1:], [1]])
            key = np.unique((a - lo) @ radix)
            out = np.empty((len(key), a.shape[1]), dtype=a.dtype)
            for i, r in enumerate(radix):
                out[:, i], key = np.divmod(key, r)
            return out + lo
        return np.unique(a, axis=0)
    rows = sorted({tuple(int(v) for v in r) for r in a})
    return int_array(rows).reshape(len(rows), a.shape[1])


def to_dyadic(v, exp: int) -> Dyadic:
    return Dyadic(int(v), exp)


def to_float(a: np.ndarray, exp: int) -> np.ndarray:
    if a.dtype == object:
        return np.array([float(Dyadic(int(v), exp)) for v in a.ravel()]).reshape(a.shape)
    return np.ldexp(a.astype(float), exp)

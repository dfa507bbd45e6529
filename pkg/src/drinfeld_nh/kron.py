"""Exact multidimensional convolution of small nonnegative integer arrays.

Both operands are packed into one big integer (Kronecker substitution) with
slots wide enough that no carry crosses a slot boundary, multiplied with GMP,
and unpacked again.  This is the hot path of every series product.
"""

import numpy as np
import gmpy2

_WIDTHS = (1, 2, 4, 8)


def _slot_bytes(bound):
    bits = int(bound).bit_length()
    for w in _WIDTHS:
        if 8 * w >= bits + 1:
            return w
    raise OverflowError("convolution bound too large for packed slots")


def _pack(arr, shape, width):
    buf = np.zeros(shape, dtype="<u%d" % width)
    buf[tuple(slice(0, s) for s in arr.shape)] = arr
    return gmpy2.mpz.from_bytes(buf.tobytes(), "little")


def convolve(a, b, vmax, trunc=None):
    """Full convolution of ``a`` and ``b`` along every axis.

    ``vmax`` bounds the entries of both inputs.  If ``trunc`` is given, the
    result is cut to ``trunc`` entries along axis 0 (and the inputs are cut
    first, which halves the work for truncated series products).
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if trunc is not None:
        a = a[:trunc]
        b = b[:trunc]
    if a.size == 0 or b.size == 0:
        shape = [x + y - 1 for x, y in zip(a.shape, b.shape)]
        if trunc is not None:
            shape[0] = min(shape[0], trunc)
        return np.zeros([max(s, 0) for s in shape], dtype=np.int64)
    out = [x + y - 1 for x, y in zip(a.shape, b.shape)]
    if trunc is not None:
        out[0] = min(out[0], trunc)
    terms = 1
    for x, y in zip(a.shape, b.shape):
        terms *= min(x, y)
    width = _slot_bytes(vmax * vmax * terms)
    total = int(np.prod(out))
    prod = _pack(a, out, width) * _pack(b, out, width)
    nbytes = max((prod.bit_length() + 7) // 8, width * total)
    raw = prod.to_bytes(nbytes, "little")[: width * total]
    res = np.frombuffer(raw, dtype="<u%d" % width).astype(np.int64)
    return res.reshape(out)

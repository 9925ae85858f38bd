"""Small-dimension exact algebra on C^6 and on 2-forms over R^4.

Vectors are numpy arrays whose last axis is the ambient dimension; all
operations broadcast over leading (grid) axes.  The complex bilinear
product carries no conjugation; the Hermitian product is recovered as
``cbilinear(u, conj(u))``.

2-forms on R^4 are stored as 6-vectors in the lexicographic basis
(e0^e1, e0^e2, e0^e3, e1^e2, e1^e3, e2^e3), which the induced inner
product makes orthonormal.  The Hodge star is fixed by declaring
e0^e1^e2^e3 positive.
"""

import numpy as np

# Index pairs of the lexicographic 2-form basis.
_WEDGE_PAIRS = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]

# hodge_star in the lexicographic basis: output index and sign per slot.
_STAR_INDEX = [5, 4, 3, 2, 1, 0]
_STAR_SIGN = np.array([1.0, -1.0, 1.0, 1.0, -1.0, 1.0])


def cbilinear(u, v):
    """Complex bilinear extension of the standard inner product (no conjugation)."""
    return np.sum(np.asarray(u) * np.asarray(v), axis=-1)


def herm(u, v):
    """Hermitian inner product <u, v> = (u, conj v)."""
    return np.sum(np.asarray(u) * np.conj(v), axis=-1)


def hnorm2(u):
    """Squared Hermitian norm."""
    return np.real(herm(u, u))


def volume6(*vectors):
    """Determinant of the 6x6 matrix with the given columns.

    Accepts six arrays of shape (..., 6); broadcasts over leading axes.
    """
    if len(vectors) != 6:
        raise ValueError("volume6 takes exactly six vectors")
    cols = np.stack(np.broadcast_arrays(*vectors), axis=-1)
    return np.linalg.det(cols)


def cross5(v1, v2, v3, v4, v5):
    """Generalized cross product of five real vectors in R^6.

    Returns the unique w with (w, vi) = 0 for all i and
    volume6(v1..v5, w) = |w|^2 (cofactor expansion along the last
    column).  Returns 0 when the inputs are linearly dependent.
    """
    vs = np.broadcast_arrays(v1, v2, v3, v4, v5)
    m = np.stack(vs, axis=-1)  # (..., 6, 5)
    out = np.empty(m.shape[:-1], dtype=m.dtype)
    rows = np.arange(6)
    for k in range(6):
        minor = m[..., rows != k, :]
        out[..., k] = (-1.0) ** (k + 6 + 1) * np.linalg.det(minor)
    return out


def wedge(p, q):
    """Wedge product of two R^4 vectors in the lexicographic 2-form basis."""
    p = np.asarray(p)
    q = np.asarray(q)
    comps = [
        p[..., i] * q[..., j] - p[..., j] * q[..., i] for i, j in _WEDGE_PAIRS
    ]
    return np.stack(comps, axis=-1)


def hodge_star(w):
    """Hodge star on 2-forms over R^4; an involution in this signature."""
    w = np.asarray(w)
    return w[..., _STAR_INDEX] * _STAR_SIGN


def include_complex(w):
    """Include a real 2-form into complex 6-space via w -> (w - i*star w)/sqrt2."""
    w = np.asarray(w)
    return (w - 1j * hodge_star(w)) / np.sqrt(2.0)


def cross3_r4(v1, v2, v3):
    """Generalized cross product of three vectors in R^4 (cofactor expansion)."""
    vs = np.broadcast_arrays(v1, v2, v3)
    m = np.stack(vs, axis=-1)  # (..., 4, 3)
    out = np.empty(m.shape[:-1], dtype=m.dtype)
    rows = np.arange(4)
    for k in range(4):
        minor = m[..., rows != k, :]
        out[..., k] = (-1.0) ** (k + 4 + 1) * np.linalg.det(minor)
    return out

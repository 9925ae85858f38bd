"""Exact-algebra properties of the C^6 / 2-form helpers.

Every identity here is checked against an independent construction
(cofactor determinants, explicit basis expansion), so these act as the
oracles for everything built on top.
"""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from s5surf import algebra6

finite = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False)


def vec(dim):
    return arrays(float, (dim,), elements=finite)


@given(vec(4), vec(4))
def test_wedge_antisymmetry(p, q):
    np.testing.assert_allclose(
        algebra6.wedge(p, q), -algebra6.wedge(q, p), atol=1e-12
    )


@given(vec(4), vec(4), vec(4), st.floats(-5, 5))
def test_wedge_bilinearity(p, q, r, c):
    lhs = algebra6.wedge(p + c * q, r)
    rhs = algebra6.wedge(p, r) + c * algebra6.wedge(q, r)
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)


@given(vec(4), vec(4))
def test_wedge_norm_is_gram_determinant(p, q):
    # |p ^ q|^2 = |p|^2 |q|^2 - (p, q)^2 in the induced inner product
    w = algebra6.wedge(p, q)
    gram = np.dot(p, p) * np.dot(q, q) - np.dot(p, q) ** 2
    np.testing.assert_allclose(np.dot(w, w), gram, atol=1e-7, rtol=1e-10)


@given(vec(6))
def test_hodge_star_involution_and_isometry(w):
    ww = algebra6.hodge_star(algebra6.hodge_star(w))
    np.testing.assert_allclose(ww, w, atol=1e-12)
    np.testing.assert_allclose(
        np.dot(algebra6.hodge_star(w), algebra6.hodge_star(w)),
        np.dot(w, w),
        atol=1e-9,
    )


@given(vec(4), vec(4), vec(4), vec(4))
def test_star_pairing_is_four_volume(p, q, r, s):
    # (p^q, star(r^s)) equals det[p q r s]: fixes the star orientation
    pairing = np.dot(algebra6.wedge(p, q), algebra6.hodge_star(algebra6.wedge(r, s)))
    det = np.linalg.det(np.stack([p, q, r, s], axis=-1))
    np.testing.assert_allclose(pairing, det, atol=1e-7, rtol=1e-10)


@given(vec(6))
def test_include_complex_preserves_norm(w):
    z = algebra6.include_complex(w)
    # Hermitian norm equals the real norm: inclusion is isometric
    np.testing.assert_allclose(algebra6.hnorm2(z), np.dot(w, w), atol=1e-9)


@given(vec(6), vec(6))
def test_cbilinear_has_no_conjugation(u, v):
    zu = u + 1j * v
    assert np.iscomplexobj(algebra6.cbilinear(zu, zu))
    np.testing.assert_allclose(
        algebra6.herm(zu, zu), algebra6.cbilinear(zu, np.conj(zu)), atol=1e-12
    )


@settings(max_examples=30)
@given(arrays(float, (6, 6), elements=finite))
def test_volume6_is_determinant_of_columns(m):
    vol = algebra6.volume6(*[m[:, k] for k in range(6)])
    np.testing.assert_allclose(vol, np.linalg.det(m), atol=1e-6, rtol=1e-9)


@settings(max_examples=30)
@given(arrays(float, (5, 6), elements=finite))
def test_cross5_orthogonal_and_volume(rows):
    w = algebra6.cross5(*rows)
    for v in rows:
        assert abs(np.dot(w, v)) <= 1e-6 * max(1.0, np.linalg.norm(w) * np.linalg.norm(v))
    vol = algebra6.volume6(*rows, w)
    np.testing.assert_allclose(vol, np.dot(w, w), atol=1e-5, rtol=1e-8)


@settings(max_examples=30)
@given(arrays(float, (3, 4), elements=finite))
def test_cross3_r4_orthogonal(rows):
    w = algebra6.cross3_r4(*rows)
    for v in rows:
        assert abs(np.dot(w, v)) <= 1e-7 * max(1.0, np.linalg.norm(w) * np.linalg.norm(v))


def test_volume6_alternating():
    rng = np.random.default_rng(3)
    cols = list(rng.normal(size=(6, 6)))
    v = algebra6.volume6(*cols)
    cols[0], cols[1] = cols[1], cols[0]
    np.testing.assert_allclose(algebra6.volume6(*cols), -v, rtol=1e-12)


def test_wedge_basis_convention():
    e = np.eye(4)
    # lexicographic slots: e0^e1 first, e2^e3 last
    np.testing.assert_array_equal(
        algebra6.wedge(e[0], e[1]), [1, 0, 0, 0, 0, 0]
    )
    np.testing.assert_array_equal(
        algebra6.wedge(e[2], e[3]), [0, 0, 0, 0, 0, 1]
    )
    np.testing.assert_array_equal(
        algebra6.hodge_star(algebra6.wedge(e[0], e[1])),
        algebra6.wedge(e[2], e[3]),
    )

import numpy as np
import pytest
import scipy.sparse

from mps2cl.errors import InputError
from mps2cl.numerics import (
    schatten_norm, pseudo_inverse, image_projector, kernel_projector, smallest_nonzero,
    numerical_rank, partial_trace, generalized_extremes, operator_norm,
    hermitian_spectrum, Spectrum, place_operator, translation_operator, kron_all,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
Y = np.array([[0, -1j], [1j, 0]])
I2 = np.eye(2)


def _random_hermitian(rng, n):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2


def test_schatten_norms():
    m = np.diag([3.0, -4.0])
    assert abs(schatten_norm(m, 1) - 7) < 1e-12
    assert abs(schatten_norm(m, 2) - 5) < 1e-12
    assert abs(schatten_norm(m, np.inf) - 4) < 1e-12
    assert abs(operator_norm(m) - 4) < 1e-12
    with pytest.raises(InputError):
        schatten_norm(m, 3)


def test_non_finite_rejected():
    with pytest.raises(InputError):
        schatten_norm(np.array([[np.nan, 0], [0, 1]]), 1)


def test_rank_and_projectors():
    h = np.diag([2.0, 0.0, 1e-14, 0.5])
    assert numerical_rank(h) == 2
    p, rank = image_projector(h)
    assert rank == 2
    assert np.abs(p - np.diag([1.0, 0, 0, 1])).max() < 1e-12
    k, dim = kernel_projector(h, 1e-8)
    assert dim == 2
    assert np.abs(k - np.diag([0, 1.0, 1, 0])).max() < 1e-12
    assert abs(smallest_nonzero(h) - 0.5) < 1e-12
    assert np.abs(pseudo_inverse(h) - np.diag([0.5, 0, 0, 2])).max() < 1e-12


def test_non_hermitian_rejected():
    with pytest.raises(InputError):
        pseudo_inverse(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_partial_trace(rng):
    a = _random_hermitian(rng, 2)
    b = _random_hermitian(rng, 3)
    c = _random_hermitian(rng, 2)
    full = kron_all([a, b, c])
    assert np.abs(partial_trace(full, [2, 3, 2], [0]) - a * np.trace(b) * np.trace(c)).max() < 1e-10
    assert np.abs(partial_trace(full, [2, 3, 2], [1, 2]) - np.kron(b, c) * np.trace(a)).max() < 1e-10
    with pytest.raises(InputError):
        partial_trace(full, [2, 2], [0])


def test_generalized_extremes():
    b = np.diag([1.0, 2.0, 0.0])
    lo, hi = generalized_extremes(np.diag([0.5, 3.0, 7.0]), b)
    assert abs(lo - 0.5) < 1e-12
    assert abs(hi - 1.5) < 1e-12
    with pytest.raises(InputError):
        generalized_extremes(b, -b)


def test_spectrum_properties():
    spectrum = Spectrum(eigenvalues=np.array([0.0, 1e-10, 1.0, 2.0]), method='dense', wall_time=0.0)
    assert spectrum.degeneracy == 2
    assert abs(spectrum.gap - 1.0) < 1e-12
    assert abs(spectrum.raw_gap - 1e-10) < 1e-15
    flat = Spectrum(eigenvalues=np.array([1.0, 1.0]), method='dense', wall_time=0.0)
    assert flat.gap is None


def test_dense_and_sparse_agree(rng):
    h = _random_hermitian(rng, 60)
    dense = hermitian_spectrum(h, mode='dense')
    sparse = hermitian_spectrum(scipy.sparse.csr_matrix(h), mode='sparse', k=4)
    assert dense.method == 'dense'
    assert sparse.method == 'sparse'
    assert sparse.eigenvalues.size == 4
    assert np.abs(dense.eigenvalues[:4] - sparse.eigenvalues).max() < 1e-7


@pytest.mark.slow
def test_dense_and_sparse_agree_on_a_4096_dimensional_ring(rng):
    h = scipy.sparse.csr_matrix((2 ** 12, 2 ** 12), dtype=complex)
    for site in range(12):
        h = h + place_operator(_random_hermitian(rng, 4), site, 12, 2)
    dense = hermitian_spectrum(h, mode='dense')
    sparse = hermitian_spectrum(h, mode='sparse', k=4)
    assert sparse.method == 'sparse'
    assert np.abs(dense.eigenvalues[:4] - sparse.eigenvalues).max() < 1e-6


def test_sparse_falls_back_to_dense_for_tiny_operators():
    spectrum = hermitian_spectrum(np.diag([1.0, 0.0, 2.0]), mode='sparse', k=4)
    assert spectrum.method == 'dense'
    assert np.allclose(spectrum.eigenvalues, [0, 1, 2])


def test_eigenvectors_returned(rng):
    h = _random_hermitian(rng, 8)
    spectrum = hermitian_spectrum(h, mode='dense', vectors=True)
    v = spectrum.eigenvectors[:, 0]
    assert np.abs(h @ v - spectrum.ground_energy * v).max() < 1e-10


def test_unknown_mode_rejected():
    with pytest.raises(InputError):
        hermitian_spectrum(np.eye(2), mode='magic')


def test_place_operator():
    op = np.kron(X, Z)
    assert np.abs(place_operator(op, 0, 3, 2).toarray() - kron_all([X, Z, I2])).max() < 1e-12
    assert np.abs(place_operator(op, 1, 3, 2).toarray() - kron_all([I2, X, Z])).max() < 1e-12
    # wraps around the ring
    assert np.abs(place_operator(op, 2, 3, 2).toarray() - kron_all([Z, I2, X])).max() < 1e-12
    with pytest.raises(InputError):
        place_operator(np.eye(3), 0, 3, 2)


def test_translation_operator():
    t = translation_operator(3, 2, 1).toarray()
    shifted = t @ kron_all([X, Y, Z]) @ t.T
    assert np.abs(shifted - kron_all([Z, X, Y])).max() < 1e-12
    assert np.abs(t @ t.T - np.eye(8)).max() < 1e-12

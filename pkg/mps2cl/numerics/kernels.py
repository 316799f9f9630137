"""Dense linear-algebra kernels shared by every layer.

All rank and kernel decisions use a tolerance relative to the largest
singular value (or eigenvalue magnitude) of the argument.
"""
import numpy as np
import scipy.linalg

from typing import Sequence, Tuple

from mps2cl.consts import RANK_TOL, HERMITIAN_TOL
from mps2cl.errors import InputError


def _as_finite(m) -> np.ndarray:
    arr = np.asarray(m)
    if not np.all(np.isfinite(arr)):
        raise InputError('matrix contains non-finite entries')
    return arr


def _threshold(values: np.ndarray, rank_tol: float) -> float:
    if values.size == 0:
        return 0.0
    return rank_tol * float(np.max(np.abs(values)))


def hermitize(m) -> np.ndarray:
    arr = np.asarray(m)
    return (arr + arr.conj().T) / 2


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    arr = np.asarray(m)
    scale = max(1.0, float(np.max(np.abs(arr)))) if arr.size else 1.0
    return bool(np.max(np.abs(arr - arr.conj().T), initial=0.0) <= tol * scale)


def _require_hermitian(m) -> np.ndarray:
    arr = _as_finite(m)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InputError(f'expected a square matrix, got shape {arr.shape}')
    if not is_hermitian(arr):
        raise InputError('matrix is not Hermitian within tolerance')
    return hermitize(arr)


def schatten_norm(m, p=np.inf) -> float:
    """Schatten p-norm for p in {1, 2, inf}."""
    arr = _as_finite(m)
    if arr.size == 0:
        return 0.0
    s = scipy.linalg.svdvals(arr)
    if p == 1:
        return float(np.sum(s))
    if p == 2:
        return float(np.sqrt(np.sum(s ** 2)))
    if p == np.inf or p == 'inf':
        return float(np.max(s))
    raise InputError(f'unsupported Schatten index {p!r}')


def operator_norm(h) -> float:
    """Operator norm of a Hermitian matrix via its spectrum."""
    w = scipy.linalg.eigvalsh(_require_hermitian(h))
    return float(np.max(np.abs(w), initial=0.0))


def numerical_rank(m, rank_tol: float = RANK_TOL) -> int:
    arr = _as_finite(m)
    if arr.size == 0:
        return 0
    s = scipy.linalg.svdvals(arr)
    return int(np.sum(s > _threshold(s, rank_tol)))


def _split(h, rank_tol: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    w, v = scipy.linalg.eigh(_require_hermitian(h))
    keep = np.abs(w) > _threshold(w, rank_tol)
    return w, v, keep


def pseudo_inverse(h, rank_tol: float = RANK_TOL) -> np.ndarray:
    w, v, keep = _split(h, rank_tol)
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / w[keep]
    return (v * inv) @ v.conj().T


def image_projector(h, rank_tol: float = RANK_TOL) -> Tuple[np.ndarray, int]:
    """Orthogonal projector onto the range of ``h`` and its rank."""
    _, v, keep = _split(h, rank_tol)
    vk = v[:, keep]
    return vk @ vk.conj().T, int(np.sum(keep))


def kernel_projector(h, tol: float) -> Tuple[np.ndarray, int]:
    """Projector onto eigenvectors with |eigenvalue| <= tol (absolute)."""
    w, v = scipy.linalg.eigh(_require_hermitian(h))
    vk = v[:, np.abs(w) <= tol]
    return vk @ vk.conj().T, vk.shape[1]


def smallest_nonzero(h, rank_tol: float = RANK_TOL) -> float:
    """Smallest eigenvalue magnitude on the range of ``h``."""
    w, _, keep = _split(h, rank_tol)
    if not np.any(keep):
        raise InputError('matrix is numerically zero')
    return float(np.min(np.abs(w[keep])))


def partial_trace(m, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every tensor factor of ``m`` not listed in ``keep``."""
    dims = [int(x) for x in dims]
    arr = _as_finite(m)
    total = int(np.prod(dims))
    if arr.shape != (total, total):
        raise InputError(f'shape {arr.shape} does not match factor dims {dims}')
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise InputError(f'invalid factor indices {keep}')
    t = arr.reshape(dims + dims)
    n = len(dims)
    for axis in reversed(range(len(dims))):
        if axis in keep:
            continue
        t = np.trace(t, axis1=axis, axis2=axis + n)
        n -= 1
    kept = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(kept, kept)


def generalized_extremes(a, b, rank_tol: float = RANK_TOL) -> Tuple[float, float]:
    """Extreme eigenvalues of b^{+1/2} a b^{+1/2} restricted to range(b),
    for Hermitian ``a`` and positive semidefinite ``b``."""
    w, v, keep = _split(b, rank_tol)
    if not np.any(keep):
        raise InputError('reference operator is numerically zero')
    if np.any(w[keep] < 0):
        raise InputError('reference operator is not positive semidefinite')
    vk = v[:, keep] / np.sqrt(w[keep])
    reduced = hermitize(vk.conj().T @ _require_hermitian(a) @ vk)
    values = scipy.linalg.eigvalsh(reduced)
    return float(values[0]), float(values[-1])

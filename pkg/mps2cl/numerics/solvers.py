import dataclasses
import time

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg
import tenacity

from typing import Optional

from mps2cl.consts import DENSE_LIMIT, SPARSE_LIMIT, KRYLOV_TOL, DEGENERACY_TOL
from mps2cl.errors import InputError, SolverError
from mps2cl.logger import LOGGER


@dataclasses.dataclass(frozen=True)
class Spectrum:
    """Lowest part of a Hermitian spectrum, ascending."""
    eigenvalues: np.ndarray
    method: str
    wall_time: float
    eigenvectors: Optional[np.ndarray] = None

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def degeneracy(self) -> int:
        e0 = self.eigenvalues[0]
        return int(np.sum(np.abs(self.eigenvalues - e0) <= DEGENERACY_TOL))

    @property
    def gap(self) -> Optional[float]:
        """Distance from the ground cluster to the next level, or None when
        every computed level lies in the ground cluster."""
        deg = self.degeneracy
        if deg >= self.eigenvalues.size:
            return None
        return float(self.eigenvalues[deg] - self.eigenvalues[0])

    @property
    def raw_gap(self) -> float:
        return float(self.eigenvalues[1] - self.eigenvalues[0])


def _start_vector(n: int) -> np.ndarray:
    # seeded rather than uniform: a uniform start vector lies in the
    # zero-momentum sector of translation invariant operators
    rng = np.random.default_rng(n)
    v0 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v0 / np.linalg.norm(v0)


def _krylov(h, k: int, vectors: bool):
    n = h.shape[0]
    v0 = _start_vector(n)
    for attempt in tenacity.Retrying(
        reraise=True,
        wait=tenacity.wait_none(),
        stop=tenacity.stop_after_attempt(3),
        retry=tenacity.retry_if_exception_type(scipy.sparse.linalg.ArpackNoConvergence),
    ):
        with attempt:
            number = attempt.retry_state.attempt_number
            ncv = min(n - 1, max(2 * k + 1, 20) * number)
            if number > 1:
                LOGGER.warning(f'- Lanczos did not converge, retrying with ncv={ncv}')
            result = scipy.sparse.linalg.eigsh(
                h, k=k, which='SA', tol=KRYLOV_TOL, v0=v0,
                ncv=ncv, return_eigenvectors=vectors,
            )
    return result


def hermitian_spectrum(h, mode: str = 'auto', k: int = 4,
                       vectors: bool = False) -> Spectrum:
    """Lowest ``k`` eigenvalues of a Hermitian operator (all of them in
    dense mode). ``auto`` picks dense up to 4096 dimensions."""
    n = h.shape[0]
    if h.shape != (n, n):
        raise InputError(f'expected a square operator, got {h.shape}')
    if mode == 'auto':
        mode = 'dense' if n <= DENSE_LIMIT else 'sparse'
    if mode == 'dense' and n > DENSE_LIMIT:
        raise InputError(f'dense diagonalization capped at {DENSE_LIMIT}, got {n}')
    if mode == 'sparse' and n > SPARSE_LIMIT:
        raise InputError(f'sparse diagonalization capped at {SPARSE_LIMIT}, got {n}')
    if mode == 'sparse' and k >= n - 1:
        mode = 'dense'
    start = time.perf_counter()
    if mode == 'dense':
        dense = h.toarray() if scipy.sparse.issparse(h) else np.asarray(h)
        dense = (dense + dense.conj().T) / 2
        if vectors:
            w, v = scipy.linalg.eigh(dense)
        else:
            w, v = scipy.linalg.eigvalsh(dense), None
    elif mode == 'sparse':
        op = scipy.sparse.csr_matrix(h)
        try:
            result = _krylov(op, k, vectors)
        except scipy.sparse.linalg.ArpackNoConvergence as e:
            residual = float('nan')
            if e.eigenvectors is not None and e.eigenvectors.size:
                residual = float(np.linalg.norm(
                    op @ e.eigenvectors - e.eigenvectors * e.eigenvalues))
            raise SolverError('Lanczos failed to converge', residual)
        if vectors:
            w, v = result
        else:
            w, v = result, None
        order = np.argsort(w)
        w = w[order]
        v = v[:, order] if v is not None else None
    else:
        raise InputError(f'unknown diagonalization mode {mode!r}')
    return Spectrum(
        eigenvalues=np.real(np.asarray(w)),
        method=mode,
        wall_time=time.perf_counter() - start,
        eigenvectors=v,
    )

"""The half-shifted frame: every block of L sites is split into a left
and a right half slot of dimension d**(L/2). After rotation by the frame
unitary the asymptotic ground-space projector on two blocks is
Q (x) |phi><phi| (x) Q, and the classical Hamiltonian couples the right
half of one block to the left half of the next."""
import dataclasses

import numpy as np
import scipy.sparse.linalg

from mps2cl.core.mps import CanonicalForm
from mps2cl.core.parent import RingHamiltonian
from mps2cl.core.renorm import entangled_vector
from mps2cl.errors import InputError


@dataclasses.dataclass(frozen=True)
class HalfShiftedFrame:
    L: int
    D: int
    slot_dim: int
    xi: np.ndarray
    permutation: np.ndarray

    @property
    def block_dim(self) -> int:
        return self.slot_dim ** 2

    @property
    def phi(self) -> np.ndarray:
        return entangled_vector(self.xi, self.slot_dim)

    @property
    def isometry(self) -> np.ndarray:
        """Embedding of C^D as the first D coordinates of a half slot."""
        return np.eye(self.slot_dim, self.D)

    @property
    def active(self) -> np.ndarray:
        v = self.isometry
        return v @ v.T

    def hs_term(self) -> np.ndarray:
        """1 - |phi><phi| on a pair of half slots."""
        phi = self.phi
        return np.eye(self.block_dim) - np.outer(phi, phi.conj())

    def asymptotic_projector(self) -> np.ndarray:
        """G^inf on two blocks (four half slots)."""
        phi = self.phi
        q = self.active
        return np.kron(np.kron(q, np.outer(phi, phi.conj())), q)


def half_shifted_frame(canonical: CanonicalForm, L: int) -> HalfShiftedFrame:
    """Frame permutation sending blocked index p*D + q (p, q < D) to the
    half-slot pair (p, q); the remaining indices keep their order."""
    if L < 2 or L % 2:
        raise InputError(f'block length must be even, got {L}')
    D = canonical.D
    slot_dim = canonical.d ** (L // 2)
    if slot_dim < D:
        raise InputError(f'half slot dimension {slot_dim} is smaller than D = {D}')
    dim = slot_dim ** 2
    active = [p * slot_dim + q for p in range(D) for q in range(D)]
    taken = set(active)
    rest = [i for i in range(dim) if i not in taken]
    target = np.array(active + rest)
    permutation = np.zeros((dim, dim))
    permutation[target, np.arange(dim)] = 1.0
    return HalfShiftedFrame(L=L, D=D, slot_dim=slot_dim, xi=np.asarray(canonical.xi), permutation=permutation)


def classical_hamiltonian(frame: HalfShiftedFrame, num_blocks: int) -> RingHamiltonian:
    """H^CL = 3L sum_k (1 - |phi><phi|) on half slots (2k+1, 2k+2)."""
    if num_blocks < 3:
        raise InputError(f'at least three blocks are required, got {num_blocks}')
    return RingHamiltonian(term=3 * frame.L * frame.hs_term(), slot_dim=frame.slot_dim,
                           num_slots=2 * num_blocks, stride=2, offset=1)


def commutation_residual(ring: RingHamiltonian) -> float:
    """Largest Frobenius norm of [h_i, h_j] over all pairs of placed terms."""
    terms = ring.placed_terms()
    worst = 0.0
    for i, a in enumerate(terms):
        for b in terms[i + 1:]:
            worst = max(worst, float(scipy.sparse.linalg.norm(a @ b - b @ a)))
    return worst

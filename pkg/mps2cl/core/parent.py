"""Parent Hamiltonians: the local ground space, interaction terms, the
periodic ring operator and its gaps."""
import dataclasses

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from typing import List, Optional, Sequence

from mps2cl.consts import RANK_TOL, CHECK_TOL, KERNEL_TOL, DENSE_LIMIT, SPARSE_LIMIT, G1_DEFAULT_CAP
from mps2cl.core.mps import MpsTensors, gamma_matrix, expand_state, minimal_l0
from mps2cl.core.renorm import region_density_matrix
from mps2cl.errors import InputError, BoundViolation
from mps2cl.logger import LOGGER
from mps2cl.numerics import (
    hermitian_spectrum, place_operator, slot_width, kernel_projector,
    image_projector, schatten_norm, translation_operator, Spectrum,
)


@dataclasses.dataclass(frozen=True)
class GroundSpaceBasis:
    """Orthonormal basis (columns) of G_L = span{Psi_L(X)}."""
    L: int
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T


def ground_space(tensors: MpsTensors, L: int) -> GroundSpaceBasis:
    gamma = gamma_matrix(tensors, L)
    u, s, _ = scipy.linalg.svd(gamma, full_matrices=False)
    rank = int(np.sum(s > RANK_TOL * s[0]))
    return GroundSpaceBasis(L=L, basis=u[:, :rank])


def interaction_term(tensors: MpsTensors, L: int) -> np.ndarray:
    """h_{G_L}: the projector onto the orthogonal complement of G_L."""
    g = ground_space(tensors, L).projector
    h = np.eye(g.shape[0]) - g
    h = (h + h.conj().T) / 2
    if np.max(np.abs(h @ h - h)) > CHECK_TOL:
        raise BoundViolation('interaction term is a projector', float(np.max(np.abs(h @ h - h))), CHECK_TOL)
    return h


def default_range(tensors: MpsTensors, cap: int = G1_DEFAULT_CAP) -> int:
    """Smallest P >= L0 with d**P > D^2, so that h_{G_P} is nontrivial."""
    P = minimal_l0(tensors, cap)
    while tensors.d ** P <= tensors.D ** 2:
        P += 1
    return P


@dataclasses.dataclass(frozen=True)
class RingHamiltonian:
    """Sum of translates of ``term`` on a ring of ``num_slots`` slots.
    Translates start at offset + k * stride for every k."""
    term: np.ndarray
    slot_dim: int
    num_slots: int
    stride: int = 1
    offset: int = 0

    @property
    def width(self) -> int:
        return slot_width(self.term.shape[0], self.slot_dim)

    @property
    def dim(self) -> int:
        return self.slot_dim ** self.num_slots

    @property
    def starts(self) -> List[int]:
        return [(self.offset + k * self.stride) % self.num_slots
                for k in range(self.num_slots // self.stride)]

    def placed_terms(self):
        return [place_operator(self.term, s, self.num_slots, self.slot_dim) for s in self.starts]

    def operator(self):
        total = scipy.sparse.csr_matrix((self.dim, self.dim), dtype=complex)
        for placed in self.placed_terms():
            total = total + placed
        return total


def assemble_ring(term: np.ndarray, num_sites: int, site_dim: int,
                  tensors: Optional[MpsTensors] = None) -> RingHamiltonian:
    """H = sum_i tau^i(h) on a periodic chain. With ``tensors`` the
    frustration-free property H Psi = 0 is verified."""
    ring = RingHamiltonian(term=np.asarray(term, dtype=complex), slot_dim=site_dim, num_slots=num_sites)
    if ring.width > num_sites:
        raise InputError(f'interaction range {ring.width} exceeds ring size {num_sites}')
    if ring.dim > SPARSE_LIMIT:
        raise InputError(f'd**N = {ring.dim} exceeds cap {SPARSE_LIMIT}')
    if tensors is not None:
        psi = expand_state(tensors, num_sites)
        psi = psi / np.linalg.norm(psi)
        residual = float(np.linalg.norm(ring.operator() @ psi))
        if residual > KERNEL_TOL:
            raise BoundViolation('parent Hamiltonian annihilates the MPS', residual, KERNEL_TOL)
    return ring


def open_chain(term: np.ndarray, num_sites: int, site_dim: int,
               first: int = 0, last: Optional[int] = None) -> np.ndarray:
    """Dense sum of translates of ``term`` starting at sites first..last
    on an open chain of ``num_sites`` sites."""
    width = slot_width(np.asarray(term).shape[0], site_dim)
    last = num_sites - width if last is None else last
    if width > num_sites or site_dim ** num_sites > DENSE_LIMIT:
        raise InputError(f'open chain of {num_sites} sites is not supported here')
    total = np.zeros((site_dim ** num_sites,) * 2, dtype=complex)
    for i in range(first, last + 1):
        left = np.eye(site_dim ** i)
        right = np.eye(site_dim ** (num_sites - width - i))
        total += np.kron(np.kron(left, term), right)
    return total


@dataclasses.dataclass(frozen=True)
class LocalGap:
    num_sites: int
    gap: float
    kernel_dim: int


def local_gap(tensors: MpsTensors, num_sites: int, interaction_range: int) -> LocalGap:
    """Gap of the open-chain Hamiltonian on num_sites sites (dense)."""
    h = open_chain(interaction_term(tensors, interaction_range), num_sites, tensors.d)
    w = scipy.linalg.eigvalsh(h)
    kernel = int(np.sum(np.abs(w) <= KERNEL_TOL))
    above = w[w > KERNEL_TOL]
    return LocalGap(num_sites=num_sites, gap=float(above[0]) if above.size else 0.0, kernel_dim=kernel)


def local_gap_sweep(tensors: MpsTensors, sizes: Sequence[int], interaction_range: int) -> List[LocalGap]:
    gaps = []
    for m in sizes:
        gaps.append(local_gap(tensors, m, interaction_range))
        LOGGER.info(f'- local gap on {m} sites: {gaps[-1].gap:.6f}')
    return gaps


@dataclasses.dataclass(frozen=True)
class KernelMatch:
    distance: float
    kernel_dim: int
    support_dim: int

    @property
    def equal(self) -> bool:
        return self.kernel_dim == self.support_dim and self.distance <= KERNEL_TOL


def kernel_vs_rho(tensors: MpsTensors, L: int, interaction_range: int) -> KernelMatch:
    """Compare ker(H_{2L sites}) with the support of the region density matrix."""
    h = open_chain(interaction_term(tensors, interaction_range), 2 * L, tensors.d)
    kernel, kernel_dim = kernel_projector(h, KERNEL_TOL)
    support, support_dim = image_projector(region_density_matrix(tensors, 2 * L))
    return KernelMatch(distance=schatten_norm(kernel - support, np.inf),
                       kernel_dim=kernel_dim, support_dim=support_dim)


@dataclasses.dataclass(frozen=True)
class GapReport:
    num_sites: int
    ground_energy: float
    degeneracy: int
    gap: float
    raw_gap: float
    method: str
    wall_time: float

    @classmethod
    def from_spectrum(cls, num_sites: int, spectrum: Spectrum) -> 'GapReport':
        return cls(num_sites=num_sites, ground_energy=spectrum.ground_energy,
                   degeneracy=spectrum.degeneracy, gap=spectrum.gap,
                   raw_gap=spectrum.raw_gap, method=spectrum.method, wall_time=spectrum.wall_time)


def lowest_levels(operator, mode: str = 'auto', k: int = 4, vectors: bool = False) -> Spectrum:
    """Lowest levels, enlarging k until the ground cluster is resolved."""
    n = operator.shape[0]
    spectrum = hermitian_spectrum(operator, mode=mode, k=min(k, n), vectors=vectors)
    while spectrum.gap is None and spectrum.method == 'sparse' and k < n - 2:
        k *= 2
        LOGGER.debug(f'- ground cluster unresolved, retrying with k={k}')
        spectrum = hermitian_spectrum(operator, mode=mode, k=min(k, n - 2), vectors=vectors)
    if spectrum.gap is None:
        raise InputError('every computed level lies in the ground cluster')
    return spectrum


def global_gap(ring: RingHamiltonian, mode: str = 'auto', k: int = 4) -> GapReport:
    return GapReport.from_spectrum(ring.num_slots, lowest_levels(ring.operator(), mode, k))


def translation_residual(ring: RingHamiltonian) -> float:
    """Frobenius norm of [T, H] for the one-site translation T."""
    t = translation_operator(ring.num_slots, ring.slot_dim, ring.stride)
    h = ring.operator()
    return float(scipy.sparse.linalg.norm(t @ h - h @ t))

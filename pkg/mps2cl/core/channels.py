"""Completely positive maps given by Kraus operators.

Vectorization is row-major throughout: vec(A X B) = (A (x) B^T) vec(X).
"""
import dataclasses

import numpy as np
import scipy.linalg

from mps2cl.consts import RANK_TOL, CHECK_TOL
from mps2cl.core.mps import transfer_matrix
from mps2cl.errors import InputError, BoundViolation
from mps2cl.logger import LOGGER
from mps2cl.numerics import schatten_norm, image_projector, smallest_nonzero


@dataclasses.dataclass(frozen=True)
class ChannelSpectrum:
    eigenvalues: np.ndarray
    peripheral_trivial: bool

    @property
    def lambda2(self) -> float:
        return float(np.abs(self.eigenvalues[1])) if self.eigenvalues.size > 1 else 0.0


@dataclasses.dataclass(frozen=True)
class CbDistanceBound:
    lower: float
    upper: float


@dataclasses.dataclass(frozen=True)
class Alignment:
    unitary: np.ndarray
    polar: np.ndarray
    aligned_kraus: np.ndarray
    distance: float
    cb_upper: float

    @property
    def within_bound(self) -> bool:
        return self.distance ** 2 <= self.cb_upper * (1 + 1e-9) + 1e-12


@dataclasses.dataclass(frozen=True)
class LocalProjectorPair:
    """rho_EE' together with its support projector and smallest nonzero
    eigenvalue."""
    rho: np.ndarray
    projector: np.ndarray
    rank: int
    mu: float


@dataclasses.dataclass(frozen=True)
class RhoAlignment:
    distance: float
    bound: float
    stinespring_distance: float

    @property
    def holds(self) -> bool:
        return self.distance <= self.bound * (1 + 1e-9) + 1e-12


class QuantumChannel:

    def __init__(self, kraus):
        arr = np.array(kraus, dtype=complex)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise InputError(f'Kraus operators must have shape (K, D, D), got {arr.shape}')
        if not np.all(np.isfinite(arr)):
            raise InputError('Kraus operators contain non-finite entries')
        arr.setflags(write=False)
        self.kraus = arr
        self.transfer = transfer_matrix(arr)
        eye = np.eye(self.dim)
        self.unital = bool(np.max(np.abs(self.apply(eye) - eye)) <= CHECK_TOL)
        self.trace_preserving = bool(np.max(np.abs(self.dual_apply(eye) - eye)) <= CHECK_TOL)

    @property
    def dim(self) -> int:
        return self.kraus.shape[1]

    @property
    def num_kraus(self) -> int:
        return self.kraus.shape[0]

    def apply(self, x: np.ndarray) -> np.ndarray:
        return np.einsum('iab,bc,idc->ad', self.kraus, x, self.kraus.conj())

    def dual_apply(self, x: np.ndarray) -> np.ndarray:
        return np.einsum('iba,bc,icd->ad', self.kraus.conj(), x, self.kraus)

    def choi(self) -> np.ndarray:
        return choi_from_transfer(self.transfer, self.dim)

    def spectrum(self) -> ChannelSpectrum:
        w = scipy.linalg.eigvals(self.transfer)
        w = w[np.argsort(-np.abs(w), kind='stable')]
        peripheral = int(np.sum(np.abs(w) >= np.abs(w[0]) * (1 - CHECK_TOL)))
        return ChannelSpectrum(eigenvalues=w, peripheral_trivial=peripheral == 1)

    def stinespring(self) -> np.ndarray:
        if not self.unital:
            raise InputError('Stinespring isometry requires a unital channel')
        return _dilation(self.kraus)


def choi_from_transfer(transfer: np.ndarray, dim: int) -> np.ndarray:
    """J = sum_k vec(A_k^T) vec(A_k^T)^dagger, rebuilt from the transfer matrix."""
    return transfer.reshape(dim, dim, dim, dim).transpose(2, 0, 3, 1).reshape(dim * dim, dim * dim)


def _dilation(kraus: np.ndarray) -> np.ndarray:
    # V = sum_i A_i^dagger (x) |i>
    K, D, _ = kraus.shape
    return np.stack([a.conj().T for a in kraus], axis=1).reshape(D * K, D)


def _padded(kraus: np.ndarray, count: int) -> np.ndarray:
    if kraus.shape[0] == count:
        return kraus
    pad = np.zeros((count - kraus.shape[0],) + kraus.shape[1:], dtype=complex)
    return np.concatenate([kraus, pad])


def cb_distance_bound(first: QuantumChannel, second: QuantumChannel) -> CbDistanceBound:
    """||J - J'||_1 / D <= ||T - T'||_cb <= ||J - J'||_1."""
    if first.dim != second.dim:
        raise InputError(f'channel dimensions differ: {first.dim} vs {second.dim}')
    upper = schatten_norm(first.choi() - second.choi(), 1)
    return CbDistanceBound(lower=upper / first.dim, upper=upper)


def align_unitary(first: QuantumChannel, second: QuantumChannel) -> Alignment:
    """Unitary on the environment minimizing ||(1 (x) U)V - V'||_inf via
    the polar part of the Kraus overlap matrix."""
    if first.dim != second.dim:
        raise InputError(f'channel dimensions differ: {first.dim} vs {second.dim}')
    if not (first.unital and second.unital):
        raise InputError('alignment requires unital channels')
    count = max(first.num_kraus, second.num_kraus)
    a = _padded(first.kraus, count)
    b = _padded(second.kraus, count)
    overlap = np.einsum('iab,mab->mi', a.conj(), b)
    x, _, yh = scipy.linalg.svd(overlap)
    polar = x @ yh
    mixed = np.einsum('mi,iab->mab', polar, a)
    distance = schatten_norm(_dilation(mixed) - _dilation(b), np.inf)
    upper = cb_distance_bound(first, second).upper

    idx = np.unravel_index(np.argmax(np.abs(polar)), polar.shape)
    lead = polar[idx]
    unitary = polar * abs(lead) / lead

    result = Alignment(unitary=unitary, polar=polar, aligned_kraus=mixed,
                       distance=distance, cb_upper=upper)
    LOGGER.debug(f'- aligned Stinespring distance {distance:.3e}, Choi distance {upper:.3e}')
    if not result.within_bound:
        raise BoundViolation('squared Stinespring distance against Choi distance', distance ** 2, upper)
    return result


def rho_ee(channel: QuantumChannel) -> LocalProjectorPair:
    """rho_EE' = (1/D) F F^dagger, F having rows vec(A_i A_j)."""
    if not channel.unital:
        raise InputError('rho_EE\' requires a unital channel')
    D, K = channel.dim, channel.num_kraus
    pairs = np.einsum('iab,jbc->ijac', channel.kraus, channel.kraus).reshape(K * K, D * D)
    rho = pairs @ pairs.conj().T / D
    rho = (rho + rho.conj().T) / 2
    projector, rank = image_projector(rho, RANK_TOL)
    return LocalProjectorPair(rho=rho, projector=projector, rank=rank,
                              mu=smallest_nonzero(rho, RANK_TOL))


def align_rho_distance(first: QuantumChannel, second: QuantumChannel) -> RhoAlignment:
    """||(U (x) U) rho (U (x) U)^dagger - rho'||_1 against 4 K^2 sqrt(cb upper)."""
    alignment = align_unitary(first, second)
    count = alignment.polar.shape[0]
    rho = rho_ee(QuantumChannel(alignment.aligned_kraus)).rho
    rho_second = rho_ee(QuantumChannel(_padded(second.kraus, count))).rho
    distance = schatten_norm(rho - rho_second, 1)
    bound = 4 * count ** 2 * np.sqrt(alignment.cb_upper)
    result = RhoAlignment(distance=distance, bound=bound,
                          stinespring_distance=alignment.distance)
    if not result.holds:
        raise BoundViolation('aligned rho_EE\' distance', distance, bound)
    return result

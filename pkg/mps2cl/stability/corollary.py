"""Two-site Hamiltonians sharing the ground space of a parent Hamiltonian:
c1 h_{G_L} <= sum_j h_{j,j+1} <= c2 h_{G_L}."""
import dataclasses

import numpy as np
import scipy.linalg

from typing import Optional

from mps2cl.consts import KERNEL_TOL, PRODUCT_CAP
from mps2cl.core.mps import MpsTensors, spin_one_matrices
from mps2cl.core.parent import interaction_term, open_chain
from mps2cl.errors import InputError
from mps2cl.logger import LOGGER
from mps2cl.numerics import kernel_projector, schatten_norm, generalized_extremes


@dataclasses.dataclass(frozen=True)
class SandwichResult:
    num_sites: int
    kernel_distance: float
    kernel_dim: int
    c1: Optional[float]
    c2: Optional[float]

    @property
    def kernels_equal(self) -> bool:
        return self.c1 is not None


def _kernels(a: np.ndarray, b: np.ndarray):
    ka, dim_a = kernel_projector(a, KERNEL_TOL)
    kb, dim_b = kernel_projector(b, KERNEL_TOL)
    return dim_a, dim_b, schatten_norm(ka - kb, np.inf)


def corollary_sandwich(h_hat: np.ndarray, tensors: MpsTensors, L: int) -> SandwichResult:
    """Compare the open-chain sum of ``h_hat`` on L sites with h_{G_L}."""
    d = tensors.d
    h_hat = np.asarray(h_hat, dtype=complex)
    if h_hat.shape != (d * d, d * d):
        raise InputError(f'two-site term must be {d * d}x{d * d}, got {h_hat.shape}')
    if scipy.linalg.eigvalsh((h_hat + h_hat.conj().T) / 2)[0] < -KERNEL_TOL:
        raise InputError('two-site term must be positive semidefinite')
    if d ** L > PRODUCT_CAP:
        raise InputError(f'd**L = {d ** L} exceeds cap {PRODUCT_CAP}')
    total = open_chain(h_hat, L, d)
    parent = interaction_term(tensors, L)
    dim_a, dim_b, distance = _kernels(total, parent)
    if dim_a != dim_b or distance > KERNEL_TOL:
        LOGGER.warning(f'- kernels differ on {L} sites (dims {dim_a} vs {dim_b})')
        return SandwichResult(num_sites=L, kernel_distance=distance, kernel_dim=dim_a, c1=None, c2=None)
    c1, c2 = generalized_extremes(total, parent)
    LOGGER.info(f'- sandwich on {L} sites: c1={c1:.6f}, c2={c2:.6f}')
    return SandwichResult(num_sites=L, kernel_distance=distance, kernel_dim=dim_a, c1=c1, c2=c2)


def region_kernels_equal(h_hat: np.ndarray, tensors: MpsTensors, interaction_range: int,
                         num_sites: int) -> bool:
    """Kernel of sum_j h_hat on ``num_sites`` sites against the kernel of
    the range-P parent Hamiltonian on the same region."""
    d = tensors.d
    a = open_chain(np.asarray(h_hat, dtype=complex), num_sites, d)
    b = open_chain(interaction_term(tensors, interaction_range), num_sites, d)
    dim_a, dim_b, distance = _kernels(a, b)
    return dim_a == dim_b and distance <= KERNEL_TOL


def spin_two_projector() -> np.ndarray:
    """Projector onto total spin 2 of two spin-1 sites, S^2 (S^2 - 2) / 24."""
    total = [np.kron(s, np.eye(3)) + np.kron(np.eye(3), s) for s in spin_one_matrices()]
    sz, sp, sm = total
    s2 = sz @ sz + (sp @ sm + sm @ sp) / 2
    return s2 @ (s2 - 2 * np.eye(9)) / 24

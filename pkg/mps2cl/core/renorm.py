"""The renormalization flow: blocking, the limit channel, projector
distances and the block unitaries."""
import dataclasses

import numpy as np
import scipy.linalg

from typing import List, Optional, Sequence

from mps2cl.consts import RANK_TOL, CHECK_TOL
from mps2cl.core.channels import (
    QuantumChannel, LocalProjectorPair, Alignment,
    align_unitary, rho_ee, choi_from_transfer,
)
from mps2cl.core.mps import CanonicalForm, MpsTensors, products
from mps2cl.errors import InputError, GenericityError, BoundViolation
from mps2cl.logger import LOGGER
from mps2cl.numerics import schatten_norm, image_projector, smallest_nonzero


@dataclasses.dataclass(frozen=True)
class BlockedChannel:
    L: int
    mixing: np.ndarray
    kraus: np.ndarray
    singular_values: np.ndarray

    @property
    def rank(self) -> int:
        return self.kraus.shape[0]

    @property
    def channel(self) -> QuantumChannel:
        return QuantumChannel(self.kraus)


def _phase_fixed_svd(a: np.ndarray):
    u, s, vh = scipy.linalg.svd(a, full_matrices=True)
    for j in range(u.shape[1]):
        col = u[:, j]
        lead = col[np.argmax(np.abs(col) > 1e-8 * np.max(np.abs(col)))]
        phase = abs(lead) / lead
        u[:, j] = col * phase
        if j < vh.shape[0]:
            vh[j] = vh[j] * np.conj(phase)
    return u, s, vh


def block(tensors: MpsTensors, L: int) -> BlockedChannel:
    """SVD blocking: U maps the d**L block basis so that sum_I U_mI A_I
    equals the m-th blocked Kraus operator, zero beyond the rank."""
    D = tensors.D
    flat = products(tensors, L).reshape(tensors.d ** L, D * D)
    u, s, vh = _phase_fixed_svd(flat)
    rank = int(np.sum(s > RANK_TOL * s[0]))
    kraus = (s[:rank, None] * vh[:rank]).reshape(rank, D, D)
    mixing = u.conj().T

    mixed = mixing @ flat
    scale = max(1.0, float(np.max(np.abs(flat))))
    if np.max(np.abs(mixed[rank:]), initial=0.0) > CHECK_TOL * scale:
        raise BoundViolation('blocked rows beyond rank vanish',
                             float(np.max(np.abs(mixed[rank:]))), CHECK_TOL * scale)
    result = BlockedChannel(L=L, mixing=mixing, kraus=kraus, singular_values=s)
    power = choi_from_transfer(np.linalg.matrix_power(QuantumChannel(tensors.matrices).transfer, L), D)
    residual = float(np.max(np.abs(result.channel.choi() - power)))
    if residual > CHECK_TOL * max(1.0, float(np.max(np.abs(power)))):
        raise BoundViolation('Choi of blocked channel equals Choi of T^L', residual, CHECK_TOL)
    return result


def limit_channel(canonical: CanonicalForm) -> QuantumChannel:
    """T^inf(X) = Tr[Xi X] 1 with Kraus sqrt(xi_q)|p><q| at index p*D + q."""
    spectrum = QuantumChannel(canonical.tensors.matrices).spectrum()
    if not spectrum.peripheral_trivial or spectrum.lambda2 >= 1 - CHECK_TOL:
        raise GenericityError('transfer spectrum has no gap below the fixed point')
    D = canonical.D
    kraus = np.zeros((D * D, D, D), dtype=complex)
    for p in range(D):
        for q in range(D):
            kraus[p * D + q, p, q] = np.sqrt(canonical.xi[q])
    channel = QuantumChannel(kraus)
    if not channel.unital:
        raise BoundViolation('limit channel is unital', 1.0, CHECK_TOL)
    for x in np.eye(D * D).reshape(D * D, D, D):
        expected = np.trace(x) * canonical.xi_matrix
        if np.max(np.abs(channel.dual_apply(x) - expected)) > CHECK_TOL:
            raise BoundViolation('dual limit channel is X -> Tr[X] Xi', 1.0, CHECK_TOL)
    return channel


def entangled_vector(xi: np.ndarray, dim: Optional[int] = None) -> np.ndarray:
    """|phi> = sum_i sqrt(xi_i)|ii> in C^dim (x) C^dim."""
    D = xi.size
    dim = dim or D
    phi = np.zeros((dim, dim), dtype=complex)
    phi[np.arange(D), np.arange(D)] = np.sqrt(xi)
    return phi.ravel()


def asymptotic_projector(canonical: CanonicalForm) -> LocalProjectorPair:
    """rho_EE' of the limit channel; its support is 1 (x) |phi><phi| (x) 1."""
    if np.min(canonical.xi) <= RANK_TOL:
        raise InputError('Xi must be strictly positive')
    D = canonical.D
    pair = rho_ee(limit_channel(canonical))
    phi = entangled_vector(canonical.xi)
    expected = np.kron(np.kron(np.eye(D), np.outer(phi, phi.conj())), np.eye(D))
    if pair.rank != D * D or np.max(np.abs(pair.projector - expected)) > CHECK_TOL:
        raise BoundViolation('asymptotic projector is 1 (x) |phi><phi| (x) 1',
                             float(np.max(np.abs(pair.projector - expected))), CHECK_TOL)
    return pair


@dataclasses.dataclass(frozen=True)
class ProjectorDistance:
    measured: float
    rho_distance: float
    bound: float
    swapped_bound: Optional[float]

    @property
    def holds(self) -> bool:
        ok = self.measured <= self.bound * (1 + 1e-9) + 1e-12
        if self.swapped_bound is not None:
            ok = ok and self.measured <= self.swapped_bound * (1 + 1e-9) + 1e-12
        return ok


def projector_distance_bound(a: LocalProjectorPair, b: LocalProjectorPair,
                             p=np.inf) -> ProjectorDistance:
    """Compare support projectors of two positive operators against the
    pseudo-inverse bound; the second bound depends on ``b`` only and is
    None unless ranks agree and ||rho_a - rho_b||_inf < mu_b."""
    if a.rho.shape != b.rho.shape:
        raise InputError(f'shapes differ: {a.rho.shape} vs {b.rho.shape}')
    diff = a.rho - b.rho
    delta = schatten_norm(diff, p)
    inv_a, inv_b = 1.0 / a.mu, 1.0 / b.mu
    norm_b = max(1.0, schatten_norm(b.rho, np.inf))
    bound = delta * (inv_a + norm_b * (inv_a ** 2 + inv_b ** 2 + inv_a * inv_b))
    swapped = None
    delta_inf = schatten_norm(diff, np.inf)
    if a.rank == b.rank and delta_inf < b.mu:
        swapped = 4 * delta_inf / (b.mu - delta_inf) ** 2
    return ProjectorDistance(
        measured=schatten_norm(a.projector - b.projector, p),
        rho_distance=delta,
        bound=bound,
        swapped_bound=swapped,
    )


def local_projector_pair(rho: np.ndarray) -> LocalProjectorPair:
    projector, rank = image_projector(rho, RANK_TOL)
    return LocalProjectorPair(rho=rho, projector=projector, rank=rank,
                              mu=smallest_nonzero(rho, RANK_TOL))


@dataclasses.dataclass(frozen=True)
class ConvergenceFit:
    L_values: List[int]
    distances: List[float]
    lambda2: float
    rate: Optional[float]
    prefactor: float
    envelope: float
    window_prefactors: List[float]

    @property
    def exact(self) -> bool:
        return self.rate is None

    @property
    def drifting(self) -> bool:
        positive = [w for w in self.window_prefactors if w > 0]
        return len(positive) > 1 and max(positive) / min(positive) > 1.5

    def rate_matches(self, reference: float, tolerance: float = 0.2) -> bool:
        if self.rate is None:
            return True
        return abs(self.rate - reference) <= tolerance * abs(reference)


_FLOOR = 1e-14


def _log_fit(xs, ys):
    slope, intercept = np.polyfit(np.asarray(xs, dtype=float), np.log(ys), 1)
    return float(slope), float(np.exp(intercept))


def envelope_constant(L_values: Sequence[int], distances: Sequence[float], lambda2: float) -> float:
    """max_L dist_L / lambda2^L, taken in log space; zero for an exact limit."""
    if lambda2 <= 0:
        return 0.0
    logs = [np.log(dist) - L * np.log(lambda2) for L, dist in zip(L_values, distances) if dist > 0]
    return float(np.exp(max(logs))) if logs else 0.0


def convergence_fit(canonical: CanonicalForm, L_values: Sequence[int]) -> ConvergenceFit:
    """Fit ||J(T^L) - J(T^inf)||_1 ~ C |lambda2|^L over an L-range."""
    L_values = sorted(int(x) for x in L_values)
    if len(L_values) < 3 or L_values[0] < 1:
        raise InputError('convergence fit needs at least three positive block lengths')
    channel = QuantumChannel(canonical.tensors.matrices)
    lam2 = channel.spectrum().lambda2
    if lam2 < RANK_TOL:
        lam2 = 0.0
    limit = limit_channel(canonical).choi()
    D = canonical.D
    distances = [
        schatten_norm(choi_from_transfer(np.linalg.matrix_power(channel.transfer, L), D) - limit, 1)
        for L in L_values
    ]
    usable = [(L, dist) for L, dist in zip(L_values, distances) if dist > _FLOOR]
    if len(usable) < 2:
        LOGGER.info('- transfer powers reach the limit exactly')
        return ConvergenceFit(L_values=L_values, distances=distances, lambda2=lam2,
                              rate=None, prefactor=0.0, envelope=0.0, window_prefactors=[])
    rate, prefactor = _log_fit(*zip(*usable))
    envelope = envelope_constant(L_values, distances, lam2)
    windows = []
    for start in range(len(usable) - 2):
        window = usable[start:start + 3]
        windows.append(_log_fit(*zip(*window))[1])
    fit = ConvergenceFit(L_values=L_values, distances=distances, lambda2=lam2, rate=rate,
                         prefactor=prefactor, envelope=envelope, window_prefactors=windows)
    if fit.drifting:
        LOGGER.warning('- fitted prefactor drifts across L windows')
    return fit


def projdistance_bound(canonical: CanonicalForm, envelope: float, lambda2: float,
                       L: int, factor: float = 16.0) -> Optional[float]:
    """factor * D^4 sqrt(C)|lambda2|^{L/2} / (mu - 4 D^4 sqrt(C)|lambda2|^{L/2})^2,
    or None when the denominator base is not positive."""
    D4 = canonical.D ** 4
    mu = float(np.min(canonical.xi)) / canonical.D
    term = D4 * np.sqrt(envelope) * lambda2 ** (L / 2)
    base = mu - 4 * term
    if base <= 0:
        return None
    return float(factor * term / base ** 2)


@dataclasses.dataclass(frozen=True)
class BlockUnitary:
    L: int
    blocking: BlockedChannel
    alignment: Alignment
    unitary: np.ndarray

    @property
    def active_dim(self) -> int:
        return self.alignment.polar.shape[0]


def build_block_unitary(canonical: CanonicalForm, L: int) -> BlockUnitary:
    """W = (alignment unitary on the first D^2 coordinates) . U_blocking."""
    if L < 2 or L % 2:
        raise InputError(f'block length must be even and positive, got {L}')
    D2 = canonical.D ** 2
    if canonical.d ** L < D2:
        raise InputError(f'd**L = {canonical.d ** L} is smaller than D^2 = {D2}')
    blocking = block(canonical.tensors, L)
    if blocking.rank != D2:
        raise InputError(f'blocked channel has rank {blocking.rank}, expected {D2}')
    alignment = align_unitary(blocking.channel, limit_channel(canonical))
    embedded = scipy.linalg.block_diag(alignment.polar, np.eye(canonical.d ** L - D2))
    return BlockUnitary(L=L, blocking=blocking, alignment=alignment,
                        unitary=embedded @ blocking.mixing)


@dataclasses.dataclass(frozen=True)
class ProjectorDecayPoint:
    L: int
    measured: float
    rho_distance: float
    bound: Optional[float]


def aligned_projector_distance(canonical: CanonicalForm, L: int) -> ProjectorDecayPoint:
    """||P^(L) - P^inf||_inf for the aligned blocked rho_EE', in the
    D^4-dimensional compressed frame."""
    unitary = build_block_unitary(canonical, L)
    aligned = rho_ee(QuantumChannel(unitary.alignment.aligned_kraus))
    limit = asymptotic_projector(canonical)
    return ProjectorDecayPoint(
        L=L,
        measured=schatten_norm(aligned.projector - limit.projector, np.inf),
        rho_distance=schatten_norm(aligned.rho - limit.rho, 1),
        bound=None,
    )


@dataclasses.dataclass(frozen=True)
class ProjectorDecay:
    points: List[ProjectorDecayPoint]
    rate: Optional[float]
    reference_rate: float

    @property
    def decays_fast_enough(self) -> bool:
        """Fitted log-rate is at least 80% as steep as (1/2) log|lambda2|."""
        if self.rate is None:
            return True
        return self.rate <= 0.8 * self.reference_rate


def projector_decay(canonical: CanonicalForm, L_values: Sequence[int],
                    fit: ConvergenceFit) -> ProjectorDecay:
    points = []
    for L in sorted(L_values):
        point = aligned_projector_distance(canonical, L)
        bound = projdistance_bound(canonical, fit.envelope, fit.lambda2, L)
        points.append(dataclasses.replace(point, bound=bound))
        LOGGER.info(f'- L={L}: projector distance {point.measured:.3e}')
    usable = [(pt.L, pt.measured) for pt in points if pt.measured > _FLOOR]
    rate = _log_fit(*zip(*usable))[0] if len(usable) >= 2 else None
    reference = 0.5 * np.log(fit.lambda2) if fit.lambda2 > 0 else -np.inf
    return ProjectorDecay(points=points, rate=rate, reference_rate=float(reference))


def region_density_matrix(tensors: MpsTensors, num_sites: int) -> np.ndarray:
    """rho on num_sites consecutive sites: (1/D) sum Tr[A_I A_J^dagger] |I><J|."""
    flat = products(tensors, num_sites).reshape(tensors.d ** num_sites, -1)
    rho = flat @ flat.conj().T / tensors.D
    return (rho + rho.conj().T) / 2


def compressed_region_distance(canonical: CanonicalForm, unitary: BlockUnitary) -> float:
    """||(U (x) U) rho_region (U (x) U)^dagger - rho^(L)_EE' (+) 0||_inf on
    2L sites, with U the blocking unitary."""
    L = unitary.L
    rho = region_density_matrix(canonical.tensors, 2 * L)
    u = np.kron(unitary.blocking.mixing, unitary.blocking.mixing)
    rotated = u @ rho @ u.conj().T
    dim = canonical.d ** L
    D2 = canonical.D ** 2
    compressed = rho_ee(unitary.blocking.channel).rho.reshape(D2, D2, D2, D2)
    embedded = np.zeros((dim, dim, dim, dim), dtype=complex)
    embedded[:D2, :D2, :D2, :D2] = compressed
    return schatten_norm(rotated - embedded.reshape(dim * dim, dim * dim), np.inf)

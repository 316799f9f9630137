"""Rotate a parent Hamiltonian on m blocks into the half-shifted frame and
split it into a classical part, a bounded part and a relatively bounded
part; every inequality the split relies on is checked numerically."""
import dataclasses

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from typing import List, Optional

from mps2cl.consts import CHECK_TOL, KERNEL_TOL, DENSE_LIMIT
from mps2cl.core.mps import CanonicalForm
from mps2cl.core.parent import (
    RingHamiltonian, interaction_term, default_range, open_chain, local_gap,
    assemble_ring, global_gap, lowest_levels,
)
from mps2cl.core.renorm import (
    BlockUnitary, ConvergenceFit, build_block_unitary, convergence_fit, projdistance_bound,
)
from mps2cl.errors import InputError, BoundViolation, SolverError
from mps2cl.logger import LOGGER
from mps2cl.numerics import (
    kernel_projector, place_operator, operator_norm, schatten_norm, generalized_extremes,
)
from mps2cl.stability.frame import HalfShiftedFrame, half_shifted_frame, classical_hamiltonian
from mps2cl.verdicts import Verdict


@dataclasses.dataclass
class DecompositionConstants:
    lambda2: float
    envelope: float
    mu: float
    local_gap: float
    projector_distance: float
    pair_norm: float
    phi_b_norm: float
    beta_bound: Optional[float] = None
    alpha: Optional[float] = None
    alpha_bound: Optional[float] = None
    alpha_reference: Optional[float] = None
    alpha_closed_form: Optional[float] = None


@dataclasses.dataclass
class Decomposition:
    canonical: CanonicalForm
    L: int
    num_blocks: int
    interaction_range: int
    frame: HalfShiftedFrame
    block_unitary: BlockUnitary
    frame_unitary: np.ndarray
    pair_term: np.ndarray
    rotated_pair: np.ndarray
    phi_b_local: np.ndarray
    bulk_local: np.ndarray
    classical: RingHamiltonian
    constants: DecompositionConstants
    verdicts: List[Verdict] = dataclasses.field(default_factory=list)

    @property
    def num_slots(self) -> int:
        return 2 * self.num_blocks

    def _place(self, op: np.ndarray, slot: int):
        return place_operator(op, slot, self.num_slots, self.frame.slot_dim)

    def hs_terms(self):
        return [self._place(self.frame.hs_term(), 2 * k + 1) for k in range(self.num_blocks)]

    def boundary_terms(self):
        return [self._place(self.phi_b_local, 2 * k) for k in range(self.num_blocks)]

    def bulk_terms(self):
        hs = self.hs_terms()
        m = self.num_blocks
        return [self._place(self.bulk_local, 2 * k) - self.L * (hs[k - 1] + hs[k] + hs[(k + 1) % m])
                for k in range(m)]

    def rotated_parent(self):
        """(x)_k W_k H (x)_k W_k^dagger assembled translate by translate."""
        d, L, P = self.canonical.d, self.L, self.interaction_range
        h = interaction_term(self.canonical.tensors, P)
        ww = np.kron(self.frame_unitary, self.frame_unitary)
        total = scipy.sparse.csr_matrix((self.dim, self.dim), dtype=complex)
        for site in range(self.num_blocks * L):
            b, o = divmod(site, L)
            local = np.kron(np.kron(np.eye(d ** o), h), np.eye(d ** (2 * L - o - P)))
            total = total + self._place(ww @ local @ ww.conj().T, 2 * b)
        return total

    @property
    def dim(self) -> int:
        return self.frame.slot_dim ** self.num_slots

    def perturbation(self):
        return sum(self.boundary_terms()) + sum(self.bulk_terms())

    def verdict(self, name: str) -> Verdict:
        return next(v for v in self.verdicts if v.name == name)


def pair_hamiltonian(canonical: CanonicalForm, L: int, interaction_range: int) -> np.ndarray:
    """H_{k,k+1}: half the two-block Hamiltonian plus half the P - 1
    translates crossing the block boundary."""
    h = interaction_term(canonical.tensors, interaction_range)
    d = canonical.d
    region = open_chain(h, 2 * L, d)
    crossing = open_chain(h, 2 * L, d, first=L - interaction_range + 1, last=L - 1)
    return (region + crossing) / 2


def _tolerance(*ops) -> float:
    return CHECK_TOL * max([1.0] + [float(np.max(np.abs(op))) for op in ops])


def _dense(op) -> np.ndarray:
    return op.toarray() if scipy.sparse.issparse(op) else np.asarray(op)


def _min_eigenvalue(op) -> float:
    dense = _dense(op)
    return float(scipy.linalg.eigvalsh((dense + dense.conj().T) / 2, subset_by_index=[0, 0])[0])


def decompose(canonical: CanonicalForm, L: int, num_blocks: int,
              interaction_range: Optional[int] = None,
              fit: Optional[ConvergenceFit] = None) -> Decomposition:
    P = interaction_range or default_range(canonical.tensors)
    d = canonical.d
    if L < P:
        raise InputError(f'block length {L} is shorter than the interaction range {P}')
    if num_blocks < 3:
        raise InputError(f'at least three blocks are required, got {num_blocks}')
    if d ** (num_blocks * L) > DENSE_LIMIT:
        raise InputError(f'd**(mL) = {d ** (num_blocks * L)} exceeds the dense cap {DENSE_LIMIT}')
    LOGGER.info(f'Decomposing parent Hamiltonian (L={L}, m={num_blocks}, P={P})')

    frame = half_shifted_frame(canonical, L)
    unitary = build_block_unitary(canonical, L)
    frame_unitary = frame.permutation @ unitary.unitary
    fit = fit or convergence_fit(canonical, range(1, max(2 * L, 3) + 1))

    pair = pair_hamiltonian(canonical, L, P)
    kernel, _ = kernel_projector(pair, KERNEL_TOL)
    ww = np.kron(frame_unitary, frame_unitary)
    rotated = ww @ pair @ ww.conj().T
    rotated_kernel = ww @ kernel @ ww.conj().T
    limit = frame.asymptotic_projector()
    eye = np.eye(limit.shape[0])
    outside = eye - rotated_kernel
    outside_limit = eye - limit
    bulk = outside_limit @ rotated @ outside_limit
    phi_b = outside @ rotated @ outside - bulk
    gap = local_gap(canonical.tensors, 2 * L, P).gap

    constants = DecompositionConstants(
        lambda2=fit.lambda2,
        envelope=fit.envelope,
        mu=float(np.min(canonical.xi)) / canonical.D,
        local_gap=gap,
        projector_distance=schatten_norm(rotated_kernel - limit, np.inf),
        pair_norm=operator_norm(pair),
        phi_b_norm=operator_norm(phi_b),
    )
    result = Decomposition(
        canonical=canonical, L=L, num_blocks=num_blocks, interaction_range=P,
        frame=frame, block_unitary=unitary, frame_unitary=frame_unitary,
        pair_term=pair, rotated_pair=rotated, phi_b_local=phi_b, bulk_local=bulk,
        classical=classical_hamiltonian(frame, num_blocks), constants=constants,
    )
    _check(result, kernel)
    return result


def _check(dec: Decomposition, kernel: np.ndarray):
    c = dec.constants
    verdicts = dec.verdicts

    LOGGER.info('- checking reconstruction identity')
    rotated = dec.rotated_parent()
    residual = rotated - dec.classical.operator() - dec.perturbation()
    scale = max(1.0, float(scipy.sparse.linalg.norm(rotated)))
    verdicts.append(Verdict.upper('reconstruction', float(scipy.sparse.linalg.norm(residual)), 1e-8 * scale))

    # every k is a cyclic translate of k = 0
    LOGGER.info('- checking sign of the relatively bounded part')
    bulk0 = dec.bulk_terms()[0]
    verdicts.append(Verdict.upper('bulk_negative', -_min_eigenvalue(-bulk0), 0.0, _tolerance(dec.bulk_local)))

    LOGGER.info('- checking half-shifted sandwich')
    hs = dec.hs_terms()
    limit0 = dec._place(dec.frame.asymptotic_projector(), 0)
    identity = scipy.sparse.identity(dec.dim, format='csr')
    lower = identity - limit0 - hs[0]
    upper = hs[-1] + hs[0] + hs[1] - (identity - limit0)
    verdicts.append(Verdict.lower('hs_lower', _min_eigenvalue(lower), 0.0, CHECK_TOL))
    verdicts.append(Verdict.lower('hs_upper', _min_eigenvalue(upper), 0.0, CHECK_TOL))

    eye = np.eye(kernel.shape[0])
    verdicts.append(Verdict.lower(
        'pair_gap', _min_eigenvalue(dec.pair_term - c.local_gap / 2 * (eye - kernel)), 0.0, _tolerance(dec.pair_term)))

    intermediate = 2 * c.projector_distance * c.pair_norm
    verdicts.append(Verdict.upper('phi_b_intermediate', c.phi_b_norm, intermediate, _tolerance(dec.phi_b_local)))
    if verdicts[-1].failed:
        raise BoundViolation('boundary term against projector distance', c.phi_b_norm, intermediate)
    c.beta_bound = projdistance_bound(dec.canonical, c.envelope, c.lambda2, dec.L, factor=32.0 * dec.L)
    verdicts.append(Verdict.upper('phi_b_closed_form', c.phi_b_norm, c.beta_bound, _tolerance(dec.phi_b_local)))
    if verdicts[-1].failed:
        raise BoundViolation('boundary term against closed-form bound', c.phi_b_norm, c.beta_bound)
    projector_closed = projdistance_bound(dec.canonical, c.envelope, c.lambda2, dec.L)
    verdicts.append(Verdict.upper('projdistance_closed_form', c.projector_distance, projector_closed, CHECK_TOL))

    LOGGER.info('- computing relative bound')
    c.alpha = relative_bound_alpha(dec)
    c.alpha_reference = 1 - c.local_gap / (6 * dec.L)
    if projector_closed is not None:
        c.alpha_closed_form = c.alpha_reference + c.local_gap * projector_closed / (6 * dec.L)
    if c.projector_distance < 1:
        c.alpha_bound = 1 - c.local_gap * (1 - c.projector_distance) / (6 * dec.L)
    verdicts.append(Verdict.upper('alpha_below_one', c.alpha, 1.0 if c.projector_distance < 1 else None, -CHECK_TOL))
    verdicts.append(Verdict.upper('alpha_gap_bound', c.alpha, c.alpha_bound, CHECK_TOL))
    for v in verdicts:
        LOGGER.info(f'  {v.describe()}')


def alpha_from_operators(bulk_sum, classical) -> float:
    """Largest eigenvalue of H_CL^{+1/2} (-sum phi_r) H_CL^{+1/2} on the
    range of H_CL."""
    return generalized_extremes(-_dense(bulk_sum), _dense(classical))[1]


def relative_bound_alpha(dec: Decomposition) -> float:
    return alpha_from_operators(sum(dec.bulk_terms()), dec.classical.operator())


@dataclasses.dataclass(frozen=True)
class PathPoint:
    t: float
    ground_energy: Optional[float]
    degeneracy: Optional[int]
    gap: Optional[float]
    method: str
    error: Optional[str] = None


@dataclasses.dataclass
class PathReport:
    points: List[PathPoint]
    parent_gap: float
    verdicts: List[Verdict]

    @property
    def min_gap(self) -> Optional[float]:
        gaps = [p.gap for p in self.points if p.gap is not None]
        return min(gaps) if gaps else None


def phase_path(dec: Decomposition, steps: int, mode: str = 'sparse') -> PathReport:
    """Switch the perturbation on along H(t) = H_CL + t (sum phi_b + sum phi_r)."""
    if steps < 1:
        raise InputError(f'path needs at least one step, got {steps}')
    LOGGER.info(f'Starting phase path with {steps} steps')
    classical = dec.classical.operator()
    perturbation = dec.perturbation()
    points = []
    for t in np.linspace(0.0, 1.0, steps + 1):
        try:
            spectrum = lowest_levels(classical + t * perturbation, mode=mode)
        except (SolverError, InputError) as e:
            LOGGER.warning(f'- t={t:.3f}: {e}')
            points.append(PathPoint(t=float(t), ground_energy=None, degeneracy=None,
                                    gap=None, method=mode, error=str(e)))
            continue
        points.append(PathPoint(t=float(t), ground_energy=spectrum.ground_energy,
                                degeneracy=spectrum.degeneracy, gap=spectrum.gap,
                                method=spectrum.method))
        LOGGER.debug(f'- t={t:.3f}: gap {spectrum.gap:.6f}, degeneracy {spectrum.degeneracy}')

    h = interaction_term(dec.canonical.tensors, dec.interaction_range)
    parent = global_gap(assemble_ring(h, dec.num_blocks * dec.L, dec.canonical.d), mode=mode)
    report = PathReport(points=points, parent_gap=parent.gap, verdicts=[])
    complete = all(p.error is None for p in points)
    first, last = points[0], points[-1]
    if first.gap is not None:
        report.verdicts.append(Verdict.upper('classical_gap', abs(first.gap - 3 * dec.L), 0.0, 1e-8))
    if last.gap is not None:
        report.verdicts.append(Verdict.upper('unitary_invariance', abs(last.gap - parent.gap), 0.0, 1e-6))
    min_gap = report.min_gap if complete else None
    report.verdicts.append(Verdict(
        name='path_gap', measured=min_gap if min_gap is not None else float('nan'),
        bound=0.0, passed=complete and min_gap > KERNEL_TOL, applicable=complete,
    ))
    degeneracy = max(p.degeneracy for p in points) if complete else 0
    report.verdicts.append(Verdict(
        name='path_unique', measured=float(degeneracy), bound=1.0,
        passed=complete and degeneracy == 1, applicable=complete,
    ))
    return report

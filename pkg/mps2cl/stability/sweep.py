"""Random local perturbations of a parent Hamiltonian and the gap sweep."""
import dataclasses
import time

from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse

from mps2cl.consts import DEGENERACY_TOL, KRYLOV_TOL, SPARSE_LIMIT
from mps2cl.core.mps import MpsTensors
from mps2cl.core.parent import (
    GapReport, assemble_ring, default_range, interaction_term, lowest_levels,
)
from mps2cl.errors import InputError, SolverError
from mps2cl.logger import LOGGER, set_level
from mps2cl.numerics import Spectrum, operator_norm, place_operator
from mps2cl.verdicts import Verdict


ENSEMBLES = ('iid', 'uniform')
STABLE_FRACTION = 0.05
RETAINED_GAP = 0.5
SLOPE_MARGIN = 2.0


@dataclasses.dataclass(frozen=True)
class PerturbationEnsemble:
    name: str = 'iid'
    range: int = 2

    def __post_init__(self):
        if self.name not in ENSEMBLES:
            raise InputError(f'unknown ensemble {self.name!r}, expected one of {ENSEMBLES}')
        if self.range < 1:
            raise InputError(f'perturbation range must be positive, got {self.range}')


def random_term(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Hermitian (G + G^dagger)/2 of a complex Gaussian G, unit operator norm."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (g + g.conj().T) / 2
    return h / operator_norm(h)


def draw_terms(ensemble: PerturbationEnsemble, site_dim: int, num_sites: int,
               seed: int) -> List[np.ndarray]:
    rng = np.random.default_rng(seed)
    dim = site_dim ** ensemble.range
    if ensemble.name == 'uniform':
        return [random_term(rng, dim)] * num_sites
    return [random_term(rng, dim) for _ in range(num_sites)]


def perturbation_operator(terms: Sequence[np.ndarray], num_sites: int, site_dim: int):
    total = scipy.sparse.csr_matrix((site_dim ** num_sites,) * 2, dtype=complex)
    for site, term in enumerate(terms):
        total = total + place_operator(term, site, num_sites, site_dim)
    return total


def gap_slope(spectrum: Spectrum, perturbation) -> Optional[float]:
    """Largest |d(E_1 - E_0)/d beta| to first order: the perturbation
    restricted to the lowest cluster and to the cluster of E_1. None when
    the solver may have cut the E_1 cluster short."""
    w, v = spectrum.eigenvalues, spectrum.eigenvectors
    if v is None:
        return None
    if spectrum.method == 'sparse' and abs(w[-1] - w[1]) <= DEGENERACY_TOL:
        return None

    def shifts(level: float) -> np.ndarray:
        block = v[:, np.abs(w - level) <= DEGENERACY_TOL]
        return scipy.linalg.eigvalsh(block.conj().T @ (perturbation @ block))

    lower, upper = shifts(w[0]), shifts(w[1])
    return float(max(abs(upper[-1] - lower[0]), abs(upper[0] - lower[-1])))


@dataclasses.dataclass(frozen=True)
class SweepPoint:
    num_sites: int
    beta_fraction: float
    beta: float
    seed: int
    ground_energy: Optional[float]
    degeneracy: Optional[int]
    gap: Optional[float]
    raw_gap: Optional[float]
    method: str
    wall_time: float
    slope: Optional[float] = None
    error: Optional[str] = None

    @property
    def key(self) -> Tuple[int, float, int]:
        return self.num_sites, self.beta_fraction, self.seed


@dataclasses.dataclass
class StabilityReport:
    interaction_range: int
    ensemble: PerturbationEnsemble
    unperturbed: Dict[int, GapReport]
    points: List[SweepPoint]
    verdicts: List[Verdict] = dataclasses.field(default_factory=list)

    @property
    def failed_points(self) -> List[SweepPoint]:
        return [p for p in self.points if p.error is not None]


def _sweep_task(matrices: np.ndarray, interaction_range: int, num_sites: int, seed: int,
                fractions: Sequence[float], unperturbed: GapReport,
                ensemble: PerturbationEnsemble, mode: str) -> List[SweepPoint]:
    tensors = MpsTensors(matrices)
    h = interaction_term(tensors, interaction_range)
    base = assemble_ring(h, num_sites, tensors.d).operator()
    terms = draw_terms(ensemble, tensors.d, num_sites, seed)
    perturbation = perturbation_operator(terms, num_sites, tensors.d)
    gamma = unperturbed.gap
    points = []
    for fraction in fractions:
        beta = fraction * gamma
        start = time.perf_counter()
        if fraction == 0:
            spectrum = lowest_levels(base, mode=mode, vectors=True)
            points.append(SweepPoint(
                num_sites=num_sites, beta_fraction=fraction, beta=0.0, seed=seed,
                ground_energy=unperturbed.ground_energy, degeneracy=unperturbed.degeneracy,
                gap=unperturbed.gap, raw_gap=unperturbed.raw_gap,
                method=unperturbed.method, wall_time=0.0,
                slope=gap_slope(spectrum, perturbation),
            ))
            continue
        try:
            spectrum = lowest_levels(base + beta * perturbation, mode=mode, vectors=True)
        except (SolverError, InputError) as e:
            points.append(SweepPoint(
                num_sites=num_sites, beta_fraction=fraction, beta=beta, seed=seed,
                ground_energy=None, degeneracy=None, gap=None, raw_gap=None,
                method=mode, wall_time=time.perf_counter() - start, error=str(e),
            ))
            continue
        points.append(SweepPoint(
            num_sites=num_sites, beta_fraction=fraction, beta=beta, seed=seed,
            ground_energy=spectrum.ground_energy, degeneracy=spectrum.degeneracy,
            gap=spectrum.gap, raw_gap=spectrum.raw_gap,
            method=spectrum.method, wall_time=spectrum.wall_time,
            slope=gap_slope(spectrum, perturbation),
        ))
    return points


def perturb_sweep(tensors: MpsTensors, sizes: Sequence[int], fractions: Sequence[float],
                  seeds: Sequence[int], ensemble: PerturbationEnsemble = PerturbationEnsemble(),
                  interaction_range: Optional[int] = None, workers: int = 1,
                  mode: str = 'sparse') -> StabilityReport:
    """Gap of H + beta' sum_i phi_i for beta' = fraction * gap(H) over
    every (N, fraction, seed) point."""
    if not seeds:
        raise InputError('seed list must not be empty')
    if any(f < 0 for f in fractions):
        raise InputError('perturbation strengths must be non-negative')
    P = interaction_range or default_range(tensors)
    if ensemble.range > P:
        LOGGER.info(f'- perturbation range {ensemble.range} exceeds P={P}, regrouping with P={ensemble.range}')
        P = ensemble.range
    for N in sizes:
        if N < P or tensors.d ** N > SPARSE_LIMIT:
            raise InputError(f'ring size {N} is outside the supported range')
    fractions = sorted(set(float(f) for f in fractions))

    LOGGER.info(f'Starting perturbation sweep (P={P}, ensemble={ensemble.name})')
    h = interaction_term(tensors, P)
    unperturbed = {}
    for N in sizes:
        spectrum = lowest_levels(assemble_ring(h, N, tensors.d).operator(), mode=mode)
        unperturbed[N] = GapReport.from_spectrum(N, spectrum)
        LOGGER.info(f'- N={N}: unperturbed gap {unperturbed[N].gap:.6f}')

    tasks = [(N, seed) for N in sizes for seed in seeds]
    points = []  # type: List[SweepPoint]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers, initializer=set_level,
                                 initargs=(LOGGER.getEffectiveLevel(),)) as ex:
            futures = {
                ex.submit(_sweep_task, tensors.matrices, P, N, seed, fractions,
                          unperturbed[N], ensemble, mode): (N, seed)
                for N, seed in tasks
            }
            for f in as_completed(futures):
                points.extend(f.result())
                LOGGER.debug(f'- finished N={futures[f][0]}, seed={futures[f][1]}')
    else:
        for N, seed in tasks:
            points.extend(_sweep_task(tensors.matrices, P, N, seed, fractions,
                                      unperturbed[N], ensemble, mode))
    points.sort(key=lambda p: p.key)

    report = StabilityReport(interaction_range=P, ensemble=ensemble,
                             unperturbed=unperturbed, points=points)
    for p in report.failed_points:
        LOGGER.warning(f'- N={p.num_sites}, beta={p.beta_fraction}, seed={p.seed}: {p.error}')
    report.verdicts.extend([
        stability_verdict(report),
        continuity_verdict(report),
    ])
    return report


def stability_verdict(report: StabilityReport,
                      fraction: float = STABLE_FRACTION,
                      retained: float = RETAINED_GAP) -> Verdict:
    """Smallest gap ratio gap/gap(H) over points with beta' <= fraction * gap(H);
    a degenerate ground state counts as ratio 0."""
    ratios = []
    for p in report.points:
        if p.error is not None or p.beta_fraction > fraction:
            continue
        gamma = report.unperturbed[p.num_sites].gap
        ratios.append(p.gap / gamma if p.degeneracy == 1 else 0.0)
    if not ratios:
        return Verdict(name='stability', measured=float('nan'), bound=retained,
                       passed=True, applicable=False)
    return Verdict.lower('stability', min(ratios), retained)


def continuity_verdict(report: StabilityReport,
                       margin: float = SLOPE_MARGIN) -> Verdict:
    """Largest excess of |gap jump| between adjacent strengths over
    ``margin`` times the larger first-order slope at the two ends. The
    allowance never exceeds the Weyl slope 2 ||Phi|| <= 2N of unit-norm
    terms, which also stands in where a slope is unknown."""
    excess = 0.0
    scale = 1.0
    grouped = {}  # type: Dict[Tuple[int, int], List[SweepPoint]]
    for p in report.points:
        if p.error is None:
            scale = max(scale, abs(p.ground_energy))
            grouped.setdefault((p.num_sites, p.seed), []).append(p)
    for (N, _), series in grouped.items():
        for a, b in zip(series, series[1:]):
            weyl = 2.0 * N
            if a.slope is None or b.slope is None:
                slope = weyl
            else:
                slope = min(margin * max(a.slope, b.slope), weyl)
            excess = max(excess, abs(b.raw_gap - a.raw_gap) - slope * abs(b.beta - a.beta))
    return Verdict.upper('continuity', excess, 5 * KRYLOV_TOL * scale)

import dataclasses

import numpy as np

from mps2cl.consts import CHECK_TOL, KERNEL_TOL, PRODUCT_CAP, DENSE_LIMIT
from mps2cl.core.channels import QuantumChannel, align_rho_distance, rho_ee
from mps2cl.core.mps import g1_span_dim
from mps2cl.core.parent import (
    assemble_ring, global_gap, interaction_term, kernel_vs_rho, local_gap_sweep,
    translation_residual,
)
from mps2cl.core.renorm import (
    asymptotic_projector, build_block_unitary, compressed_region_distance,
    convergence_fit, limit_channel, projector_decay, projector_distance_bound,
)
from mps2cl.errors import InputError
from mps2cl.experiments.common import Experiment, Table
from mps2cl.logger import LOGGER
from mps2cl.stability.corollary import corollary_sandwich, region_kernels_equal, spin_two_projector
from mps2cl.stability.decomposition import decompose, phase_path
from mps2cl.stability.sweep import PerturbationEnsemble, perturb_sweep
from mps2cl.verdicts import Verdict


class G1Experiment(Experiment):
    NAME = 'g1'

    def run(self):
        LOGGER.info('Starting injectivity check')
        tensors = self.tensors
        target = tensors.D ** 2
        dims = []
        for L in range(1, self.config.model.g1_cap + 1):
            if tensors.d ** L > PRODUCT_CAP:
                break
            dims.append(g1_span_dim(tensors, L))
            LOGGER.info(f'- L={L}: span dimension {dims[-1]} of {target}')
            if dims[-1] == target:
                break
        self.summary['d'] = tensors.d
        self.summary['D'] = tensors.D
        self.summary['span_dims'] = dims
        self.summary['L0'] = len(dims) if dims and dims[-1] == target else None
        self.tables['span'] = Table(['L', 'span_dim', 'target'],
                                    [(i + 1, dim, target) for i, dim in enumerate(dims)])
        self.record(Verdict.lower('g1', float(max(dims, default=0)), float(target)))


class CanonExperiment(Experiment):
    NAME = 'canon'

    def run(self):
        form = self.canonical
        a = form.tensors.matrices
        unital = np.einsum('iab,icb->ac', a, a.conj()) - np.eye(form.D)
        dual = np.einsum('iba,bc,icd->ad', a.conj(), form.xi_matrix, a) - form.xi_matrix
        self.summary.update({
            'L0': form.l0,
            'xi': form.xi,
            'scale': form.scale,
            'matrices': a,
        })
        self.record(Verdict.upper('unital', float(np.max(np.abs(unital))), CHECK_TOL))
        self.record(Verdict.upper('dual_fixed_point', float(np.max(np.abs(dual))), CHECK_TOL))


class SpectrumExperiment(Experiment):
    NAME = 'spectrum'

    def run(self):
        LOGGER.info('Starting transfer spectrum analysis')
        spectrum = QuantumChannel(self.canonical.tensors.matrices).spectrum()
        self.summary['eigenvalues'] = spectrum.eigenvalues
        self.summary['lambda2'] = spectrum.lambda2
        self.tables['spectrum'] = Table(
            ['index', 'real', 'imag', 'modulus'],
            [(i, ev.real, ev.imag, abs(ev)) for i, ev in enumerate(spectrum.eigenvalues)])
        self.record(Verdict(name='peripheral_trivial', measured=spectrum.lambda2, bound=1.0,
                            passed=spectrum.peripheral_trivial))
        self.record(Verdict.upper('transfer_gap', spectrum.lambda2, 1.0, -CHECK_TOL))


class BlockExperiment(Experiment):
    NAME = 'block'

    def run(self):
        LOGGER.info('Starting blocking verification')
        form = self.canonical
        limit = limit_channel(form)
        table = Table(['L', 'rank', 'stinespring_distance', 'choi_distance',
                       'rho_distance', 'rho_bound', 'compressed_residual'])
        for L in self.config.block.L_list:
            if form.d ** L < form.D ** 2:
                LOGGER.warning(f'- skipping L={L}: d^L is smaller than D^2')
                continue
            unitary = build_block_unitary(form, L)
            aligned = align_rho_distance(unitary.blocking.channel, limit)
            residual = None
            if form.d ** (2 * L) <= DENSE_LIMIT:
                residual = compressed_region_distance(form, unitary)
                self.record(Verdict.upper(f'compression_L{L}', residual, CHECK_TOL))
            self.record(Verdict.upper(f'rho_alignment_L{L}', aligned.distance, aligned.bound))
            table.rows.append((L, unitary.blocking.rank, unitary.alignment.distance,
                               unitary.alignment.cb_upper, aligned.distance, aligned.bound, residual))
        self.tables['blocks'] = table


class ConvergeExperiment(Experiment):
    NAME = 'converge'

    def run(self):
        LOGGER.info('Starting convergence analysis')
        form = self.canonical
        fit = convergence_fit(form, self.config.L_range)
        self.summary['fit'] = fit
        self.tables['convergence'] = Table(
            ['L', 'choi_distance', 'envelope'],
            [(L, dist, fit.envelope * fit.lambda2 ** L) for L, dist in zip(fit.L_values, fit.distances)])
        if fit.drifting:
            LOGGER.warning('- prefactor drifts across windows; envelope constant is still reported')
        reference = float(np.log(fit.lambda2)) if fit.lambda2 > 0 else float('-inf')
        self.record(Verdict(name='decay_rate', measured=fit.rate if fit.rate is not None else float('nan'),
                            bound=reference, passed=fit.rate_matches(reference), applicable=not fit.exact))

        limit = asymptotic_projector(form)
        self.summary['mu'] = limit.mu
        self.record(Verdict.upper('mu_equals_min_xi', abs(limit.mu - float(np.min(form.xi)) / form.D), CHECK_TOL))
        lengths = [L for L in self.config.block.L_list if form.d ** L >= form.D ** 2]
        if not lengths:
            return
        decay = projector_decay(form, lengths, fit)
        rows = []
        for point in decay.points:
            unitary = build_block_unitary(form, point.L)
            aligned = rho_ee(QuantumChannel(unitary.alignment.aligned_kraus))
            pair = projector_distance_bound(aligned, limit)
            self.record(Verdict.upper(f'projector_bound_L{point.L}', pair.measured, pair.bound, CHECK_TOL))
            self.record(Verdict.upper(f'projector_swapped_bound_L{point.L}', pair.measured, pair.swapped_bound, CHECK_TOL))
            self.record(Verdict.upper(f'projdistance_closed_form_L{point.L}', point.measured, point.bound, CHECK_TOL))
            rows.append((point.L, point.measured, point.rho_distance, pair.bound, pair.swapped_bound, point.bound))
        self.tables['projectors'] = Table(
            ['L', 'projector_distance', 'rho_distance', 'pinv_bound', 'swapped_bound', 'closed_form'], rows)
        self.summary['projector_rate'] = decay.rate
        self.summary['projector_reference_rate'] = decay.reference_rate
        self.record(Verdict(name='projector_decay', measured=decay.rate if decay.rate is not None else float('nan'),
                            bound=0.8 * decay.reference_rate, passed=decay.decays_fast_enough,
                            applicable=decay.rate is not None and len(rows) >= 2))


class ParentGapExperiment(Experiment):
    NAME = 'parent-gap'

    def run(self):
        LOGGER.info('Starting parent Hamiltonian gaps')
        form = self.canonical
        tensors = form.tensors
        P = self.interaction_range
        h = interaction_term(tensors, P)
        self.summary['interaction_range'] = P
        self.summary['term_rank'] = int(round(np.trace(h).real))
        rows = []
        for N in self.config.N_list:
            if N < P:
                LOGGER.warning(f'- skipping N={N}: shorter than the interaction range')
                continue
            ring = assemble_ring(h, N, tensors.d, tensors=tensors)
            report = global_gap(ring)
            LOGGER.info(f'- N={N}: gap {report.gap:.6f}, degeneracy {report.degeneracy}')
            self.record(Verdict.upper(f'ground_energy_N{N}', abs(report.ground_energy), KERNEL_TOL))
            self.record(Verdict.upper(f'unique_ground_state_N{N}', float(report.degeneracy), 1.0))
            self.record(Verdict.lower(f'gap_N{N}', report.gap, 0.0, -KERNEL_TOL))
            self.record(Verdict.upper(f'translation_N{N}', translation_residual(ring), KERNEL_TOL))
            rows.append((N, report.ground_energy, report.degeneracy, report.gap, report.method, report.wall_time))
        self.tables['gaps'] = Table(['N', 'ground_energy', 'degeneracy', 'gap', 'method', 'wall_time'], rows)

        sizes = [m for m in range(P + 1, P + 5) if tensors.d ** m <= DENSE_LIMIT]
        local = local_gap_sweep(tensors, sizes, P)
        self.tables['local_gaps'] = Table(['sites', 'gap', 'kernel_dim'],
                                          [(g.num_sites, g.gap, g.kernel_dim) for g in local])
        if local:
            self.record(Verdict.lower('local_gap', min(g.gap for g in local), 0.0, -KERNEL_TOL))
        if tensors.d ** (2 * P) <= DENSE_LIMIT:
            match = kernel_vs_rho(tensors, P, P)
            self.summary['kernel_vs_rho'] = dataclasses.asdict(match)
            self.record(Verdict(name='kernel_equals_support', measured=match.distance,
                                bound=KERNEL_TOL, passed=match.equal))


class DecomposeExperiment(Experiment):
    NAME = 'decompose'

    def decomposition(self):
        block = self.config.block
        return decompose(self.canonical, block.L, block.blocks, self.interaction_range)

    def record_decomposition(self, dec):
        self.summary['L'] = dec.L
        self.summary['blocks'] = dec.num_blocks
        self.summary['interaction_range'] = dec.interaction_range
        self.summary['constants'] = dec.constants
        self.record_all(dec.verdicts)
        self.tables['verdicts'] = Table(
            ['name', 'measured', 'bound', 'passed', 'applicable'],
            [(v.name, v.measured, v.bound, v.passed, v.applicable) for v in dec.verdicts])

    def run(self):
        self.record_decomposition(self.decomposition())


class PhasePathExperiment(DecomposeExperiment):
    NAME = 'phase-path'

    def run(self):
        dec = self.decomposition()
        self.record_decomposition(dec)
        report = phase_path(dec, self.config.path.steps)
        self.summary['parent_gap'] = report.parent_gap
        self.summary['min_gap'] = report.min_gap
        self.record_all(report.verdicts)
        self.tables['path'] = Table(
            ['t', 'ground_energy', 'degeneracy', 'gap', 'method', 'error'],
            [(p.t, p.ground_energy, p.degeneracy, p.gap, p.method, p.error) for p in report.points])


class SweepExperiment(Experiment):
    NAME = 'sweep'

    def run(self):
        sweep = self.config.sweep
        ensemble = PerturbationEnsemble(name=sweep.ensemble, range=sweep.perturbation_range)
        report = perturb_sweep(
            self.canonical.tensors, sweep.N_list, sweep.beta_fractions, sweep.seeds,
            ensemble=ensemble, interaction_range=self.interaction_range,
            workers=self.options.workers,
        )
        self.summary['interaction_range'] = report.interaction_range
        self.summary['ensemble'] = ensemble
        self.summary['unperturbed_gaps'] = {N: r.gap for N, r in report.unperturbed.items()}
        self.summary['failed_points'] = len(report.failed_points)
        self.tables['unperturbed'] = Table(
            ['N', 'ground_energy', 'degeneracy', 'gap', 'method'],
            [(N, r.ground_energy, r.degeneracy, r.gap, r.method) for N, r in sorted(report.unperturbed.items())])
        self.tables['gaps'] = Table(
            ['N', 'beta_fraction', 'beta', 'seed', 'ground_energy', 'degeneracy', 'gap',
             'raw_gap', 'slope', 'method', 'wall_time', 'error'],
            [(p.num_sites, p.beta_fraction, p.beta, p.seed, p.ground_energy, p.degeneracy, p.gap,
              p.raw_gap, p.slope, p.method, p.wall_time, p.error) for p in report.points])
        self.record_all(report.verdicts)


class AkltExperiment(Experiment):
    NAME = 'aklt'

    def run(self):
        LOGGER.info('Starting AKLT pipeline')
        form = self.canonical
        if form.d != 3 or form.D != 2:
            raise InputError('the AKLT pipeline needs a spin-1 model with bond dimension 2')
        tensors = form.tensors
        self.summary['xi'] = form.xi
        self.record(Verdict.upper('xi_half', float(np.max(np.abs(form.xi - 0.5))), CHECK_TOL))

        spectrum = QuantumChannel(tensors.matrices).spectrum()
        expected = np.array([1.0, -1 / 3, -1 / 3, -1 / 3])
        self.summary['eigenvalues'] = spectrum.eigenvalues
        self.record(Verdict.upper('transfer_spectrum', float(np.max(np.abs(spectrum.eigenvalues - expected))), CHECK_TOL))

        limit = asymptotic_projector(form)
        self.summary['mu'] = limit.mu
        self.record(Verdict.upper('mu', abs(limit.mu - 0.25), CHECK_TOL))
        fit = convergence_fit(form, self.config.L_range)
        self.summary['decay_rate'] = fit.rate
        self.record(Verdict(name='decay_rate', measured=fit.rate, bound=float(np.log(1 / 3)),
                            passed=fit.rate_matches(float(np.log(1 / 3)))))

        p2 = spin_two_projector()
        h2 = interaction_term(tensors, 2)
        self.record(Verdict.upper('spin_two_projector', float(np.max(np.abs(p2 - h2))), CHECK_TOL))
        sandwich = corollary_sandwich(p2, tensors, 3)
        self.summary['sandwich'] = sandwich
        self.record(Verdict(name='sandwich_kernels', measured=sandwich.kernel_distance,
                            bound=KERNEL_TOL, passed=sandwich.kernels_equal))
        if sandwich.kernels_equal:
            self.record(Verdict.lower('sandwich_c1', sandwich.c1, 0.0, -KERNEL_TOL))
        self.record(Verdict(name='region_kernels', measured=0.0, bound=KERNEL_TOL,
                            passed=region_kernels_equal(p2, tensors, 2, 6)))

        rows = []
        for N in self.config.N_list:
            report = global_gap(assemble_ring(h2, N, 3, tensors=tensors))
            self.record(Verdict.upper(f'unique_ground_state_N{N}', float(report.degeneracy), 1.0))
            self.record(Verdict.lower(f'gap_N{N}', report.gap, 0.0, -KERNEL_TOL))
            rows.append((N, report.ground_energy, report.degeneracy, report.gap, report.method, report.wall_time))
        self.tables['gaps'] = Table(['N', 'ground_energy', 'degeneracy', 'gap', 'method', 'wall_time'], rows)


EXPERIMENTS = {
    cls.NAME: cls for cls in (
        G1Experiment, CanonExperiment, SpectrumExperiment, BlockExperiment,
        ConvergeExperiment, ParentGapExperiment, DecomposeExperiment,
        PhasePathExperiment, SweepExperiment, AkltExperiment,
    )
}

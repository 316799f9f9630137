import numpy as np
import pytest

from mps2cl.core.parent import GapReport
from mps2cl.errors import InputError
from mps2cl.numerics import Spectrum, hermitian_spectrum
from mps2cl.stability.sweep import (
    PerturbationEnsemble, SweepPoint, StabilityReport, random_term, draw_terms,
    perturbation_operator, perturb_sweep, stability_verdict, continuity_verdict, gap_slope,
)


def _point(seed, fraction, gap, degeneracy=1, raw_gap=None, num_sites=6, slope=None):
    return SweepPoint(num_sites=num_sites, beta_fraction=fraction, beta=fraction, seed=seed,
                      ground_energy=0.0, degeneracy=degeneracy, gap=gap,
                      raw_gap=gap if raw_gap is None else raw_gap, method='dense', wall_time=0.0,
                      slope=slope)


def _report(points):
    base = GapReport(num_sites=6, ground_energy=0.0, degeneracy=1, gap=1.0, raw_gap=1.0,
                     method='dense', wall_time=0.0)
    return StabilityReport(interaction_range=2, ensemble=PerturbationEnsemble(),
                           unperturbed={6: base}, points=points)


def test_random_term(rng):
    h = random_term(rng, 9)
    assert np.abs(h - h.conj().T).max() < 1e-14
    assert abs(np.max(np.abs(np.linalg.eigvalsh(h))) - 1) < 1e-12


def test_draw_terms_is_seeded():
    iid = draw_terms(PerturbationEnsemble('iid', 2), 3, 4, seed=5)
    again = draw_terms(PerturbationEnsemble('iid', 2), 3, 4, seed=5)
    assert len(iid) == 4
    assert all(np.array_equal(a, b) for a, b in zip(iid, again))
    assert np.abs(iid[0] - iid[1]).max() > 1e-3
    uniform = draw_terms(PerturbationEnsemble('uniform', 2), 3, 4, seed=5)
    assert all(np.array_equal(uniform[0], t) for t in uniform)


def test_ensemble_validation():
    with pytest.raises(InputError):
        PerturbationEnsemble('gaussian')
    with pytest.raises(InputError):
        PerturbationEnsemble('iid', 0)


def test_perturbation_norm_is_at_most_the_number_of_terms():
    terms = draw_terms(PerturbationEnsemble('iid', 2), 2, 5, seed=0)
    op = perturbation_operator(terms, 5, 2).toarray()
    assert np.max(np.abs(np.linalg.eigvalsh(op))) <= 5 + 1e-10


def test_stability_verdict_counts_degenerate_points_as_closed():
    report = _report([_point(0, 0.01, 0.9), _point(1, 0.01, 0.8, degeneracy=2)])
    verdict = stability_verdict(report)
    assert verdict.measured == 0.0
    assert verdict.failed
    report = _report([_point(0, 0.01, 0.9), _point(0, 0.2, 0.1)])
    assert stability_verdict(report).measured == pytest.approx(0.9)
    assert not stability_verdict(report).failed


def test_continuity_verdict():
    smooth = _report([_point(0, 0.0, 1.0), _point(0, 0.01, 0.95)])
    assert not continuity_verdict(smooth).failed
    jump = _report([_point(0, 0.0, 1.0), _point(0, 0.01, 0.5)])
    assert continuity_verdict(jump).failed


def test_continuity_verdict_uses_the_local_slope():
    drop = [_point(0, 0.0, 1.0, num_sites=12, slope=1.0), _point(0, 0.01, 0.8, num_sites=12, slope=1.0)]
    verdict = continuity_verdict(_report(drop))
    assert verdict.failed
    assert verdict.measured == pytest.approx(0.2 - 2 * 1.0 * 0.01)
    smooth = [_point(0, 0.0, 1.0, num_sites=12, slope=1.0), _point(0, 0.01, 0.99, num_sites=12, slope=0.5)]
    assert not continuity_verdict(_report(smooth)).failed
    unknown = [_point(0, 0.0, 1.0, num_sites=12), _point(0, 0.01, 0.8, num_sites=12, slope=1.0)]
    assert not continuity_verdict(_report(unknown)).failed


def test_gap_slope_matches_first_order_shift(rng):
    phi = random_term(rng, 4)
    spectrum = hermitian_spectrum(np.diag([0.0, 1.0, 3.0, 4.0]), mode='dense', vectors=True)
    expected = abs(phi[1, 1].real - phi[0, 0].real)
    assert gap_slope(spectrum, phi) == pytest.approx(expected, abs=1e-10)
    eps = 1e-6
    w = np.linalg.eigvalsh(np.diag([0.0, 1.0, 3.0, 4.0]) + eps * phi)
    assert abs((w[1] - w[0] - 1.0) / eps) == pytest.approx(expected, abs=1e-4)


def test_gap_slope_on_a_degenerate_level(rng):
    phi = random_term(rng, 4)
    spectrum = hermitian_spectrum(np.diag([0.0, 1.0, 1.0, 3.0]), mode='dense', vectors=True)
    shifts = np.linalg.eigvalsh(phi[1:3, 1:3])
    expected = max(abs(shifts[-1] - phi[0, 0].real), abs(shifts[0] - phi[0, 0].real))
    assert gap_slope(spectrum, phi) == pytest.approx(expected, abs=1e-10)


def test_gap_slope_is_unknown_for_a_cut_cluster():
    spectrum = Spectrum(eigenvalues=np.array([0.0, 1.0, 1.0]), method='sparse',
                        wall_time=0.0, eigenvectors=np.eye(4)[:, :3])
    assert gap_slope(spectrum, np.eye(4)) is None
    assert gap_slope(Spectrum(eigenvalues=np.array([0.0, 1.0]), method='dense', wall_time=0.0),
                     np.eye(2)) is None


def test_aklt_sweep(aklt):
    report = perturb_sweep(aklt, [6], [0.0, 0.01, 0.02], [0, 1], mode='dense')
    assert report.interaction_range == 2
    assert [p.key for p in report.points] == [
        (6, 0.0, 0), (6, 0.0, 1), (6, 0.01, 0), (6, 0.01, 1), (6, 0.02, 0), (6, 0.02, 1),
    ]
    unperturbed = report.unperturbed[6]
    zero = report.points[0]
    assert zero.gap == unperturbed.gap
    assert zero.ground_energy == unperturbed.ground_energy
    assert not report.failed_points
    assert all(p.slope is not None and p.slope <= 2 * 6 for p in report.points)
    assert not [v.name for v in report.verdicts if v.failed]
    for p in report.points[2:]:
        assert p.beta == pytest.approx(p.beta_fraction * unperturbed.gap)
        assert p.gap >= 0.5 * unperturbed.gap


def test_sweep_with_workers_matches_serial(aklt):
    serial = perturb_sweep(aklt, [6], [0.0, 0.01], [0, 1], mode='dense')
    parallel = perturb_sweep(aklt, [6], [0.0, 0.01], [0, 1], workers=2, mode='dense')
    assert [p.key for p in parallel.points] == [p.key for p in serial.points]
    for a, b in zip(serial.points, parallel.points):
        assert a.gap == pytest.approx(b.gap, abs=1e-10)


def test_wide_perturbations_regroup_the_parent(aklt):
    report = perturb_sweep(aklt, [6], [0.01], [0], PerturbationEnsemble('uniform', 3), mode='dense')
    assert report.interaction_range == 3
    assert report.unperturbed[6].degeneracy == 1


def test_sweep_input_validation(aklt):
    with pytest.raises(InputError):
        perturb_sweep(aklt, [6], [0.01], [])
    with pytest.raises(InputError):
        perturb_sweep(aklt, [6], [-0.01], [0])
    with pytest.raises(InputError):
        perturb_sweep(aklt, [1], [0.01], [0])


@pytest.mark.slow
def test_random_model_keeps_its_gap(random_model):
    fractions = [0.0, 0.01, 0.02, 0.03, 0.04, 0.05]
    report = perturb_sweep(random_model, [6, 8, 10, 12], fractions, range(10))
    assert report.interaction_range == 3
    assert len(report.points) == 4 * 6 * 10
    assert not report.failed_points
    assert all(p.degeneracy == 1 for p in report.points)
    verdicts = {v.name: v for v in report.verdicts}
    assert verdicts['stability'].measured >= 0.5
    assert not verdicts['stability'].failed
    assert not verdicts['continuity'].failed

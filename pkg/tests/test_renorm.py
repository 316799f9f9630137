import numpy as np
import pytest
import scipy.linalg

from mps2cl.core.channels import QuantumChannel, rho_ee
from mps2cl.core.mps import canonical_form, products, random_tensors
from mps2cl.core.renorm import (
    block, limit_channel, entangled_vector, asymptotic_projector, projector_distance_bound,
    local_projector_pair, convergence_fit, envelope_constant, projdistance_bound, build_block_unitary,
    aligned_projector_distance, projector_decay, region_density_matrix,
    compressed_region_distance,
)
from mps2cl.errors import InputError


def test_block_mixing(aklt_canonical):
    blocked = block(aklt_canonical.tensors, 2)
    assert blocked.rank == 4
    assert blocked.kraus.shape == (4, 2, 2)
    u = blocked.mixing
    assert np.abs(u @ u.conj().T - np.eye(9)).max() < 1e-10
    flat = products(aklt_canonical.tensors, 2).reshape(9, 4)
    assert np.abs((u @ flat)[:4] - blocked.kraus.reshape(4, 4)).max() < 1e-10
    assert blocked.channel.unital


def test_limit_channel(random_canonical, rng):
    channel = limit_channel(random_canonical)
    x = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    expected = np.trace(x) * np.diag(random_canonical.xi)
    assert np.abs(channel.dual_apply(x) - expected).max() < 1e-10
    assert np.abs(channel.apply(x) - np.trace(np.diag(random_canonical.xi) @ x) * np.eye(2)).max() < 1e-10


def test_entangled_vector():
    phi = entangled_vector(np.array([0.6, 0.4]), 3)
    assert phi.shape == (9,)
    assert abs(np.linalg.norm(phi) - 1) < 1e-12
    assert abs(phi[4] - np.sqrt(0.4)) < 1e-12


def test_asymptotic_projector(random_canonical):
    pair = asymptotic_projector(random_canonical)
    assert pair.rank == 4
    assert abs(pair.mu - min(random_canonical.xi) / 2) < 1e-10


def test_projector_distance_bound_identical_operators(aklt_canonical):
    limit = asymptotic_projector(aklt_canonical)
    distance = projector_distance_bound(limit, limit)
    assert distance.measured < 1e-12
    assert distance.swapped_bound is not None
    assert distance.holds


def test_projector_distance_bound_rotated(rng):
    rho = np.diag([0.5, 0.3, 0.2, 0.0])
    g = rng.standard_normal((4, 4))
    v = scipy.linalg.expm(1e-3j * (g + g.T))
    a = local_projector_pair(rho)
    b = local_projector_pair(v @ rho @ v.conj().T)
    distance = projector_distance_bound(b, a)
    assert b.rank == 3
    assert distance.measured > 0
    assert distance.swapped_bound is not None
    assert distance.holds


def test_convergence_fit_aklt(aklt_canonical):
    fit = convergence_fit(aklt_canonical, range(1, 7))
    assert abs(fit.lambda2 - 1 / 3) < 1e-10
    assert abs(fit.rate - np.log(1 / 3)) < 1e-6
    assert fit.rate_matches(np.log(1 / 3))
    assert not fit.exact
    assert not fit.drifting
    for L, dist in zip(fit.L_values, fit.distances):
        assert dist <= fit.envelope * fit.lambda2 ** L * (1 + 1e-9)


def test_convergence_fit_classical(classical_canonical):
    fit = convergence_fit(classical_canonical, [1, 2, 3])
    assert fit.exact
    assert fit.lambda2 == 0.0
    assert max(fit.distances) < 1e-12


def test_convergence_fit_needs_three_lengths(aklt_canonical):
    with pytest.raises(InputError):
        convergence_fit(aklt_canonical, [1, 2])


def test_envelope_constant_in_log_space():
    # 1e-3 ** 110 underflows to zero as a float
    envelope = envelope_constant([100, 110, 120], [2e-300, 1e-310, 0.0], 1e-3)
    assert envelope == pytest.approx(1e20, rel=1e-6)
    assert envelope_constant([1, 2, 3], [0.5, 0.1, 0.0], 0.0) == 0.0
    assert envelope_constant([1, 2], [0.0, 0.0], 0.5) == 0.0


def test_projdistance_bound_applicability(aklt_canonical):
    fit = convergence_fit(aklt_canonical, range(1, 7))
    assert projdistance_bound(aklt_canonical, fit.envelope, fit.lambda2, 2) is None
    far = projdistance_bound(aklt_canonical, fit.envelope, fit.lambda2, 60)
    assert far is not None
    assert 0 < far < 1e-9


def test_block_unitary(aklt_canonical):
    unitary = build_block_unitary(aklt_canonical, 2)
    w = unitary.unitary
    assert w.shape == (9, 9)
    assert np.abs(w @ w.conj().T - np.eye(9)).max() < 1e-10
    assert unitary.active_dim == 4
    with pytest.raises(InputError):
        build_block_unitary(aklt_canonical, 1)


def test_block_unitary_needs_an_even_length(random_canonical):
    with pytest.raises(InputError):
        build_block_unitary(random_canonical, 3)


def test_compressed_region(aklt_canonical):
    unitary = build_block_unitary(aklt_canonical, 2)
    assert compressed_region_distance(aklt_canonical, unitary) < 1e-10


def test_region_density_matrix(random_canonical):
    rho = region_density_matrix(random_canonical.tensors, 3)
    assert abs(np.trace(rho).real - 1) < 1e-10
    assert np.linalg.eigvalsh(rho)[0] > -1e-12


def test_projector_decay(aklt_canonical):
    fit = convergence_fit(aklt_canonical, range(1, 7))
    decay = projector_decay(aklt_canonical, [2, 4, 6], fit)
    measured = [p.measured for p in decay.points]
    assert measured[0] > measured[1] > measured[2]
    assert decay.rate < 0
    single = aligned_projector_distance(aklt_canonical, 4)
    assert abs(single.measured - measured[1]) < 1e-10


@pytest.mark.parametrize('seed', [7, 1, 2])
def test_projector_decay_on_random_models(seed):
    form = canonical_form(random_tensors(2, 2, seed))
    fit = convergence_fit(form, range(1, 9))
    decay = projector_decay(form, [2, 4, 6], fit)
    assert decay.rate is not None
    assert decay.decays_fast_enough


def test_aligned_rho_matches_compressed_frame(aklt_canonical):
    unitary = build_block_unitary(aklt_canonical, 4)
    aligned = rho_ee(QuantumChannel(unitary.alignment.aligned_kraus))
    limit = asymptotic_projector(aklt_canonical)
    assert aligned.rank == limit.rank


@pytest.mark.parametrize('seed', range(50))
def test_blocking_random_models(seed):
    tensors = random_tensors(2, 2, seed)
    for L in (2, 3, 4):
        blocked = block(tensors, L)
        assert blocked.rank == min(4, 2 ** L)


@pytest.mark.parametrize('seed', range(10))
def test_projector_bounds_random_pairs(seed):
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(2):
        g = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
        pairs.append(local_projector_pair(g @ g.conj().T))
    distance = projector_distance_bound(*pairs)
    assert distance.holds
    delta = np.linalg.norm(pairs[0].rho - pairs[1].rho, 2)
    if delta >= pairs[1].mu:
        assert distance.swapped_bound is None

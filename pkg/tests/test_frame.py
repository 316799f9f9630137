import numpy as np
import pytest

from mps2cl.core.parent import lowest_levels
from mps2cl.errors import InputError
from mps2cl.stability.frame import half_shifted_frame, classical_hamiltonian, commutation_residual


def test_frame_permutation(aklt_canonical):
    frame = half_shifted_frame(aklt_canonical, 2)
    assert frame.slot_dim == 3
    assert frame.block_dim == 9
    p = frame.permutation
    assert np.abs(p @ p.T - np.eye(9)).max() < 1e-12
    # blocked index p*D + q lands on half slots (p, q)
    assert p[1 * 3 + 0, 1 * 2 + 0] == 1.0
    assert p[0 * 3 + 1, 0 * 2 + 1] == 1.0


def test_frame_needs_even_blocks(aklt_canonical, classical_canonical):
    with pytest.raises(InputError):
        half_shifted_frame(aklt_canonical, 3)
    frame = half_shifted_frame(classical_canonical, 2)
    assert frame.slot_dim == 4


def test_hs_term_and_limit_projector(aklt_canonical):
    frame = half_shifted_frame(aklt_canonical, 2)
    hs = frame.hs_term()
    assert np.abs(hs @ hs - hs).max() < 1e-12
    assert abs(np.trace(hs).real - 8) < 1e-12
    limit = frame.asymptotic_projector()
    assert limit.shape == (81, 81)
    assert abs(np.trace(limit).real - 4) < 1e-12
    assert np.abs(limit @ limit - limit).max() < 1e-12


def test_classical_hamiltonian(aklt_canonical):
    frame = half_shifted_frame(aklt_canonical, 2)
    ring = classical_hamiltonian(frame, 3)
    assert ring.starts == [1, 3, 5]
    assert commutation_residual(ring) < 1e-12
    spectrum = lowest_levels(ring.operator(), mode='dense')
    assert spectrum.degeneracy == 1
    assert abs(spectrum.ground_energy) < 1e-10
    assert abs(spectrum.gap - 3 * 2) < 1e-10
    with pytest.raises(InputError):
        classical_hamiltonian(frame, 2)

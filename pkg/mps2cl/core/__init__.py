from mps2cl.core.mps import (
    MpsTensors, CanonicalForm, canonical_form, g1_span_dim, minimal_l0,
    expand_state, transfer_matrix, aklt_tensors, random_tensors,
    classical_tensors, load_tensors,
)
from mps2cl.core.channels import (
    QuantumChannel, ChannelSpectrum, CbDistanceBound, Alignment,
    LocalProjectorPair, cb_distance_bound, align_unitary, rho_ee,
    align_rho_distance,
)
from mps2cl.core.renorm import (
    BlockedChannel, BlockUnitary, ConvergenceFit, ProjectorDistance,
    block, limit_channel, asymptotic_projector, projector_distance_bound,
    convergence_fit, build_block_unitary, projector_decay,
)
from mps2cl.core.parent import (
    GroundSpaceBasis, RingHamiltonian, GapReport, ground_space,
    interaction_term, assemble_ring, global_gap, local_gap, default_range,
)

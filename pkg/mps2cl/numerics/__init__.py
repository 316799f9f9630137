from mps2cl.numerics.kernels import (
    schatten_norm, pseudo_inverse, image_projector, kernel_projector,
    smallest_nonzero, numerical_rank, partial_trace, hermitize,
    is_hermitian, generalized_extremes, operator_norm,
)
from mps2cl.numerics.solvers import Spectrum, hermitian_spectrum
from mps2cl.numerics.placement import (
    cyclic_permutation, place_operator, translation_operator,
    slot_width, kron_all,
)

__all__ = [
    'schatten_norm', 'pseudo_inverse', 'image_projector', 'kernel_projector',
    'smallest_nonzero', 'numerical_rank', 'partial_trace', 'hermitize',
    'is_hermitian', 'generalized_extremes', 'operator_norm',
    'Spectrum', 'hermitian_spectrum',
    'cyclic_permutation', 'place_operator', 'translation_operator',
    'slot_width', 'kron_all',
]

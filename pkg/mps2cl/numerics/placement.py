"""Embedding local operators into tensor-product rings of equal slots."""
import functools

import numpy as np
import scipy.sparse

from typing import Sequence

from mps2cl.errors import InputError


def slot_width(dim: int, slot_dim: int) -> int:
    width = int(round(np.log(dim) / np.log(slot_dim))) if dim > 1 else 0
    if slot_dim ** width != dim:
        raise InputError(f'dimension {dim} is not a power of {slot_dim}')
    return width


def cyclic_permutation(num_slots: int, slot_dim: int, shift: int) -> np.ndarray:
    """Index map sending the content of slot j to slot (j + shift) mod n."""
    axes = [(j + shift) % num_slots for j in range(num_slots)]
    return np.arange(slot_dim ** num_slots).reshape([slot_dim] * num_slots).transpose(axes).ravel()


def _permutation_matrix(num_slots: int, slot_dim: int, shift: int):
    target = cyclic_permutation(num_slots, slot_dim, shift)
    n = target.size
    return scipy.sparse.csr_matrix((np.ones(n), (target, np.arange(n))), shape=(n, n))


def translation_operator(num_slots: int, slot_dim: int, shift: int = 1):
    return _permutation_matrix(num_slots, slot_dim, shift % num_slots)


def place_operator(op, start: int, num_slots: int, slot_dim: int):
    """Sparse embedding of ``op`` acting on consecutive slots
    start, start+1, ... (cyclically) of a ring of ``num_slots`` slots."""
    op = scipy.sparse.csr_matrix(op)
    width = slot_width(op.shape[0], slot_dim)
    if width > num_slots:
        raise InputError(f'operator spans {width} slots, ring has {num_slots}')
    rest = slot_dim ** (num_slots - width)
    embedded = scipy.sparse.kron(op, scipy.sparse.identity(rest, format='csr'), format='csr')
    shift = start % num_slots
    if shift == 0:
        return embedded
    perm = _permutation_matrix(num_slots, slot_dim, shift)
    return (perm @ embedded @ perm.T).tocsr()


def kron_all(ops: Sequence[np.ndarray]) -> np.ndarray:
    return functools.reduce(np.kron, ops)

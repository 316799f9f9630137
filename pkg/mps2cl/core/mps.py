"""MPS tensors, the injectivity check and the canonical form."""
import dataclasses
import json

import numpy as np
import scipy.linalg

from typing import Optional

from mps2cl.consts import RANK_TOL, CHECK_TOL, PRODUCT_CAP, STATE_CAP, G1_DEFAULT_CAP
from mps2cl.errors import InputError, GenericityError
from mps2cl.logger import LOGGER
from mps2cl.numerics import numerical_rank, hermitize


@dataclasses.dataclass(frozen=True)
class MpsTensors:
    """d matrices of size D x D, stored as a read-only (d, D, D) array."""
    matrices: np.ndarray

    def __post_init__(self):
        arr = np.array(self.matrices, dtype=complex)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise InputError(f'expected shape (d, D, D), got {arr.shape}')
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError('physical and bond dimensions must be positive')
        if not np.all(np.isfinite(arr)):
            raise InputError('tensors contain non-finite entries')
        if np.max(np.abs(arr)) == 0:
            raise InputError('all matrices are zero')
        arr.setflags(write=False)
        object.__setattr__(self, 'matrices', arr)

    @property
    def d(self) -> int:
        return self.matrices.shape[0]

    @property
    def D(self) -> int:
        return self.matrices.shape[1]

    def conjugated(self, x: np.ndarray, x_inv: np.ndarray) -> 'MpsTensors':
        return MpsTensors(np.einsum('ab,ibc,cd->iad', x, self.matrices, x_inv))

    def scaled(self, factor: float) -> 'MpsTensors':
        return MpsTensors(self.matrices * factor)


@dataclasses.dataclass(frozen=True)
class CanonicalForm:
    tensors: MpsTensors
    xi: np.ndarray
    l0: int
    scale: float

    @property
    def d(self) -> int:
        return self.tensors.d

    @property
    def D(self) -> int:
        return self.tensors.D

    @property
    def xi_matrix(self) -> np.ndarray:
        return np.diag(self.xi).astype(complex)


def transfer_matrix(matrices: np.ndarray) -> np.ndarray:
    """E = sum_i A_i (x) conj(A_i), acting on row-major vec."""
    return np.einsum('iab,icd->acbd', matrices, matrices.conj()).reshape(
        matrices.shape[1] ** 2, matrices.shape[2] ** 2)


def products(tensors: MpsTensors, L: int) -> np.ndarray:
    """All d**L products A_{i1}...A_{iL}, first site most significant."""
    if L < 1:
        raise InputError(f'block length must be positive, got {L}')
    if tensors.d ** L > PRODUCT_CAP:
        raise InputError(f'd**L = {tensors.d ** L} exceeds cap {PRODUCT_CAP}')
    D = tensors.D
    current = tensors.matrices
    for _ in range(L - 1):
        current = np.einsum('kab,ibc->kiac', current, tensors.matrices).reshape(-1, D, D)
    return current


def gamma_matrix(tensors: MpsTensors, L: int) -> np.ndarray:
    """Matrix of X -> sum_I Tr[X A_I] |I>, columns indexed by matrix units."""
    return products(tensors, L).transpose(0, 2, 1).reshape(tensors.d ** L, tensors.D ** 2)


def g1_span_dim(tensors: MpsTensors, L: int) -> int:
    return numerical_rank(products(tensors, L).reshape(tensors.d ** L, -1), RANK_TOL)


def minimal_l0(tensors: MpsTensors, cap: int = G1_DEFAULT_CAP) -> int:
    target = tensors.D ** 2
    for L in range(1, cap + 1):
        if tensors.d ** L > PRODUCT_CAP:
            break
        if g1_span_dim(tensors, L) == target:
            return L
    raise GenericityError(f'products do not span all {target} matrices up to L = {cap}')


def expand_state(tensors: MpsTensors, num_sites: int,
                 boundary: Optional[np.ndarray] = None) -> np.ndarray:
    """Coefficients Tr[X A_{i1}...A_{iN}] of the (unnormalized) MPS."""
    if tensors.d ** num_sites > STATE_CAP:
        raise InputError(f'd**N = {tensors.d ** num_sites} exceeds cap {STATE_CAP}')
    D = tensors.D
    x = np.eye(D, dtype=complex) if boundary is None else np.asarray(boundary, dtype=complex)
    if x.shape != (D, D):
        raise InputError(f'boundary matrix must be {D}x{D}')
    current = x[None]
    for _ in range(num_sites):
        current = np.einsum('kab,ibc->kiac', current, tensors.matrices).reshape(-1, D, D)
    return np.trace(current, axis1=1, axis2=2)


def _positive_fixed_point(superop: np.ndarray, D: int, label: str) -> np.ndarray:
    w, v = scipy.linalg.eig(superop)
    idx = int(np.argmax(np.abs(w)))
    m = v[:, idx].reshape(D, D)
    tr = np.trace(m)
    if abs(tr) == 0:
        raise GenericityError(f'{label} fixed point is traceless')
    m = hermitize(m * abs(tr) / tr)
    ev = scipy.linalg.eigvalsh(m)
    if ev[0] <= RANK_TOL * ev[-1]:
        raise GenericityError(f'{label} fixed point is not positive definite')
    return m


def _fix_column_phases(u: np.ndarray) -> np.ndarray:
    out = u.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        lead = col[np.argmax(np.abs(col) > 1e-8 * np.max(np.abs(col)))]
        out[:, j] = col * abs(lead) / lead
    return out


def canonical_form(tensors: MpsTensors, cap: int = G1_DEFAULT_CAP) -> CanonicalForm:
    """Rescale, gauge to a unital channel with diagonal positive dual fixed
    point Xi (entries descending). Rejects non-injective tensors."""
    D = tensors.D
    l0 = minimal_l0(tensors, cap)

    eigen = scipy.linalg.eigvals(transfer_matrix(tensors.matrices))
    radius = float(np.max(np.abs(eigen)))
    peripheral = int(np.sum(np.abs(eigen) >= radius * (1 - CHECK_TOL)))
    if peripheral != 1:
        raise GenericityError(f'transfer spectrum has {peripheral} peripheral eigenvalues')
    matrices = tensors.matrices / np.sqrt(radius)

    m = _positive_fixed_point(transfer_matrix(matrices), D, 'right')
    w, v = scipy.linalg.eigh(m)
    root = (v * np.sqrt(w)) @ v.conj().T
    root_inv = (v / np.sqrt(w)) @ v.conj().T
    matrices = np.einsum('ab,ibc,cd->iad', root_inv, matrices, root)

    dual = np.einsum('iba,idc->acbd', matrices.conj(), matrices).reshape(D * D, D * D)
    xi = _positive_fixed_point(dual, D, 'dual')
    xi = xi / np.trace(xi).real
    w, v = scipy.linalg.eigh(xi)
    w, v = w[::-1], _fix_column_phases(v[:, ::-1])
    matrices = np.einsum('ba,ibc,cd->iad', v.conj(), matrices, v)

    result = CanonicalForm(tensors=MpsTensors(matrices), xi=np.real(w), l0=l0, scale=radius)
    _check_canonical(result)
    LOGGER.debug(f'- canonical form: L0={l0}, xi={result.xi}')
    return result


def _check_canonical(form: CanonicalForm):
    a = form.tensors.matrices
    D = form.D
    unital = np.einsum('iab,icb->ac', a, a.conj())
    if np.max(np.abs(unital - np.eye(D))) > CHECK_TOL:
        raise GenericityError('canonical gauge failed: channel is not unital')
    xi = form.xi_matrix
    dual = np.einsum('iba,bc,icd->ad', a.conj(), xi, a)
    if np.max(np.abs(dual - xi)) > CHECK_TOL:
        raise GenericityError('canonical gauge failed: Xi is not a dual fixed point')


def validate_canonical(tensors: MpsTensors, xi: np.ndarray, l0: Optional[int] = None) -> CanonicalForm:
    """Wrap tensors that are already in canonical form."""
    form = CanonicalForm(tensors=tensors, xi=np.asarray(xi, dtype=float),
                         l0=l0 if l0 is not None else minimal_l0(tensors), scale=1.0)
    _check_canonical(form)
    return form


# --- presets ---------------------------------------------------------------

def spin_one_matrices():
    """S_z, S_+, S_- in the basis (m=0, m=+1, m=-1)."""
    sz = np.diag([0.0, 1.0, -1.0]).astype(complex)
    sp = np.zeros((3, 3), dtype=complex)
    sp[1, 0] = sp[0, 2] = np.sqrt(2)
    return sz, sp, sp.conj().T


def aklt_tensors() -> MpsTensors:
    """Spin-1 AKLT tensors, physical basis (m=0, m=+1, m=-1)."""
    sz = np.diag([1.0, -1.0])
    splus = np.array([[0.0, 1.0], [0.0, 0.0]])
    return MpsTensors(np.array([sz, np.sqrt(2) * splus, -np.sqrt(2) * splus.T]))


def random_tensors(d: int, D: int, seed: int) -> MpsTensors:
    rng = np.random.default_rng(seed)
    shape = (d, D, D)
    return MpsTensors((rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2))


def classical_tensors(xi) -> MpsTensors:
    """Tensors with transfer spectrum {1, 0, ...}: site (p, q) carries
    sqrt(xi_q)|p><q|. Already in canonical form with Xi = diag(xi)."""
    xi = np.asarray(xi, dtype=float)
    if xi.ndim != 1 or np.any(xi <= 0):
        raise InputError('xi must be a vector of positive weights')
    xi = xi / np.sum(xi)
    D = xi.size
    mats = np.zeros((D * D, D, D), dtype=complex)
    for p in range(D):
        for q in range(D):
            mats[p * D + q, p, q] = np.sqrt(xi[q])
    return MpsTensors(mats)


def load_tensors(path: str) -> MpsTensors:
    """Read tensors from JSON: ``{"matrices": [[[re or [re, im], ...]]]}``."""
    with open(path, 'r') as fp:
        payload = json.load(fp)
    try:
        raw = np.array(payload['matrices'], dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f'cannot read tensors from {path}: {e}')
    if raw.ndim == 4 and raw.shape[-1] == 2:
        raw = raw[..., 0] + 1j * raw[..., 1]
    return MpsTensors(raw)


def dump_tensors(tensors: MpsTensors, path: str):
    m = tensors.matrices
    with open(path, 'w') as fp:
        json.dump({'matrices': np.stack([m.real, m.imag], axis=-1).tolist()}, fp)

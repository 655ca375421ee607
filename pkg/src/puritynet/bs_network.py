"""Two-copy pairwise beam-splitter measurement statistics.

A 50/50 beam splitter on two identical bosons projects their pair state
onto the symmetric or antisymmetric subspace: both bosons exit in one
spatial mode (symmetric, "+") or one per mode (antisymmetric, "-").  On
two copies rho x rho of an N-site state, correlating the +/- outcomes of
all N splitters yields 2^N joint probabilities

    P_s = 2^{-N} sum_{T subseteq {1..N}} (prod_{i in T} s_i) tr(rho_T^2),

a sign-weighted subset sum over the reduction purities (empty subset term
1).  This is a Walsh-Hadamard transform of the purity table, and the
transform is its own inverse up to 2^{-N}, so the purities are recovered
exactly from the probabilities.

Two computation paths are kept deliberately: the transform fast path, and
an explicit two-copy projector construction (dimension 4^N) that validates
the algebra for small N.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .qstate import CapacityError, DensityOperator, check_qubit_capacity, purity
from .separability import SubsetPurityMap, all_subset_purities

#: Sign convention: "+" is the symmetric projector (I + V)/2, whose
#: expectation on rho x rho is (1 + tr rho^2)/2.


def sign_vectors(n_sites: int) -> list[tuple[int, ...]]:
    """All sign vectors in a fixed order: site N varies fastest, + before -."""
    return list(itertools.product((+1, -1), repeat=n_sites))


def _subset_mask(subset, n_sites: int) -> int:
    # site i occupies bit (n_sites - i): site 1 is the most significant bit
    mask = 0
    for site in subset:
        mask |= 1 << (n_sites - site)
    return mask


def _mask_subset(mask: int, n_sites: int) -> tuple[int, ...]:
    return tuple(i for i in range(1, n_sites + 1) if mask & (1 << (n_sites - i)))


def _sign_mask(signs, n_sites: int) -> int:
    mask = 0
    for i, s in enumerate(signs, start=1):
        if s == -1:
            mask |= 1 << (n_sites - i)
    return mask


def walsh_hadamard(values: np.ndarray) -> np.ndarray:
    """In-place-style fast Walsh-Hadamard transform (Sylvester order).

    out[j] = sum_k (-1)^{popcount(j & k)} values[k]; self-inverse up to the
    factor len(values).
    """
    out = np.array(values, dtype=float)
    if out.ndim != 1 or out.size & (out.size - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < out.size:
        for start in range(0, out.size, 2 * h):
            a = out[start : start + h].copy()
            b = out[start + h : start + 2 * h]
            out[start : start + h] = a + b
            out[start + h : start + 2 * h] = a - b
        h *= 2
    return out


@dataclass(frozen=True)
class JointSignProbabilityTable:
    """Probabilities of the 2^N joint +/- outcomes, keyed by sign vector."""

    n_sites: int
    probabilities: dict[tuple[int, ...], float]

    def __post_init__(self):
        if len(self.probabilities) != 2**self.n_sites:
            raise ValueError(
                f"need all {2**self.n_sites} sign vectors, got {len(self.probabilities)}"
            )
        for signs in self.probabilities:
            if len(signs) != self.n_sites or any(s not in (-1, +1) for s in signs):
                raise ValueError(f"bad sign vector {signs}")

    def probability(self, signs) -> float:
        return self.probabilities[tuple(signs)]

    def total(self) -> float:
        return float(sum(self.probabilities.values()))

    def to_array(self) -> np.ndarray:
        """Vector indexed by the minus-mask of the sign vector."""
        out = np.empty(2**self.n_sites)
        for signs, p in self.probabilities.items():
            out[_sign_mask(signs, self.n_sites)] = p
        return out

    @classmethod
    def from_array(cls, n_sites: int, values: np.ndarray) -> "JointSignProbabilityTable":
        probs = {}
        for signs in sign_vectors(n_sites):
            probs[signs] = float(values[_sign_mask(signs, n_sites)])
        return cls(n_sites, probs)


@dataclass(frozen=True)
class PairProjectionProbabilities:
    p_plus: float
    p_minus: float


def pair_projection_probabilities(rho_j: DensityOperator) -> PairProjectionProbabilities:
    """Symmetric/antisymmetric projection probabilities for one site pair.

    P_+/- = (1 +/- tr(rho_j^2)) / 2 on the two-copy state rho_j x rho_j.
    Identical pure bosons never antisymmetrize (P_- = 0); the maximally
    mixed qubit gives P_- = 1/4.
    """
    if rho_j.n_qubits != 1:
        raise ValueError("expected a single-qubit state")
    p = purity(rho_j)
    return PairProjectionProbabilities((1 + p) / 2, (1 - p) / 2)


@dataclass(frozen=True)
class TripletSingletWeights:
    """Weights of the two-boson internal-state channels after the splitter.

    The triplet channels are labelled by the unordered internal-state pair
    (aa, ab+ba symmetric, bb) in the computational basis of the two copies,
    with a = |0> and b = |1>; w_singlet is the antisymmetric (ab-ba) weight
    and equals the pair's P_- outcome probability.
    """

    w_aa: float
    w_ab: float
    w_bb: float
    w_singlet: float

    def total(self) -> float:
        return self.w_aa + self.w_ab + self.w_bb + self.w_singlet


_TRIPLET_AB = np.array([0, 1, 1, 0]) / np.sqrt(2)
_SINGLET = np.array([0, 1, -1, 0]) / np.sqrt(2)


def triplet_singlet_weights(rho_j: DensityOperator) -> TripletSingletWeights:
    """Expectations of the four channel projectors on rho_j x rho_j."""
    if rho_j.n_qubits != 1:
        raise ValueError("expected a single-qubit state")
    two = np.kron(rho_j.matrix, rho_j.matrix)
    return TripletSingletWeights(
        w_aa=float(two[0, 0].real),
        w_ab=float(np.vdot(_TRIPLET_AB, two @ _TRIPLET_AB).real),
        w_bb=float(two[3, 3].real),
        w_singlet=float(np.vdot(_SINGLET, two @ _SINGLET).real),
    )


def sign_probabilities_from_purities(purities: SubsetPurityMap) -> JointSignProbabilityTable:
    """Forward sign transform: purity table -> joint outcome probabilities.

    Accepts any SubsetPurityMap, physical or not; the involution with
    :func:`purities_from_probabilities` holds regardless.
    """
    n = purities.n_sites
    values = np.empty(2**n)
    values[0] = 1.0  # empty subset sentinel
    for subset, p in purities.entries.items():
        values[_subset_mask(subset, n)] = p
    transformed = walsh_hadamard(values) / 2**n
    return JointSignProbabilityTable.from_array(n, transformed)


def joint_sign_probabilities(rho: DensityOperator, cap: int | None = None) -> JointSignProbabilityTable:
    """Joint +/- outcome probabilities of the N-splitter network on rho x rho."""
    check_qubit_capacity(rho.n_qubits, cap)
    return sign_probabilities_from_purities(all_subset_purities(rho, cap=cap))


def purities_from_probabilities(table: JointSignProbabilityTable, norm_atol: float = 1e-8) -> SubsetPurityMap:
    """Invert the joint probability table back to subset purities.

    purity(rho_T) = sum_s (prod_{i in T} s_i) P_s; the transform is its own
    inverse up to normalization.  Rejects tables whose entries do not sum
    to 1 within ``norm_atol``, reporting the deficit.
    """
    total = table.total()
    if abs(total - 1.0) > norm_atol:
        raise ValueError(
            f"probability table sums to {total!r}, deficit {1.0 - total:+.3e} "
            f"exceeds tolerance {norm_atol}"
        )
    n = table.n_sites
    back = walsh_hadamard(table.to_array())
    entries = {}
    for mask in range(1, 2**n):
        entries[_mask_subset(mask, n)] = float(back[mask])
    return SubsetPurityMap(n, entries)


def _swap_operator(site: int, n_sites: int) -> np.ndarray:
    """Permutation matrix exchanging site ``site`` between the two copies.

    The two-copy basis index is x * 2^N + y with x, y the copy-one and
    copy-two computational indices.
    """
    dim = 4**n_sites
    bit = 1 << (n_sites - site)
    op = np.zeros((dim, dim))
    for x in range(2**n_sites):
        for y in range(2**n_sites):
            xs = (x & ~bit) | (y & bit)
            ys = (y & ~bit) | (x & bit)
            op[xs * 2**n_sites + ys, x * 2**n_sites + y] = 1.0
    return op


def projector_expectation_oracle(rho: DensityOperator, signs, cap: int = 4) -> float:
    """Explicit two-copy construction of one joint outcome probability.

    Builds rho x rho and the per-site swap operators V_i, forms
    prod_i (I + s_i V_i)/2 and returns its expectation.  Kept dense in
    dimension 4^N, so limited to small N; exists purely to cross-validate
    the transform fast path.
    """
    n = rho.n_qubits
    signs = tuple(signs)
    if len(signs) != n:
        raise ValueError(f"sign vector length {len(signs)} does not match {n} sites")
    if n > cap:
        raise CapacityError(f"explicit two-copy oracle limited to {cap} sites, got {n}")
    two = np.kron(rho.matrix, rho.matrix)
    dim = 4**n
    proj = np.eye(dim)
    for site, s in enumerate(signs, start=1):
        proj = proj @ (np.eye(dim) + s * _swap_operator(site, n)) / 2
    return float(np.trace(proj @ two).real)

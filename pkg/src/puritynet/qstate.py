"""Dense linear algebra for finite-dimensional quantum states.

Construction, composition, reduction and purity of qubit density operators.
Sites are labelled 1..N and map big-endian onto the amplitude index: site 1
is the most significant bit of the computational-basis index, so |x1 x2 x3>
has index x1*4 + x2*2 + x3 for three qubits.

All objects are immutable after construction and all operations are pure
functions, so everything here is safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Largest total system size (in qubits) that dense operations accept by
#: default.  A 14-qubit density operator is a 16384 x 16384 complex matrix
#: (~4 GiB); beyond that dense storage stops being sensible.
DEFAULT_QUBIT_CAP = 14

#: Tolerances for the structural invariants of a density operator.
HERMITICITY_ATOL = 1e-12
TRACE_ATOL = 1e-12
#: Eigenvalue floor for the positivity check.  Repeated partial traces
#: accumulate rounding, so exact nonnegativity is too strict.
EIGENVALUE_FLOOR = -1e-10


class CapacityError(ValueError):
    """Requested system size exceeds the configured dense-storage cap."""


def check_qubit_capacity(n_qubits: int, cap: int | None = None) -> None:
    """Raise :class:`CapacityError` if ``n_qubits`` exceeds the cap."""
    cap = DEFAULT_QUBIT_CAP if cap is None else cap
    if n_qubits > cap:
        raise CapacityError(
            f"{n_qubits} qubits (dimension 2^{n_qubits}) exceeds the cap of "
            f"{cap} qubits; raise the cap explicitly if this is intended"
        )


def subset_index(members, n_sites: int) -> tuple[int, ...]:
    """Normalize a collection of site labels to a sorted tuple.

    Labels are 1-based.  Duplicates, out-of-range labels and (by default)
    empty collections are rejected; the empty tuple is reserved as the
    full-trace sentinel and is produced only by code that means it.
    """
    members = tuple(sorted(members))
    if len(set(members)) != len(members):
        raise ValueError(f"duplicate site labels in {members}")
    if not members:
        raise ValueError("empty subset (the full trace is not a reduction)")
    if members[0] < 1 or members[-1] > n_sites:
        raise ValueError(f"site labels {members} outside 1..{n_sites}")
    return members


@dataclass(frozen=True)
class PureState:
    """Normalized state vector of ``n_qubits`` qubits.

    Attributes
    ----------
    n_qubits : int
        Number of sites.
    amplitudes : np.ndarray
        Complex vector of length ``2**n_qubits`` with unit norm.
    """

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.n_qubits,):
            raise ValueError(
                f"amplitude vector of shape {amps.shape} does not match "
                f"{self.n_qubits} qubits"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state vector not normalized: |norm-1| = {abs(norm-1):.3e}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex)
        n = int(round(np.log2(amps.size)))
        if 2**n != amps.size:
            raise ValueError(f"amplitude vector length {amps.size} is not a power of two")
        return cls(n, amps)

    def to_density(self) -> "DensityOperator":
        return DensityOperator(self.n_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, unit-trace operator on ``n_qubits`` qubits.

    Hermiticity and trace are checked on construction (O(dim^2)); the
    positivity of the spectrum is an invariant preserved by the operations
    in this module and is verified on demand by :func:`validate`, since an
    eigendecomposition on every construction would dominate run time.
    """

    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.ascontiguousarray(self.matrix, dtype=complex)
        dim = 2**self.n_qubits
        if mat.shape != (dim, dim):
            raise ValueError(f"matrix of shape {mat.shape} does not match {self.n_qubits} qubits")
        herm = np.max(np.abs(mat - mat.conj().T))
        if herm > HERMITICITY_ATOL:
            raise ValueError(f"matrix not Hermitian: max |rho - rho^dag| = {herm:.3e}")
        tr = mat.trace()
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"trace deviates from 1 by {abs(tr - 1.0):.3e}")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    @classmethod
    def from_pure(cls, state: PureState) -> "DensityOperator":
        return state.to_density()

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "DensityOperator":
        d = 2**n_qubits
        return cls(n_qubits, np.eye(d, dtype=complex) / d)


def tensor(parts: list[DensityOperator], cap: int | None = None) -> DensityOperator:
    """Tensor product of density operators, in the given site order.

    The result acts on the concatenation of the parts' sites; its dimension
    is the product of the part dimensions.  Raises :class:`CapacityError`
    when the total qubit count exceeds the cap (default
    ``DEFAULT_QUBIT_CAP``).
    """
    if not parts:
        raise ValueError("tensor() needs at least one factor")
    n_total = sum(p.n_qubits for p in parts)
    check_qubit_capacity(n_total, cap)
    mat = parts[0].matrix
    for p in parts[1:]:
        mat = np.kron(mat, p.matrix)
    return DensityOperator(n_total, mat)


def partial_trace(rho: DensityOperator, keep) -> DensityOperator:
    """Reduce ``rho`` to the sites in ``keep``, tracing out the rest.

    Parameters
    ----------
    rho : DensityOperator
    keep : collection of int
        Nonempty set of 1-based site labels to retain.  The reduced
        operator acts on those sites in ascending label order.
    """
    n = rho.n_qubits
    keep = subset_index(keep, n)
    keep_axes = [k - 1 for k in keep]
    traced_axes = [i for i in range(n) if i not in keep_axes]

    t = rho.matrix.reshape((2,) * (2 * n))
    remaining = n
    for ax in sorted(traced_axes, reverse=True):
        t = np.trace(t, axis1=ax, axis2=ax + remaining)
        remaining -= 1
    d = 2 ** len(keep)
    reduced = t.reshape(d, d)
    # Re-symmetrize: tracing can leave ~1e-16 Hermiticity dust.
    reduced = (reduced + reduced.conj().T) / 2
    return DensityOperator(len(keep), reduced)


def purity(rho: DensityOperator) -> float:
    """tr(rho^2), computed as the squared Frobenius norm.

    For Hermitian rho, tr(rho^2) = sum_ij |rho_ij|^2, which avoids the
    O(dim^3) matrix product.  Hermiticity is guaranteed by the
    DensityOperator invariant.
    """
    return float(np.vdot(rho.matrix, rho.matrix).real)


@dataclass(frozen=True)
class ValidationReport:
    """Deviations of a matrix from the density-operator invariants."""

    hermiticity_deviation: float
    trace_deviation: float
    min_eigenvalue: float
    passed: bool

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return (
            f"[{status}] |rho-rho^dag|_max = {self.hermiticity_deviation:.3e}, "
            f"|tr-1| = {self.trace_deviation:.3e}, "
            f"min eigenvalue = {self.min_eigenvalue:.3e}"
        )


def validate(matrix) -> ValidationReport:
    """Full diagnostic check of a candidate density matrix.

    Accepts a raw matrix or a DensityOperator and reports the Hermiticity
    deviation, trace deviation and minimum eigenvalue, with pass/fail
    against the module tolerances.  Never raises on bad input.
    """
    mat = matrix.matrix if isinstance(matrix, DensityOperator) else np.asarray(matrix, dtype=complex)
    herm = float(np.max(np.abs(mat - mat.conj().T)))
    tr = float(abs(mat.trace() - 1.0))
    min_eig = float(np.linalg.eigvalsh((mat + mat.conj().T) / 2).min())
    passed = herm <= HERMITICITY_ATOL and tr <= TRACE_ATOL and min_eig >= EIGENVALUE_FLOOR
    return ValidationReport(herm, tr, min_eig, passed)


def random_state(n_qubits: int, rank: int, seed: int) -> DensityOperator:
    """Seeded random density operator of the given rank.

    rank 1 yields a Haar-random pure state; rank r > 1 traces a Haar-random
    pure state on system x (r-dimensional ancilla) over the ancilla, the
    standard construction for rank-controlled mixed states.  Output is
    bitwise reproducible for a fixed seed.
    """
    dim = 2**n_qubits
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must be in 1..{dim}, got {rank}")
    rng = np.random.default_rng(seed)
    block = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    block /= np.linalg.norm(block)
    mat = block @ block.conj().T
    mat = (mat + mat.conj().T) / 2
    mat /= mat.trace().real
    return DensityOperator(n_qubits, mat)


def random_pure_state(n_qubits: int, seed: int) -> PureState:
    """Seeded Haar-random pure state vector."""
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(2**n_qubits) + 1j * rng.standard_normal(2**n_qubits)
    return PureState(n_qubits, amps / np.linalg.norm(amps))

"""Purity-chain separability tests and the CHSH comparison benchmark.

Every separable state satisfies tr(rho_full^2) <= tr(rho_T^2) for each of
its reductions rho_T, so a drop in purity along any nested chain of
subsets certifies entanglement.  This module evaluates those chains over
precomputed subset-purity tables and provides the maximal two-qubit CHSH
expectation (correlation-matrix criterion) as the conventional benchmark
to compare detection power against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .qstate import DensityOperator, check_qubit_capacity, partial_trace, purity, subset_index
from .states import ClusterFamilySpec, cluster_family_state, collision_phase_state

#: Purity differences below this are numerical noise, not violations.
#: Purities carry ~1e-12 arithmetic error; a factor-1000 margin.
VIOLATION_THRESHOLD = 1e-9


@dataclass(frozen=True)
class SubsetPurityMap:
    """Purities tr(rho_T^2) for every nonempty subset T of {1..N}.

    ``entries`` maps sorted site tuples to purities; the empty subset acts
    as a sentinel with purity 1 (the trace itself) and is not stored.
    Construction checks completeness of the subset lattice only; the
    physical value range is a property of maps derived from actual states
    and is checked separately by :meth:`is_physical`, because the sign
    transform in ``bs_network`` must also round-trip unphysical tables.
    """

    n_sites: int
    entries: dict[tuple[int, ...], float]

    def __post_init__(self):
        expected = 2**self.n_sites - 1
        if len(self.entries) != expected:
            raise ValueError(
                f"need all {expected} nonempty subsets of 1..{self.n_sites}, "
                f"got {len(self.entries)} entries"
            )
        for subset in self.entries:
            subset_index(subset, self.n_sites)

    def purity(self, subset) -> float:
        subset = tuple(sorted(subset))
        if not subset:
            return 1.0
        return self.entries[subset]

    def is_physical(self, atol: float = 1e-12) -> bool:
        return all(-atol <= v <= 1 + atol for v in self.entries.values())

    def subsets(self) -> list[tuple[int, ...]]:
        """All nonempty subsets in (size, lexicographic) order."""
        sites = range(1, self.n_sites + 1)
        return [s for k in range(1, self.n_sites + 1) for s in itertools.combinations(sites, k)]


def all_subset_purities(rho: DensityOperator, cap: int | None = None) -> SubsetPurityMap:
    """Purity of every reduction of ``rho``, including the full set."""
    n = rho.n_qubits
    check_qubit_capacity(n, cap)
    full = tuple(range(1, n + 1))
    entries: dict[tuple[int, ...], float] = {}
    for k in range(1, n + 1):
        for subset in itertools.combinations(full, k):
            if subset == full:
                entries[subset] = purity(rho)
            else:
                entries[subset] = purity(partial_trace(rho, subset))
    return SubsetPurityMap(n, entries)


@dataclass(frozen=True)
class ChainLink:
    larger: tuple[int, ...]
    smaller: tuple[int, ...]
    violation: float  # purity(larger) - purity(smaller)


@dataclass(frozen=True)
class ChainReport:
    """Purity differences along one nested chain of subsets."""

    chain: tuple[tuple[int, ...], ...]
    links: tuple[ChainLink, ...]
    threshold: float = VIOLATION_THRESHOLD
    violations: tuple[ChainLink, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "violations", tuple(l for l in self.links if l.violation > self.threshold)
        )

    @property
    def entangled(self) -> bool:
        return bool(self.violations)

    @property
    def max_violation(self) -> float:
        return max((l.violation for l in self.links), default=0.0)


def check_chain(purities: SubsetPurityMap, chain, threshold: float = VIOLATION_THRESHOLD) -> ChainReport:
    """Evaluate the purity inequality along a strictly nested chain.

    ``chain`` lists subsets from largest to smallest; each must be a strict
    subset of its predecessor.  A separable state never produces a link
    with purity(larger) > purity(smaller) beyond numerical noise, so any
    link above ``threshold`` flags entanglement.
    """
    norm_chain = [subset_index(s, purities.n_sites) for s in chain]
    if len(norm_chain) < 2:
        raise ValueError("a chain needs at least two subsets")
    for big, small in zip(norm_chain, norm_chain[1:]):
        if not (set(small) < set(big)):
            raise ValueError(f"chain not strictly nested: {small} is not a strict subset of {big}")
    links = tuple(
        ChainLink(big, small, purities.purity(big) - purities.purity(small))
        for big, small in zip(norm_chain, norm_chain[1:])
    )
    return ChainReport(tuple(norm_chain), links, threshold)


def maximal_chains(n_sites: int) -> list[tuple[tuple[int, ...], ...]]:
    """Every maximal nested chain {1..N} > ... > {i}, one per removal order."""
    full = tuple(range(1, n_sites + 1))
    chains = []
    for order in itertools.permutations(full, n_sites - 1):
        chain = [full]
        current = set(full)
        for site in order:
            current = current - {site}
            chain.append(tuple(sorted(current)))
        chains.append(tuple(chain))
    return chains


def left_to_right_chain(n_sites: int) -> tuple[tuple[int, ...], ...]:
    """{1..N} > {1..N-1} > ... > {1}."""
    return tuple(tuple(range(1, k + 1)) for k in range(n_sites, 0, -1))


@dataclass(frozen=True)
class ViolationCurvePoint:
    """The three purity differences plotted for the three-site family."""

    phi: float
    v1: float  # purity(123) - purity(12)
    v2: float  # purity(12)  - purity(1)
    v3: float  # purity(12)  - purity(2)


def fig2a_violations(phi: float, n_sites: int = 3, family: str = "collision") -> ViolationCurvePoint:
    """V1, V2, V3 of the three-site product-to-cluster family at phase phi.

    ``family`` selects the interpolating state: "collision" (default) uses
    the state generated by nearest-neighbour controlled-phase dynamics,
    which separates the edge and middle reductions (V3 > 0 away from the
    endpoints); "superposition" uses the idealized two-term formula, whose
    proper reductions all share one purity, leaving V2 = V3 = 0
    identically.  Both give V1 = 0 at phi = 0 and V1 = 1/2 at phi = pi.
    """
    if n_sites != 3:
        raise ValueError("the three-curve layout is defined for exactly 3 sites")
    if family == "collision":
        psi = collision_phase_state(3, phi)
    elif family == "superposition":
        psi = cluster_family_state(ClusterFamilySpec(3, phi))
    else:
        raise ValueError(f"unknown family {family!r}; use 'collision' or 'superposition'")
    purities = all_subset_purities(psi.to_density())
    p123 = purities.purity((1, 2, 3))
    p12 = purities.purity((1, 2))
    return ViolationCurvePoint(
        phi=phi,
        v1=p123 - p12,
        v2=p12 - purities.purity((1,)),
        v3=p12 - purities.purity((2,)),
    )


_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def correlation_matrix(rho: DensityOperator) -> np.ndarray:
    """3x3 Pauli correlation matrix T_ij = tr(rho sigma_i x sigma_j)."""
    if rho.n_qubits != 2:
        raise ValueError("correlation matrix is defined for exactly 2 qubits")
    T = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            T[i, j] = np.trace(rho.matrix @ np.kron(_PAULI[i], _PAULI[j])).real
    return T


def chsh_max(rho: DensityOperator) -> float:
    """Maximal CHSH expectation over all measurement settings.

    2 sqrt(m1 + m2) with m1 >= m2 the two largest eigenvalues of T^T T,
    T the Pauli correlation matrix.  Closed form, deterministic; bounded
    by 2 sqrt(2).
    """
    T = correlation_matrix(rho)
    eigs = np.sort(np.linalg.eigvalsh(T.T @ T))
    return float(2 * math.sqrt(max(0.0, eigs[-1] + eigs[-2])))


def chsh_threshold_phi(family: str = "superposition", lo: float = 1e-4, hi: float = math.pi / 2) -> float:
    """Smallest phi at which the two-site family's chsh_max exceeds 2.

    Bisects chsh_max(state(phi)) - 2 on [lo, hi].  For a pure family this
    sits at the edge of the entangled region: every entangled pure
    two-qubit state beats the classical bound under optimal settings, so
    the threshold collapses to phi ~ 0 rather than any interior value.
    """

    def gap(phi: float) -> float:
        if family == "superposition":
            psi = cluster_family_state(ClusterFamilySpec(2, phi))
        elif family == "collision":
            psi = collision_phase_state(2, phi)
        else:
            raise ValueError(f"unknown family {family!r}")
        return chsh_max(psi.to_density()) - 2.0

    if gap(lo) > 0:
        return lo
    if gap(hi) <= 0:
        raise ValueError(f"no CHSH violation up to phi = {hi}")
    for _ in range(80):
        mid = (lo + hi) / 2
        if gap(mid) > 0:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2

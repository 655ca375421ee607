"""Benchmark entangled states and the closed-form cat-state purity.

Provides open-chain linear cluster states, the two interpolating families
between a product state and the cluster state (the idealized two-term
superposition and the state that nearest-neighbour controlled-phase
dynamics actually generates), GHZ states, and macroscopic-superposition
(cat) states together with the closed-form purity of their reductions and
its inversion back to the distinctness parameter epsilon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qstate import PureState, check_qubit_capacity, partial_trace, purity


class InversionError(ValueError):
    """A measured purity cannot be inverted to a distinctness parameter."""


def _bits(x: int, n: int) -> list[int]:
    return [(x >> (n - 1 - i)) & 1 for i in range(n)]


def linear_cluster(n: int, cap: int | None = None) -> PureState:
    """Open-chain 1D cluster state: CZ between neighbours on |+>^n.

    Amplitudes are 2^(-n/2) * (-1)^(sum_j x_j x_{j+1}).
    """
    if n < 2:
        raise ValueError("cluster states need at least 2 sites")
    check_qubit_capacity(n, cap)
    amps = np.empty(2**n, dtype=complex)
    for x in range(2**n):
        b = _bits(x, n)
        amps[x] = (-1) ** sum(b[i] * b[i + 1] for i in range(n - 1))
    return PureState(n, amps / math.sqrt(2**n))


@dataclass(frozen=True)
class ClusterFamilySpec:
    """Parameters of the product-to-cluster interpolation."""

    n_sites: int
    phi: float

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError("family needs at least 2 sites")
        check_qubit_capacity(self.n_sites)


def cluster_family_state(spec: ClusterFamilySpec) -> PureState:
    """Two-term superposition (1+e^{i phi})/2 |0..0> + (1-e^{i phi})/2 |cluster>.

    phi = 0 gives exactly |0..0>, phi = pi exactly the cluster state.  The
    result is renormalized, although the two-term form is already exactly
    normalized for every (n, phi): the cross term (1+e^{-i phi})(1-e^{i phi})/4
    is purely imaginary while <0..0|cluster> is real, so the overlap
    contributes nothing to the norm.
    """
    n, phi = spec.n_sites, spec.phi
    u = (1 + np.exp(1j * phi)) / 2
    v = (1 - np.exp(1j * phi)) / 2
    amps = v * linear_cluster(n).amplitudes.copy()
    amps[0] += u
    return PureState(n, amps / np.linalg.norm(amps))


def collision_phase_state(n: int, phi: float, cap: int | None = None) -> PureState:
    """State generated by nearest-neighbour controlled-phase dynamics.

    Applies the diagonal phase e^{i phi * (number of adjacent 11 pairs)} to
    the uniform superposition |+>^n.  At phi = 0 this is the product state
    |+>^n, at phi = pi exactly the linear cluster state; in between it is
    the partially entangled state that controlled-interaction dynamics
    produce on a chain.

    This differs from :func:`cluster_family_state` for n >= 3: the two-term
    superposition keeps only the parity of the adjacent-pair count, which
    changes the purity profile of its reductions (all proper-subset
    purities of the superposition family coincide, so only the full-vs-pair
    violation is visible there).
    """
    if n < 2:
        raise ValueError("need at least 2 sites")
    check_qubit_capacity(n, cap)
    amps = np.empty(2**n, dtype=complex)
    for x in range(2**n):
        b = _bits(x, n)
        w = sum(b[i] * b[i + 1] for i in range(n - 1))
        amps[x] = np.exp(1j * phi * w)
    return PureState(n, amps / math.sqrt(2**n))


def ghz(n: int, cap: int | None = None) -> PureState:
    """(|0..0> + |1..1>)/sqrt(2)."""
    if n < 2:
        raise ValueError("GHZ states need at least 2 sites")
    check_qubit_capacity(n, cap)
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = amps[-1] = 1 / math.sqrt(2)
    return PureState(n, amps)


@dataclass(frozen=True)
class CatSpec:
    """Derived parameters of a two-branch macroscopic superposition.

    gamma = |<phi1|phi2>|^2, epsilon^2 = 1 - gamma, K is the squared norm
    of the unnormalized branch sum, and S = n * epsilon^2 is the effective
    size relative to an n-party GHZ state (for which epsilon = 1).
    """

    n_sites: int
    phi1: PureState
    phi2: PureState
    overlap: complex
    gamma: float
    epsilon: float
    K: float
    effective_size: float


def cat_state(n: int, phi1: PureState, phi2: PureState, cap: int | None = None) -> tuple[PureState, CatSpec]:
    """Superposition (|phi1>^n + |phi2>^n)/sqrt(K) of two product branches.

    K = 2 + 2 Re(<phi1|phi2>^n) is exactly the squared norm of the branch
    sum, so dividing by sqrt(K) normalizes.  Raises
    :class:`InversionError`-unrelated ValueError when the branches cancel
    (K ~ 0, e.g. antipodal branches at odd n).
    """
    if n < 2:
        raise ValueError("cat states need at least 2 sites")
    if phi1.n_qubits != 1 or phi2.n_qubits != 1:
        raise ValueError("branch states must be single-qubit")
    check_qubit_capacity(n, cap)

    overlap = complex(np.vdot(phi1.amplitudes, phi2.amplitudes))
    K = float(2 + 2 * (overlap**n).real)
    if K <= 1e-12:
        raise ValueError(f"degenerate superposition: branch sum has squared norm {K:.3e}")

    branch1 = phi1.amplitudes
    branch2 = phi2.amplitudes
    for _ in range(n - 1):
        branch1 = np.kron(branch1, phi1.amplitudes)
        branch2 = np.kron(branch2, phi2.amplitudes)
    amps = (branch1 + branch2) / math.sqrt(K)

    gamma = abs(overlap) ** 2
    epsilon = math.sqrt(max(0.0, 1.0 - gamma))
    spec = CatSpec(
        n_sites=n,
        phi1=phi1,
        phi2=phi2,
        overlap=overlap,
        gamma=gamma,
        epsilon=epsilon,
        K=K,
        effective_size=n * epsilon**2,
    )
    return PureState(n, amps / np.linalg.norm(amps)), spec


def cat_purity_closed_form(n: int, m: int, gamma: float) -> float:
    """Purity of the cat state reduced by m of its n subsystems.

    (1 + gamma^m + gamma^n + 4 gamma^{n/2} + gamma^{n-m}) /
    (2 (1 + gamma^{n/2})^2),  gamma = |<phi1|phi2>|^2.

    Exact for real nonnegative branch overlap, where gamma^{n/2} equals the
    overlap to the n-th power; for complex overlaps use a brute-force
    reduction of the constructed state instead.  Identities: 1 at m = 0 for
    every gamma, and 1/2 at gamma = 0 for 0 < m < n.
    """
    if not 0 <= m <= n:
        raise ValueError(f"m must be in 0..{n}, got {m}")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    half = gamma ** (n / 2)
    return (1 + gamma**m + gamma**n + 4 * half + gamma ** (n - m)) / (2 * (1 + half) ** 2)


def cat_reduced_purity_brute_force(n: int, phi1: PureState, phi2: PureState, m: int) -> float:
    """Purity of the m-fold reduction by explicit construction and partial trace.

    Complements the closed form; the only route for complex overlaps.
    Limited to small n by the dense 2^n construction.
    """
    psi, _ = cat_state(n, phi1, phi2)
    rho = psi.to_density()
    if m == 0:
        return purity(rho)
    if m == n:
        return 1.0
    return purity(partial_trace(rho, range(1, n - m + 1)))


def estimate_epsilon(purity_measured: float, n_sites: int, n_lost: float, gamma_tol: float = 1e-10) -> float:
    """Invert the closed-form purity to the distinctness parameter epsilon.

    Finds the gamma in [0, 1] with cat_purity_closed_form(n_sites, n_lost,
    gamma) = purity_measured by bisection (the purity is strictly
    increasing in gamma for 0 < n_lost < n_sites) and returns
    sqrt(1 - gamma).  n_lost may be fractional, e.g. a mean over runs.

    Raises :class:`InversionError` when the reduction count carries no
    information (n_lost <= 0: the purity is identically 1) or the measured
    purity falls outside the achievable band [1/2, 1].
    """
    if not 0 < n_lost < n_sites:
        raise InversionError(
            f"reduction count n={n_lost} outside (0, {n_sites}): the purity of a "
            "cat state reduced by 0 subsystems is 1 for every epsilon, so no "
            "inversion is possible"
        )
    lo_val = cat_purity_closed_form(n_sites, n_lost, 0.0)
    hi_val = cat_purity_closed_form(n_sites, n_lost, 1.0)
    slack = 1e-9
    if not lo_val - slack <= purity_measured <= hi_val + slack:
        raise InversionError(
            f"purity {purity_measured} outside the achievable band "
            f"[{lo_val}, {hi_val}] for N={n_sites}, n={n_lost}"
        )

    lo, hi = 0.0, 1.0
    while hi - lo > gamma_tol:
        mid = (lo + hi) / 2
        if cat_purity_closed_form(n_sites, n_lost, mid) < purity_measured:
            lo = mid
        else:
            hi = mid
    gamma = (lo + hi) / 2
    return math.sqrt(max(0.0, 1.0 - gamma))

"""Second-quantized simulation of the two-row optical-lattice network.

The physical layout is N lattice-site columns, each holding a vertical
pair of sites (rows I and II); every boson carries one of two long-lived
internal states a, b.  Row I holds copy one of the qubit register, row II
copy two, with internal state a = |0> and b = |1>.

Lowering the barrier between the rows turns on vertical hopping

    H_hop = sum_j -J (aI_j^dag aII_j + bI_j^dag bII_j + h.c.),

which, run for exactly t = pi/(4J), implements a 50/50 beam splitter on
every column: annihilation operators map as a_I -> (a_I - i a_II)/sqrt(2)
(creation operators pick up the conjugate +i).  On-site interactions

    H_int = sum_{row,j} U_a/2 n_a(n_a-1) + U_b/2 n_b(n_b-1) + U_ab n_a n_b

are diagonal in the occupation basis; with U_a = U_b = U_ab = U a site-row
holding two bosons acquires the phase theta = U*tau during a hold of
length tau while singly occupied site-rows acquire none, which is what
makes double occupancy observable.

Everything is dense: states live on the fixed-total-boson Fock basis and
evolution goes through an eigendecomposition of the (Hermitian)
Hamiltonian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qstate import CapacityError, DensityOperator

#: Default bound on the Fock-basis dimension.
DEFAULT_FOCK_CAP = 200_000

ROWS = ("I", "II")
INTERNALS = ("a", "b")


@dataclass(frozen=True)
class ModeIndex:
    """One bosonic mode: (site column, row, internal state)."""

    site: int
    row: str
    internal: str

    def flat(self) -> int:
        return 4 * (self.site - 1) + 2 * ROWS.index(self.row) + INTERNALS.index(self.internal)


def mode_index(site: int, row: str, internal: str) -> int:
    """Flat mode number; site-major, then row (I, II), then internal (a, b)."""
    return ModeIndex(site, row, internal).flat()


def mode_label(flat: int) -> ModeIndex:
    site, rest = divmod(flat, 4)
    row, internal = divmod(rest, 2)
    return ModeIndex(site + 1, ROWS[row], INTERNALS[internal])


@dataclass(frozen=True)
class LatticeParams:
    """Couplings and timings of the two-row lattice.

    ``t_bs`` defaults to pi/(4 J), the hold time that realizes the 50/50
    splitter.  ``theta`` is defined when all three interaction strengths
    coincide.
    """

    n_sites: int
    J: float = 1.0
    U_a: float = 0.0
    U_b: float = 0.0
    U_ab: float = 0.0
    tau: float = 0.0
    T_bs: float | None = None

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("need at least one site column")
        if self.J <= 0:
            raise ValueError("hopping energy J must be positive")

    @property
    def t_bs(self) -> float:
        return math.pi / (4 * self.J) if self.T_bs is None else self.T_bs

    @property
    def n_modes(self) -> int:
        return 4 * self.n_sites

    @property
    def theta(self) -> float:
        if not (self.U_a == self.U_b == self.U_ab):
            raise ValueError("theta = U*tau is defined only for equal interaction strengths")
        return self.U_a * self.tau


@dataclass(frozen=True)
class FockBasis:
    """Deterministic enumeration of occupation vectors with fixed total."""

    n_modes: int
    total_bosons: int
    states: tuple[tuple[int, ...], ...]
    index: dict[tuple[int, ...], int] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.states)


def build_fock_basis(n_modes: int, total_bosons: int, cap: int | None = None) -> FockBasis:
    """All occupation vectors of ``total_bosons`` over ``n_modes`` modes.

    Enumeration is lexicographic in the occupation tuple, so indices are
    stable across runs.  Raises :class:`CapacityError` before enumerating
    when the stars-and-bars dimension exceeds the cap.
    """
    cap = DEFAULT_FOCK_CAP if cap is None else cap
    dim = math.comb(total_bosons + n_modes - 1, total_bosons)
    if dim > cap:
        raise CapacityError(
            f"Fock basis of {n_modes} modes with {total_bosons} bosons has "
            f"dimension {dim}, beyond the cap of {cap}"
        )

    states: list[tuple[int, ...]] = []

    def fill(prefix: list[int], remaining_modes: int, remaining: int):
        if remaining_modes == 1:
            states.append(tuple(prefix + [remaining]))
            return
        for occ in range(remaining + 1):
            fill(prefix + [occ], remaining_modes - 1, remaining - occ)

    fill([], n_modes, total_bosons)
    return FockBasis(n_modes, total_bosons, tuple(states), {s: i for i, s in enumerate(states)})


@dataclass(frozen=True)
class FockState:
    """Normalized amplitude vector over a FockBasis."""

    basis: FockBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.basis.dim,):
            raise ValueError(f"amplitude vector of shape {amps.shape}, basis dim {self.basis.dim}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"Fock state not normalized: |norm-1| = {abs(norm-1):.3e}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def overlap(self, other: "FockState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def basis_state(basis: FockBasis, occupation) -> FockState:
    amps = np.zeros(basis.dim, dtype=complex)
    amps[basis.index[tuple(occupation)]] = 1.0
    return FockState(basis, amps)


def superpose(basis: FockBasis, terms: dict) -> FockState:
    """Normalized superposition from {occupation tuple: amplitude}."""
    amps = np.zeros(basis.dim, dtype=complex)
    for occ, amp in terms.items():
        amps[basis.index[tuple(occ)]] = amp
    return FockState(basis, amps / np.linalg.norm(amps))


def _site_row_occupancies(occ: tuple[int, ...], n_sites: int):
    """Yield (site, row, n_a, n_b) for every site-row."""
    for site in range(1, n_sites + 1):
        for row in ROWS:
            yield site, row, occ[mode_index(site, row, "a")], occ[mode_index(site, row, "b")]


def interaction_energy(occ: tuple[int, ...], params: LatticeParams) -> float:
    total = 0.0
    for _site, _row, na, nb in _site_row_occupancies(occ, params.n_sites):
        total += params.U_a / 2 * na * (na - 1) + params.U_b / 2 * nb * (nb - 1) + params.U_ab * na * nb
    return total


def build_hamiltonians(params: LatticeParams, basis: FockBasis) -> tuple[np.ndarray, np.ndarray]:
    """Dense (H_hop, H_int) on the given basis.

    H_hop moves bosons vertically between the rows of one column without
    touching the internal state, so it conserves the per-site, per-internal
    total over rows; H_int is diagonal.
    """
    if basis.n_modes != params.n_modes:
        raise ValueError(f"basis has {basis.n_modes} modes, params imply {params.n_modes}")
    dim = basis.dim
    h_bs = np.zeros((dim, dim), dtype=complex)
    h_int = np.zeros((dim, dim), dtype=complex)

    for k, occ in enumerate(basis.states):
        h_int[k, k] = interaction_energy(occ, params)
        for site in range(1, params.n_sites + 1):
            for internal in INTERNALS:
                m_top = mode_index(site, "I", internal)
                m_bot = mode_index(site, "II", internal)
                # -J a_top^dag a_bot and its conjugate
                for src, dst in ((m_bot, m_top), (m_top, m_bot)):
                    if occ[src] == 0:
                        continue
                    moved = list(occ)
                    moved[src] -= 1
                    moved[dst] += 1
                    kk = basis.index[tuple(moved)]
                    h_bs[kk, k] += -params.J * math.sqrt(occ[src] * (occ[dst] + 1))
    return h_bs, h_int


def propagator(hamiltonian: np.ndarray, t: float) -> np.ndarray:
    """exp(-i H t) via eigendecomposition of the Hermitian H."""
    energies, vectors = np.linalg.eigh(hamiltonian)
    return (vectors * np.exp(-1j * energies * t)) @ vectors.conj().T


def evolve(state: FockState, hamiltonian: np.ndarray, t: float) -> FockState:
    """Apply exp(-i H t) to the state.

    No renormalization: unitarity must hold on its own, and the FockState
    invariant rejects the result if the eigendecomposition drifted.
    """
    return FockState(state.basis, propagator(hamiltonian, t) @ state.amplitudes)


def ideal_bs_mode_matrix(n_sites: int) -> np.ndarray:
    """Single-particle matrix of the pairwise 50/50 splitters.

    Block [[1, -i], [-i, 1]]/sqrt(2) on each (row I, row II) pair, per site
    and internal state: the action on annihilation operators.
    """
    u = np.zeros((4 * n_sites, 4 * n_sites), dtype=complex)
    block = np.array([[1, -1j], [-1j, 1]]) / math.sqrt(2)
    for site in range(1, n_sites + 1):
        for internal in INTERNALS:
            m1 = mode_index(site, "I", internal)
            m2 = mode_index(site, "II", internal)
            u[np.ix_([m1, m2], [m1, m2])] = block
    return u


def apply_mode_unitary(state: FockState, u: np.ndarray) -> FockState:
    """Apply the second quantization of a single-particle unitary.

    Creation operators transform as a_m^dag -> sum_n conj(u[m, n]) a_n^dag,
    so each basis occupation is rebuilt by applying the transformed
    creation operators to the vacuum.
    """
    basis = state.basis
    u_conj = u.conj()
    out = np.zeros(basis.dim, dtype=complex)
    vac = (0,) * basis.n_modes

    for k, amp in enumerate(state.amplitudes):
        if abs(amp) < 1e-15:
            continue
        occ = basis.states[k]
        norm = math.sqrt(math.prod(math.factorial(n) for n in occ))
        terms: dict[tuple[int, ...], complex] = {vac: amp / norm}
        for mode, count in enumerate(occ):
            coeffs = u_conj[mode]
            for _ in range(count):
                new_terms: dict[tuple[int, ...], complex] = {}
                for partial, a in terms.items():
                    for target in range(basis.n_modes):
                        c = coeffs[target]
                        if abs(c) < 1e-15:
                            continue
                        raised = list(partial)
                        raised[target] += 1
                        key = tuple(raised)
                        new_terms[key] = new_terms.get(key, 0.0) + a * c * math.sqrt(raised[target])
                terms = new_terms
        for occ_out, a in terms.items():
            out[basis.index[occ_out]] += a
    return FockState(basis, out / np.linalg.norm(out))


@dataclass(frozen=True)
class BSCheckReport:
    """Fidelities of the hopping evolution against the ideal splitter map."""

    t_bs: float
    fidelities: tuple[float, ...]
    include_interactions: bool

    @property
    def min_fidelity(self) -> float:
        return min(self.fidelities)


def hopping_bs_check(
    params: LatticeParams,
    test_states: list[FockState],
    include_interactions: bool = False,
) -> BSCheckReport:
    """Compare evolve(., H_hop, pi/(4J)) with the ideal mode-level splitter.

    With ``include_interactions`` the evolution runs under H_hop + H_int
    instead, quantifying how on-site interactions during the hop degrade
    the splitter (the ideal comparison target stays the same).
    """
    if not test_states:
        raise ValueError("need at least one test state")
    basis = test_states[0].basis
    h_bs, h_int = build_hamiltonians(params, basis)
    h = h_bs + h_int if include_interactions else h_bs
    u_prop = propagator(h, params.t_bs)
    ideal_u = ideal_bs_mode_matrix(params.n_sites)

    fidelities = []
    for state in test_states:
        evolved = u_prop @ state.amplitudes
        ideal = apply_mode_unitary(state, ideal_u)
        fidelities.append(float(abs(np.vdot(ideal.amplitudes, evolved)) ** 2))
    return BSCheckReport(params.t_bs, tuple(fidelities), include_interactions)


@dataclass(frozen=True)
class PhaseCheckReport:
    """Deviation of interaction phases from the double-occupancy rule."""

    theta: float
    checked_configs: int
    skipped_configs: int  # site-row occupancy beyond 2: rule does not apply
    max_deviation: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= 1e-12


def interaction_phase_check(U: float, tau: float, basis: FockBasis) -> PhaseCheckReport:
    """Verify e^{-i U tau} per doubly occupied site-row under H_int alone.

    Evolves every basis configuration under H_int (U_a = U_b = U_ab = U,
    hopping off) for ``tau`` and compares the acquired phase against
    theta * (number of site-rows holding exactly two bosons), theta = U tau.
    Configurations with a site-row beyond double occupancy fall outside the
    rule and are counted as skipped.
    """
    n_sites = basis.n_modes // 4
    params = LatticeParams(n_sites=n_sites, U_a=U, U_b=U, U_ab=U, tau=tau)
    _, h_int = build_hamiltonians(params, basis)
    theta = params.theta

    # H_int is diagonal: evolve the uniform superposition once and read the
    # per-configuration phases from the amplitude rotation.
    uniform = FockState(basis, np.full(basis.dim, 1 / math.sqrt(basis.dim), dtype=complex))
    evolved = evolve(uniform, h_int, tau)

    checked = skipped = 0
    max_dev = 0.0
    for k, occ in enumerate(basis.states):
        pair_counts = [na + nb for _s, _r, na, nb in _site_row_occupancies(occ, n_sites)]
        if any(c > 2 for c in pair_counts):
            skipped += 1
            continue
        checked += 1
        doubles = sum(1 for c in pair_counts if c == 2)
        measured = evolved.amplitudes[k] / uniform.amplitudes[k]
        predicted = np.exp(-1j * theta * doubles)
        max_dev = max(max_dev, abs(measured - predicted))
    return PhaseCheckReport(theta, checked, skipped, max_dev)


def embed_two_copies(
    rho_row: DensityOperator, cap: int | None = None
) -> tuple[FockBasis, list[tuple[float, FockState]]]:
    """Load two copies of an N-qubit state into the two-row lattice.

    Returns the Fock basis (4N modes, 2N bosons: one atom per site per
    row) and the ensemble of product eigenvector pairs: rho x rho
    decomposes as sum_ij lambda_i lambda_j |v_i>_I |v_j>_II, and each
    member maps a = |0>, b = |1> per site into the occupation basis.
    Eigenvalues below 1e-12 are dropped.
    """
    n = rho_row.n_qubits
    basis = build_fock_basis(4 * n, 2 * n, cap=cap)

    eigenvalues, eigenvectors = np.linalg.eigh(rho_row.matrix)
    keep = eigenvalues > 1e-12
    eigenvalues = eigenvalues[keep]
    eigenvectors = eigenvectors[:, keep]

    def occupation(x: int, y: int) -> tuple[int, ...]:
        occ = [0] * (4 * n)
        for site in range(1, n + 1):
            bit_x = (x >> (n - site)) & 1
            bit_y = (y >> (n - site)) & 1
            occ[mode_index(site, "I", INTERNALS[bit_x])] += 1
            occ[mode_index(site, "II", INTERNALS[bit_y])] += 1
        return tuple(occ)

    ensemble = []
    for i, lam_i in enumerate(eigenvalues):
        for j, lam_j in enumerate(eigenvalues):
            amps = np.zeros(basis.dim, dtype=complex)
            v_i = eigenvectors[:, i]
            v_j = eigenvectors[:, j]
            for x in np.flatnonzero(np.abs(v_i) > 1e-15):
                for y in np.flatnonzero(np.abs(v_j) > 1e-15):
                    amps[basis.index[occupation(int(x), int(y))]] = v_i[x] * v_j[y]
            ensemble.append((float(lam_i * lam_j), FockState(basis, amps / np.linalg.norm(amps))))
    return basis, ensemble


@dataclass(frozen=True)
class OccupancyProbabilities:
    p_same_mode: float
    p_diff_mode: float


def occupancy_probabilities(ensemble, site: int) -> OccupancyProbabilities:
    """Probability that the two bosons of a column sit in one row vs both rows.

    ``ensemble`` is a list of (weight, FockState) pairs (a pure state may be
    passed as [(1.0, state)]).  Every configuration carrying amplitude must
    hold exactly two bosons at the column, else the question is ill-posed
    and a ValueError is raised.  After the splitter, p_diff_mode is the
    antisymmetric-projection probability (1 - purity)/2 of the site's
    single-qubit reduction.
    """
    p_diff = 0.0
    total_weight = 0.0
    for weight, state in ensemble:
        basis = state.basis
        n_sites = basis.n_modes // 4
        for k, occ in enumerate(basis.states):
            prob = abs(state.amplitudes[k]) ** 2
            if prob < 1e-18:
                continue
            row_i = occ[mode_index(site, "I", "a")] + occ[mode_index(site, "I", "b")]
            row_ii = occ[mode_index(site, "II", "a")] + occ[mode_index(site, "II", "b")]
            if row_i + row_ii != 2:
                raise ValueError(
                    f"column {site} holds {row_i + row_ii} bosons in a populated "
                    "configuration; occupancy probabilities need exactly two"
                )
            if row_i == 1 and row_ii == 1:
                p_diff += weight * prob
        total_weight += weight
    p_diff /= total_weight
    return OccupancyProbabilities(p_same_mode=1.0 - p_diff, p_diff_mode=p_diff)


@dataclass(frozen=True)
class LossOutcome:
    """Per-copy single-particle loss counts and the pair minimum survivor."""

    m: int
    m_prime: int

    @property
    def n(self) -> int:
        return max(self.m, self.m_prime)


def sample_loss(n_atoms: int, survival_prob: float, seed: int) -> LossOutcome:
    """Independent binomial single-particle loss in each of the two copies.

    Each atom survives with ``survival_prob``; the loss counts m, m' of the
    two copies are drawn independently.  Only min(N-m, N-m') = N - max(m, m')
    site pairs remain usable downstream, hence the ``n`` attribute.
    Deterministic for a fixed seed.
    """
    if not 0.0 <= survival_prob <= 1.0:
        raise ValueError("survival probability must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    m = int(rng.binomial(n_atoms, 1.0 - survival_prob))
    m_prime = int(rng.binomial(n_atoms, 1.0 - survival_prob))
    return LossOutcome(m, m_prime)


def standard_test_states(seed: int = 0, n_random: int = 4) -> list[FockState]:
    """Canonical one-column two-boson test set for splitter checks.

    Six structured states (identical pairs of both species, singlet and
    triplet combinations, same-row pair, doubly occupied mode) plus seeded
    random superpositions; ten states by default.
    """
    basis = build_fock_basis(4, 2)
    ia, ib = mode_index(1, "I", "a"), mode_index(1, "I", "b")
    iia, iib = mode_index(1, "II", "a"), mode_index(1, "II", "b")

    def occ(**counts) -> tuple[int, ...]:
        occ = [0, 0, 0, 0]
        for flat, c in counts.items():
            occ[{"ia": ia, "ib": ib, "iia": iia, "iib": iib}[flat]] = c
        return tuple(occ)

    states = [
        basis_state(basis, occ(ia=1, iia=1)),  # identical a-pair, one per row
        basis_state(basis, occ(ib=1, iib=1)),  # identical b-pair
        superpose(basis, {occ(ia=1, iib=1): 1, occ(iia=1, ib=1): -1}),  # singlet
        superpose(basis, {occ(ia=1, iib=1): 1, occ(iia=1, ib=1): +1}),  # triplet ab
        basis_state(basis, occ(ia=1, ib=1)),  # both bosons in row I
        basis_state(basis, occ(ia=2)),  # doubly occupied single mode
    ]
    rng = np.random.default_rng(seed)
    for _ in range(n_random):
        amps = rng.standard_normal(basis.dim) + 1j * rng.standard_normal(basis.dim)
        states.append(FockState(basis, amps / np.linalg.norm(amps)))
    return states


def singlet_state() -> FockState:
    """(aI^dag bII^dag - aII^dag bI^dag)|vac>/sqrt(2) on one column."""
    return standard_test_states()[2]


def identical_pair_state() -> FockState:
    """aI^dag aII^dag |vac> on one column."""
    return standard_test_states()[0]

"""Shared independent oracles for the test suite.

These deliberately avoid the library's reshape/transform code paths:
the reference partial trace walks matrix elements with explicit bit
arithmetic, and the reference purity multiplies matrices out.
"""

import numpy as np


def ref_partial_trace(mat: np.ndarray, n: int, keep) -> np.ndarray:
    """Elementwise partial trace.  keep: 1-based site labels, site 1 = MSB."""
    keep = sorted(keep)
    traced = [s for s in range(1, n + 1) if s not in keep]
    k = len(keep)
    out = np.zeros((2**k, 2**k), dtype=complex)

    def full_index(keep_bits, traced_bits):
        idx = 0
        kb, tb = dict(zip(keep, keep_bits)), dict(zip(traced, traced_bits))
        for site in range(1, n + 1):
            idx = (idx << 1) | (kb[site] if site in kb else tb[site])
        return idx

    for a in range(2**k):
        a_bits = [(a >> (k - 1 - i)) & 1 for i in range(k)]
        for b in range(2**k):
            b_bits = [(b >> (k - 1 - i)) & 1 for i in range(k)]
            acc = 0.0 + 0.0j
            for t in range(2 ** len(traced)):
                t_bits = [(t >> (len(traced) - 1 - i)) & 1 for i in range(len(traced))]
                acc += mat[full_index(a_bits, t_bits), full_index(b_bits, t_bits)]
            out[a, b] = acc
    return out


def ref_purity(mat: np.ndarray) -> float:
    """tr(m @ m) by explicit matrix multiplication."""
    return float(np.trace(mat @ mat).real)


def ref_subset_purity(mat: np.ndarray, n: int, subset) -> float:
    return ref_purity(ref_partial_trace(mat, n, subset))

"""Shared fixtures and independent oracles.

The oracles avoid the package's own shortcuts on purpose: partial traces
are plain index loops, trace norms come from singular values, entropies
from scipy.stats.  Tests compare the fast implementations against these.
"""

import numpy as np
import pytest
from scipy import linalg as sla
from scipy import stats

from tdesim import DensityOperator, PureState, Register, SlotId

SEED = 20260818


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


def random_pure(rng, register):
    n = register.dim
    amps = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return PureState(register, amps)


def random_density(rng, register):
    n = register.dim
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    m = a @ a.conj().T
    return DensityOperator(register, m / np.trace(m))


def two_qubit_register(site_a="1", site_b="2", cycle=0):
    return Register((SlotId(site_a, cycle), SlotId(site_b, cycle)), (2, 2))


def partial_trace_oracle(matrix, dims, keep_positions):
    """Index-loop partial trace, keeping factor positions in given order."""
    dims = tuple(dims)
    keep = tuple(keep_positions)
    drop = tuple(i for i in range(len(dims)) if i not in keep)
    kdims = tuple(dims[i] for i in keep)
    ddims = tuple(dims[i] for i in drop)
    size = int(np.prod(kdims)) if kdims else 1
    out = np.zeros((size, size), dtype=complex)
    t = np.asarray(matrix, dtype=complex).reshape(dims + dims)
    for ki in np.ndindex(*kdims):
        for kj in np.ndindex(*kdims):
            val = 0.0 + 0.0j
            for d in np.ndindex(*ddims):
                row = [0] * len(dims)
                col = [0] * len(dims)
                for pos, lv in zip(keep, ki):
                    row[pos] = lv
                for pos, lv in zip(keep, kj):
                    col[pos] = lv
                for pos, lv in zip(drop, d):
                    row[pos] = lv
                    col[pos] = lv
                val += t[tuple(row) + tuple(col)]
            out[np.ravel_multi_index(ki, kdims) if kdims else 0,
                np.ravel_multi_index(kj, kdims) if kdims else 0] = val
    return out


def trace_norm_oracle(diff):
    return float(np.sum(sla.svdvals(np.asarray(diff, dtype=complex))))


def entropy_oracle(matrix):
    vals = np.linalg.eigvalsh(np.asarray(matrix, dtype=complex))
    return float(stats.entropy(np.clip(vals, 0.0, None), base=2))

"""Entropy, distance, and curve utilities.

Entropies are in bits.  Trace norm here means the full Schatten 1-norm
Tr|A - B| with no 1/2 in front, so orthogonal pure states sit at distance
2 and the distinguishability curves below run on a [0, 2] scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import InvariantViolationError
from .registers import DensityOperator, PureState, partial_trace, to_density

_EIG_FLOOR = -1e-10


def _as_matrix(rho) -> np.ndarray:
    if isinstance(rho, (DensityOperator, PureState)):
        return to_density(rho).matrix
    return np.asarray(rho, dtype=complex)


def von_neumann_entropy(rho) -> float:
    """S(rho) = -Tr rho log2 rho.

    Eigenvalues in [-1e-10, 0) are clamped to zero as roundoff; anything
    more negative is treated as a corrupted state and raises.
    """
    vals = np.linalg.eigvalsh(_as_matrix(rho))
    lo = float(vals.min())
    if lo < _EIG_FLOOR:
        raise InvariantViolationError(
            f"eigenvalue {lo:.3e} below tolerance; not a density matrix"
        )
    vals = vals[vals > 0.0]
    return max(float(-(vals * np.log2(vals)).sum()), 0.0) + 0.0


def binary_entropy(p: float) -> float:
    """Entropy in bits of a (p, 1-p) distribution."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability out of range: {p}")
    out = 0.0
    for q in (p, 1.0 - p):
        if q > 0.0:
            out -= q * np.log2(q)
    return out


def trace_norm_distance(a, b) -> float:
    """Tr|a - b| between two operators of matching shape."""
    ma, mb = _as_matrix(a), _as_matrix(b)
    if ma.shape != mb.shape:
        raise ValueError(f"shape mismatch: {ma.shape} vs {mb.shape}")
    if isinstance(a, (DensityOperator, PureState)) and \
            isinstance(b, (DensityOperator, PureState)):
        if a.register.dims != b.register.dims:
            raise ValueError("registers have different slot dimensions")
    diff = ma - mb
    if float(np.abs(diff - diff.conj().T).max()) <= 1e-12:
        return float(np.abs(np.linalg.eigvalsh(diff)).sum())
    return float(scipy.linalg.svdvals(diff).sum())


def purity(rho) -> float:
    """Tr rho^2; 1 for pure states, 1/d for the maximally mixed state."""
    m = _as_matrix(rho)
    return float(np.einsum("ij,ji->", m, m).real)


def subadditivity_margin(rho: DensityOperator, split: int = 1) -> float:
    """S(A) + S(B) - S(AB) for the bipartition at slot index `split`.

    Nonnegative for every valid state; a margin below -1e-9 means the
    inputs were not a state at all and raises instead of returning.
    """
    reg = rho.register
    if len(reg.slots) < 2:
        raise ValueError("subadditivity needs at least two slots")
    if not 0 < split < len(reg.slots):
        raise ValueError(f"split index {split} out of range")
    part_a = partial_trace(rho, reg.slots[:split])
    part_b = partial_trace(rho, reg.slots[split:])
    margin = (von_neumann_entropy(part_a) + von_neumann_entropy(part_b)
              - von_neumann_entropy(rho))
    if margin < -1e-9:
        raise InvariantViolationError(
            f"subadditivity violated by {margin:.3e}"
        )
    return margin


@dataclass(frozen=True)
class CurvePoint:
    """One abscissa of a parameter sweep plus its named curve values."""

    beta_sq: float
    values: dict


def fig2_curves(grid: Sequence[float], tau: int = 1,
                tolerance: float = 1e-12) -> list:
    """Distinguishability before and after the displaced-CNOT channel.

    For each beta^2 on the grid the input alpha|0> + beta|1> is compared
    against |0>, and the two channel outputs against each other:

    * D_in_paper      population gap 2 beta^2
    * D_in_tracenorm  full trace norm of the input difference, 2 beta
    * D_out           simulated trace norm of the output difference

    D_out is produced by the full register simulation and cross-checked
    against its closed form 4 (beta^2 - beta^4); disagreement beyond the
    tolerance raises.
    """
    from .scenarios import run_fig1
    from .registers import qubit_state

    ref = run_fig1(qubit_state("1", 0, 1.0, 0.0), tau=tau)
    ref_in = to_density(qubit_state("1", 0, 1.0, 0.0))
    points = []
    for b2 in grid:
        b2 = float(b2)
        if not 0.0 <= b2 <= 1.0:
            raise ValueError(f"beta^2 out of range: {b2}")
        alpha = np.sqrt(1.0 - b2)
        beta = np.sqrt(b2)
        rep = run_fig1(qubit_state("1", 0, alpha, beta), tau=tau)
        d_out = trace_norm_distance(rep.rho_out, ref.rho_out)
        closed = 4.0 * (b2 - b2 * b2)
        if abs(d_out - closed) > tolerance:
            raise InvariantViolationError(
                f"simulated output distance {d_out:.15g} deviates from "
                f"{closed:.15g} at beta^2={b2:.15g}"
            )
        d_in = trace_norm_distance(
            to_density(qubit_state("1", 0, alpha, beta)), ref_in
        )
        points.append(CurvePoint(b2, {
            "D_in_paper": 2.0 * b2,
            "D_in_tracenorm": d_in,
            "D_out": d_out,
        }))
    return points


def amplification_points(points: Sequence[CurvePoint],
                         definition: str = "D_in_paper") -> list:
    """Grid values where the output distance strictly exceeds the input
    distance under the chosen input definition.

    Under the population-gap definition (D_in_paper) the region is
    0 < beta^2 < 1/2; under the strict trace norm it is empty, since
    4 (beta^2 - beta^4) <= 2 beta everywhere on [0, 1].
    """
    if definition not in ("D_in_paper", "D_in_tracenorm"):
        raise ValueError(f"unknown input definition {definition!r}")
    return [p.beta_sq for p in points
            if p.values["D_out"] > p.values[definition] + 1e-12]

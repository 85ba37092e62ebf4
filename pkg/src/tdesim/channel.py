"""Closed forms for the displaced-CNOT channel and its nonlinearity.

Sending one half of a CNOT pair through a dilation and closing with a
second CNOT acts on the input qubit's populations (g00, g11) as

    (g00, g11)  ->  (g00^2 + g11^2,  2 g00 g11)

independently of any input coherence.  The map is quadratic in the density
matrix, so it cannot come from any linear channel; nonlinearity_witness
quantifies that by how badly the map fails to commute with mixing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .registers import DensityOperator, Register, SlotId, bell_phi_plus
from .dynamics import displaced_expansion, measure_at_cycle


@dataclass(frozen=True)
class QubitDensity:
    """Single-qubit density matrix as populations plus one coherence."""

    g00: float
    g11: float
    g01: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "g00", float(self.g00))
        object.__setattr__(self, "g11", float(self.g11))
        object.__setattr__(self, "g01", complex(self.g01))
        if self.g00 < -1e-12 or self.g11 < -1e-12:
            raise ValueError(f"negative population ({self.g00}, {self.g11})")
        if abs(self.g00 + self.g11 - 1.0) > 1e-12:
            raise ValueError(
                f"populations sum to {self.g00 + self.g11:.15g}, expected 1"
            )
        if abs(self.g01) ** 2 > self.g00 * self.g11 + 1e-12:
            raise ValueError("coherence exceeds positivity bound")

    @classmethod
    def from_amplitudes(cls, amp0, amp1) -> "QubitDensity":
        a, b = complex(amp0), complex(amp1)
        n = abs(a) ** 2 + abs(b) ** 2
        return cls(abs(a) ** 2 / n, abs(b) ** 2 / n, a * np.conj(b) / n)

    @classmethod
    def from_matrix(cls, matrix) -> "QubitDensity":
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got {m.shape}")
        return cls(m[0, 0].real, m[1, 1].real, m[0, 1])

    def to_matrix(self) -> np.ndarray:
        return np.array([[self.g00, self.g01],
                         [np.conj(self.g01), self.g11]])

    def to_density(self, site: str = "1", cycle: int = 0) -> DensityOperator:
        reg = Register((SlotId(site, cycle),), (2,))
        return DensityOperator(reg, self.to_matrix())


@dataclass(frozen=True)
class PopulationPair:
    """Populations of the two copies feeding the generalized channel."""

    p0: float
    p1: float
    q0: float
    q1: float

    def __post_init__(self):
        for name in ("p0", "p1", "q0", "q1"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if v < -1e-12:
                raise ValueError(f"negative population {name}={v}")
        if abs(self.p0 + self.p1 - 1.0) > 1e-12:
            raise ValueError("first copy populations must sum to 1")
        if abs(self.q0 + self.q1 - 1.0) > 1e-12:
            raise ValueError("second copy populations must sum to 1")


def nonlinear_map(rho: QubitDensity) -> QubitDensity:
    """Output of the displaced-CNOT channel on one input qubit."""
    return QubitDensity(rho.g00 ** 2 + rho.g11 ** 2,
                        2.0 * rho.g00 * rho.g11)


def generalized_map(pair: PopulationPair) -> QubitDensity:
    """Channel output when the two copies carry different populations.

    The target records the XOR of the two copies' logical values, so the
    output populations are the parity convolution of the inputs.  The map
    is symmetric under swapping the copies.
    """
    return QubitDensity(pair.p0 * pair.q0 + pair.p1 * pair.q1,
                        pair.p0 * pair.q1 + pair.p1 * pair.q0)


def displaced_bell_channel(tau: int = 1,
                           site_a: str = "1",
                           site_b: str = "2") -> DensityOperator:
    """Two-site reduced state of a dilated Bell pair at the readout cycle.

    The pair is prepared at cycle tau, site_a is dilated by tau cycles,
    and the slots at cycle tau are kept.  Both halves decohere completely,
    leaving the maximally mixed two-qubit state.
    """
    pair = bell_phi_plus(site_a, site_b, int(tau))
    expanded = displaced_expansion(pair, tau, dilated_site=site_a)
    return measure_at_cycle(expanded, int(tau))


def nonlinearity_witness(rho_a: QubitDensity, rho_b: QubitDensity,
                         lam: float) -> float:
    """Trace-norm gap between mapping a mixture and mixing the maps.

    Zero for every (rho_a, rho_b, lam) would mean the channel is linear;
    the displaced-CNOT channel reaches 1 at lam = 1/2 on the basis states.
    """
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"mixing weight must sit in [0, 1], got {lam}")
    mixed = QubitDensity(
        lam * rho_a.g00 + (1.0 - lam) * rho_b.g00,
        lam * rho_a.g11 + (1.0 - lam) * rho_b.g11,
        lam * rho_a.g01 + (1.0 - lam) * rho_b.g01,
    )
    lhs = nonlinear_map(mixed).to_matrix()
    rhs = (lam * nonlinear_map(rho_a).to_matrix()
           + (1.0 - lam) * nonlinear_map(rho_b).to_matrix())
    return float(np.abs(np.linalg.eigvalsh(lhs - rhs)).sum())

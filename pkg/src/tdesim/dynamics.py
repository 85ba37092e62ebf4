"""Gates, two-copy expansions, and cycle-filtered measurement.

Free evolution between cycles is a relabeling, so dynamics here splits into
three pieces: unitary gates acting inside a single cycle, expansions that
append time-shifted copies of a state, and measurements that keep only the
slots at one cycle.

Expanding a mixed state is ambiguous and the two readings give different
physics, so the caller must choose a CorrelationMode:

* UNCORRELATED_COPIES tensors the reduced density matrix with its shifted
  copy (rho (x) rho').  The copies share no correlations.
* COHERENT_HISTORY copies each pure branch of an ensemble and mixes the
  branch products.  This preserves branch identity across copies and
  depends on the ensemble, not just on the average density matrix; when
  only a DensityOperator is supplied, its spectral decomposition is used
  as a stand-in ensemble, which is a canonical but not unique choice.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import product as _iproduct
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import CycleMisalignmentError, UnknownSlotError, ZeroProbabilityError
from .registers import (
    BasisLevel,
    DensityOperator,
    PureState,
    Register,
    SlotLike,
    State,
    as_slot,
    level_index,
    level_label,
    partial_trace,
    permute_slots,
    relabel_cycles,
    tensor,
    to_density,
)

Ensemble = Sequence  # of (weight, PureState) pairs


class CorrelationMode(enum.Enum):
    UNCORRELATED_COPIES = "uncorrelated-copies"
    COHERENT_HISTORY = "coherent-history"


@dataclass(frozen=True)
class ExpansionPolicy:
    """Which cycles to materialize and how to treat non-pure inputs.

    The correlation mode may stay None for pure states, which expand the
    same way under either reading.
    """

    cycles: tuple = ()
    correlation: Optional[CorrelationMode] = None

    def __post_init__(self):
        cycles = tuple(int(c) for c in self.cycles)
        if any(b <= a for a, b in zip(cycles, cycles[1:])):
            raise ValueError(f"cycles must be strictly increasing: {cycles}")
        object.__setattr__(self, "cycles", cycles)
        if self.correlation is not None and \
                not isinstance(self.correlation, CorrelationMode):
            object.__setattr__(
                self, "correlation", CorrelationMode(self.correlation)
            )


def _as_mode(policy) -> Optional[CorrelationMode]:
    if policy is None:
        return None
    if isinstance(policy, ExpansionPolicy):
        return policy.correlation
    if isinstance(policy, CorrelationMode):
        return policy
    return CorrelationMode(policy)


class Gate:
    """Unitary on the logical levels of its target slots.

    The matrix is 2^arity square.  On dim-3 targets the gate is lifted to
    act as the identity on every basis component where a target sits in the
    vacuum level, so vacuum slots pass through gates untouched.
    """

    def __init__(self, name: str, matrix):
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("gate matrix must be square")
        n = m.shape[0]
        arity = int(round(np.log2(n)))
        if 2 ** arity != n:
            raise ValueError(f"gate dimension {n} is not a power of 2")
        dev = float(np.abs(m @ m.conj().T - np.eye(n)).max())
        if dev > 1e-12:
            raise ValueError(f"gate {name!r} is not unitary (deviation {dev:.3e})")
        m = m.copy()
        m.flags.writeable = False
        self.name = name
        self.arity = arity
        self.matrix = m

    def __repr__(self) -> str:
        return f"Gate({self.name!r}, arity={self.arity})"


def cnot() -> Gate:
    return Gate("cnot", [[1, 0, 0, 0],
                         [0, 1, 0, 0],
                         [0, 0, 0, 1],
                         [0, 0, 1, 0]])


def pauli_x() -> Gate:
    return Gate("x", [[0, 1], [1, 0]])


def hadamard() -> Gate:
    s = 1.0 / np.sqrt(2.0)
    return Gate("h", [[s, s], [s, -s]])


def phase_gate(theta: float) -> Gate:
    return Gate(f"phase({theta:g})", np.diag([1.0, np.exp(1j * float(theta))]))


def _lift_logical(matrix: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    """Embed a 2^k logical unitary into the full product space of the
    target slots, identity on anything involving a vacuum level."""
    if all(d == 2 for d in dims):
        return matrix
    full = int(np.prod(dims))
    lifted = np.eye(full, dtype=complex)
    lattice = [
        int(np.ravel_multi_index(
            tuple(b + (d - 2) for b, d in zip(bits, dims)), tuple(dims)
        ))
        for bits in _iproduct((0, 1), repeat=len(dims))
    ]
    lifted[np.ix_(lattice, lattice)] = matrix
    return lifted


def apply_gate(state: State, gate: Gate, targets: Sequence[SlotLike]) -> State:
    """Apply a gate to target slots, which must all sit at one cycle."""
    reg = state.register
    slots = [as_slot(t) for t in targets]
    if len(slots) != gate.arity:
        raise ValueError(
            f"gate {gate.name!r} takes {gate.arity} targets, got {len(slots)}"
        )
    if len(set(slots)) != len(slots):
        raise ValueError("gate targets must be distinct")
    for s in slots:
        reg.index_of(s)
    cycles = {s.cycle for s in slots}
    if len(cycles) > 1:
        raise CycleMisalignmentError(
            f"gate {gate.name!r} spans cycles {sorted(cycles)}; "
            "slots at different cycles are separate tensor factors"
        )
    rest = [s for s in reg.slots if s not in slots]
    front = permute_slots(state, slots + rest)
    dims = [front.register.dims[i] for i in range(len(slots))]
    lifted = _lift_logical(gate.matrix, dims)
    op = np.kron(lifted, np.eye(front.register.dim // int(np.prod(dims))))
    if isinstance(front, PureState):
        moved = PureState(front.register, op @ front.amplitudes)
    else:
        moved = DensityOperator(front.register,
                                op @ front.matrix @ op.conj().T)
    return permute_slots(moved, reg.slots)


def _shift_all(state: State, delta: int) -> State:
    return relabel_cycles(state, None, delta) if delta else state


def _single_cycle(reg: Register) -> int:
    cycles = {s.cycle for s in reg.slots}
    if len(cycles) != 1:
        raise ValueError(
            f"expansion input must live at a single cycle, found {sorted(cycles)}"
        )
    return cycles.pop()


def _as_branches(state, mode: Optional[CorrelationMode]):
    """Normalize the expansion input to (kind, payload).

    kind 'pure' carries a PureState, 'density' a DensityOperator, and
    'branches' a validated list of (weight, PureState).
    """
    if isinstance(state, PureState):
        return "pure", state
    if isinstance(state, DensityOperator):
        if mode is None:
            raise ValueError(
                "expanding a mixed state needs an explicit correlation mode"
            )
        if mode is CorrelationMode.UNCORRELATED_COPIES:
            return "density", state
        return "branches", spectral_ensemble(state)
    branches = list(state)
    if not branches:
        raise ValueError("empty ensemble")
    total = 0.0
    reg = None
    out = []
    for w, psi in branches:
        w = float(w)
        if w < -1e-12:
            raise ValueError(f"negative ensemble weight {w}")
        if not isinstance(psi, PureState):
            raise ValueError("ensemble branches must be PureState")
        if reg is None:
            reg = psi.register
        elif psi.register != reg:
            raise ValueError("ensemble branches live on different registers")
        if w > 1e-12:
            out.append((w, psi))
        total += w
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"ensemble weights sum to {total:.12g}, expected 1")
    if not out:
        raise ValueError("all ensemble weights are zero")
    if mode is CorrelationMode.UNCORRELATED_COPIES:
        return "density", ensemble_density(out)
    return "branches", out


def ensemble_density(branches: Ensemble) -> DensityOperator:
    """Average density matrix of a pure-state ensemble."""
    reg = branches[0][1].register
    m = np.zeros((reg.dim, reg.dim), dtype=complex)
    for w, psi in branches:
        v = psi.amplitudes
        m += float(w) * np.outer(v, v.conj())
    return DensityOperator(reg, m)


def spectral_ensemble(rho: DensityOperator) -> list:
    """Eigendecomposition of a density matrix as a (weight, state) list."""
    vals, vecs = np.linalg.eigh(rho.matrix)
    out = []
    for i in range(len(vals)):
        if vals[i] > 1e-12:
            out.append((float(vals[i]), PureState(rho.register, vecs[:, i])))
    return out


def _run_expansion(state, policy, expand_one):
    """Dispatch an expansion over the three input kinds.  expand_one maps a
    single pure or density state to its expanded product."""
    kind, payload = _as_branches(state, _as_mode(policy))
    if kind == "branches":
        return ensemble_density([(w, expand_one(psi)) for w, psi in payload])
    return expand_one(payload)


def free_expansion(state, cycles: Optional[Iterable[int]] = None,
                   policy=None) -> State:
    """Tensor product of time-shifted copies of a single-cycle state, one
    per requested cycle, ascending.  A pure input stays pure.

    Cycles come from the argument or, if omitted, from an ExpansionPolicy
    passed as `policy`.
    """
    if cycles is None:
        if not (isinstance(policy, ExpansionPolicy) and policy.cycles):
            raise ValueError("no expansion cycles given")
        cycles = policy.cycles
    cs = sorted(int(c) for c in cycles)
    if not cs:
        raise ValueError("need at least one cycle")
    if len(set(cs)) != len(cs):
        raise ValueError("expansion cycles must be distinct")

    def expand_one(st):
        base = _single_cycle(st.register)
        out = None
        for c in cs:
            copy = _shift_all(st, c - base)
            out = copy if out is None else tensor(out, copy)
        return out

    return _run_expansion(state, policy, expand_one)


def displaced_expansion(state, tau: int, dilated_site: str, policy=None) -> State:
    """Two-copy expansion of a two-site pair after one site is dilated.

    The input lives on two sites at a single cycle t.  Dilating one site by
    tau cycles makes the pair's support straddle cycles, so the state is
    carried by two copies: one with the undilated site pulled back to
    t - tau, and one with everything pushed forward to t + tau.  The result
    spans four slots ordered (copy A, copy B) with each copy keeping the
    input's slot order.
    """
    tau = int(tau)
    if tau < 1:
        raise ValueError(f"dilation must be at least one cycle, got {tau}")

    def expand_one(st):
        reg = st.register
        if len(reg.slots) != 2:
            raise ValueError("displaced expansion expects a two-slot pair")
        sites = reg.sites
        if len(sites) != 2:
            raise ValueError("the two slots must sit on distinct sites")
        if dilated_site not in sites:
            raise UnknownSlotError(f"register has no site {dilated_site!r}")
        _single_cycle(reg)
        other = sites[0] if sites[1] == dilated_site else sites[1]
        copy_a = relabel_cycles(st, other, -tau)
        copy_b = _shift_all(copy_a, tau)
        return tensor(copy_a, copy_b)

    return _run_expansion(state, policy, expand_one)


def measure_at_cycle(state: State, cycle: int) -> DensityOperator:
    """Reduced state over every slot at one cycle; slots at other cycles
    are traced out, which is where displacement-induced decoherence
    comes from."""
    keep = [s for s in state.register.slots if s.cycle == int(cycle)]
    if not keep:
        raise UnknownSlotError(f"no slot at cycle {cycle}")
    return partial_trace(state, keep)


@dataclass
class MeasurementOutcome:
    """One projective outcome: its label, Born probability, and the
    renormalized state of the remaining slots (None if the measured slot
    was the whole register)."""

    label: str
    probability: float
    post_state: Optional[State]


def _outcome_operator(outcome, dim: int):
    """Return (vector or None, projector matrix, label) for an outcome
    given as a basis level, an amplitude vector, or a projector."""
    if isinstance(outcome, (str, int, BasisLevel)):
        idx = level_index(outcome, dim)
        v = np.zeros(dim, dtype=complex)
        v[idx] = 1.0
        return v, np.outer(v, v.conj()), ("vac", "0", "1")[idx + (3 - dim)]
    arr = np.asarray(outcome, dtype=complex)
    if arr.ndim == 1:
        if arr.shape != (dim,):
            raise ValueError(f"outcome vector needs {dim} amplitudes")
        n = float(np.linalg.norm(arr))
        if n < 1e-12:
            raise ValueError("outcome vector has zero norm")
        v = arr / n
        return v, np.outer(v, v.conj()), "custom"
    if arr.shape != (dim, dim):
        raise ValueError(f"projector must be {dim}x{dim}, got {arr.shape}")
    if np.abs(arr - arr.conj().T).max() > 1e-12 or \
            np.abs(arr @ arr - arr).max() > 1e-12:
        raise ValueError("outcome matrix is not a projector")
    return None, arr, "projector"


def project(state: State, slot: SlotLike, outcome,
            label: Optional[str] = None) -> MeasurementOutcome:
    """Condition on finding one slot in a given outcome and drop the slot.

    The outcome is a basis level, an amplitude vector, or a projector
    matrix on the slot's dimension.  Slots at other cycles sit in separate
    tensor factors, so their entanglement survives untouched.
    """
    reg = state.register
    s = as_slot(slot)
    dim = reg.dim_of(s)
    chi, proj, auto_label = _outcome_operator(outcome, dim)
    label = auto_label if label is None else label

    rest = [t for t in reg.slots if t != s]
    if not rest:
        p = _scalar_probability(state, proj)
        if p < 1e-12:
            raise ZeroProbabilityError(
                f"outcome {label!r} on {s} has probability {p:.3e}"
            )
        return MeasurementOutcome(label, p, None)

    front = permute_slots(state, [s] + rest)
    rest_dim = front.register.dim // dim
    rest_reg = Register(tuple(rest),
                        tuple(reg.dims[reg.index_of(t)] for t in rest))

    if isinstance(front, PureState) and chi is not None:
        mat = front.amplitudes.reshape(dim, rest_dim)
        coeffs = chi.conj() @ mat
        p = float(np.linalg.norm(coeffs) ** 2)
        if p < 1e-12:
            raise ZeroProbabilityError(
                f"outcome {label!r} on {s} has probability {p:.3e}"
            )
        return MeasurementOutcome(
            label, p, PureState(rest_reg, coeffs / np.sqrt(p))
        )

    rho = to_density(front).matrix.reshape(dim, rest_dim, dim, rest_dim)
    block = np.einsum("mk,kjml->jl", proj, rho)
    p = float(np.trace(block).real)
    if p < 1e-12:
        raise ZeroProbabilityError(
            f"outcome {label!r} on {s} has probability {p:.3e}"
        )
    return MeasurementOutcome(
        label, p, DensityOperator(rest_reg, block / p)
    )


def _scalar_probability(state: State, proj: np.ndarray) -> float:
    if isinstance(state, PureState):
        v = state.amplitudes
        return float(np.real(v.conj() @ proj @ v))
    return float(np.trace(proj @ state.matrix).real)


def joint_outcome_distribution(state: State, slots: Sequence[SlotLike]) -> dict:
    """Born probabilities of every joint basis outcome on the given slots.

    Keys concatenate one character per slot ('v', '0', '1').  All outcomes
    appear, including zero-probability ones.
    """
    reduced = partial_trace(state, slots)
    dims = reduced.register.dims
    probs = np.clip(np.diag(reduced.matrix).real, 0.0, None)
    out = {}
    for flat, p in enumerate(probs):
        idx = np.unravel_index(flat, dims)
        key = "".join(level_label(i, d) for i, d in zip(idx, dims))
        out[key] = float(p)
    return out

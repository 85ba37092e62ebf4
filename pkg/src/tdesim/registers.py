"""Registers of clock-cycle-labeled slots and the states living on them.

A slot is a (site, cycle) pair.  Slots at different cycles are independent
tensor factors even when they share a site, which is what lets a single
physical qubit appear several times in one register.  Slots are qubits
(dim 2) or qutrits (dim 3); the three-level case prepends a vacuum level
below the two logical ones, so the logical block always sits at the top of
the local basis.

Basis ordering is row-major with the first register slot most significant,
so ``basis_index`` of (0, 1) on a two-qubit register is 1.
"""

from __future__ import annotations

import enum
import string
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import OverlappingSlotError, InvariantViolationError, UnknownSlotError

ATOL = 1e-12
PSD_FLOOR = -1e-10

_LEVEL_CHARS = {2: "01", 3: "v01"}


class BasisLevel(enum.Enum):
    """Logical basis levels.  VAC exists only on dim-3 slots."""

    VAC = "vac"
    ZERO = "0"
    ONE = "1"


@dataclass(frozen=True, order=True)
class SlotId:
    """Address of one tensor factor: which site, at which clock cycle."""

    site: str
    cycle: int

    def shifted(self, delta: int) -> "SlotId":
        return SlotId(self.site, self.cycle + delta)

    def __repr__(self) -> str:
        return f"({self.site}@{self.cycle})"


SlotLike = Union[SlotId, tuple]


def as_slot(slot: SlotLike) -> SlotId:
    """Coerce a (site, cycle) tuple to a SlotId."""
    if isinstance(slot, SlotId):
        return slot
    site, cycle = slot
    return SlotId(str(site), int(cycle))


@dataclass(frozen=True)
class Register:
    """Ordered collection of distinct slots with their local dimensions."""

    slots: tuple
    dims: tuple

    def __post_init__(self):
        slots = tuple(as_slot(s) for s in self.slots)
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "slots", slots)
        object.__setattr__(self, "dims", dims)
        if len(slots) != len(dims):
            raise ValueError(
                f"{len(slots)} slots but {len(dims)} dimensions"
            )
        if len(slots) == 0:
            raise ValueError("a register needs at least one slot")
        for d in dims:
            if d not in (2, 3):
                raise ValueError(f"slot dimension must be 2 or 3, got {d}")
        seen = set()
        for s in slots:
            if s in seen:
                raise OverlappingSlotError(f"duplicate slot {s}")
            seen.add(s)

    @property
    def dim(self) -> int:
        out = 1
        for d in self.dims:
            out *= d
        return out

    @property
    def sites(self) -> tuple:
        return tuple(dict.fromkeys(s.site for s in self.slots))

    def cycles_of(self, site: str) -> tuple:
        return tuple(s.cycle for s in self.slots if s.site == site)

    def index_of(self, slot: SlotLike) -> int:
        s = as_slot(slot)
        try:
            return self.slots.index(s)
        except ValueError:
            raise UnknownSlotError(f"register has no slot {s}") from None

    def __contains__(self, slot: SlotLike) -> bool:
        return as_slot(slot) in self.slots

    def dim_of(self, slot: SlotLike) -> int:
        return self.dims[self.index_of(slot)]


def level_index(level, dim: int) -> int:
    """Local basis index of a level label on a slot of the given dimension.

    Integers 0 and 1 mean the logical levels, so on a dim-3 slot they map
    to indices 1 and 2.  The vacuum is addressed as BasisLevel.VAC or "vac".
    """
    if isinstance(level, BasisLevel):
        name = level.value
    elif isinstance(level, str):
        name = level
    elif level in (0, 1):
        name = str(level)
    else:
        raise ValueError(f"not a basis level: {level!r}")
    if name == "vac":
        if dim != 3:
            raise ValueError("vacuum level requires a dim-3 slot")
        return 0
    if name not in ("0", "1"):
        raise ValueError(f"not a basis level: {level!r}")
    return int(name) + (dim - 2)


def level_label(index: int, dim: int) -> str:
    """Inverse of level_index, as a one-character label ('v', '0', '1')."""
    return _LEVEL_CHARS[dim][index]


class PureState:
    """Normalized state vector on a register.

    The amplitude array is copied, normalized, and frozen.  A vector of
    numerically zero norm is rejected rather than silently rescaled.
    """

    def __init__(self, register: Register, amplitudes):
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (register.dim,):
            raise ValueError(
                f"expected {register.dim} amplitudes, got {amps.shape[0]}"
            )
        norm = float(np.linalg.norm(amps))
        if norm < 1e-12:
            raise ValueError("state vector has zero norm")
        amps = amps / norm
        amps.flags.writeable = False
        self.register = register
        self.amplitudes = amps

    @property
    def dim(self) -> int:
        return self.register.dim

    def overlap(self, other: "PureState") -> complex:
        if other.register != self.register:
            raise ValueError("overlap requires matching registers")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __repr__(self) -> str:
        return f"PureState({list(self.register.slots)})"


class DensityOperator:
    """Density matrix on a register, validated on construction.

    Construction checks hermiticity and unit trace to 1e-12 and rejects
    eigenvalues below -1e-10; anything worse indicates a bug upstream, not
    roundoff, so it raises InvariantViolationError.
    """

    def __init__(self, register: Register, matrix):
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (register.dim, register.dim):
            raise ValueError(
                f"expected a {register.dim}x{register.dim} matrix, got {m.shape}"
            )
        herm = float(np.abs(m - m.conj().T).max())
        if herm > ATOL:
            raise InvariantViolationError(
                f"matrix is not hermitian (deviation {herm:.3e})"
            )
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > ATOL:
            raise InvariantViolationError(
                f"trace is {tr:.15g}, expected 1"
            )
        lo = float(np.linalg.eigvalsh(m).min())
        if lo < PSD_FLOOR:
            raise InvariantViolationError(
                f"negative eigenvalue {lo:.3e} below tolerance"
            )
        m = m.copy()
        m.flags.writeable = False
        self.register = register
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.register.dim

    def __repr__(self) -> str:
        return f"DensityOperator({list(self.register.slots)})"


State = Union[PureState, DensityOperator]


def to_density(state: State) -> DensityOperator:
    """Project a pure state to its rank-one density matrix; pass densities
    through unchanged."""
    if isinstance(state, DensityOperator):
        return state
    v = state.amplitudes
    return DensityOperator(state.register, np.outer(v, v.conj()))


def basis_index(register: Register, levels: Sequence) -> int:
    """Flat basis index of a product basis assignment, one level per slot."""
    if len(levels) != len(register.slots):
        raise ValueError(
            f"expected {len(register.slots)} levels, got {len(levels)}"
        )
    idx = tuple(
        level_index(lv, d) for lv, d in zip(levels, register.dims)
    )
    return int(np.ravel_multi_index(idx, register.dims))


def basis_state(register: Register, levels: Sequence) -> PureState:
    amps = np.zeros(register.dim, dtype=complex)
    amps[basis_index(register, levels)] = 1.0
    return PureState(register, amps)


def qubit_state(site: str, cycle: int, amp0, amp1, dim: int = 2) -> PureState:
    """Single-slot state amp0|0> + amp1|1>.  With dim=3 the vacuum
    amplitude is zero and the logical pair sits on the upper levels."""
    reg = Register((SlotId(site, cycle),), (dim,))
    amps = np.zeros(dim, dtype=complex)
    amps[dim - 2] = amp0
    amps[dim - 1] = amp1
    return PureState(reg, amps)


def vacuum_state(site: str, cycle: int) -> PureState:
    reg = Register((SlotId(site, cycle),), (3,))
    return PureState(reg, [1.0, 0.0, 0.0])


def bell_phi_plus(site_a: str, site_b: str, cycle: int) -> PureState:
    """(|00> + |11>)/sqrt(2) across two sites at one cycle."""
    reg = Register((SlotId(site_a, cycle), SlotId(site_b, cycle)), (2, 2))
    return PureState(reg, [1.0, 0.0, 0.0, 1.0])


def maximally_mixed(register: Register) -> DensityOperator:
    return DensityOperator(register, np.eye(register.dim) / register.dim)


def tensor(a: State, b: State) -> State:
    """Tensor product of two states on slot-disjoint registers.

    Pure x pure stays pure; any density factor makes the result a density.
    """
    reg = Register(a.register.slots + b.register.slots,
                   a.register.dims + b.register.dims)
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(reg, np.kron(a.amplitudes, b.amplitudes))
    ma = to_density(a).matrix
    mb = to_density(b).matrix
    return DensityOperator(reg, np.kron(ma, mb))


def _einsum_letters(n: int):
    if 2 * n > len(string.ascii_letters):
        raise ValueError(f"register too large to trace ({n} slots)")
    return string.ascii_letters


def partial_trace(state: State, keep: Iterable[SlotLike]) -> DensityOperator:
    """Reduced density matrix over the kept slots, which stay in their
    original relative order regardless of how `keep` is ordered."""
    rho = to_density(state)
    reg = rho.register
    keep_slots = [as_slot(s) for s in keep]
    if not keep_slots:
        raise ValueError("must keep at least one slot")
    if len(set(keep_slots)) != len(keep_slots):
        raise ValueError("keep list repeats a slot")
    keep_pos = sorted(reg.index_of(s) for s in keep_slots)
    keep_slots = [reg.slots[p] for p in keep_pos]

    n = len(reg.slots)
    letters = _einsum_letters(n)
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep_pos:
            col[i] = row[i]
    out = "".join(row[p] for p in keep_pos) + "".join(col[p] for p in keep_pos)
    spec = "".join(row) + "".join(col) + "->" + out

    block = rho.matrix.reshape(reg.dims + reg.dims)
    reduced = np.einsum(spec, block)
    kept_dims = tuple(reg.dims[p] for p in keep_pos)
    d = int(np.prod(kept_dims))
    out_reg = Register(tuple(keep_slots), kept_dims)
    return DensityOperator(out_reg, reduced.reshape(d, d))


def permute_slots(state: State, order: Sequence[SlotLike]) -> State:
    """Reorder the register slots; amplitudes follow the permutation."""
    reg = state.register
    perm = [reg.index_of(s) for s in order]
    if sorted(perm) != list(range(len(reg.slots))):
        raise ValueError("order must be a permutation of the register slots")
    new_reg = Register(tuple(reg.slots[p] for p in perm),
                       tuple(reg.dims[p] for p in perm))
    n = len(reg.slots)
    if isinstance(state, PureState):
        amps = state.amplitudes.reshape(reg.dims).transpose(perm).reshape(-1)
        return PureState(new_reg, amps)
    block = state.matrix.reshape(reg.dims + reg.dims)
    m = block.transpose(perm + [p + n for p in perm])
    return DensityOperator(new_reg, m.reshape(new_reg.dim, new_reg.dim))


def relabel_cycles(state: State, site, delta: int) -> State:
    """Shift the cycle label of every slot on one site by delta cycles.

    With site=None every slot shifts, which is how a whole state is carried
    forward in time.  A shift that would land two slots of one site on the
    same cycle is rejected.
    """
    delta = int(delta)
    reg = state.register
    if site is not None and site not in reg.sites:
        raise UnknownSlotError(f"register has no site {site!r}")
    new_slots = tuple(
        s.shifted(delta) if site is None or s.site == site else s
        for s in reg.slots
    )
    new_reg = Register(new_slots, reg.dims)
    if isinstance(state, PureState):
        return PureState(new_reg, state.amplitudes)
    return DensityOperator(new_reg, state.matrix)


def density_to_json(rho: DensityOperator) -> dict:
    """JSON-friendly encoding: slot list plus a [re, im] matrix."""
    return {
        "slots": [
            {"site": s.site, "cycle": s.cycle, "dim": d}
            for s, d in zip(rho.register.slots, rho.register.dims)
        ],
        "matrix": [
            [[float(z.real), float(z.imag)] for z in row]
            for row in rho.matrix
        ],
    }


def density_from_json(obj: dict) -> DensityOperator:
    slots = tuple(SlotId(str(e["site"]), int(e["cycle"])) for e in obj["slots"])
    dims = tuple(int(e["dim"]) for e in obj["slots"])
    reg = Register(slots, dims)
    raw = obj["matrix"]
    m = np.array([[complex(c[0], c[1]) for c in row] for row in raw])
    return DensityOperator(reg, m)

"""End-to-end register-level experiments.

Every scenario here is built from the same primitive moves: prepare a pair
at one cycle, dilate one site so the pair straddles cycles, expand into the
two-copy form, and either read out at a single cycle or close the circuit
with a second gate.  The runners return report objects carrying the exact
intermediate states so tests and the command line can interrogate any step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InvariantViolationError
from .registers import (
    DensityOperator,
    PureState,
    Register,
    SlotId,
    State,
    bell_phi_plus,
    density_to_json,
    maximally_mixed,
    partial_trace,
    qubit_state,
    relabel_cycles,
    tensor,
    to_density,
    vacuum_state,
)
from .dynamics import (
    CorrelationMode,
    apply_gate,
    cnot,
    displaced_expansion,
    ensemble_density,
    free_expansion,
    measure_at_cycle,
    project,
)
from .analytics import CurvePoint, trace_norm_distance, von_neumann_entropy
from .channel import QubitDensity


def _normalize_input(state, tau: int, site: Optional[str]) -> State:
    """Pin the input onto a single slot at the preparation cycle tau."""
    if isinstance(state, QubitDensity):
        return state.to_density(site or "1", tau)
    if isinstance(state, (PureState, DensityOperator)):
        reg = state.register
        if len(reg.slots) != 1:
            raise ValueError("circuit input must occupy a single slot")
        target = SlotId(site or reg.slots[0].site, tau)
        new_reg = Register((target,), reg.dims)
        if isinstance(state, PureState):
            return PureState(new_reg, state.amplitudes)
        return DensityOperator(new_reg, state.matrix)
    raise ValueError(f"unsupported circuit input: {type(state).__name__}")


def _close_displaced(pair: State, tau: int, in_slot: SlotId,
                     anc_slot: SlotId, policy=None):
    """Expand a prepared pair across the dilation and close with a CNOT.

    Returns (rho_d, closed, rho_out): the single-cycle readout before the
    closing gate, the full four-slot state after it, and the reduced
    output on the ancilla slot.
    """
    expanded = displaced_expansion(pair, tau, dilated_site=in_slot.site,
                                   policy=policy)
    rho_d = measure_at_cycle(expanded, in_slot.cycle)
    closed = apply_gate(expanded, cnot(), [in_slot, anc_slot])
    rho_out = partial_trace(closed, [anc_slot])
    return rho_d, closed, rho_out


@dataclass
class CircuitReport:
    """States and entropies from one pass of the displaced-CNOT circuit."""

    input_state: DensityOperator
    rho_s: DensityOperator
    rho_d: DensityOperator
    rho_out: DensityOperator
    four_slot_state: State
    entropies: dict
    tau: int

    def to_json_dict(self) -> dict:
        return {
            "input": density_to_json(self.input_state),
            "rho_s": density_to_json(self.rho_s),
            "rho_d": density_to_json(self.rho_d),
            "rho_out": density_to_json(self.rho_out),
            "entropies": dict(self.entropies),
        }


def run_fig1(state, tau: int = 1, input_site: Optional[str] = None,
             policy=CorrelationMode.UNCORRELATED_COPIES) -> CircuitReport:
    """Run the displaced-CNOT circuit on one input qubit.

    The input is placed at cycle tau, entangled with a fresh ancilla by a
    CNOT, and its site is dilated by tau cycles.  The expansion then spans
    four slots; reading out at the preparation cycle gives rho_d, and the
    closing CNOT plus partial trace give the channel output on the ancilla.

    Mixed inputs are expanded per `policy`, uncorrelated copies by default.
    Pure inputs never consult it.
    """
    tau = int(tau)
    if tau < 1:
        raise ValueError(f"dilation must be at least one cycle, got {tau}")
    inp = _normalize_input(state, tau, input_site)
    site = inp.register.slots[0].site
    anc = "2" if site != "2" else "anc"
    in_slot = SlotId(site, tau)
    anc_slot = SlotId(anc, tau)

    joint = tensor(inp, qubit_state(anc, tau, 1.0, 0.0))
    pair = apply_gate(joint, cnot(), [in_slot, anc_slot])
    rho_s = to_density(pair)
    rho_d, closed, rho_out = _close_displaced(pair, tau, in_slot, anc_slot,
                                              policy=policy)
    entropies = {
        "input": von_neumann_entropy(to_density(inp)),
        "rho_s": von_neumann_entropy(rho_s),
        "rho_d": von_neumann_entropy(rho_d),
        "rho_out": von_neumann_entropy(rho_out),
    }
    return CircuitReport(to_density(inp), rho_s, rho_d, rho_out, closed,
                         entropies, tau)


@dataclass
class ReverseReport:
    """Outcome of undoing the displaced circuit gate by gate."""

    input_state: PureState
    recovered: DensityOperator
    recovered_slot: SlotId
    fidelity: float
    final_state: PureState
    tau: int


def run_reverse(state: PureState, tau: int = 1,
                input_site: Optional[str] = None) -> ReverseReport:
    """Invert the displaced circuit and hand the input qubit back.

    After the forward pass the ancilla site is dilated by the same tau,
    which realigns it with both copies of the input site; undoing the
    CNOTs at both cycles then frees the input state on the forward copy.
    The whole history stays pure, so recovery is exact.
    """
    if not isinstance(state, PureState):
        raise ValueError("reversal is defined for pure inputs")
    rep = run_fig1(state, tau=tau, input_site=input_site)
    four = rep.four_slot_state
    site = rep.rho_s.register.slots[0].site
    anc = rep.rho_s.register.slots[1].site
    tau = rep.tau

    shifted = relabel_cycles(four, anc, tau)
    undone = apply_gate(shifted, cnot(),
                        [SlotId(site, tau), SlotId(anc, tau)])
    undone = apply_gate(undone, cnot(),
                        [SlotId(site, 2 * tau), SlotId(anc, 2 * tau)])
    out_slot = SlotId(site, 2 * tau)
    recovered = partial_trace(undone, [out_slot])

    inp = _normalize_input(state, tau, input_site)
    fid = float(np.real(
        inp.amplitudes.conj() @ recovered.matrix @ inp.amplitudes
    ))
    return ReverseReport(inp, recovered, out_slot, fid, undone, tau)


def run_displaced_backend(state: State, data_site: str,
                          ancilla_site: str = "c") -> DensityOperator:
    """Displaced-CNOT measurement box applied to a two-cycle single site.

    The input occupies one site at two cycles.  Each cycle gets its own
    fresh ancilla and CNOT, the data site is then dilated by the cycle
    gap, and a final CNOT at the later cycle folds the early copy onto
    the late ancilla, which is returned.

    This is the back end a distant party can apply to their half of a
    shared state; it is linear in the two-cycle input, which is exactly
    why it cannot leak a remote measurement choice.
    """
    reg = state.register
    if len(reg.slots) != 2 or set(reg.sites) != {data_site}:
        raise ValueError(
            f"expected two slots on site {data_site!r}, got {list(reg.slots)}"
        )
    if ancilla_site == data_site:
        raise ValueError("ancilla site must differ from the data site")
    c0, c1 = sorted(s.cycle for s in reg.slots)
    st = tensor(state, tensor(qubit_state(ancilla_site, c0, 1.0, 0.0),
                              qubit_state(ancilla_site, c1, 1.0, 0.0)))
    st = apply_gate(st, cnot(),
                    [SlotId(data_site, c0), SlotId(ancilla_site, c0)])
    st = apply_gate(st, cnot(),
                    [SlotId(data_site, c1), SlotId(ancilla_site, c1)])
    st = relabel_cycles(st, data_site, c1 - c0)
    st = apply_gate(st, cnot(),
                    [SlotId(data_site, c1), SlotId(ancilla_site, c1)])
    return partial_trace(st, [SlotId(ancilla_site, c1)])


@dataclass
class NoSignalReport:
    """Bob-side outputs for each of Alice's outcomes in one basis."""

    basis: str
    outcomes: list
    average: DensityOperator
    max_deviation: float
    substitution_output: DensityOperator
    substitution_deviation: float
    tau: int

    def to_json_dict(self) -> dict:
        return {
            "basis": self.basis,
            "outcomes": [
                {"label": label, "probability": prob,
                 "output": density_to_json(rho)}
                for label, prob, rho in self.outcomes
            ],
            "average": density_to_json(self.average),
            "max_deviation": self.max_deviation,
            "substitution_deviation": self.substitution_deviation,
        }


_BASES = {
    "computational": (("0", (1.0, 0.0)), ("1", (0.0, 1.0))),
    "diagonal": (("+", (1.0, 1.0)), ("-", (1.0, -1.0))),
}


def run_no_signaling(basis: str, tau: int = 1) -> NoSignalReport:
    """Alice measures her half of a shared pair; Bob runs the displaced
    box on his two-cycle half.

    For each of Alice's outcomes Bob's output is computed exactly, along
    with its trace-norm deviation from the maximally mixed state.  The
    report also evaluates the box on the uncorrelated stand-in (Bob's
    reduced state copied independently to both cycles), which a nonlinear
    box would have to distinguish for signaling to work.
    """
    if basis not in _BASES:
        raise ValueError(
            f"basis must be one of {sorted(_BASES)}, got {basis!r}"
        )
    tau = int(tau)
    if tau < 1:
        raise ValueError(f"dilation must be at least one cycle, got {tau}")

    pair = bell_phi_plus("a", "b", tau)
    shared = free_expansion(pair, [0, tau])
    mixed_ref = None
    outcomes = []
    for label, vec in _BASES[basis]:
        m = project(shared, SlotId("a", tau), vec, label=label)
        bob = partial_trace(m.post_state, [SlotId("b", 0), SlotId("b", tau)])
        out = run_displaced_backend(bob, "b")
        if mixed_ref is None:
            mixed_ref = maximally_mixed(out.register)
        outcomes.append((label, m.probability, out))

    avg = DensityOperator(
        outcomes[0][2].register,
        sum(p * o.matrix for _, p, o in outcomes),
    )
    devs = [trace_norm_distance(o, mixed_ref) for _, _, o in outcomes]
    devs.append(trace_norm_distance(avg, mixed_ref))

    rb = partial_trace(to_density(pair), [SlotId("b", tau)])
    sub_in = tensor(relabel_cycles(rb, "b", -tau), rb)
    sub_out = run_displaced_backend(sub_in, "b")
    sub_dev = trace_norm_distance(sub_out, mixed_ref)

    return NoSignalReport(basis, outcomes, avg, max(devs), sub_out, sub_dev,
                          tau)


@dataclass
class ProprietyReport:
    """Same average state, different ensembles, different channel outputs."""

    ensemble: list
    proper_output: DensityOperator
    improper_output: DensityOperator
    trace_distance: float
    tau: int


def run_proper_vs_improper(ensemble: Optional[Sequence] = None,
                           tau: int = 1) -> ProprietyReport:
    """Compare running the circuit branch by branch against running it on
    the averaged density matrix.

    The branch-by-branch (proper) path copies each pure branch through the
    expansion; the averaged (improper) path expands the density matrix as
    uncorrelated copies.  A linear channel could never tell the two
    apart, so any gap is a direct readout of the channel's nonlinearity.
    """
    tau = int(tau)
    if ensemble is None:
        ensemble = [(0.5, qubit_state("1", tau, 1.0, 0.0)),
                    (0.5, qubit_state("1", tau, 0.0, 1.0))]
    branches = []
    for w, psi in ensemble:
        if not isinstance(psi, PureState) or len(psi.register.slots) != 1:
            raise ValueError("ensemble branches must be single-slot pure states")
        branches.append((float(w), psi))
    if not branches:
        raise ValueError("empty ensemble")
    if abs(sum(w for w, _ in branches) - 1.0) > 1e-9:
        raise ValueError("ensemble weights must sum to 1")
    if len({psi.register.slots[0].site for _, psi in branches}) != 1:
        raise ValueError("ensemble branches must share one site")

    reports = [(w, run_fig1(psi, tau=tau)) for w, psi in branches]
    out_reg = reports[0][1].rho_out.register
    proper = DensityOperator(
        out_reg, sum(w * rep.rho_out.matrix for w, rep in reports)
    )

    pinned = [(w, _normalize_input(psi, tau, None)) for w, psi in branches]
    avg_in = ensemble_density(pinned)
    improper = run_fig1(avg_in, tau=tau,
                        policy=CorrelationMode.UNCORRELATED_COPIES).rho_out

    return ProprietyReport(branches, proper, improper,
                           trace_norm_distance(proper, improper), tau)


@dataclass
class EntropyStudyReport:
    """Entropy bookkeeping for a vacuum-diluted input sweep."""

    p_vac: float
    tau: int
    points: list
    drop_points: list = field(default_factory=list)


def run_entropy_study(p_vac: float, grid: Sequence[float],
                      tau: int = 1) -> EntropyStudyReport:
    """Sweep the input amplitude with a vacuum admixture and track entropy.

    The input site carries a three-level slot: with probability p_vac it
    holds the vacuum, which passes through every gate untouched, and
    otherwise the qubit alpha|0> + beta|1>.  The branches stay coherent
    through the expansion (each history is copied whole), so rho_d is the
    branch-weighted mixture of per-branch marginal products.

    For every grid point the readout entropy S_rho_d must dominate the
    input entropy S_in; the closing gate can then push the output entropy
    S_out back below S_rho_d.  Points where S_out drops strictly below
    S_rho_d are collected in drop_points.
    """
    p_vac = float(p_vac)
    if not 0.0 <= p_vac <= 1.0:
        raise ValueError(f"vacuum weight out of range: {p_vac}")
    tau = int(tau)
    if tau < 1:
        raise ValueError(f"dilation must be at least one cycle, got {tau}")

    in_slot = SlotId("1", tau)
    anc_slot = SlotId("2", tau)
    points = []
    drops = []
    for b2 in grid:
        b2 = float(b2)
        if not 0.0 <= b2 <= 1.0:
            raise ValueError(f"beta^2 out of range: {b2}")
        alpha = np.sqrt(1.0 - b2)
        beta = np.sqrt(b2)
        branches = []
        if p_vac > 0.0:
            branches.append((p_vac, vacuum_state("1", tau)))
        if p_vac < 1.0:
            branches.append((1.0 - p_vac,
                             qubit_state("1", tau, alpha, beta, dim=3)))

        rho_in = ensemble_density(branches)
        acc = {}
        for w, psi in branches:
            joint = tensor(psi, qubit_state("2", tau, 1.0, 0.0))
            pair_b = apply_gate(joint, cnot(), [in_slot, anc_slot])
            rho_d_b, _, rho_out_b = _close_displaced(pair_b, tau, in_slot,
                                                     anc_slot)
            for key, rho in (("rho_d", rho_d_b), ("rho_out", rho_out_b)):
                if key not in acc:
                    acc[key] = (rho.register,
                                np.zeros_like(rho.matrix))
                acc[key] = (acc[key][0], acc[key][1] + w * rho.matrix)

        rho_d = DensityOperator(*acc["rho_d"])
        rho_out = DensityOperator(*acc["rho_out"])
        s_in = von_neumann_entropy(rho_in)
        s_d = von_neumann_entropy(rho_d)
        s_out = von_neumann_entropy(rho_out)
        if s_in > s_d + 1e-9:
            raise InvariantViolationError(
                f"readout entropy {s_d:.12g} fell below input entropy "
                f"{s_in:.12g} at beta^2={b2:.12g}"
            )
        if s_out < s_d - 1e-12:
            drops.append(b2)
        points.append(
            CurvePoint(b2, {"S_in": s_in, "S_rho_d": s_d, "S_out": s_out})
        )
    return EntropyStudyReport(p_vac, tau, points, drops)


def dilation_from_round_trip(duration: float, speed_fraction: float) -> float:
    """Clock lag accumulated by a round trip at constant speed.

    A traveler moving at v (as a fraction of c) for a stay-at-home
    duration T returns younger by T (1 - sqrt(1 - v^2)); that lag, in the
    same units as T, is the dilation to feed the cycle model after
    rounding to whole cycles.
    """
    duration = float(duration)
    v = float(speed_fraction)
    if duration < 0.0:
        raise ValueError(f"duration must be nonnegative, got {duration}")
    if not 0.0 <= v < 1.0:
        raise ValueError(f"speed fraction must sit in [0, 1), got {v}")
    return duration * (1.0 - np.sqrt(1.0 - v * v))

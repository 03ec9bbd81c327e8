"""Edge-readout-only state tomography and full process tomography.

Only the edge qubit X can be measured, so information about the inner qubit
is routed to it with exchange pulses before projecting.  The shipped design
uses 15 sequences, minimal and informationally complete together with the
normalization constraint:

* one transfer-correlation sequence per axis pair (i, j): rotate i onto z on
  X and j onto z on A, project the edge, run the full spin-transfer pulse
  (duration pi/4 in units of 1/g, swapping the two spins), project again.
  The (z, z) member needs no rotations and reads the leading population
  directly; it is sequence #1.
* three single-projection sequences reading the edge-qubit axes directly;
* three sequences reading the inner-qubit axes after one transfer pulse.

Reconstruction solves the linear system built from the IDEAL effect
operators.  Readout noise is deliberately not inverted, so reconstructed
states and the process matrix inherit the (r, gdtau) degradation; at r = 1,
gdtau = 0 reconstruction is exact.  No positivity repair is applied, raw
linear-inversion outputs travel as plain arrays.

Process tomography prepares the 16 spanning pure inputs, pushes each through
the noisy gate and the tomography above, and assembles chi[(m,n),(k,l)] by
linearity.  A Monte Carlo mode replaces every analytic sequence probability
with a sampled estimate and propagates binomial errors through the linear
pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import closed_form
from .blockade import (
    Evolve,
    MeasureSequence,
    Project,
    Rotate,
    UP,
    ideal_effect_operator,
    propagate_sequence_samples,
    sequence_probability,
)
from .dynamics import (
    GateSchedule,
    NoiseParams,
    SIGMA_I,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    hadamard,
    local_rotation,
    noisy_cnot_channel,
    zz_hamiltonian,
)
from .process_matrix import CHI_LABELS, CHI_ORDER, ProcessMatrix, process_fidelity  # noqa: F401  (fidelity re-exported)
from .qcore import DIM, apply_channel, hermitize, negativity, pure_state

#: Full spin-transfer pulse duration in units of 1/g.
TRANSFER_TIME = math.pi / 4.0

#: Pauli product basis, X factor first; index 0 is the identity.
PAULI_BASIS = tuple(
    np.kron(p, q)
    for p in (SIGMA_I, SIGMA_X, SIGMA_Y, SIGMA_Z)
    for q in (SIGMA_I, SIGMA_X, SIGMA_Y, SIGMA_Z)
)

_AXES = ("z", "x", "y")


class DesignRankError(ValueError):
    """Raised when a sequence design fails informational completeness."""

    def __init__(self, achieved_rank: int):
        super().__init__(f"tomography design reached rank {achieved_rank}, need 16")
        self.achieved_rank = achieved_rank


@dataclass(frozen=True)
class TomographyDesign:
    """Sequences, their ideal effects, and the inversion matrix."""

    g: float
    sequences: tuple
    effects: tuple
    design_matrix: np.ndarray

    @property
    def n_sequences(self) -> int:
        return len(self.sequences)


def _axis_prerotation(scope: str, axis: str) -> tuple:
    """Rotation steps mapping the given spin axis onto z for later z-readout."""
    if axis == "z":
        return ()
    if axis == "x":
        return (Rotate(scope=scope, axis="y", theta=math.pi / 2),)
    if axis == "y":
        return (Rotate(scope=scope, axis="x", theta=math.pi / 2),)
    raise ValueError(f"unknown axis {axis!r}")


def _pair_sequence(axis_x: str, axis_a: str) -> MeasureSequence:
    steps = (
        *_axis_prerotation("X", axis_x),
        *_axis_prerotation("A", axis_a),
        Project(UP),
        Evolve(TRANSFER_TIME),
        Project(UP),
    )
    return MeasureSequence(steps=steps)


def _edge_sequence(axis: str) -> MeasureSequence:
    return MeasureSequence(steps=(*_axis_prerotation("X", axis), Project(UP)))


def _inner_sequence(axis: str) -> MeasureSequence:
    return MeasureSequence(
        steps=(*_axis_prerotation("A", axis), Evolve(TRANSFER_TIME), Project(UP))
    )


def design_matrix_rows(effects) -> np.ndarray:
    """Effect operators expanded over the Pauli basis, plus the trace row."""
    rows = []
    for effect in effects:
        rows.append([np.trace(effect @ b).real for b in PAULI_BASIS])
    rows.append([np.trace(b).real for b in PAULI_BASIS])
    return np.array(rows, dtype=float)


def design_from_sequences(sequences, g: float) -> TomographyDesign:
    """Build and verify a design from user-supplied sequences.

    Exactly 15 sequences are required (the trace constraint supplies the 16th
    row), and their ideal effects together with the identity must span the
    full operator space.
    """
    sequences = tuple(sequences)
    if len(sequences) != 15:
        raise ValueError(f"a design needs exactly 15 sequences, got {len(sequences)}")
    effects = tuple(ideal_effect_operator(seq, g) for seq in sequences)
    matrix = design_matrix_rows(effects)
    rank = int(np.linalg.matrix_rank(matrix, tol=1e-8))
    if rank != 16:
        raise DesignRankError(rank)
    matrix.setflags(write=False)
    return TomographyDesign(g=g, sequences=sequences, effects=effects, design_matrix=matrix)


def design_sequences(g: float) -> TomographyDesign:
    """The shipped 15-sequence design; deterministic and verified rank 16.

    Sequence #1 is the bare two-projection transfer sequence whose ideal
    effect is the |1><1| population.  Dropping any single sequence lowers the
    rank to 15 (the design is minimal).
    """
    sequences = [_pair_sequence("z", "z")]
    sequences += [_edge_sequence(axis) for axis in _AXES]
    sequences += [_inner_sequence(axis) for axis in _AXES]
    sequences += [
        _pair_sequence(ax, aa)
        for ax in ("x", "y", "z")
        for aa in ("x", "y", "z")
        if (ax, aa) != ("z", "z")
    ]
    return design_from_sequences(sequences, g)


def reconstruct_state(probabilities, design: TomographyDesign) -> np.ndarray:
    """Linear inversion with ideal effects; returns the raw Hermitian solution.

    The supplied probabilities may come from noisy readout, in which case the
    output is the noise-degraded reconstruction (possibly non-physical); no
    positivity repair is attempted.
    """
    probs = np.asarray(probabilities, dtype=float)
    if probs.shape != (design.n_sequences,):
        raise ValueError(
            f"expected {design.n_sequences} probabilities, got shape {probs.shape}"
        )
    rhs = np.concatenate([probs, [1.0]])
    try:
        coeffs = np.linalg.solve(design.design_matrix, rhs)
    except np.linalg.LinAlgError as exc:
        raise DesignRankError(int(np.linalg.matrix_rank(design.design_matrix))) from exc
    rho = sum(c * b for c, b in zip(coeffs, PAULI_BASIS))
    return np.asarray(rho, dtype=complex)


@dataclass(frozen=True)
class QptInputSet:
    """The 16 spanning pure inputs: 4 basis states and 12 equal superpositions."""

    diagonal: tuple                 # diagonal[m] = |m><m|
    plus: dict                      # plus[(m, n)] = |+; mn><+; mn|, m < n
    minus: dict                     # minus[(m, n)] with the i-weighted superposition

    def items(self):
        for m in range(DIM):
            yield ("d", m), self.diagonal[m]
        for (m, n), rho in self.plus.items():
            yield ("+", m, n), rho
        for (m, n), rho in self.minus.items():
            yield ("-", m, n), rho


def qpt_input_states() -> QptInputSet:
    """|m> for each basis state and (|m> + |n>)/sqrt2, (|m> + i|n>)/sqrt2 for m < n."""
    diagonal = []
    for m in range(DIM):
        e = np.zeros(DIM, dtype=complex)
        e[m] = 1.0
        diagonal.append(pure_state(e))
    plus, minus = {}, {}
    for m in range(DIM):
        for n in range(m + 1, DIM):
            v = np.zeros(DIM, dtype=complex)
            v[m] = 1.0
            v[n] = 1.0
            plus[(m, n)] = pure_state(v)
            w = np.zeros(DIM, dtype=complex)
            w[m] = 1.0
            w[n] = 1j
            minus[(m, n)] = pure_state(w)
    return QptInputSet(diagonal=tuple(diagonal), plus=plus, minus=minus)


def assemble_channel_action(outputs: dict) -> dict:
    """Channel action on every unit matrix E_kl from the 16 state outputs.

    For m < n, linearity gives

        E(E_mn) = E(|+;mn>) + i E(|-;mn>) - (1+i)/2 (E(|m><m|) + E(|n><n|)),

    and E(E_nm) is its adjoint (the pipeline maps Hermitian to Hermitian).
    """
    for m in range(DIM):
        if ("d", m) not in outputs:
            raise ValueError(f"missing output for diagonal input {m}")
    action = {}
    for m in range(DIM):
        action[(m, m)] = np.asarray(outputs[("d", m)], dtype=complex)
    for m in range(DIM):
        for n in range(m + 1, DIM):
            for key in (("+", m, n), ("-", m, n)):
                if key not in outputs:
                    raise ValueError(f"missing output for superposition input {key}")
            g_mn = (
                outputs[("+", m, n)]
                + 1j * outputs[("-", m, n)]
                - 0.5 * (1.0 + 1j) * (outputs[("d", m)] + outputs[("d", n)])
            )
            action[(m, n)] = g_mn
            action[(n, m)] = g_mn.conj().T
    return action


def _chi_from_action(action: dict) -> np.ndarray:
    chi = np.zeros((16, 16), dtype=complex)
    for col, (k, l) in enumerate(CHI_ORDER):
        block = action[(k, l)]
        for row, (m, n) in enumerate(CHI_ORDER):
            chi[row, col] = block[m, n]
    return chi


def _mc_gate_batch(psi: np.ndarray, noise: NoiseParams, rng: np.random.Generator) -> np.ndarray:
    """Apply one independently sampled noisy CNOT per trajectory, (n, 4) batch."""
    n = psi.shape[0]
    g = noise.g
    schedule = GateSchedule.for_coupling(g)
    psi = psi @ hadamard("A").T
    s1 = rng.normal(schedule.tau0_cnot / 2.0, noise.delta_tau / 2.0, size=n)
    s2 = rng.normal(schedule.tau0_cnot / 2.0, noise.delta_tau / 2.0, size=n)
    # Pulse sum drives the controlled phase, pulse difference the flip-flop leak.
    zz_diag = np.diag(zz_hamiltonian(g)).real
    psi = psi * np.exp(-1j * np.outer(s1 + s2, zz_diag))
    angle = 2.0 * g * (s1 - s2)
    cos_a, sin_a = np.cos(angle), np.sin(angle)
    mid1, mid2 = psi[:, 1].copy(), psi[:, 2].copy()
    psi[:, 1] = cos_a * mid1 - 1j * sin_a * mid2
    psi[:, 2] = -1j * sin_a * mid1 + cos_a * mid2
    outer = (
        hadamard("A")
        @ local_rotation("X", "z", math.pi / 2)
        @ local_rotation("A", "z", math.pi / 2)
    )
    return psi @ outer.T


def _qpt_probabilities_mc(
    rho_in: np.ndarray,
    design: TomographyDesign,
    noise: NoiseParams,
    n_samples: int,
    seed_seq: np.random.SeedSequence,
) -> tuple[np.ndarray, np.ndarray]:
    """Sampled sequence probabilities for one input state, with standard errors."""
    from .blockade import sample_initial_states, _MC_CHUNK

    children = seed_seq.spawn(design.n_sequences)
    estimates = np.zeros(design.n_sequences)
    errors = np.zeros(design.n_sequences)
    for j, seq in enumerate(design.sequences):
        rng = np.random.default_rng(children[j])
        successes = 0
        remaining = int(n_samples)
        while remaining > 0:
            m = min(remaining, _MC_CHUNK)
            psi = sample_initial_states(rho_in, m, rng)
            psi = _mc_gate_batch(psi, noise, rng)
            alive = np.ones(m, dtype=bool)
            _, alive = propagate_sequence_samples(psi, alive, seq, noise, rng)
            successes += int(alive.sum())
            remaining -= m
        p_hat = successes / n_samples
        estimates[j] = p_hat
        errors[j] = math.sqrt(p_hat * (1.0 - p_hat) / n_samples)
    return estimates, errors


def _stderr_through_reconstruction(design: TomographyDesign, prob_err: np.ndarray) -> np.ndarray:
    """Entrywise standard error of the reconstructed 4x4 state."""
    inv = np.linalg.inv(design.design_matrix)
    var_coeffs = (inv[:, : design.n_sequences] ** 2) @ (prob_err ** 2)
    var_rho = np.zeros((DIM, DIM))
    for var_c, basis_op in zip(var_coeffs, PAULI_BASIS):
        var_rho += var_c * np.abs(basis_op) ** 2
    return np.sqrt(var_rho)


def run_qpt(
    noise: NoiseParams,
    method: str = "pipeline",
    mc_samples: int = 100_000,
    seed: int = 0,
    design: TomographyDesign | None = None,
) -> ProcessMatrix:
    """Process matrix of the noisy CNOT by one of three routes.

    pipeline      prepare the 16 inputs, apply the averaged noisy gate, run the
                  analytic sequence evaluator, reconstruct with ideal effects,
                  and assemble chi by linearity;
    closed_form   evaluate the explicit block expressions directly;
    monte_carlo   like pipeline but every probability is a sampled estimate
                  (mc_samples trajectories each, deterministic in the seed),
                  with binomial errors propagated onto the chi entries.
    """
    if method == "closed_form":
        return closed_form.chi_closed_form(noise.r, noise.gdtau)
    if method not in ("pipeline", "monte_carlo"):
        raise ValueError(f"unknown method {method!r}")
    if design is None:
        design = design_sequences(noise.g)
    inputs = qpt_input_states()
    channel = noisy_cnot_channel(noise) if method == "pipeline" else None
    outputs = {}
    output_errs = {}
    if method == "monte_carlo":
        if mc_samples < 1:
            raise ValueError("mc_samples must be at least 1")
        input_seeds = np.random.SeedSequence(seed).spawn(16)
    for idx, (label, rho_in) in enumerate(inputs.items()):
        if method == "pipeline":
            rho_out = apply_channel(channel, rho_in)
            probs = [sequence_probability(seq, rho_out, noise) for seq in design.sequences]
            outputs[label] = reconstruct_state(probs, design)
        else:
            probs, errs = _qpt_probabilities_mc(rho_in, design, noise, mc_samples, input_seeds[idx])
            outputs[label] = reconstruct_state(probs, design)
            output_errs[label] = _stderr_through_reconstruction(design, errs)
    action = assemble_channel_action(outputs)
    chi = _chi_from_action(action)
    stderr = None
    if method == "monte_carlo":
        var_action = {}
        for m in range(DIM):
            var_action[(m, m)] = output_errs[("d", m)] ** 2
        for m in range(DIM):
            for n in range(m + 1, DIM):
                var = (
                    output_errs[("+", m, n)] ** 2
                    + output_errs[("-", m, n)] ** 2
                    + 0.5 * (output_errs[("d", m)] ** 2 + output_errs[("d", n)] ** 2)
                )
                var_action[(m, n)] = var
                var_action[(n, m)] = var.T
        stderr = np.zeros((16, 16))
        for col, (k, l) in enumerate(CHI_ORDER):
            for row, (m, n) in enumerate(CHI_ORDER):
                stderr[row, col] = math.sqrt(var_action[(k, l)][m, n])
    return ProcessMatrix(chi=chi, ordering=CHI_LABELS, stderr=stderr)


# ----------------------------------------------------------------------------
# Entanglement creation threshold
# ----------------------------------------------------------------------------

#: Input for the entanglement experiment: (|up> + |down>)_X / sqrt2 on X, |up> on A.
ENTANGLEMENT_INPUT = pure_state([1.0, 0.0, 1.0, 0.0])

_NEGATIVITY_EPS = 1e-10


@dataclass(frozen=True)
class ThresholdResult:
    """Outcome of the polarization threshold search."""

    r_star: float | None
    bracket_history: tuple
    curve: tuple                 # sampled (r, negativity) pairs
    endpoint_low: float
    endpoint_high: float
    message: str


def reconstructed_output_negativity(
    r: float, gdtau: float, design: TomographyDesign
) -> float:
    """Negativity of the tomographically reconstructed gate output.

    The superposition input is pushed through the averaged noisy CNOT, the 15
    sequence probabilities are evaluated at readout polarization r, and the
    raw linear-inversion state is tested with the partial transpose.
    """
    noise = NoiseParams(g=design.g, delta_tau=gdtau / design.g, r=r)
    rho_out = apply_channel(noisy_cnot_channel(noise), ENTANGLEMENT_INPUT)
    probs = [sequence_probability(seq, rho_out, noise) for seq in design.sequences]
    rho_rec = reconstruct_state(probs, design)
    return negativity(hermitize(rho_rec))


def entanglement_threshold(
    design: TomographyDesign,
    gdtau: float,
    tol: float = 1e-4,
    sweep_steps: int = 64,
) -> ThresholdResult:
    """Smallest polarization at which the reconstructed output is entangled.

    A bracketing sweep over sweep_steps intervals guards against
    non-monotonic pathologies before bisecting the first sign change of the
    negativity down to width tol.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    grid = np.linspace(0.0, 1.0, sweep_steps + 1)
    values = [reconstructed_output_negativity(r, gdtau, design) for r in grid]
    curve = tuple((float(r), float(v)) for r, v in zip(grid, values))
    entangled = [v > _NEGATIVITY_EPS for v in values]
    if entangled[0]:
        return ThresholdResult(
            r_star=0.0, bracket_history=(), curve=curve,
            endpoint_low=values[0], endpoint_high=values[-1],
            message="entangled over the whole polarization range",
        )
    if not any(entangled):
        return ThresholdResult(
            r_star=None, bracket_history=(), curve=curve,
            endpoint_low=values[0], endpoint_high=values[-1],
            message="no threshold: reconstructed output never entangled",
        )
    first = next(i for i, flag in enumerate(entangled) if flag)
    lo, hi = float(grid[first - 1]), float(grid[first])
    history = [(lo, hi)]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if reconstructed_output_negativity(mid, gdtau, design) > _NEGATIVITY_EPS:
            hi = mid
        else:
            lo = mid
        history.append((lo, hi))
    return ThresholdResult(
        r_star=hi,
        bracket_history=tuple(history),
        curve=curve,
        endpoint_low=values[0],
        endpoint_high=values[-1],
        message="threshold located",
    )

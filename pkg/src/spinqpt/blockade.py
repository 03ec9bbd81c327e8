"""Spin-blockade readout of the edge qubit and measurement-sequence evaluation.

The edge qubit X is read out through Pauli blockade of channel electrons.
With channel polarization r in [0, 1] a declared outcome is correct only with
probability (1+r)/2, so declaring "up" realizes the unnormalized map

    rho  ->  (1+r)/2 P_up rho P_up  +  (1-r)/2 P_down rho P_down,

whose trace is the probability of that declaration.  A measurement sequence
is an ordered list of primitives (edge projection, exchange evolution of a
given mean duration, local or global rotation) ending in a projection; its
success probability is the joint probability that every projection reports
its declared outcome.  Branch weights compose multiplicatively step by step
and nothing is renormalized in between; sequences with three or more
projections extend the two-projection branch bookkeeping by the same product
rule.

Evolve durations are stored in units of 1/g so that serialized sequences are
coupling independent.  The analytic evaluator replaces each Evolve step by
the exact Gaussian-averaged exchange channel; the Monte Carlo evaluator draws
a fresh duration per Evolve step and a Bernoulli readout branch per
projection, giving an independent unbiased estimate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .dynamics import (
    NoiseParams,
    evolve_unitary,
    exchange_hamiltonian,
    gaussian_averaged_channel,
    global_rotation,
    local_rotation,
)
from .qcore import DIM, PROJ_DOWN, PROJ_UP, apply_channel, as_density_array, hermitize

UP = "up"
DOWN = "down"

_SCOPES = ("X", "A", "global")
_AXES = ("x", "y", "z")


@dataclass(frozen=True)
class Project:
    """Blockade readout of the edge qubit with a declared outcome."""

    declared: str

    def __post_init__(self):
        if self.declared not in (UP, DOWN):
            raise ValueError(f"declared outcome must be 'up' or 'down', got {self.declared!r}")


@dataclass(frozen=True)
class Evolve:
    """Free exchange evolution; mean_time is in units of 1/g and must be positive."""

    mean_time: float

    def __post_init__(self):
        if not self.mean_time > 0:
            raise ValueError(f"Evolve mean time must be positive, got {self.mean_time}")


@dataclass(frozen=True)
class Rotate:
    """Ideal rotation of one qubit or of both (scope 'global')."""

    scope: str
    axis: str
    theta: float

    def __post_init__(self):
        if self.scope not in _SCOPES:
            raise ValueError(f"scope must be one of {_SCOPES}, got {self.scope!r}")
        if self.axis not in _AXES:
            raise ValueError(f"axis must be one of {_AXES}, got {self.axis!r}")
        if not np.isfinite(self.theta):
            raise ValueError("rotation angle must be finite")


MeasurePrimitive = Union[Project, Evolve, Rotate]


@dataclass(frozen=True)
class MeasureSequence:
    """Ordered primitives defining one readout experiment; ends with a projection."""

    steps: tuple

    def __post_init__(self):
        steps = tuple(self.steps)
        if not steps:
            raise ValueError("a measurement sequence cannot be empty")
        for step in steps:
            if not isinstance(step, (Project, Evolve, Rotate)):
                raise ValueError(f"unknown sequence step {step!r}")
        if not isinstance(steps[-1], Project):
            raise ValueError("a measurement sequence must end with a projection")
        object.__setattr__(self, "steps", steps)

    @property
    def n_projections(self) -> int:
        return sum(isinstance(s, Project) for s in self.steps)


def rotation_unitary(step: Rotate) -> np.ndarray:
    if step.scope == "global":
        return global_rotation(step.axis, step.theta)
    return local_rotation(step.scope, step.axis, step.theta)


def branch_weights(r: float) -> tuple[float, float]:
    """(correct, error) readout branch probabilities, (1+r)/2 and (1-r)/2."""
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"polarization must lie in [0, 1], got {r}")
    return 0.5 * (1.0 + r), 0.5 * (1.0 - r)


def blockade_map(rho: np.ndarray, declared: str, r: float) -> np.ndarray:
    """Unnormalized post-readout operator; its trace is the declaration probability."""
    correct, error = branch_weights(r)
    arr = as_density_array(rho)
    if declared == UP:
        keep, flip = PROJ_UP, PROJ_DOWN
    elif declared == DOWN:
        keep, flip = PROJ_DOWN, PROJ_UP
    else:
        raise ValueError(f"declared outcome must be 'up' or 'down', got {declared!r}")
    return correct * keep @ arr @ keep + error * flip @ arr @ flip


def sequence_probability(seq: MeasureSequence, rho, noise: NoiseParams) -> float:
    """Probability that every projection in the sequence reports its declared outcome.

    Evolve steps act through the Gaussian-averaged exchange channel at the
    step's mean duration and the global dispersion noise.delta_tau; rotations
    are ideal; projections apply the polarization-degraded blockade map.  The
    running operator is never renormalized, so the final trace is the joint
    success probability.
    """
    state = as_density_array(rho).copy()
    hexch = exchange_hamiltonian(noise.g)
    for step in seq.steps:
        if isinstance(step, Project):
            state = blockade_map(state, step.declared, noise.r)
        elif isinstance(step, Evolve):
            channel = gaussian_averaged_channel(hexch, step.mean_time / noise.g, noise.delta_tau)
            state = apply_channel(channel, state)
        else:
            u = rotation_unitary(step)
            state = u @ state @ u.conj().T
    return float(np.trace(state).real)


def ideal_effect_operator(seq: MeasureSequence, g: float) -> np.ndarray:
    """Hermitian effect E with Tr[E rho] = success probability at r = 1, delta_tau = 0.

    Built by back-propagating the projections and the ideal unitaries through
    the sequence.  Satisfies 0 <= E <= 1 and is independent of g because the
    Evolve durations are stored in units of 1/g.
    """
    hexch = exchange_hamiltonian(g)
    effect = np.eye(DIM, dtype=complex)
    for step in reversed(seq.steps):
        if isinstance(step, Project):
            proj = PROJ_UP if step.declared == UP else PROJ_DOWN
            effect = proj @ effect @ proj
        elif isinstance(step, Evolve):
            u = evolve_unitary(hexch, step.mean_time / g)
            effect = u.conj().T @ effect @ u
        else:
            u = rotation_unitary(step)
            effect = u.conj().T @ effect @ u
    return hermitize(effect)


# ----------------------------------------------------------------------------
# Monte Carlo evaluation
# ----------------------------------------------------------------------------

_MC_CHUNK = 250_000


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo probability estimate with its binomial standard error."""

    estimate: float
    stderr: float
    n_samples: int


def sample_initial_states(rho, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n pure states from the eigen-mixture of rho, as an (n, 4) array."""
    arr = as_density_array(rho)
    evals, evecs = np.linalg.eigh(hermitize(arr))
    probs = np.clip(evals.real, 0.0, None)
    total = probs.sum()
    if total <= 0:
        raise ValueError("cannot sample from a zero state")
    probs = probs / total
    idx = rng.choice(DIM, size=n, p=probs)
    return evecs.T[idx].astype(complex)


def propagate_sequence_samples(
    psi: np.ndarray,
    alive: np.ndarray,
    seq: MeasureSequence,
    noise: NoiseParams,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Run one batch of pure-state trajectories through a sequence, in place.

    psi is (n, 4); alive marks trajectories whose declared outcomes have all
    occurred so far.  Random draws are made for every trajectory at every step
    regardless of the alive mask, which keeps the stream layout deterministic.
    """
    n = psi.shape[0]
    hexch = exchange_hamiltonian(noise.g)
    energies, v = np.linalg.eigh(hermitize(hexch))
    correct_weight, _ = branch_weights(noise.r)
    for step in seq.steps:
        if isinstance(step, Rotate):
            psi = psi @ rotation_unitary(step).T
        elif isinstance(step, Evolve):
            taus = rng.normal(step.mean_time / noise.g, noise.delta_tau, size=n)
            amp = psi @ v.conj()
            amp *= np.exp(-1j * np.outer(taus, energies))
            psi = amp @ v.T
        else:
            correct = rng.random(n) < correct_weight
            want_up = correct if step.declared == UP else ~correct
            p_up = np.abs(psi[:, 0]) ** 2 + np.abs(psi[:, 1]) ** 2
            p_phys = np.where(want_up, p_up, 1.0 - p_up)
            alive &= rng.random(n) < p_phys
            block = np.where(want_up[:, None], [[1.0, 1.0, 0.0, 0.0]], [[0.0, 0.0, 1.0, 1.0]])
            psi = psi * block
            norms = np.sqrt(np.maximum(p_phys, 1e-300))
            psi = psi / norms[:, None]
    return psi, alive


def sequence_probability_mc(
    seq: MeasureSequence,
    rho,
    noise: NoiseParams,
    n_samples: int,
    rng: np.random.Generator,
) -> McEstimate:
    """Unbiased Monte Carlo estimate of :func:`sequence_probability`.

    Each trajectory draws a Gaussian duration per Evolve step, a Bernoulli
    readout branch per projection, and a Born-rule acceptance for the branch
    projector; the estimate is the surviving fraction.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    successes = 0
    remaining = int(n_samples)
    while remaining > 0:
        m = min(remaining, _MC_CHUNK)
        psi = sample_initial_states(rho, m, rng)
        alive = np.ones(m, dtype=bool)
        _, alive = propagate_sequence_samples(psi, alive, seq, noise, rng)
        successes += int(alive.sum())
        remaining -= m
    p_hat = successes / n_samples
    stderr = float(np.sqrt(p_hat * (1.0 - p_hat) / n_samples))
    return McEstimate(estimate=float(p_hat), stderr=stderr, n_samples=int(n_samples))


# ----------------------------------------------------------------------------
# Line-oriented sequence serialization
# ----------------------------------------------------------------------------

def format_sequence(seq: MeasureSequence) -> str:
    """One primitive per line: P+, P-, E <time>, R <X|A|G> <x|y|z> <theta>."""
    lines = []
    for step in seq.steps:
        if isinstance(step, Project):
            lines.append("P+" if step.declared == UP else "P-")
        elif isinstance(step, Evolve):
            lines.append(f"E {step.mean_time!r}")
        else:
            scope = "G" if step.scope == "global" else step.scope
            lines.append(f"R {scope} {step.axis} {step.theta!r}")
    return "\n".join(lines) + "\n"


def _parse_step(raw: str) -> MeasurePrimitive:
    line = raw.strip()
    if line == "P+":
        return Project(UP)
    if line == "P-":
        return Project(DOWN)
    if line.startswith("E "):
        return Evolve(mean_time=float(line[2:]))
    if line.startswith("R "):
        parts = line.split()
        if len(parts) != 4:
            raise ValueError(f"malformed rotation line: {raw!r}")
        scope = {"X": "X", "A": "A", "G": "global"}.get(parts[1])
        if scope is None:
            raise ValueError(f"unknown rotation scope in line: {raw!r}")
        return Rotate(scope=scope, axis=parts[2], theta=float(parts[3]))
    raise ValueError(f"unrecognized sequence line: {raw!r}")


def parse_sequence(text: str) -> MeasureSequence:
    """Inverse of :func:`format_sequence`; round-trips exactly."""
    steps = [_parse_step(raw) for raw in text.splitlines() if raw.strip()]
    return MeasureSequence(steps=tuple(steps))


def format_sequences(sequences) -> str:
    """Several sequences in one document, separated by blank lines."""
    return "\n".join(format_sequence(seq) for seq in sequences)


def parse_sequences(text: str) -> tuple:
    """Inverse of :func:`format_sequences`."""
    sequences = []
    block: list = []
    for raw in text.splitlines():
        if raw.strip():
            block.append(_parse_step(raw))
        elif block:
            sequences.append(MeasureSequence(steps=tuple(block)))
            block = []
    if block:
        sequences.append(MeasureSequence(steps=tuple(block)))
    return tuple(sequences)

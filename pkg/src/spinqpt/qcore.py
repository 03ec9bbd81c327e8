"""Dense two-qubit primitives: density matrices, channels, entanglement measures.

All operators are plain complex numpy arrays in the fixed product basis

    |1> = |uu>,  |2> = |ud>,  |3> = |du>,  |4> = |dd>,

where the first spin label is the edge qubit X (the only directly measurable
one) and the second is the inner qubit A.  Superoperators act on
column-stacked operators, vec(A @ P @ B) = (B.T kron A) @ vec(P), and are
stored as 16x16 arrays.

Everything in this module is a pure function of immutable inputs; arrays held
by the value types are marked read-only after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DIM = 4

#: Spin labels of the basis states, index i <-> |i+1>.
BASIS_LABELS = ("uu", "ud", "du", "dd")

#: Projectors onto the edge-qubit spin states (up / down), acting on X only.
PROJ_UP = np.diag([1.0, 1.0, 0.0, 0.0]).astype(complex)
PROJ_DOWN = np.diag([0.0, 0.0, 1.0, 1.0]).astype(complex)
PROJ_UP.setflags(write=False)
PROJ_DOWN.setflags(write=False)

# Tolerance conventions used throughout the package: structural checks at
# 1e-10, cross-method equality at 1e-12, eigensolver slack for positivity
# at 1e-9 (dense eigensolvers produce tiny spurious negatives).
STRUCTURAL_TOL = 1e-10
CROSS_METHOD_TOL = 1e-12
POSITIVITY_SLACK = 1e-9


def vec(mat: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(mat).reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vec` for square matrices."""
    v = np.asarray(v)
    d = int(round(np.sqrt(v.size)))
    return v.reshape((d, d), order="F")


def hermitize(mat: np.ndarray) -> np.ndarray:
    """(M + M†)/2, absorbing floating-point asymmetry before eigensolves."""
    return 0.5 * (mat + mat.conj().T)


def basis_state(index: int) -> np.ndarray:
    """Density matrix |i><i| of the computational basis state, 0-based index."""
    if not 0 <= index < DIM:
        raise ValueError(f"basis index must be in 0..3, got {index}")
    rho = np.zeros((DIM, DIM), dtype=complex)
    rho[index, index] = 1.0
    return rho


def pure_state(amplitudes) -> np.ndarray:
    """Density matrix of a (normalized) statevector."""
    psi = np.asarray(amplitudes, dtype=complex).reshape(DIM)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("zero statevector")
    psi = psi / norm
    return np.outer(psi, psi.conj())


@dataclass(frozen=True)
class DensityMatrix4:
    """Validated two-qubit density matrix.

    Construction checks Hermiticity and unit trace to 1e-10 and eigenvalues
    down to -1e-10.  Reconstructed (possibly non-physical) tomography outputs
    are deliberately NOT carried by this type; they travel as raw arrays.
    """

    mat: np.ndarray

    def __post_init__(self):
        mat = np.array(self.mat, dtype=complex)
        if mat.shape != (DIM, DIM):
            raise ValueError(f"expected a 4x4 matrix, got shape {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > STRUCTURAL_TOL:
            raise ValueError("density matrix is not Hermitian within 1e-10")
        if abs(np.trace(mat).real - 1.0) > STRUCTURAL_TOL or abs(np.trace(mat).imag) > STRUCTURAL_TOL:
            raise ValueError("density matrix trace differs from 1 beyond 1e-10")
        if np.linalg.eigvalsh(hermitize(mat)).min() < -STRUCTURAL_TOL:
            raise ValueError("density matrix has an eigenvalue below -1e-10")
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @classmethod
    def from_statevector(cls, amplitudes) -> "DensityMatrix4":
        return cls(pure_state(amplitudes))

    @classmethod
    def basis(cls, index: int) -> "DensityMatrix4":
        return cls(basis_state(index))

    @classmethod
    def maximally_mixed(cls) -> "DensityMatrix4":
        return cls(np.eye(DIM, dtype=complex) / DIM)


def as_density_array(rho) -> np.ndarray:
    """Accept either a DensityMatrix4 or a raw 4x4 array; return the array."""
    if isinstance(rho, DensityMatrix4):
        return rho.mat
    arr = np.asarray(rho, dtype=complex)
    if arr.shape != (DIM, DIM):
        raise ValueError(f"expected a 4x4 operator, got shape {arr.shape}")
    return arr


def kraus_to_superop(kraus) -> np.ndarray:
    """Superoperator of rho -> sum_i K_i rho K_i† in the column-stacking convention."""
    s = np.zeros((DIM * DIM, DIM * DIM), dtype=complex)
    for k in kraus:
        k = np.asarray(k, dtype=complex)
        s += np.kron(k.conj(), k)
    return s


@dataclass(frozen=True)
class QuantumChannel:
    """Completely positive map on 4x4 operators, stored as a 16x16 superoperator.

    A Kraus decomposition is optional.  When present it is validated eagerly:
    the operators must satisfy sum_i K_i† K_i = 1 within 1e-10 and must induce
    the stored superoperator within 1e-12.  Maps that are not trace preserving
    (for example a bare projection) can still be represented by passing the
    superoperator alone.
    """

    superop: np.ndarray
    kraus: tuple | None = None

    def __post_init__(self):
        s = np.array(self.superop, dtype=complex)
        if s.shape != (DIM * DIM, DIM * DIM):
            raise ValueError(f"superoperator must be 16x16, got {s.shape}")
        s.setflags(write=False)
        object.__setattr__(self, "superop", s)
        if self.kraus is not None:
            ops = tuple(np.array(k, dtype=complex) for k in self.kraus)
            for k in ops:
                if k.shape != (DIM, DIM):
                    raise ValueError("Kraus operators must be 4x4")
                k.setflags(write=False)
            completeness = sum(k.conj().T @ k for k in ops)
            if np.max(np.abs(completeness - np.eye(DIM))) > STRUCTURAL_TOL:
                raise ValueError("Kraus operators do not sum to identity within 1e-10")
            if np.max(np.abs(kraus_to_superop(ops) - s)) > CROSS_METHOD_TOL:
                raise ValueError("superoperator inconsistent with Kraus decomposition")
            object.__setattr__(self, "kraus", ops)

    @classmethod
    def from_kraus(cls, kraus) -> "QuantumChannel":
        ops = [np.asarray(k, dtype=complex) for k in kraus]
        return cls(superop=kraus_to_superop(ops), kraus=tuple(ops))

    @classmethod
    def from_unitary(cls, u: np.ndarray) -> "QuantumChannel":
        return cls.from_kraus([u])

    @classmethod
    def identity(cls) -> "QuantumChannel":
        return cls.from_unitary(np.eye(DIM, dtype=complex))

    def compose(self, inner: "QuantumChannel") -> "QuantumChannel":
        """Channel applying `inner` first, then this channel."""
        return QuantumChannel(superop=self.superop @ inner.superop)


def apply_channel(channel: QuantumChannel, rho: np.ndarray) -> np.ndarray:
    """Apply a channel to a 4x4 operator.  Linear in rho."""
    arr = np.asarray(rho, dtype=complex)
    if arr.shape != (DIM, DIM):
        raise ValueError(f"expected a 4x4 operator, got shape {arr.shape}")
    return unvec(channel.superop @ vec(arr))


def choi_matrix(channel: QuantumChannel) -> np.ndarray:
    """Choi matrix of the channel; the channel is CP iff this is PSD.

    Normalized so that a unitary channel has a rank-1 Choi matrix of trace 4.
    """
    s4 = channel.superop.reshape(DIM, DIM, DIM, DIM)
    return s4.transpose(3, 1, 2, 0).reshape(DIM * DIM, DIM * DIM)


def is_cptp(channel: QuantumChannel, tol: float) -> bool:
    """True iff the Choi eigenvalues are >= -tol and trace preservation holds within tol."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    choi = choi_matrix(channel)
    if np.linalg.eigvalsh(hermitize(choi)).min() < -tol:
        return False
    # Tracing the Choi matrix over the output factor must give the identity.
    c4 = choi.reshape(DIM, DIM, DIM, DIM)
    traced = np.einsum("aibi->ab", c4)
    return bool(np.max(np.abs(traced - np.eye(DIM))) <= tol)


def partial_transpose(rho: np.ndarray, subsystem: str) -> np.ndarray:
    """Transpose on one tensor factor, "X" (edge qubit) or "A" (inner qubit)."""
    arr = np.asarray(rho, dtype=complex)
    if arr.shape != (DIM, DIM):
        raise ValueError(f"expected a 4x4 operator, got shape {arr.shape}")
    r = arr.reshape(2, 2, 2, 2)
    if subsystem == "X":
        r = r.transpose(2, 1, 0, 3)
    elif subsystem == "A":
        r = r.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"subsystem must be 'X' or 'A', got {subsystem!r}")
    return r.reshape(DIM, DIM)


def negativity(rho: np.ndarray) -> float:
    """Entanglement negativity: |sum of negative eigenvalues| of the partial transpose.

    Zero exactly on separable two-qubit states, 1/2 on Bell states.
    """
    arr = np.asarray(rho, dtype=complex)
    if np.max(np.abs(arr - arr.conj().T)) > 1e-8:
        raise ValueError("negativity requires a Hermitian input")
    evals = np.linalg.eigvalsh(hermitize(partial_transpose(arr, "A")))
    return float(-evals[evals < 0].sum())

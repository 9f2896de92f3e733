"""Dense state-vector substrate for the bus + TLS register.

Conventions used throughout the package:

* Qubit 0 is the phase-qubit bus; qubits 1..N are the TLSs.
* Basis index bit k encodes the state of qubit k (little-endian), so
  ``amplitudes[5]`` of a 3-qubit register is ``|1,g,e>``.
* ``Z|0> = +|0>`` and ``Z|g> = +|g>``: the 0/g level is the ground state.
* Global phase is physical: operations never renormalize or strip phases.
  ``fidelity`` is the phase-insensitive comparator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 16

_LABEL_BITS = {"0": 0, "g": 0, "1": 1, "e": 1}


@dataclass(eq=False)
class StateVector:
    """Complex amplitudes of a qubit register, index bit k = qubit k."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        n = amps.size
        if n == 0 or (n & (n - 1)) != 0:
            raise ValueError(f"amplitude length must be a power of two, got {n}")
        self.amplitudes = amps

    @property
    def num_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy())


@dataclass(eq=False)
class DensityMatrix:
    """Hermitian, unit-trace matrix; positivity is not enforced (finite-shot
    reconstructions may dip slightly negative)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(m - m.conj().T).max() > 1e-10 * scale:
            raise ValueError("density matrix is not Hermitian")
        if abs(m.trace() - 1.0) > 1e-9:
            raise ValueError(f"density matrix trace {m.trace():.3g} != 1")
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def rank(self, tol: float = 1e-10) -> int:
        return int(np.sum(self.eigenvalues() > tol))


def basis_state(labels) -> StateVector:
    """Computational basis state from per-qubit labels.

    Labels may be '0'/'1' or 'g'/'e' (or the ints 0/1); the first label is
    qubit 0 (the bus).  ``basis_state("0ge")`` is ``|0,g,e>``.
    """
    labels = list(labels)
    if not labels:
        raise ValueError("empty label list")
    if len(labels) > MAX_QUBITS:
        raise ValueError(f"at most {MAX_QUBITS} qubits supported, got {len(labels)}")
    index = 0
    for k, lab in enumerate(labels):
        bit = _LABEL_BITS[str(lab)] if not isinstance(lab, int) else lab
        if bit not in (0, 1):
            raise ValueError(f"bad qubit label {lab!r}")
        index |= bit << k
    amps = np.zeros(2 ** len(labels), dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps)


def ground_register(num_tls: int) -> StateVector:
    """|0> on the bus and |g> on every TLS."""
    return basis_state([0] * (num_tls + 1))


def _check_targets(n: int, targets) -> list[int]:
    targets = list(targets)
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate target qubits {targets}")
    for q in targets:
        if not 0 <= q < n:
            raise ValueError(f"target qubit {q} out of range for {n} qubits")
    return targets


def apply_unitary(state: StateVector, gate: np.ndarray, targets) -> StateVector:
    """Apply a 2^m x 2^m unitary to the listed target qubits.

    Gate basis bit p corresponds to ``targets[p]``, matching the global
    little-endian convention.  Untouched qubits keep their amplitudes exactly.
    """
    n = state.num_qubits
    targets = _check_targets(n, targets)
    m = len(targets)
    gate = np.asarray(gate, dtype=np.complex128)
    if gate.shape != (2**m, 2**m):
        raise ValueError(f"gate shape {gate.shape} does not match {m} targets")
    if np.abs(gate @ gate.conj().T - np.eye(2**m)).max() > 1e-12:
        raise ValueError("gate is not unitary within 1e-12")

    psi = state.amplitudes.reshape((2,) * n)
    # axis n-1-q holds qubit q; front axes ordered most-significant-first
    src = [n - 1 - q for q in reversed(targets)]
    psi = np.moveaxis(psi, src, range(m))
    rest = psi.shape[m:]
    psi = (gate @ psi.reshape(2**m, -1)).reshape((2,) * m + rest)
    psi = np.moveaxis(psi, range(m), src)
    return StateVector(np.ascontiguousarray(psi).reshape(-1))


def evolve(state: StateVector, generator: np.ndarray, t: float) -> StateVector:
    """exp(-i * generator * t) |state>, by exact Hermitian diagonalization.

    The generator is an angular-frequency operator (rad/s, hbar = 1); no
    series truncation is involved, so the only error is float roundoff.
    """
    h = np.asarray(generator, dtype=np.complex128)
    d = state.amplitudes.size
    if h.shape != (d, d):
        raise ValueError(f"generator shape {h.shape} does not match dim {d}")
    scale = max(1.0, float(np.abs(h).max()))
    if np.abs(h - h.conj().T).max() > 1e-12 * scale:
        raise ValueError("generator is not Hermitian")
    if np.all(h.imag == 0.0):
        w, v = np.linalg.eigh(h.real)  # real-symmetric path is much faster
        v = v.astype(np.complex128)
    else:
        w, v = np.linalg.eigh(h)
    phases = np.exp(-1j * w * t)
    out = v @ (phases * (v.conj().T @ state.amplitudes))
    return StateVector(out)


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, the phase-insensitive overlap of two pure states."""
    if a.amplitudes.size != b.amplitudes.size:
        raise ValueError("state dimensions differ")
    return float(np.abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def state_dm_fidelity(state: StateVector, rho: DensityMatrix) -> float:
    """<psi|rho|psi> for a pure target state."""
    if rho.dim != state.amplitudes.size:
        raise ValueError("state dimensions differ")
    val = np.vdot(state.amplitudes, rho.matrix @ state.amplitudes)
    return float(np.real(val))


def partial_trace(state: StateVector, keep) -> DensityMatrix:
    """Reduced density matrix over ``keep`` (sorted ascending in the output).

    Bit p of the reduced index is the p-th smallest kept qubit.
    """
    n = state.num_qubits
    keep = sorted(_check_targets(n, keep))
    if not keep:
        raise ValueError("keep list is empty")
    k = len(keep)
    psi = state.amplitudes.reshape((2,) * n)
    src = [n - 1 - q for q in reversed(keep)]
    psi = np.moveaxis(psi, src, range(k))
    mat = psi.reshape(2**k, -1)
    return DensityMatrix(mat @ mat.conj().T)


def excited_population(state: StateVector, qubit: int) -> float:
    """Probability of finding ``qubit`` in |1>/|e>."""
    n = state.num_qubits
    _check_targets(n, [qubit])
    psi = state.amplitudes.reshape((2,) * n)
    axis = n - 1 - qubit
    probs = np.sum(np.abs(psi) ** 2, axis=tuple(a for a in range(n) if a != axis))
    return float(probs[1])


def expectation(state: StateVector, op) -> float:
    """<psi|O|psi> for a PauliString, a weighted Pauli-term list, or a dense
    Hermitian matrix.  Returns the real part; the imaginary part must be
    negligible (Hermitian observables only)."""
    from .paulis import PauliString, apply_pauli  # local import: layering

    if isinstance(op, PauliString):
        val = np.vdot(state.amplitudes, apply_pauli(op, state).amplitudes)
    elif isinstance(op, np.ndarray):
        if op.shape != (state.amplitudes.size,) * 2:
            raise ValueError("operator dimension mismatch")
        val = np.vdot(state.amplitudes, op @ state.amplitudes)
    else:
        val = 0.0 + 0.0j
        for coeff, pauli in op:
            val += coeff * np.vdot(
                state.amplitudes, apply_pauli(pauli, state).amplitudes
            )
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise ValueError(f"expectation has imaginary part {val.imag:.3g}")
    return float(val.real)

"""Experiment-facing measurement: bus readout with finite fidelity, TLS
readout by excitation transfer, basis pre-rotation, shot sampling, sampled
witness estimation and two-qubit state tomography.

Only the bus is ever measured.  Reading TLS j means a full swap window (its
excitation moves to the bus, up to a known -i transfer phase) followed by a
projective bus measurement whose *reported* outcome is flipped with
probability 1 - F.  Within a shot, TLSs are read in ascending index order
with a bus reset between reads.

Shots can be drawn two ways: ``physical`` walks the explicit
transfer/collapse sequence state by state; ``fast`` samples the same
conditional outcome chain directly from the rotated state's Born
distribution.  Both consume the random stream identically and produce
bit-identical records.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass

import numpy as np

from .device import DeviceConfig, ProtocolError, iswap
from .paulis import SIGMA, PauliString
from .states import (
    DensityMatrix,
    StateVector,
    apply_unitary,
    excited_population,
    expectation,
    state_dm_fidelity,
)
from .witnesses import MeasurementSetting, WitnessOperator, group_settings

ZERO_BRANCH_TOL = 1e-14
BUS_GROUND_TOL = 1e-9

# Bloch direction (theta, phi) of each measurement basis label
BASIS_DIRECTIONS = {
    "z": (0.0, 0.0),
    "x": (np.pi / 2, 0.0),
    "y": (np.pi / 2, np.pi / 2),
    "z+x": (np.pi / 4, 0.0),
    "z-x": (np.pi / 4, np.pi),
    "z+y": (np.pi / 4, np.pi / 2),
    "z-y": (np.pi / 4, -np.pi / 2),
}


def derive_rng(seed: int, label: str) -> np.random.Generator:
    """Named random stream: one master seed, independent per-purpose
    generators, reproducible regardless of execution order."""
    digest = hashlib.sha256(f"{seed}:{label}".encode()).digest()
    words = np.frombuffer(digest, dtype=np.uint32)
    return np.random.default_rng(np.random.SeedSequence(words.tolist()))


@dataclass
class ReadoutModel:
    """Bus readout with symmetric flip probability 1 - fidelity."""

    fidelity: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not 0.5 < self.fidelity <= 1.0:
            raise ValueError(f"readout fidelity {self.fidelity} outside (0.5, 1]")
        self.rng = derive_rng(self.seed, "readout")

    @property
    def bias_factor(self) -> float:
        """Reported expectations shrink by (2F - 1) per measured qubit."""
        return 2.0 * self.fidelity - 1.0


def _collapse(state: StateVector, qubit: int, outcome: int) -> StateVector:
    n = state.num_qubits
    psi = state.amplitudes.reshape((2,) * n)
    rows = np.moveaxis(psi, n - 1 - qubit, 0)
    out = np.zeros_like(rows)
    branch = rows[outcome]
    out[outcome] = branch / np.linalg.norm(branch)
    out = np.moveaxis(out, 0, n - 1 - qubit)
    return StateVector(np.ascontiguousarray(out).reshape(-1))


def measure_bus(
    state: StateVector,
    readout: ReadoutModel,
    _u_true: float | None = None,
    _u_flip: float | None = None,
) -> tuple[int, StateVector]:
    """Projective z measurement of the bus.

    The state collapses on the *true* outcome; the returned outcome is the
    reported one (flipped with probability 1 - F).  Branches below 1e-14
    probability are never selected, so renormalization cannot divide by
    zero.
    """
    p1 = excited_population(state, 0)
    u_true = readout.rng.random() if _u_true is None else _u_true
    u_flip = readout.rng.random() if _u_flip is None else _u_flip
    if p1 < ZERO_BRANCH_TOL:
        true = 0
    elif p1 > 1.0 - ZERO_BRANCH_TOL:
        true = 1
    else:
        true = int(u_true < p1)
    collapsed = _collapse(state, 0, true)
    reported = true ^ int(u_flip < 1.0 - readout.fidelity)
    return reported, collapsed


@dataclass
class ReadResult:
    """One TLS readout: reported outcome, post-measurement state, and the
    known z-rotation equivalent of the -i swap transfer phase (harmless for
    z statistics, recorded for phase-sensitive post-processing)."""

    outcome: int
    state: StateVector
    transfer_z_angle: float = -np.pi / 2


def read_tls(
    state: StateVector,
    j: int,
    config: DeviceConfig,
    readout: ReadoutModel,
    _u_true: float | None = None,
    _u_flip: float | None = None,
) -> ReadResult:
    """Transfer TLS j to the bus with a full swap window, then measure."""
    if excited_population(state, 0) > BUS_GROUND_TOL:
        raise ProtocolError("bus must be in |0> before a TLS readout transfer")
    moved = iswap(state, j, config)
    outcome, collapsed = measure_bus(moved, readout, _u_true, _u_flip)
    return ReadResult(outcome, collapsed)


def rotate_for_basis(state: StateVector, qubit: int, basis: str) -> StateVector:
    """Map the basis's +1 eigenvector to |0> so a z readout measures it."""
    if basis not in BASIS_DIRECTIONS:
        raise ValueError(f"unknown basis label {basis!r}")
    theta, phi = BASIS_DIRECTIONS[basis]
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    u = np.array(
        [[c, np.exp(-1j * phi) * s], [s, -np.exp(-1j * phi) * c]],
        dtype=np.complex128,
    )
    return apply_unitary(state, u, [qubit])


# shot sampling ----------------------------------------------------------------


@dataclass
class ShotRecord:
    """Reported +-1 outcomes, one row per shot, one column per read qubit."""

    qubits: tuple[int, ...]
    bases: tuple[str, ...]
    outcomes: np.ndarray
    shots: int

    def __post_init__(self):
        if self.outcomes.shape != (self.shots, len(self.qubits)):
            raise ValueError("outcome array shape mismatch")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"q{q}:{b}" for q, b in zip(self.qubits, self.bases)])
            writer.writerows(self.outcomes.tolist())

    @classmethod
    def from_csv(cls, path) -> "ShotRecord":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            qubits, bases = [], []
            for col in header:
                q, b = col.split(":", 1)
                qubits.append(int(q[1:]))
                bases.append(b)
            rows = [[int(v) for v in row] for row in reader]
        arr = np.array(rows, dtype=int)
        return cls(tuple(qubits), tuple(bases), arr, arr.shape[0])


def _measured_probabilities(state: StateVector, qubits) -> np.ndarray:
    """Joint Born distribution over ``qubits`` (ascending), axis 0 = first."""
    n = state.num_qubits
    probs = np.abs(state.amplitudes.reshape((2,) * n)) ** 2
    keep_axes = [n - 1 - q for q in qubits]
    drop = tuple(a for a in range(n) if a not in keep_axes)
    p = probs.sum(axis=drop) if drop else probs
    # surviving axes run high-qubit-first; flip into measurement order
    return p.transpose(tuple(reversed(range(p.ndim))))


def _sample_true_outcomes(probs: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Sequential conditional sampling of a joint +-1 outcome distribution.

    ``probs`` has one axis per measured qubit in measurement order;
    ``uniforms`` is (shots, m).  Qubit k is drawn from P(o_k = 1 | o_1 ..
    o_{k-1}), which is exactly the bus marginal the physical transfer
    sequence sees after collapsing the earlier reads.
    """
    m = probs.ndim
    shots = uniforms.shape[0]
    # marginals[k] = joint distribution of the first k+1 measured qubits
    marginals = [None] * m
    cur = probs
    for k in reversed(range(m)):
        marginals[k] = cur
        cur = cur.sum(axis=k)

    outcomes = np.zeros((shots, m), dtype=int)
    prefix = np.zeros(shots, dtype=int)
    for k in range(m):
        joint = marginals[k].reshape(-1, 2)  # rows indexed by outcome prefix
        denom = joint.sum(axis=1)
        safe = np.where(denom > 0, denom, 1.0)
        t = np.where(denom > 0, joint[:, 1] / safe, 0.0)
        t = np.where(t < ZERO_BRANCH_TOL, 0.0, np.where(t > 1 - ZERO_BRANCH_TOL, 1.0, t))
        o = (uniforms[:, k] < t[prefix]).astype(int)
        outcomes[:, k] = o
        prefix = prefix * 2 + o
    return outcomes


def sample_shots(
    state: StateVector,
    qubits,
    bases,
    shots: int,
    readout: ReadoutModel,
    rng: np.random.Generator,
    config: DeviceConfig | None = None,
    method: str = "fast",
) -> ShotRecord:
    """Draw reported +-1 outcomes for the listed TLS qubits.

    ``qubits`` must be ascending register indices; ``bases`` gives the
    measured axis per qubit.  ``fast`` and ``physical`` consume the uniform
    stream identically: per shot, per qubit, one draw decides the true
    outcome and one the report flip.
    """
    qubits = list(qubits)
    bases = list(bases)
    if qubits != sorted(qubits) or len(set(qubits)) != len(qubits):
        raise ValueError("qubits must be distinct and ascending")
    if shots < 1:
        raise ValueError("need at least one shot")
    m = len(qubits)
    uniforms = rng.random((shots, m, 2))

    if method == "fast":
        rotated = state
        for q, b in zip(qubits, bases):
            rotated = rotate_for_basis(rotated, q, b)
        probs = _measured_probabilities(rotated, qubits)
        true = _sample_true_outcomes(probs, uniforms[:, :, 0])
        flips = (uniforms[:, :, 1] < 1.0 - readout.fidelity).astype(int)
        reported = true ^ flips
    elif method == "physical":
        if config is None:
            raise ValueError("physical sampling needs the device config")
        from .protocols import reset_bus

        reported = np.zeros((shots, m), dtype=int)
        for s in range(shots):
            psi = state
            for q, b in zip(qubits, bases):
                psi = rotate_for_basis(psi, q, b)
            for k, q in enumerate(qubits):
                if k > 0:
                    psi = reset_bus(psi)
                result = read_tls(
                    psi, q, config, readout,
                    _u_true=uniforms[s, k, 0], _u_flip=uniforms[s, k, 1],
                )
                reported[s, k] = result.outcome
                psi = result.state
    else:
        raise ValueError(f"unknown sampling method {method!r}")

    pm = 1 - 2 * reported
    return ShotRecord(tuple(qubits), tuple(bases), pm, shots)


# witness estimation -------------------------------------------------------------


@dataclass
class WitnessEstimate:
    value: float
    stderr: float
    setting_means: list[float]
    setting_stderrs: list[float]
    shots_per_setting: int
    bias_factor: float
    records: list[ShotRecord] | None = None


def estimate_witness_sampled(
    prepare,
    witness: WitnessOperator,
    config: DeviceConfig,
    shots_per_setting: int,
    readout: ReadoutModel,
    method: str = "fast",
    keep_records: bool = False,
) -> WitnessEstimate:
    """Estimate a witness from shots, one local setting at a time.

    ``prepare`` is a zero-argument callable returning a fresh register
    state (bus + TLSs) with the bus in |0>; witness qubit q lives on TLS
    q+1.  The estimate combines the per-setting shot values with the
    witness offset; the standard error adds the per-setting sample
    variances.  No readout-bias correction is applied: at F < 1 the raw
    estimate shrinks by (2F - 1) per measured qubit and ``bias_factor``
    reports that factor.
    """
    if shots_per_setting < 1:
        raise ValueError("need at least one shot per setting")
    settings = group_settings(witness)
    n = witness.qubit_count
    qubits = list(range(1, n + 1))

    total = witness.offset
    var_total = 0.0
    means, errs, records = [], [], []
    for idx, setting in enumerate(settings):
        rng = derive_rng(readout.seed, f"witness-setting-{idx}")
        state = prepare()
        if state.num_qubits < n + 1:
            raise ValueError("prepared state smaller than the witness register")
        record = sample_shots(
            state, qubits, setting.bases, shots_per_setting, readout, rng,
            config=config, method=method,
        )
        values = _shot_values(setting, record.outcomes)
        mean = float(values.mean())
        var = float(values.var(ddof=1)) if shots_per_setting > 1 else 0.0
        se = float(np.sqrt(var / shots_per_setting))
        total += mean
        var_total += var / shots_per_setting
        means.append(mean)
        errs.append(se)
        if keep_records:
            records.append(record)
    return WitnessEstimate(
        value=float(total),
        stderr=float(np.sqrt(var_total)),
        setting_means=means,
        setting_stderrs=errs,
        shots_per_setting=shots_per_setting,
        bias_factor=readout.bias_factor,
        records=records if keep_records else None,
    )


def _shot_values(setting: MeasurementSetting, outcomes: np.ndarray) -> np.ndarray:
    values = np.zeros(outcomes.shape[0])
    for coeff, support in setting.shot_terms:
        if support:
            values += coeff * outcomes[:, list(support)].prod(axis=1)
        else:
            values += coeff
    return values


# two-qubit tomography -----------------------------------------------------------


_AXES = ("I", "X", "Y", "Z")


@dataclass
class TomographyResult:
    rho: DensityMatrix
    expectations: np.ndarray  # 4x4, rows = first qubit axis (I,X,Y,Z)
    settings_used: int
    fidelity_vs_target: float | None
    physical: bool
    shots_per_setting: int | None


def tomography_two_qubit(
    prepare,
    j: int,
    k: int,
    config: DeviceConfig,
    shots_per_setting: int | None,
    readout: ReadoutModel,
    target: StateVector | None = None,
    method: str = "fast",
) -> TomographyResult:
    """Reconstruct the (TLS j, TLS k) density matrix by linear inversion.

    Nine settings {x,y,z} x {x,y,z} are measured; identity-containing
    expectations come from single-qubit marginals pooled over compatible
    settings, and <II> = 1 by construction.  ``shots_per_setting=None``
    uses exact expectations (scaled by the readout bias factor), the
    infinite-shot limit.  Physicality (smallest eigenvalue >= -1e-6) is
    reported, never enforced.
    """
    if j == k:
        raise ValueError("tomography needs two distinct TLSs")
    config.tls_params(j)
    config.tls_params(k)
    exact = shots_per_setting is None
    bias = readout.bias_factor

    e = np.zeros((4, 4))
    e[0, 0] = 1.0
    if exact:
        state = prepare()
        n = state.num_qubits
        for a in range(4):
            for b in range(4):
                if a == b == 0:
                    continue
                labels = ["I"] * n
                labels[j] = _AXES[a]
                labels[k] = _AXES[b]
                weight = (a != 0) + (b != 0)
                e[a, b] = expectation(state, PauliString("".join(labels)))
                e[a, b] *= bias**weight
    else:
        qubits = sorted((j, k))
        col_j = qubits.index(j)
        col_k = qubits.index(k)
        single_j = {1: [], 2: [], 3: []}
        single_k = {1: [], 2: [], 3: []}
        for a in (1, 2, 3):
            for b in (1, 2, 3):
                rng = derive_rng(readout.seed, f"tomo-{_AXES[a]}{_AXES[b]}")
                state = prepare()
                basis_by_qubit = {j: _AXES[a].lower(), k: _AXES[b].lower()}
                record = sample_shots(
                    state, qubits, [basis_by_qubit[q] for q in qubits],
                    shots_per_setting, readout, rng, config=config, method=method,
                )
                o_j = record.outcomes[:, col_j]
                o_k = record.outcomes[:, col_k]
                e[a, b] = float((o_j * o_k).mean())
                single_j[a].append(o_j)
                single_k[b].append(o_k)
        for a in (1, 2, 3):
            e[a, 0] = float(np.concatenate(single_j[a]).mean())
            e[0, a] = float(np.concatenate(single_k[a]).mean())

    rho = np.zeros((4, 4), dtype=np.complex128)
    for a in range(4):
        for b in range(4):
            rho += e[a, b] * np.kron(SIGMA[_AXES[b]], SIGMA[_AXES[a]])
    rho /= 4.0
    dm = DensityMatrix(rho)
    fid = state_dm_fidelity(target, dm) if target is not None else None
    physical = bool(np.linalg.eigvalsh(rho).min() >= -1e-6)
    return TomographyResult(
        rho=dm,
        expectations=e,
        settings_used=9,
        fidelity_vs_target=fid,
        physical=physical,
        shots_per_setting=shots_per_setting,
    )

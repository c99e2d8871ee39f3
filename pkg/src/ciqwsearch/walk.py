"""State-vector simulation of (controlled) continuous-time quantum walks.

Joint states live on ancilla (x) vertex space and are stored as flat complex
arrays with index ``a * n + v``, where ``a`` is the ancilla basis integer
``j_{s-1} 2^{s-1} + ... + j_0`` and ``v`` the vertex. Control qubit ``j`` of
the ancilla drives the walk block raised to the power ``2**j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .spectral import Spectrum

__all__ = [
    "WalkCounter",
    "PhaseEstimationConfig",
    "AncillaNotResetError",
    "uniform_state",
    "basis_state",
    "joint_state",
    "ancilla_blocks",
    "ancilla_residue",
    "vertex_marginal",
    "evolve",
    "controlled_evolve",
    "qft_matrix",
    "hadamard_matrix",
    "zero_phase_matrix",
    "qft",
    "apply_ancilla",
    "reflection_exact",
    "reflection_circuit",
    "phase_estimate",
    "CiqwSchedule",
    "reflection_schedule",
    "run_ciqw",
]


class AncillaNotResetError(ValueError):
    """The ancilla register was expected to be in |0...0>."""


@dataclass
class WalkCounter:
    """Per-run tally of controlled-walk calls and total evolution time."""

    ctqw_calls: int = 0
    evolution_time: float = 0.0


@dataclass(frozen=True)
class PhaseEstimationConfig:
    s: int
    t0: float

    @classmethod
    def from_lambda_max(cls, lambda_max: float) -> PhaseEstimationConfig:
        # smallest s with 2**s >= lambda_max + 1
        s = 0
        while 2**s < lambda_max + 1:
            s += 1
        return cls(s, 2 * math.pi / 2**s)

    @property
    def dim(self) -> int:
        return 2**self.s

    def per_reflection_time(self) -> float:
        return 4 * math.pi * (1 - 2.0**-self.s)


# ---------------------------------------------------------------------------
# states


def uniform_state(n: int) -> np.ndarray:
    return np.full(n, 1 / math.sqrt(n), dtype=complex)


def basis_state(n: int, v: int) -> np.ndarray:
    psi = np.zeros(n, dtype=complex)
    psi[v] = 1.0
    return psi


def joint_state(ancilla: np.ndarray | int, vertex: np.ndarray, s: int) -> np.ndarray:
    """Tensor product of an ancilla state (or basis index) with a vertex state."""
    if isinstance(ancilla, (int, np.integer)):
        ancilla = basis_state(2**s, int(ancilla))
    ancilla = np.asarray(ancilla, dtype=complex)
    if ancilla.shape != (2**s,):
        raise ValueError(f"ancilla state must have length {2**s}")
    return np.kron(ancilla, np.asarray(vertex, dtype=complex))


def ancilla_blocks(joint: np.ndarray, s: int, n: int) -> np.ndarray:
    """View of a joint state as a (2**s, n) array: row a holds the vertex amplitudes."""
    joint = np.asarray(joint)
    if joint.shape != (2**s * n,):
        raise ValueError(f"joint state has length {joint.shape}, expected {2**s * n}")
    return joint.reshape(2**s, n)


def ancilla_residue(joint: np.ndarray, s: int, n: int) -> float:
    """Norm of the component whose ancilla register is not |0...0>."""
    return float(np.linalg.norm(ancilla_blocks(joint, s, n)[1:]))


def vertex_marginal(joint: np.ndarray, s: int, n: int) -> np.ndarray:
    return np.sum(np.abs(ancilla_blocks(joint, s, n)) ** 2, axis=0)


# ---------------------------------------------------------------------------
# walks


def _check_vertex(state: np.ndarray, sp: Spectrum) -> None:
    if state.shape[-1] != sp.n:
        raise ValueError(f"state dimension {state.shape[-1]} does not match graph size {sp.n}")


def evolve(state: np.ndarray, sp: Spectrum, t: float) -> np.ndarray:
    """Apply exp(iLt) through the eigendecomposition of L."""
    state = np.asarray(state, dtype=complex)
    _check_vertex(state, sp)
    V = sp.eigenvectors
    return V @ (np.exp(1j * sp.eigenvalues * t) * (V.T @ state))


def controlled_evolve(
    joint: np.ndarray,
    sp: Spectrum,
    t: float,
    s: int,
    counter: WalkCounter | None = None,
) -> np.ndarray:
    """Apply sum_l |l><l| (x) exp(i l L t) as ``s`` controlled blocks exp(iLt 2**j)."""
    n = sp.n
    blocks = ancilla_blocks(np.asarray(joint, dtype=complex), s, n)
    V = sp.eigenvectors
    coeffs = blocks @ V  # row a: eigenbasis coefficients of ancilla branch a
    a = np.arange(2**s)
    for j in range(s):
        on = (a >> j) & 1 == 1
        coeffs[on] *= np.exp(1j * sp.eigenvalues * t * 2**j)
        if counter is not None:
            counter.ctqw_calls += 1
            counter.evolution_time += abs(t) * 2**j
    return (coeffs @ V.T).reshape(-1)


# ---------------------------------------------------------------------------
# ancilla operators


def qft_matrix(s: int) -> np.ndarray:
    d = 2**s
    j = np.arange(d)
    return np.exp(2j * math.pi * np.outer(j, j) / d) / math.sqrt(d)


def hadamard_matrix(s: int) -> np.ndarray:
    H = np.array([[1.0]])
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2)
    for _ in range(s):
        H = np.kron(H, h)
    return H.astype(complex)


def zero_phase_matrix(s: int, beta: float) -> np.ndarray:
    """Phase exp(i beta) on the all-zeros ancilla pattern, identity elsewhere."""
    D = np.ones(2**s, dtype=complex)
    D[0] = np.exp(1j * beta)
    return np.diag(D)


def qft(register: np.ndarray, inverse: bool = False) -> np.ndarray:
    register = np.asarray(register, dtype=complex)
    d = register.shape[0]
    if d < 1 or d & (d - 1):
        raise ValueError(f"register dimension {d} is not a power of two")
    F = qft_matrix(d.bit_length() - 1)
    return (F.conj().T if inverse else F) @ register


def apply_ancilla(joint: np.ndarray, U: np.ndarray, s: int, n: int) -> np.ndarray:
    """Apply U (x) I for a 2**s x 2**s ancilla unitary U."""
    return (U @ ancilla_blocks(np.asarray(joint, dtype=complex), s, n)).reshape(-1)


# ---------------------------------------------------------------------------
# reflections about the uniform state


def reflection_exact(state: np.ndarray, beta: float) -> np.ndarray:
    """I - (1 - e^{i beta}) |pi><pi| applied to a vertex state."""
    state = np.asarray(state, dtype=complex)
    n = state.shape[0]
    # |pi><pi|state> has every entry equal to sum(state) / n
    return state - (1 - np.exp(1j * beta)) * (state.sum() / n)


def phase_estimate(
    joint: np.ndarray,
    sp: Spectrum,
    cfg: PhaseEstimationConfig,
    counter: WalkCounter | None = None,
) -> np.ndarray:
    """Forward half of the reflection circuit: H^s, controlled walks, inverse QFT."""
    n = sp.n
    out = apply_ancilla(joint, hadamard_matrix(cfg.s), cfg.s, n)
    out = controlled_evolve(out, sp, cfg.t0, cfg.s, counter)
    return apply_ancilla(out, qft_matrix(cfg.s).conj().T, cfg.s, n)


def reflection_circuit(
    joint: np.ndarray,
    sp: Spectrum,
    cfg: PhaseEstimationConfig,
    beta: float,
    counter: WalkCounter | None = None,
    check_ancilla: bool = True,
    atol: float = 1e-10,
) -> np.ndarray:
    """Phase-estimation implementation of exp(i beta |pi><pi|).

    The spectrum must be integral for the ancilla to return exactly to
    |0...0>; that is the caller's responsibility. With ``check_ancilla`` the
    input ancilla is required to be |0...0> within ``atol``.
    """
    s, n = cfg.s, sp.n
    if check_ancilla and ancilla_residue(joint, s, n) > atol:
        raise AncillaNotResetError("reflection_circuit needs the ancilla in |0...0>")
    F = qft_matrix(s)
    out = phase_estimate(joint, sp, cfg, counter)
    out = apply_ancilla(out, zero_phase_matrix(s, beta), s, n)
    out = apply_ancilla(out, F, s, n)
    out = controlled_evolve(out, sp, -cfg.t0, s, counter)
    return apply_ancilla(out, hadamard_matrix(s), s, n)


# ---------------------------------------------------------------------------
# generic controlled intermittent walks

# A block is a named gate ("identity", "hadamard", "qft", "iqft"), a
# ("zero_phase", beta) pair, an explicit matrix, or a list of blocks applied
# first-to-last.
AncillaBlock = Union[str, tuple, np.ndarray, list]


def _block_matrix(block: AncillaBlock, s: int) -> np.ndarray:
    d = 2**s
    if isinstance(block, np.ndarray):
        U = np.asarray(block, dtype=complex)
        if U.shape != (d, d):
            raise ValueError(f"ancilla block has shape {U.shape}, expected {(d, d)}")
        if not np.allclose(U.conj().T @ U, np.eye(d), rtol=0, atol=1e-10):
            raise ValueError("explicit ancilla block is not unitary")
        return U
    if isinstance(block, str):
        named = {
            "identity": lambda: np.eye(d, dtype=complex),
            "hadamard": lambda: hadamard_matrix(s),
            "qft": lambda: qft_matrix(s),
            "iqft": lambda: qft_matrix(s).conj().T,
        }
        if block not in named:
            raise ValueError(f"unknown ancilla block {block!r}")
        return named[block]()
    if isinstance(block, tuple) and len(block) == 2 and block[0] == "zero_phase":
        return zero_phase_matrix(s, float(block[1]))
    if isinstance(block, list):
        U = np.eye(d, dtype=complex)
        for b in block:
            U = _block_matrix(b, s) @ U
        return U
    raise ValueError(f"cannot interpret ancilla block {block!r}")


@dataclass
class CiqwSchedule:
    """Ancilla unitaries U_0..U_m interleaved with walk times t_1..t_m."""

    s: int
    blocks: Sequence[AncillaBlock]
    times: Sequence[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        if len(self.blocks) != len(self.times) + 1:
            raise ValueError(
                f"need m+1 ancilla blocks for m walk times, got {len(self.blocks)} and {len(self.times)}"
            )

    @property
    def m(self) -> int:
        return len(self.times)

    def matrices(self) -> list[np.ndarray]:
        return [_block_matrix(b, self.s) for b in self.blocks]


def reflection_schedule(cfg: PhaseEstimationConfig, beta: float) -> CiqwSchedule:
    """The reflection circuit written as a two-step controlled intermittent walk."""
    return CiqwSchedule(
        cfg.s,
        ["hadamard", ["iqft", ("zero_phase", beta), "qft"], "hadamard"],
        [cfg.t0, -cfg.t0],
    )


def run_ciqw(
    schedule: CiqwSchedule,
    sp: Spectrum,
    initial: np.ndarray,
    counter: WalkCounter | None = None,
) -> np.ndarray:
    s, n = schedule.s, sp.n
    Us = schedule.matrices()
    state = apply_ancilla(np.asarray(initial, dtype=complex), Us[0], s, n)
    for t, U in zip(schedule.times, Us[1:]):
        state = controlled_evolve(state, sp, t, s, counter)
        state = apply_ancilla(state, U, s, n)
    return state

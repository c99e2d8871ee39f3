"""Deterministic spatial search: oracles, phase-matched Grover parameters, driver, costs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable

import numpy as np

from .graphs import Graph, GraphSpec, build_graph, is_connected, laplacian
from .spectral import (
    IntegralityRejection,
    IntegralSpectrum,
    Spectrum,
    certify_integral,
    eigendecompose,
)
from .walk import (
    PhaseEstimationConfig,
    WalkCounter,
    ancilla_blocks,
    ancilla_residue,
    joint_state,
    reflection_circuit,
    reflection_exact,
    uniform_state,
    vertex_marginal,
)

__all__ = [
    "SearchError",
    "DisconnectedGraphError",
    "NonIntegralGraphError",
    "FlagNotResetError",
    "MarkedSet",
    "SearchParams",
    "CostReport",
    "SearchResult",
    "TrotterBound",
    "select_marked",
    "oracle_phase",
    "standard_oracle",
    "oracle_via_standard",
    "long_params",
    "run_search",
    "trotter_bound",
    "ctqw_gate_estimate",
]


class SearchError(ValueError):
    pass


class DisconnectedGraphError(SearchError):
    pass


class NonIntegralGraphError(SearchError):
    def __init__(self, rejection: IntegralityRejection):
        self.rejection = rejection
        worst = ", ".join(f"{v:.6g}" for v, _ in rejection.offending[:4])
        super().__init__(f"Laplacian spectrum is not integral (eigenvalues {worst})")


class FlagNotResetError(SearchError):
    pass


@dataclass(frozen=True)
class MarkedSet:
    members: tuple[int, ...]
    n: int

    def __post_init__(self) -> None:
        members = tuple(sorted(set(int(v) for v in self.members)))
        if not members:
            raise SearchError("marked set is empty")
        if members[0] < 0 or members[-1] >= self.n:
            raise SearchError(f"marked vertices must lie in 0..{self.n - 1}")
        object.__setattr__(self, "members", members)

    @property
    def epsilon(self) -> Fraction:
        return Fraction(len(self.members), self.n)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.n, dtype=bool)
        m[list(self.members)] = True
        return m


@dataclass(frozen=True)
class SearchParams:
    epsilon: Fraction
    k: int
    alpha: float
    beta: float
    s: int | None = None
    t0: float | None = None

    def as_dict(self) -> dict:
        return {
            "epsilon": str(self.epsilon),
            "k": self.k,
            "alpha": self.alpha,
            "beta": self.beta,
            "s": self.s,
            "t0": self.t0,
        }


@dataclass(frozen=True)
class CostReport:
    oracle_queries: int
    standard_oracle_calls: int
    ctqw_calls: int
    total_evolution_time: float
    per_reflection_time: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SearchResult:
    success_probability: float
    vertex_distribution: np.ndarray
    ancilla_residue: float
    cost: CostReport
    params: SearchParams
    mode: str
    states: list[np.ndarray] = field(default_factory=list, repr=False)

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "success_probability": self.success_probability,
            "vertex_distribution": [float(p) for p in self.vertex_distribution],
            "ancilla_residue": self.ancilla_residue,
        }


# ---------------------------------------------------------------------------
# marked-set selection

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    z = x & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def select_marked(seed: int, n: int, count: int) -> tuple[int, ...]:
    """Pseudo-random ``count``-subset of ``range(n)``, a pure function of its arguments.

    A partial Fisher-Yates shuffle driven by the splitmix64 stream
    ``mix(seed + i * 0x9E3779B97F4A7C15)``, i = 1, 2, ...
    """
    if not 1 <= count <= n:
        raise SearchError(f"marked count must lie in 1..{n}, got {count}")
    perm = list(range(n))
    state = seed & _MASK64
    for i in range(count):
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
        j = i + _splitmix64(state) % (n - i)
        perm[i], perm[j] = perm[j], perm[i]
    return tuple(sorted(perm[:count]))


# ---------------------------------------------------------------------------
# oracles


def oracle_phase(state: np.ndarray, marked: MarkedSet, alpha: float) -> np.ndarray:
    """Multiply the amplitude of every marked vertex by e^{i alpha}.

    Joint states (any length divisible by ``marked.n``) are handled by acting
    on the vertex index of each ancilla branch.
    """
    state = np.asarray(state, dtype=complex)
    if state.shape[0] % marked.n:
        raise ValueError(f"state length {state.shape[0]} incompatible with n={marked.n}")
    phases = np.where(marked.mask(), np.exp(1j * alpha), 1.0)
    return (state.reshape(-1, marked.n) * phases).reshape(-1)


def standard_oracle(joint: np.ndarray, marked: MarkedSet) -> np.ndarray:
    """|b>|v> -> |b xor f(v)>|v> on a flag (x) vertex state of length 2n."""
    blocks = ancilla_blocks(np.asarray(joint, dtype=complex), 1, marked.n).copy()
    m = marked.mask()
    blocks[0, m], blocks[1, m] = blocks[1, m].copy(), blocks[0, m].copy()
    return blocks.reshape(-1)


def oracle_via_standard(
    joint: np.ndarray, marked: MarkedSet, theta: float, atol: float = 1e-12
) -> np.ndarray:
    """Standard oracle, R_z(theta) on the flag, standard oracle.

    Equals e^{-i theta/2} |0> (x) e^{i theta Pi_M}|psi> for a flag starting in |0>.
    """
    n = marked.n
    if ancilla_residue(joint, 1, n) > atol:
        raise FlagNotResetError("flag qubit must start in |0>")
    out = standard_oracle(joint, marked)
    blocks = ancilla_blocks(out, 1, n) * np.array([[np.exp(-0.5j * theta)], [np.exp(0.5j * theta)]])
    return standard_oracle(blocks.reshape(-1), marked)


# ---------------------------------------------------------------------------
# parameters


def long_params(epsilon: Fraction | float | str) -> SearchParams:
    """Smallest iteration count k and matched phase alpha = beta for exact search.

    k is the least positive integer with sin(pi/(4k+2)) <= sqrt(epsilon); the
    boundary case (equality, alpha = pi) is exact as well.
    """
    eps = Fraction(epsilon).limit_denominator(10**12) if not isinstance(epsilon, Fraction) else epsilon
    if not 0 < eps <= 1:
        raise SearchError(f"epsilon must lie in (0, 1], got {eps}")
    root = math.sqrt(eps.numerator / eps.denominator)
    k = 1
    while math.sin(math.pi / (4 * k + 2)) > root * (1 + 1e-12):
        k += 1
    ratio = min(1.0, math.sin(math.pi / (4 * k + 2)) / root)
    # arcsin is ill-conditioned at 1; treat rounding-level shortfalls as the boundary case
    if 1.0 - ratio * ratio < 1e-14:
        ratio = 1.0
    alpha = 2 * math.asin(ratio)
    return SearchParams(eps, k, alpha, alpha)


# ---------------------------------------------------------------------------
# driver


def _prepare(graph: GraphSpec | Graph) -> Graph:
    return build_graph(graph) if isinstance(graph, GraphSpec) else graph


def run_search(
    graph: GraphSpec | Graph,
    marked: MarkedSet | Iterable[int],
    mode: str = "circuit",
    params: SearchParams | None = None,
    *,
    tol: float = 1e-6,
    require_integral: bool = True,
    spectrum: Spectrum | None = None,
    record: bool = False,
) -> SearchResult:
    """Prepare |pi>, apply k rounds of oracle then reflection, and read out.

    ``mode="circuit"`` builds the reflection from phase estimation on the
    walk; ``mode="exact"`` applies the projector formula directly. Cost
    figures in exact mode are the closed-form values of the circuit.
    """
    if mode not in ("circuit", "exact"):
        raise SearchError(f"unknown mode {mode!r}")
    g = _prepare(graph)
    n = g.n_vertices
    if not isinstance(marked, MarkedSet):
        marked = MarkedSet(tuple(marked), n)
    if marked.n != n:
        raise SearchError(f"marked set is over {marked.n} vertices, graph has {n}")
    if not is_connected(g):
        raise DisconnectedGraphError("graph is not connected")

    sp = spectrum if spectrum is not None else eigendecompose(laplacian(g))
    cert = certify_integral(sp, tol)
    if isinstance(cert, IntegralityRejection) and mode == "circuit" and require_integral:
        raise NonIntegralGraphError(cert)
    lam_max = cert.lambda_max if isinstance(cert, IntegralSpectrum) else sp.lambda_max
    cfg = PhaseEstimationConfig.from_lambda_max(lam_max)

    if params is None:
        params = long_params(marked.epsilon)
    params = replace(params, s=cfg.s, t0=cfg.t0)

    counter = WalkCounter()
    states: list[np.ndarray] = []
    if mode == "circuit":
        state = joint_state(0, uniform_state(n), cfg.s)
        for _ in range(params.k):
            state = oracle_phase(state, marked, params.alpha)
            state = reflection_circuit(
                state, sp, cfg, params.beta, counter, check_ancilla=require_integral
            )
            if record:
                states.append(state.copy())
        dist = vertex_marginal(state, cfg.s, n)
        residue = ancilla_residue(state, cfg.s, n)
        ctqw_calls, total_time = counter.ctqw_calls, counter.evolution_time
    else:
        state = uniform_state(n)
        for _ in range(params.k):
            state = reflection_exact(oracle_phase(state, marked, params.alpha), params.beta)
            if record:
                states.append(state.copy())
        dist = np.abs(state) ** 2
        residue = 0.0
        ctqw_calls = 2 * cfg.s * params.k
        total_time = params.k * cfg.per_reflection_time()

    cost = CostReport(
        oracle_queries=params.k,
        standard_oracle_calls=2 * params.k,
        ctqw_calls=ctqw_calls,
        total_evolution_time=total_time,
        per_reflection_time=cfg.per_reflection_time(),
    )
    success = min(1.0, float(dist[marked.mask()].sum()))
    return SearchResult(success, dist, residue, cost, params, mode, states)


# ---------------------------------------------------------------------------
# gate-count estimators


@dataclass(frozen=True)
class TrotterBound:
    value: float
    in_validity_window: bool

    def __float__(self) -> float:
        return self.value


def trotter_bound(m: int, normHt: float, eps: float, order_k: int = 1) -> TrotterBound:
    """Upper bound on the number of exponentials in an order-2k product formula.

    2 m^2 5^{2k} ||H||t (m ||H||t / eps)^{1/(2k)}, valid for
    eps <= 1 <= 2 m 5^{k-1} ||H||t; outside that window the value is still
    returned, flagged.
    """
    if m <= 0 or normHt <= 0 or eps <= 0 or order_k <= 0:
        raise ValueError("trotter_bound inputs must be positive")
    value = 2 * m**2 * 5 ** (2 * order_k) * normHt * (m * normHt / eps) ** (1 / (2 * order_k))
    valid = eps <= 1 <= 2 * m * 5 ** (order_k - 1) * normHt
    return TrotterBound(float(value), valid)


def ctqw_gate_estimate(lambda_N: float, t: float, N: int, order_k: int = 1) -> float:
    """Elementary-gate estimate for simulating exp(iLt) with Pauli-string product formulas.

    Uses the product-formula bound with m = N^2 Pauli terms, ||H|| <= lambda_N,
    error 1/2, and log2(N) gates per exponential. An upper-bound estimate,
    not a tight count.
    """
    if lambda_N <= 0 or t <= 0 or N < 2:
        raise ValueError("ctqw_gate_estimate needs lambda_N > 0, t > 0 and N >= 2")
    bound = trotter_bound(N**2, lambda_N * t, 0.5, order_k)
    return bound.value * math.log2(N)

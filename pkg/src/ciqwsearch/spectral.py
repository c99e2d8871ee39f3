"""Laplacian spectra: Jacobi eigensolver, integrality certificates, closed forms, depth."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import reduce
from typing import Iterable

import numpy as np

from .graphs import GraphSpec, build_graph, laplacian

__all__ = [
    "Spectrum",
    "IntegralSpectrum",
    "IntegralityRejection",
    "DepthResult",
    "NotSymmetricError",
    "UnsupportedFamilyError",
    "jacobi_eigh",
    "eigendecompose",
    "certify_integral",
    "analytic_spectrum",
    "depth",
    "graph_spectrum",
]


class NotSymmetricError(ValueError):
    pass


class UnsupportedFamilyError(ValueError):
    pass


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with orthonormal eigenvectors in matching columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T


@dataclass(frozen=True)
class IntegralSpectrum:
    values: tuple[int, ...]
    multiplicities: tuple[int, ...]

    integral = True

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> IntegralSpectrum:
        acc: Counter[int] = Counter()
        for value, mult in pairs:
            if mult:
                acc[int(value)] += int(mult)
        items = sorted(acc.items())
        return cls(tuple(v for v, _ in items), tuple(m for _, m in items))

    @property
    def n(self) -> int:
        return sum(self.multiplicities)

    @property
    def lambda_max(self) -> int:
        return self.values[-1]

    @property
    def trace(self) -> int:
        return sum(v * m for v, m in zip(self.values, self.multiplicities))

    def as_dict(self) -> dict:
        return {"values": list(self.values), "multiplicities": list(self.multiplicities)}


@dataclass(frozen=True)
class IntegralityRejection:
    """Returned instead of an :class:`IntegralSpectrum` when some eigenvalue is not an integer."""

    offending: tuple[tuple[float, float], ...]  # (eigenvalue, distance to nearest integer)
    tol: float

    integral = False

    def as_dict(self) -> dict:
        return {
            "tol": self.tol,
            "offending": [{"eigenvalue": v, "distance": d} for v, d in self.offending],
        }


@dataclass(frozen=True)
class DepthResult:
    d_L: int
    chain: tuple[tuple[int, ...], ...]
    gcds: tuple[int, ...]  # gcds[k] is the gcd used to filter chain[k]

    def as_dict(self) -> dict:
        return {
            "d_L": self.d_L,
            "chain": [list(c) for c in self.chain],
            "gcds": list(self.gcds),
        }


# ---------------------------------------------------------------------------
# Jacobi eigensolver


def _round_robin(n: int) -> list[list[tuple[int, int]]]:
    """Tournament schedule: n-1 rounds of disjoint index pairs covering every pair once."""
    idx = list(range(n)) + ([-1] if n % 2 else [])
    m = len(idx)
    rounds = []
    for _ in range(m - 1):
        pairs = [
            (min(a, b), max(a, b))
            for a, b in ((idx[i], idx[m - 1 - i]) for i in range(m // 2))
            if a >= 0 and b >= 0
        ]
        rounds.append(pairs)
        idx = [idx[0], idx[-1], *idx[1:-1]]
    return rounds


def jacobi_eigh(
    A: np.ndarray, rtol: float = 1e-12, max_sweeps: int = 100
) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decompose a real symmetric matrix with cyclic Jacobi rotations.

    Each sweep visits every off-diagonal pair once, in a round-robin order so
    that the rotations of one round act on disjoint rows/columns and can be
    applied together. Iteration stops once the off-diagonal Frobenius norm is
    at most ``rtol * ||A||_F``.

    Returns unsorted eigenvalues and the matrix whose columns are eigenvectors.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    target = rtol * np.linalg.norm(A)
    rounds = [
        (np.array([p for p, _ in r]), np.array([q for _, q in r])) for r in _round_robin(n) if r
    ]

    def off(M: np.ndarray) -> float:
        return float(np.linalg.norm(M - np.diag(np.diag(M))))

    for _ in range(max_sweeps):
        if off(A) <= target:
            return np.diag(A).copy(), V
        for P, Q in rounds:
            apq = A[P, Q]
            active = np.abs(apq) > 0.0
            if not active.any():
                continue
            P, Q, apq = P[active], Q[active], apq[active]
            tau = (A[Q, Q] - A[P, P]) / (2.0 * apq)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # A <- J^T A J, V <- V J with J[p,p]=J[q,q]=c, J[p,q]=s, J[q,p]=-s
            for M in (A, V):
                colP, colQ = M[:, P].copy(), M[:, Q].copy()
                M[:, P] = colP * c - colQ * s
                M[:, Q] = colP * s + colQ * c
            rowP, rowQ = A[P, :].copy(), A[Q, :].copy()
            A[P, :] = c[:, None] * rowP - s[:, None] * rowQ
            A[Q, :] = s[:, None] * rowP + c[:, None] * rowQ
            A[P, Q] = A[Q, P] = 0.0
    if off(A) <= target:
        return np.diag(A).copy(), V
    raise RuntimeError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def eigendecompose(L: np.ndarray, method: str = "jacobi") -> Spectrum:
    """Sorted eigen-decomposition of a symmetric matrix.

    ``method="lapack"`` delegates to :func:`numpy.linalg.eigh`, which is
    preferable for matrices with more than a few hundred rows.
    """
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise NotSymmetricError(f"expected a square matrix, got shape {L.shape}")
    scale = max(np.max(np.abs(L)), 1.0) if L.size else 1.0
    if not np.allclose(L, L.T, rtol=0.0, atol=1e-12 * scale):
        raise NotSymmetricError("matrix is not symmetric")
    if method == "jacobi":
        w, V = jacobi_eigh(L)
    elif method == "lapack":
        w, V = np.linalg.eigh(L)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    order = np.argsort(w, kind="stable")
    return Spectrum(w[order], V[:, order])


def graph_spectrum(spec_or_graph, method: str = "jacobi") -> Spectrum:
    g = build_graph(spec_or_graph) if isinstance(spec_or_graph, GraphSpec) else spec_or_graph
    return eigendecompose(laplacian(g), method=method)


def certify_integral(
    sp: Spectrum, tol: float = 1e-6
) -> IntegralSpectrum | IntegralityRejection:
    """Round every eigenvalue to an integer, or reject if any is farther than ``tol``."""
    if not 0.0 < tol < 0.5:
        raise ValueError(f"tol must lie in (0, 0.5), got {tol}")
    w = np.asarray(sp.eigenvalues, dtype=float)
    nearest = np.rint(w)
    dist = np.abs(w - nearest)
    bad = dist > tol
    if bad.any():
        return IntegralityRejection(
            tuple((float(v), float(d)) for v, d in zip(w[bad], dist[bad])), tol
        )
    return IntegralSpectrum.from_pairs(Counter(int(v) for v in nearest).items())


# ---------------------------------------------------------------------------
# closed-form spectra


def _binom(n: int, k: int) -> int:
    return math.comb(n, k) if 0 <= k <= n else 0


def _qint(m: int, q: int) -> int:
    return (q**m - 1) // (q - 1)


def _qbinom(n: int, k: int, q: int) -> int:
    if not 0 <= k <= n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def analytic_spectrum(spec: GraphSpec) -> IntegralSpectrum:
    """Closed-form Laplacian eigenvalues and multiplicities of a named family."""
    from .graphs import _validate

    _validate(spec)
    fam, p = spec.family, spec.params
    if fam == "Complete":
        (n,) = p
        pairs = [(0, 1), (n, n - 1)]
    elif fam == "Johnson":
        n, k = p
        pairs = [
            (i * (n + 1 - i), _binom(n, i) - _binom(n, i - 1)) for i in range(min(k, n - k) + 1)
        ]
    elif fam == "Kneser":
        n, k = p
        pairs = [
            (_binom(n - k, k) - (-1) ** i * _binom(n - k - i, k - i), _binom(n, i) - _binom(n, i - 1))
            for i in range(k + 1)
        ]
    elif fam == "Hamming":
        d, q = p
        pairs = [(q * i, _binom(d, i) * (q - 1) ** i) for i in range(d + 1)]
    elif fam == "Grassmann":
        q, n, k = p
        deg = q * _qint(k, q) * _qint(n - k, q)
        pairs = [
            (
                deg - q ** (i + 1) * _qint(k - i, q) * _qint(n - k - i, q) + _qint(i, q),
                _qbinom(n, i, q) - _qbinom(n, i - 1, q),
            )
            for i in range(min(k, n - k) + 1)
        ]
    elif fam == "Rook":
        m, n = p
        pairs = [(0, 1), (n, n - 1), (m, m - 1), (n + m, (m - 1) * (n - 1))]
    elif fam == "CompleteSquare":
        (n,) = p
        pairs = [(0, 1), (2, 2), (4, 1), (n, n - 1), (n + 2, 2 * (n - 1)), (n + 4, n - 1)]
    elif fam == "CocktailParty":
        (n,) = p
        pairs = [(0, 1), (2 * n - 2, n), (2 * n, n - 1)]
    elif fam == "CompleteMultipartite":
        n, k = p
        pairs = [(0, 1), (n - n // k, n - k), (n, k - 1)]
    elif fam == "Star":
        (n,) = p
        pairs = [(0, 1), (1, n - 1), (n + 1, 1)]
    elif fam == "Antiregular":
        (N,) = p
        skip = (N + 1) // 2
        pairs = [(v, 1) for v in range(N + 1) if v != skip]
    else:
        raise UnsupportedFamilyError(f"no closed-form spectrum for family {fam!r}")
    return IntegralSpectrum.from_pairs(pairs)


# ---------------------------------------------------------------------------
# depth


def depth(isp: IntegralSpectrum | Iterable[int]) -> DepthResult:
    """Number of gcd/parity filtering rounds needed to reduce the eigenvalue set to {0}.

    At each round the gcd of the nonzero members is taken and only the
    eigenvalues whose quotient by it is even survive.
    """
    values = isp.values if isinstance(isp, IntegralSpectrum) else isp
    current = tuple(sorted({int(v) for v in values}))
    if 0 not in current:
        raise ValueError("eigenvalue set must contain 0")
    chain, gcds = [current], []
    while current != (0,):
        g = reduce(math.gcd, (v for v in current if v))
        gcds.append(g)
        current = tuple(v for v in current if (v // g) % 2 == 0)
        chain.append(current)
    return DepthResult(len(chain) - 1, tuple(chain), tuple(gcds))

"""Graph families with integral Laplacian spectra, plus generic edge-list graphs.

Every family is realized as a :class:`Graph` whose vertices are ordered
lexicographically by their canonical labels (the k-subset for Johnson and
Kneser graphs, the coordinate tuple for Hamming graphs, the reduced
row-echelon basis for Grassmann graphs, and so on).
"""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Sequence

import numpy as np

__all__ = [
    "FAMILIES",
    "GraphParameterError",
    "EdgeListFormatError",
    "GraphSpec",
    "Graph",
    "build_graph",
    "laplacian",
    "is_connected",
    "connected_components",
    "parse_edge_list",
    "serialize_graph",
    "parse_graph_spec",
    "path_graph",
    "cycle_graph",
]


class GraphParameterError(ValueError):
    """Raised when a family's parameters violate its constraints."""


class EdgeListFormatError(ValueError):
    """Raised for malformed edge-list text."""


# family name -> parameter names, in order
FAMILIES: dict[str, tuple[str, ...]] = {
    "Complete": ("n",),
    "Johnson": ("n", "k"),
    "Kneser": ("n", "k"),
    "Hamming": ("d", "q"),
    "Grassmann": ("q", "n", "k"),
    "Rook": ("m", "n"),
    "CompleteSquare": ("n",),
    "CocktailParty": ("n",),
    "CompleteMultipartite": ("n", "k"),
    "Star": ("n",),
    "Antiregular": ("N",),
    "Custom": (),
}


@dataclass(frozen=True)
class GraphSpec:
    """A parametrized family instance.

    ``Custom`` specs carry their vertex count in ``params[0]`` and an explicit
    edge list in ``edges``; every other family ignores ``edges``.
    """

    family: str
    params: tuple[int, ...] = ()
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise GraphParameterError(f"unknown family {self.family!r}")
        object.__setattr__(self, "params", tuple(int(p) for p in self.params))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))

    @classmethod
    def custom(cls, n: int, edges: Iterable[Sequence[int]]) -> GraphSpec:
        return cls("Custom", (n,), tuple(sorted(_normalize_edges(n, edges))))

    def __str__(self) -> str:
        if self.family == "Custom":
            return f"Custom(n={self.params[0]},m={len(self.edges)})"
        return f"{self.family}({','.join(str(p) for p in self.params)})"

    def as_dict(self) -> dict[str, Any]:
        names = FAMILIES[self.family]
        d: dict[str, Any] = {"family": self.family}
        if self.family == "Custom":
            d["params"] = {"n": self.params[0]}
            d["edges"] = [list(e) for e in self.edges]
        else:
            d["params"] = dict(zip(names, self.params))
        return d


@dataclass(frozen=True)
class Graph:
    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    vertex_labels: tuple[Hashable, ...] = field(default=(), compare=False)
    spec: GraphSpec | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.vertex_labels:
            object.__setattr__(self, "vertex_labels", tuple(range(self.n_vertices)))

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n_vertices, self.n_vertices), dtype=np.int64)
        for u, v in self.edges:
            A[u, v] = A[v, u] = 1
        return A

    def neighbors(self) -> list[list[int]]:
        nbrs: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return nbrs


def _normalize_edges(n: int, edges: Iterable[Sequence[int]]) -> set[tuple[int, int]]:
    out: set[tuple[int, int]] = set()
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if u == v:
            raise GraphParameterError(f"loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParameterError(f"edge ({u},{v}) out of range for n={n}")
        out.add((min(u, v), max(u, v)))
    return out


def _from_labels(labels: list, adjacent, spec: GraphSpec) -> Graph:
    labels = sorted(labels)
    edges = [
        (i, j)
        for i, j in itertools.combinations(range(len(labels)), 2)
        if adjacent(labels[i], labels[j])
    ]
    return Graph(len(labels), tuple(edges), tuple(labels), spec)


# ---------------------------------------------------------------------------
# parameter validation


def _is_prime(q: int) -> bool:
    return q >= 2 and all(q % p for p in range(2, int(q**0.5) + 1))


def _is_prime_power(q: int) -> bool:
    if q < 2:
        return False
    p = next(p for p in range(2, q + 1) if q % p == 0)
    while q % p == 0:
        q //= p
    return q == 1


def _validate(spec: GraphSpec) -> None:
    fam, p = spec.family, spec.params
    names = FAMILIES[fam]
    if fam == "Custom":
        if len(p) != 1 or p[0] < 1:
            raise GraphParameterError("Custom requires a positive vertex count")
        return
    if len(p) != len(names):
        raise GraphParameterError(
            f"{fam} takes parameters ({', '.join(names)}), got {len(p)} values"
        )
    if any(x < 0 for x in p):
        raise GraphParameterError(f"{fam} parameters must be nonnegative")
    if fam in ("Johnson", "Kneser"):
        n, k = p
        if not 1 <= k <= n:
            raise GraphParameterError(f"{fam} requires 1 <= k <= n (got n={n}, k={k})")
        if fam == "Kneser" and not 2 * k < n:
            raise GraphParameterError(f"Kneser requires k < n/2 (got n={n}, k={k})")
    elif fam == "Grassmann":
        q, n, k = p
        if not _is_prime_power(q):
            raise GraphParameterError(f"Grassmann requires q a prime power (got q={q})")
        if not _is_prime(q):
            raise GraphParameterError(
                f"Grassmann graphs are only built for prime q (got q={q})"
            )
        if not 1 <= k <= n:
            raise GraphParameterError(f"Grassmann requires 1 <= k <= n (got n={n}, k={k})")
    elif fam == "CompleteMultipartite":
        n, k = p
        if k < 1 or n < 1 or n % k:
            raise GraphParameterError(
                f"CompleteMultipartite requires k to divide n (got n={n}, k={k})"
            )
    elif fam == "Antiregular":
        if p[0] < 2:
            raise GraphParameterError(f"Antiregular requires N >= 2 (got N={p[0]})")
    elif fam == "Hamming":
        d, q = p
        if d < 1 or q < 2:
            raise GraphParameterError(f"Hamming requires d >= 1 and q >= 2 (got d={d}, q={q})")
    elif any(x < 1 for x in p):
        raise GraphParameterError(f"{fam} parameters must be positive")


# ---------------------------------------------------------------------------
# finite-field helpers for Grassmann graphs


def _rank_mod_p(rows: list[list[int]], p: int) -> int:
    M = [list(r) for r in rows]
    rank, ncols = 0, len(M[0]) if M else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(M)) if M[r][c] % p), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][c], -1, p)
        M[rank] = [(x * inv) % p for x in M[rank]]
        for r in range(len(M)):
            if r != rank and M[r][c] % p:
                f = M[r][c]
                M[r] = [(a - f * b) % p for a, b in zip(M[r], M[rank])]
        rank += 1
    return rank


def _rref_subspaces(q: int, n: int, k: int) -> list[tuple[tuple[int, ...], ...]]:
    """All k-dimensional subspaces of F_q^n as RREF basis matrices."""
    out = []
    for pivots in itertools.combinations(range(n), k):
        free = [
            (i, j)
            for i, pc in enumerate(pivots)
            for j in range(pc + 1, n)
            if j not in pivots
        ]
        for values in itertools.product(range(q), repeat=len(free)):
            M = [[0] * n for _ in range(k)]
            for i, pc in enumerate(pivots):
                M[i][pc] = 1
            for (i, j), x in zip(free, values):
                M[i][j] = x
            out.append(tuple(tuple(r) for r in M))
    return out


# ---------------------------------------------------------------------------
# builders


def _antiregular(N: int, spec: GraphSpec) -> Graph:
    adj: list[set[int]] = [{1}, {0}]
    for size in range(2, N):
        half = size // 2
        deg = [len(a) for a in adj]
        targets = [v for v in range(size) if deg[v] > half]
        tied = [v for v in range(size) if deg[v] == half]
        # the most recently added member of the duplicated-degree pair
        targets.append(max(tied))
        adj.append(set())
        for v in targets:
            adj[v].add(size)
            adj[size].add(v)
    edges = sorted((u, v) for u in range(N) for v in adj[u] if u < v)
    return Graph(N, tuple(edges), tuple(range(N)), spec)


def build_graph(spec: GraphSpec) -> Graph:
    """Realize ``spec`` as a concrete graph.

    Raises
    ------
    GraphParameterError
        If the parameters violate the family's constraints.
    """
    _validate(spec)
    fam, p = spec.family, spec.params

    if fam == "Custom":
        n = p[0]
        return Graph(n, tuple(sorted(_normalize_edges(n, spec.edges))), tuple(range(n)), spec)
    if fam == "Complete":
        return _from_labels(list(range(p[0])), lambda a, b: True, spec)
    if fam == "Johnson":
        n, k = p
        subsets = list(itertools.combinations(range(1, n + 1), k))
        return _from_labels(subsets, lambda a, b: len(set(a) & set(b)) == k - 1, spec)
    if fam == "Kneser":
        n, k = p
        subsets = list(itertools.combinations(range(1, n + 1), k))
        return _from_labels(subsets, lambda a, b: not set(a) & set(b), spec)
    if fam == "Hamming":
        d, q = p
        words = list(itertools.product(range(q), repeat=d))
        return _from_labels(words, lambda a, b: sum(x != y for x, y in zip(a, b)) == 1, spec)
    if fam == "Grassmann":
        q, n, k = p
        spaces = _rref_subspaces(q, n, k)
        return _from_labels(
            spaces,
            lambda A, B: _rank_mod_p([*A, *B], q) == k + 1,
            spec,
        )
    if fam == "Rook":
        m, n = p
        cells = list(itertools.product(range(m), range(n)))
        return _from_labels(cells, lambda a, b: (a[0] == b[0]) != (a[1] == b[1]), spec)
    if fam == "CompleteSquare":
        # K_n times the 4-cycle 0-1-2-3-0
        cells = list(itertools.product(range(p[0]), range(4)))
        return _from_labels(
            cells,
            lambda a, b: (a[1] == b[1] and a[0] != b[0])
            or (a[0] == b[0] and (a[1] - b[1]) % 4 in (1, 3)),
            spec,
        )
    if fam == "CocktailParty":
        pairs = list(itertools.product(range(p[0]), (0, 1)))
        return _from_labels(pairs, lambda a, b: a[0] != b[0], spec)
    if fam == "CompleteMultipartite":
        n, k = p
        parts = list(itertools.product(range(k), range(n // k)))
        return _from_labels(parts, lambda a, b: a[0] != b[0], spec)
    if fam == "Star":
        return _from_labels(list(range(p[0] + 1)), lambda a, b: a == 0, spec)
    if fam == "Antiregular":
        return _antiregular(p[0], spec)
    raise GraphParameterError(f"unknown family {fam!r}")  # pragma: no cover


def path_graph(n: int) -> GraphSpec:
    return GraphSpec.custom(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> GraphSpec:
    return GraphSpec.custom(n, [(i, (i + 1) % n) for i in range(n)])


def laplacian(g: Graph) -> np.ndarray:
    """L = D - A as a float matrix."""
    L = -g.adjacency().astype(float)
    L[np.diag_indices(g.n_vertices)] = g.degrees()
    return L


def connected_components(g: Graph) -> list[list[int]]:
    nbrs = g.neighbors()
    seen = [False] * g.n_vertices
    comps = []
    for root in range(g.n_vertices):
        if seen[root]:
            continue
        seen[root] = True
        comp, queue = [], deque([root])
        while queue:
            u = queue.popleft()
            comp.append(u)
            for w in nbrs[u]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def is_connected(g: Graph) -> bool:
    return len(connected_components(g)) == 1


# ---------------------------------------------------------------------------
# text formats


def serialize_graph(g: Graph) -> str:
    lines = [f"n {g.n_vertices}"]
    lines += [f"{u} {v}" for u, v in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    """Parse the ``n <count>`` header followed by ``u v`` lines.

    Blank lines and ``#`` comments are ignored.
    """
    n: int | None = None
    edges: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n" or not parts[1].isdigit():
                raise EdgeListFormatError(f"line {lineno}: expected header 'n <count>'")
            n = int(parts[1])
            if n < 1:
                raise EdgeListFormatError(f"line {lineno}: vertex count must be positive")
            continue
        if len(parts) != 2:
            raise EdgeListFormatError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListFormatError(f"line {lineno}: non-integer vertex in {line!r}") from None
        if u == v:
            raise EdgeListFormatError(f"line {lineno}: loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise EdgeListFormatError(f"line {lineno}: vertex out of range 0..{n - 1}")
        e = (min(u, v), max(u, v))
        if e in edges:
            raise EdgeListFormatError(f"line {lineno}: duplicate edge {e[0]} {e[1]}")
        edges.add(e)
    if n is None:
        raise EdgeListFormatError("missing header 'n <count>'")
    spec = GraphSpec("Custom", (n,), tuple(sorted(edges)))
    return Graph(n, tuple(sorted(edges)), tuple(range(n)), spec)


_SPEC_RE = re.compile(r"^\s*([A-Za-z_]+)\s*\(\s*([0-9,\s]*)\)\s*$")
_ALIASES = {name.lower(): name for name in FAMILIES}
_ALIASES.update({"cp": "CocktailParty", "rook": "Rook", "multipartite": "CompleteMultipartite"})


def parse_graph_spec(text: str) -> GraphSpec:
    """Parse ``Family(p1,p2,...)``; ``Path(n)`` and ``Cycle(n)`` give Custom specs."""
    m = _SPEC_RE.match(text)
    if not m:
        raise GraphParameterError(f"cannot parse graph spec {text!r}; expected Family(a,b,...)")
    name = m.group(1).lower()
    params = tuple(int(x) for x in m.group(2).replace(" ", "").split(",") if x)
    if name in ("path", "cycle"):
        if len(params) != 1 or params[0] < 2:
            raise GraphParameterError(f"{m.group(1)} takes one vertex count >= 2")
        return path_graph(params[0]) if name == "path" else cycle_graph(params[0])
    if name not in _ALIASES or _ALIASES[name] == "Custom":
        raise GraphParameterError(f"unknown family {m.group(1)!r}")
    spec = GraphSpec(_ALIASES[name], params)
    _validate(spec)
    return spec

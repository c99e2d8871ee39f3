import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ciqwsearch.graphs import GraphSpec, build_graph, connected_components, laplacian, parse_graph_spec, path_graph
from ciqwsearch.spectral import (
    IntegralityRejection,
    IntegralSpectrum,
    NotSymmetricError,
    UnsupportedFamilyError,
    analytic_spectrum,
    certify_integral,
    depth,
    eigendecompose,
    graph_spectrum,
    jacobi_eigh,
)

FAMILY_INSTANCES = [
    "Complete(2)", "Complete(3)", "Complete(5)", "Complete(8)",
    "Johnson(4,2)", "Johnson(5,2)", "Johnson(6,3)", "Johnson(7,2)", "Johnson(5,5)",
    "Kneser(5,2)", "Kneser(6,2)", "Kneser(7,3)", "Kneser(4,1)",
    "Hamming(3,2)", "Hamming(2,3)", "Hamming(4,2)", "Hamming(2,4)", "Hamming(1,5)",
    "Grassmann(2,3,1)", "Grassmann(2,4,2)", "Grassmann(3,3,1)", "Grassmann(2,4,1)", "Grassmann(2,3,2)",
    "Rook(2,3)", "Rook(3,3)", "Rook(1,4)", "Rook(3,5)",
    "CompleteSquare(1)", "CompleteSquare(2)", "CompleteSquare(3)", "CompleteSquare(4)",
    "CocktailParty(2)", "CocktailParty(3)", "CocktailParty(5)",
    "CompleteMultipartite(6,3)", "CompleteMultipartite(6,6)", "CompleteMultipartite(8,2)", "CompleteMultipartite(9,3)",
    "Star(1)", "Star(3)", "Star(4)", "Star(7)",
] + [f"Antiregular({N})" for N in range(2, 13)]  # fmt: skip


def spectrum_of(text, method="jacobi"):
    return graph_spectrum(parse_graph_spec(text), method=method)


def test_k2_eigen():
    sp = spectrum_of("Complete(2)")
    assert np.allclose(sp.eigenvalues, [0, 2], atol=1e-12)
    v0 = sp.eigenvectors[:, 0] * np.sign(sp.eigenvectors[0, 0])
    assert np.allclose(v0, [1 / math.sqrt(2)] * 2, atol=1e-12)


def test_k3_eigenvalues():
    assert np.allclose(spectrum_of("Complete(3)").eigenvalues, [0, 3, 3], atol=1e-12)


def test_path4_matches_closed_form():
    closed = sorted(2 - 2 * math.cos(math.pi * k / 4) for k in range(4))
    sp = graph_spectrum(path_graph(4))
    assert np.allclose(sp.eigenvalues, closed, atol=1e-9)
    assert np.allclose(sp.eigenvalues, [0, 2 - math.sqrt(2), 2, 2 + math.sqrt(2)], atol=1e-9)


def _check_spectrum_invariants(L, sp):
    n = L.shape[0]
    scale = max(np.max(np.abs(L)), 1.0)
    assert np.max(np.abs(sp.reconstruct() - L)) <= 1e-8 * scale
    V = sp.eigenvectors
    assert np.max(np.abs(V.T @ V - np.eye(n))) <= 1e-10
    assert np.all(np.diff(sp.eigenvalues) >= 0)


@pytest.mark.parametrize("text", FAMILY_INSTANCES + ["Path(4)", "Path(7)", "Cycle(6)"])
def test_eigendecompose_invariants(text):
    g = build_graph(parse_graph_spec(text))
    L = laplacian(g)
    sp = eigendecompose(L)
    _check_spectrum_invariants(L, sp)
    assert np.all(sp.eigenvalues >= -1e-9)
    assert np.all(sp.eigenvalues <= g.n_vertices + 1e-9)


@st.composite
def symmetric_matrices(draw):
    n = draw(st.integers(1, 12))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n)) * draw(st.sampled_from([1e-3, 1.0, 50.0]))
    return (A + A.T) / 2


@given(symmetric_matrices())
@settings(max_examples=60, deadline=None)
def test_jacobi_matches_lapack(A):
    sp = eigendecompose(A)
    _check_spectrum_invariants(A, sp)
    ref = np.linalg.eigvalsh(A)
    assert np.allclose(sp.eigenvalues, ref, atol=1e-9 * max(1.0, np.max(np.abs(A))))


def test_jacobi_handles_diagonal_and_zero():
    w, V = jacobi_eigh(np.diag([3.0, 1.0, 2.0]))
    assert sorted(w.tolist()) == [1.0, 2.0, 3.0]
    sp = eigendecompose(np.zeros((3, 3)))
    assert np.all(sp.eigenvalues == 0)


def test_lapack_method_agrees():
    a = spectrum_of("Johnson(6,3)")
    b = spectrum_of("Johnson(6,3)", method="lapack")
    assert np.allclose(a.eigenvalues, b.eigenvalues, atol=1e-10)


def test_non_symmetric_rejected():
    with pytest.raises(NotSymmetricError):
        eigendecompose(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(NotSymmetricError):
        eigendecompose(np.zeros((2, 3)))


def test_certify_star3():
    cert = certify_integral(spectrum_of("Star(3)"))
    assert cert == IntegralSpectrum((0, 1, 4), (1, 2, 1))


def test_certify_path4_rejected():
    cert = certify_integral(graph_spectrum(path_graph(4)))
    assert isinstance(cert, IntegralityRejection)
    assert not cert.integral
    bad = [v for v, _ in cert.offending]
    assert any(abs(v - (2 - math.sqrt(2))) < 1e-9 for v in bad)
    assert len(bad) == 2  # 0 and 2 are integers


def test_certify_k2():
    assert certify_integral(spectrum_of("Complete(2)")) == IntegralSpectrum((0, 2), (1, 1))


def test_certify_tol_range():
    with pytest.raises(ValueError):
        certify_integral(spectrum_of("Complete(2)"), tol=0.5)


def test_analytic_examples():
    assert analytic_spectrum(GraphSpec("Johnson", (4, 2))) == IntegralSpectrum((0, 4, 6), (1, 3, 2))
    assert analytic_spectrum(GraphSpec("CocktailParty", (2,))) == IntegralSpectrum((0, 2, 4), (1, 2, 1))
    assert analytic_spectrum(GraphSpec("Antiregular", (4,))).values == (0, 1, 3, 4)
    assert analytic_spectrum(GraphSpec("Antiregular", (4,))).multiplicities == (1, 1, 1, 1)


def test_analytic_custom_unsupported():
    with pytest.raises(UnsupportedFamilyError):
        analytic_spectrum(path_graph(4))


@pytest.mark.parametrize("text", FAMILY_INSTANCES)
def test_analytic_equals_certified(text):
    spec = parse_graph_spec(text)
    g = build_graph(spec)
    cert = certify_integral(graph_spectrum(g), tol=1e-6)
    expected = analytic_spectrum(spec)
    assert cert == expected
    assert expected.n == g.n_vertices
    assert expected.trace == int(g.degrees().sum())


@pytest.mark.parametrize("text", FAMILY_INSTANCES)
def test_zero_eigenvector_is_uniform(text):
    g = build_graph(parse_graph_spec(text))
    L = laplacian(g)
    assert np.all(L @ np.ones(g.n_vertices) == 0)
    sp = eigendecompose(L)
    v0 = np.abs(sp.eigenvectors[:, 0])
    assert np.max(np.abs(v0 - 1 / math.sqrt(g.n_vertices))) <= 1e-8


@pytest.mark.parametrize(
    "n, edges",
    [
        (2, []),
        (5, [(0, 1), (2, 3)]),
        (6, [(0, 1), (1, 2), (3, 4)]),
        (7, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]),
        (4, [(0, 1), (1, 2), (2, 3)]),
    ],
)
def test_zero_multiplicity_counts_components(n, edges):
    g = build_graph(GraphSpec.custom(n, edges))
    sp = eigendecompose(laplacian(g))
    zeros = int(np.sum(np.abs(sp.eigenvalues) < 1e-8))
    assert zeros == len(connected_components(g))


# --- depth -------------------------------------------------------------------


def _depth_oracle(values):
    """Direct transcription of the filtering rule on the multiset."""
    lam = list(values)
    k = 0
    while any(lam):
        g = 0
        for v in lam:
            g = math.gcd(g, v)
        lam = [v for v in lam if (v // g) % 2 == 0]
        k += 1
    return k


def test_depth_examples():
    assert depth([0]).d_L == 0
    for n in range(2, 17):
        assert depth([0, n]).d_L == 1
    r = depth([0, 2, 4, 6, 8])
    assert r.d_L == 3
    assert r.chain == ((0, 2, 4, 6, 8), (0, 4, 8), (0, 8), (0,))
    assert r.gcds == (2, 4, 8)


def test_depth_requires_zero():
    with pytest.raises(ValueError):
        depth([1, 2])


@given(st.lists(st.integers(1, 200), max_size=12))
@settings(max_examples=200, deadline=None)
def test_depth_chain_properties(nonzero):
    values = [0, *nonzero]
    r = depth(values)
    assert r.d_L == _depth_oracle(values)
    assert r.chain[-1] == (0,)
    for k in range(r.d_L):
        assert set(r.chain[k + 1]) <= set(r.chain[k])
        assert all(v % r.gcds[k] == 0 for v in r.chain[k])


@given(st.lists(st.integers(1, 100), max_size=10), st.sampled_from([1, 2, 4, 3, 12]))
@settings(max_examples=150, deadline=None)
def test_depth_scale_invariant(nonzero, c):
    values = [0, *nonzero]
    assert depth([c * v for v in values]).d_L == depth(values).d_L


@pytest.mark.parametrize("n", [2, 4, 8, 16])
def test_hypercube_depth(n):
    assert depth(analytic_spectrum(GraphSpec("Hamming", (n, 2)))).d_L == int(math.log2(n)) + 1


def test_antiregular_depth_is_small():
    for N in range(4, 40):
        d = depth(analytic_spectrum(GraphSpec("Antiregular", (N,)))).d_L
        assert d <= math.floor(math.log2(N)) + 1

import numpy
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from fegnncore import (edgelist, buildpolysubspaces, columnnormalize, assemble,
                       featuresubspace, featurespace, inputerror, contracterror)
from conftest import randomedges, graphmatrices


def features(n, d, seed):
    return numpy.random.default_rng(seed).standard_normal((n, d))


#___Polynomial Subspaces___
def test_monomial_on_empty_graph():
    _, _, Lhat = graphmatrices(edgelist([], 5))
    X = features(5, 3, 0)
    blocks = [s.block for s in buildpolysubspaces(Lhat, X, 3, 'monomial')]
    assert_array_equal(blocks[0], X)
    for block in blocks[1:]:
        assert_array_equal(block, numpy.zeros_like(X))

@pytest.mark.parametrize('K', [1, 2, 4, 8])
@pytest.mark.parametrize('seed', range(20))
def test_bernstein_partition_of_unity(K, seed):
    rng = numpy.random.default_rng(seed)
    n = int(rng.integers(5, 51))
    d = int(rng.integers(1, 9))
    _, _, Lhat = graphmatrices(randomedges(n, 0.2, seed))
    X = features(n, d, seed)
    total = sum(s.block for s in buildpolysubspaces(Lhat, X, K, 'bernstein'))
    assert numpy.linalg.norm(total - X) <= 1e-10 * numpy.linalg.norm(X)

@pytest.mark.parametrize('K', range(5))
@pytest.mark.parametrize('seed', range(3))
def test_blocks_match_dense_polynomials(K, seed):
    _, _, Lhat = graphmatrices(randomedges(15, 0.3, seed))
    L = Lhat.todense()
    X = features(15, 3, seed)
    monomial = [numpy.linalg.matrix_power(L, t) @ X for t in range(K + 1)]
    chebyshev = [numpy.eye(15), L]
    for _ in range(2, K + 1):
        chebyshev.append(2 * L @ chebyshev[-1] - chebyshev[-2])
    for t, subspace in enumerate(buildpolysubspaces(Lhat, X, K, 'monomial')):
        assert_allclose(subspace.block, monomial[t], atol = 1e-8)
    for t, subspace in enumerate(buildpolysubspaces(Lhat, X, K, 'chebyshev')):
        assert_allclose(subspace.block, chebyshev[t] @ X, atol = 1e-8)

def test_chebyshev_second_order():
    _, _, Lhat = graphmatrices(randomedges(8, 0.4, 7))
    L = Lhat.todense()
    X = features(8, 2, 7)
    block = buildpolysubspaces(Lhat, X, 2, 'chebyshev')[2].block
    assert_allclose(block, (2 * L @ L - numpy.eye(8)) @ X, atol = 1e-10)

def _projectionresidual(A, B):
    Q, _ = numpy.linalg.qr(A)
    return numpy.linalg.norm(B - Q @ (Q.T @ B))

@pytest.mark.parametrize('K', [1, 2, 3, 4])
def test_monomial_and_chebyshev_share_a_span(K):
    _, _, Lhat = graphmatrices(randomedges(20, 0.25, K))
    X = features(20, 2, K)
    monomial = numpy.hstack([s.block for s in buildpolysubspaces(Lhat, X, K, 'monomial')])
    chebyshev = numpy.hstack([s.block for s in buildpolysubspaces(Lhat, X, K, 'chebyshev')])
    assert _projectionresidual(monomial, chebyshev) <= 1e-8 * numpy.linalg.norm(chebyshev)
    assert _projectionresidual(chebyshev, monomial) <= 1e-8 * numpy.linalg.norm(monomial)

def test_complete_graph_monomials_are_idempotent(completegraph):
    _, _, Lhat = graphmatrices(completegraph)
    X = features(4, 3, 2)
    blocks = [s.block for s in buildpolysubspaces(Lhat, X, 4, 'monomial')]
    for block in blocks[2:]:
        assert_allclose(block, blocks[1], atol = 1e-12)

def test_chebyshev_rescale_changes_operator():
    _, _, Lhat = graphmatrices(randomedges(12, 0.3, 4))
    X = features(12, 2, 4)
    plain = buildpolysubspaces(Lhat, X, 2, 'chebyshev')
    rescaled = buildpolysubspaces(Lhat, X, 2, 'chebyshev', chebyshev_rescale = True)
    assert_array_equal(plain[0].block, rescaled[0].block)
    assert not numpy.allclose(plain[1].block, rescaled[1].block)

def test_negative_order_rejected():
    _, _, Lhat = graphmatrices(edgelist([], 2))
    with pytest.raises(inputerror):
        buildpolysubspaces(Lhat, numpy.ones((2, 1)), -1)

def test_unknown_basis_rejected():
    _, _, Lhat = graphmatrices(edgelist([], 2))
    with pytest.raises(inputerror):
        buildpolysubspaces(Lhat, numpy.ones((2, 1)), 1, 'legendre')

def test_row_mismatch_rejected():
    _, _, Lhat = graphmatrices(edgelist([], 2))
    with pytest.raises(contracterror):
        buildpolysubspaces(Lhat, numpy.ones((3, 1)), 1)


#___Normalization___
def test_columnnormalize_keeps_zero_columns():
    assert_allclose(columnnormalize([[3.0, 0.0], [4.0, 0.0]]), [[0.6, 0.0], [0.8, 0.0]])

def test_columnnormalize_unit_columns_unchanged():
    M = numpy.array([[1.0, 0.0], [0.0, 1.0]])
    assert_array_equal(columnnormalize(M), M)

def test_columnnormalize_row_vector_case():
    assert_allclose(columnnormalize([[1.0, 2.0], [0.0, 0.0]]), [[1.0, 1.0], [0.0, 0.0]])

@pytest.mark.parametrize('scale', [1e-6, 0.3, 7.0, 1e8])
def test_columnnormalize_scale_invariant(scale):
    M = features(10, 4, 1)
    assert_allclose(columnnormalize(scale * M), columnnormalize(M), atol = 1e-14)


#___Assembly___
def test_assemble_poly_only():
    _, _, Lhat = graphmatrices(randomedges(10, 0.3, 0))
    poly = buildpolysubspaces(Lhat, features(10, 3, 0), 2)
    space = assemble(poly, normalize = False)
    assert len(space) == 3
    assert space.width == 9
    assert space.K == 2
    assert space.structural is None

def test_assemble_with_structural_block():
    _, _, Lhat = graphmatrices(randomedges(10, 0.3, 0))
    poly = buildpolysubspaces(Lhat, features(10, 3, 0), 2)
    S = featuresubspace(features(10, 4, 1), 'structural')
    space = assemble(poly, S, normalize = False)
    assert space.width == 3 * 3 + 4
    assert space[-1].kind == 'structural'

@pytest.mark.parametrize('seed', range(5))
def test_assemble_normalizes_every_block(seed):
    _, _, Lhat = graphmatrices(randomedges(12, 0.3, seed))
    poly = buildpolysubspaces(Lhat, 10 * features(12, 3, seed), 3, 'monomial')
    S = featuresubspace(features(12, 4, seed + 1), 'structural')
    space = assemble(poly, S, normalize = True)
    for block in space.blocks:
        norms = numpy.linalg.norm(block, axis = 0)
        nonzero = norms > 1e-12
        assert_allclose(norms[nonzero], 1.0, atol = 1e-12)

def test_assemble_mismatched_rows():
    with pytest.raises(contracterror):
        assemble([featuresubspace(numpy.ones((3, 2)), order = 0)],
                 featuresubspace(numpy.ones((4, 2)), 'structural'))

def test_featurespace_requires_structural_last():
    S = featuresubspace(numpy.ones((3, 1)), 'structural')
    P = featuresubspace(numpy.ones((3, 1)), order = 0)
    with pytest.raises(contracterror):
        featurespace([S, P])

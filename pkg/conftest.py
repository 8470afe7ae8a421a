import os
import sys
import numpy
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from fegnncore import (edgelist, buildadjacency, normalizeadjacency, laplacian,
                       dataset, sbmspec, gensbm)


def randomedges(n, p, seed):
    '''Erdos-Renyi style edge list drawn pair by pair.'''
    rng = numpy.random.default_rng(seed)
    upper = numpy.triu(rng.random((n, n)) < p, k = 1)
    return edgelist(numpy.argwhere(upper), n)

def graphmatrices(edges):
    '''Return (A, Ahat, Lhat) of an edge list.'''
    A = buildadjacency(edges)
    Ahat = normalizeadjacency(A)
    return A, Ahat, laplacian(Ahat)


@pytest.fixture
def pathgraph():
    return edgelist([(0, 1), (1, 2)], 3)

@pytest.fixture
def completegraph():
    return edgelist([(i, j) for i in range(4) for j in range(i + 1, 4)], 4)

@pytest.fixture
def tinydataset():
    X = numpy.array([[1.0, -2.5], [0.125, 3.0], [-7.0, 1e-300]])
    return dataset(X, numpy.array([0, 1, 0]), edgelist([(0, 1), (1, 2)], 3), 'tiny')

@pytest.fixture
def structuresbm():
    '''Heterophilic structure-only sbm with noise features.'''
    return sbmspec([100, 100, 100, 100], 0.01, 0.08, 'noise', 8, 1.0, 0)

@pytest.fixture
def smallsbm():
    return gensbm(sbmspec([30, 30, 30], 0.3, 0.02, 'informative', 6, 5.0, 3))

'''FE-GNN Core: FE-GNN Diagnostics
\n\tFeature space analyses: mutual coherence between subspaces, correlation
profiles across polynomial orders, column-norm dispersion, homophily and
dataset statistics, numeric certification of linearized GNN forms, and the
constructions used to compare flattened and weight-sharing models.'''
import logging
import numpy
from math import comb
from .fegnngraph import (inputerror, contracterror, densematrix, edgelist,
                         assparsesym, spmm)
from .fegnnfeatures import (NORM_EPSILON, featuresubspace, featurespace,
                            buildpolysubspaces)
from .fegnnfileio import writecsvfile
__all__ = ['coherenceprofile', 'mutualcoherence', 'correlationprofile',
           'columnnormstd', 'homophilyratio', 'verifylinearization',
           'bernsteincoefficients', 'bernsteinmerged', 'lstsqresidual',
           'correlatedsubspaces', 'datasetstatistics', 'writeprofilecsv',
           'PROFILE_HEADER']

logger = logging.getLogger(__name__)

PROFILE_HEADER = ['k', 'column', 'E']


#___Coherence___
def _unitcolumns(M):
    '''Return the nonzero columns of M scaled to unit norm, and their indices.'''
    norms = numpy.linalg.norm(M, axis = 0)
    keep = numpy.flatnonzero(norms > NORM_EPSILON)
    return M[:, keep] / norms[keep], keep

def mutualcoherence(M0, M1):
    '''Return the largest absolute cosine between a column of M0 and a column
    of M1. Zero columns are skipped.'''
    M0 = densematrix(M0, 'M0')
    M1 = densematrix(M1, 'M1')
    if M0.shape[0] != M1.shape[0]:
        raise contracterror(f'M0 has {M0.shape[0]} rows but M1 has {M1.shape[0]}')
    U0, _ = _unitcolumns(M0)
    U1, _ = _unitcolumns(M1)
    if U0.shape[1] == 0 or U1.shape[1] == 0:
        raise inputerror('mutual coherence needs a nonzero column in each matrix')
    return float(min(numpy.max(numpy.abs(U0.T @ U1)), 1.0))


class coherenceprofile(object):
    '''Per order k = 1..K, the values E^k_i for every nonzero column i of
    L^k X, as (column, value) pairs.'''

    def __init__(self, K, values):
        self.K = K
        self.values = values

    def orders(self):
        return list(range(1, self.K + 1))

    def vector(self, k):
        '''Return the E^k values as an array (empty when every column is zero).'''
        return numpy.array([value for _, value in self.values.get(k, [])])

    def quantiles(self, k):
        '''Return (min, median, max) of E^k, or None when it is empty.'''
        vector = self.vector(k)
        if not len(vector):
            return None
        return (float(vector.min()), float(numpy.median(vector)), float(vector.max()))

    def rows(self):
        '''Return (k, column, E) triples ordered by k then column.'''
        return [(k, column, value) for k in self.orders() for column, value in self.values.get(k, [])]

    def __len__(self):
        return len(self.rows())

    def __repr__(self):
        return f'coherenceprofile(K={self.K}, rows={len(self)})'

def correlationprofile(Lhat, X, K):
    '''Return E^k_i = max over j < k of the mutual coherence between L^j X and
    column i of L^k X, for k = 1..K.'''
    if isinstance(K, bool) or not isinstance(K, (int, numpy.integer)):
        raise TypeError('K must be an int')
    if K < 1:
        raise inputerror(f'K must be at least 1, got {K}')
    blocks = [s.block for s in buildpolysubspaces(Lhat, X, K, 'monomial')]
    values = {}
    earlier = []
    for k in range(1, K + 1):
        unit, _ = _unitcolumns(blocks[k - 1])
        if unit.shape[1]:
            earlier.append(unit)
        current, columns = _unitcolumns(blocks[k])
        values[k] = []
        if not earlier or not len(columns):
            continue
        previous = numpy.hstack(earlier)
        scores = numpy.minimum(numpy.max(numpy.abs(previous.T @ current), axis = 0), 1.0)
        values[k] = [(int(column), float(score)) for column, score in zip(columns, scores)]
        logger.debug('order %d: %d nonzero columns, median E %.4f', k, len(columns),
                     float(numpy.median(scores)))
    return coherenceprofile(K, values)

def writeprofilecsv(profile, file_path):
    '''Write a coherence profile as "k,column,E" rows.'''
    writecsvfile(file_path, PROFILE_HEADER, [(k, c, repr(e)) for k, c, e in profile.rows()])


#___Column Norms___
def columnnormstd(blocks):
    '''Return the population standard deviation of the column L2 norms of the
    horizontally concatenated blocks.'''
    if isinstance(blocks, featurespace):
        blocks = blocks.blocks
    blocks = [b.block if isinstance(b, featuresubspace) else densematrix(b, 'block') for b in blocks]
    if not blocks:
        raise inputerror('column_norm_std needs at least one block')
    return float(numpy.std(numpy.linalg.norm(numpy.hstack(blocks), axis = 0)))


#___Homophily and Statistics___
def homophilyratio(edges, y):
    '''Return the fraction of undirected edges whose endpoints share a label
    (NaN for a graph without edges).'''
    if not isinstance(edges, edgelist):
        raise TypeError('edges must be an edgelist')
    y = numpy.asarray(y)
    if len(y) < edges.n:
        raise inputerror(f'labels given for {len(y)} nodes but the graph has {edges.n}')
    edges = edges.canonical()
    if len(edges) == 0:
        logger.info('homophily ratio undefined on a graph without edges')
        return float('nan')
    same = y[edges.pairs[:, 0]] == y[edges.pairs[:, 1]]
    return float(numpy.mean(same))

def datasetstatistics(ds):
    '''Return node, edge, feature and class counts, homophily and average
    degree |E|/n of a dataset.'''
    edges = ds.edges.canonical()
    n = ds.n
    return {'name': ds.name, 'nodes': n, 'edges': len(edges), 'features': ds.d,
            'classes': ds.c, 'homophily': homophilyratio(edges, ds.y),
            'average_degree': len(edges) / n if n else 0.0}


#___Linearization Certificates___
def verifylinearization(variant, Ahat, X, K, seed = 0, relative = False):
    '''Return the largest elementwise deviation between the recursive linear
    form of a GCN or SkipGCN and its decomposed polynomial form, with random
    d x d weights drawn from N(0, 1/d). With relative set, the deviation is
    divided by the Frobenius norm of the output.'''
    variant = str(variant).lower()
    if variant not in ('gcn', 'skipgcn'):
        raise inputerror("variant must be 'gcn' or 'skipgcn'")
    if K < 0:
        raise inputerror(f'K must be non-negative, got {K}')
    Ahat = assparsesym(Ahat)
    X = densematrix(X, 'X')
    d = X.shape[1]
    rng = numpy.random.default_rng(seed)
    W1 = [rng.normal(0.0, 1.0 / numpy.sqrt(d), size = (d, d)) for _ in range(K)]
    powers = [X]
    for _ in range(K):
        powers.append(spmm(Ahat, powers[-1]))

    if variant == 'gcn':
        recursive = X
        for k in range(K):
            recursive = spmm(Ahat, recursive) @ W1[k]
        chain = numpy.eye(d)
        for weight in W1:
            chain = chain @ weight
        explicit = powers[K] @ chain
    else:
        W0 = [rng.normal(0.0, 1.0 / numpy.sqrt(d), size = (d, d)) for _ in range(K)]
        alpha = rng.uniform(0.0, 1.0, size = K)
        recursive = X
        for k in range(K):
            recursive = alpha[k] * (X @ W0[k]) + spmm(Ahat, recursive) @ W1[k]
        explicit = numpy.zeros_like(X)
        for i in range(K):
            tail = numpy.eye(d)
            for j in range(K - i, K):
                tail = tail @ W1[j]
            explicit += alpha[K - 1 - i] * (powers[i] @ W0[K - 1 - i] @ tail)
        chain = numpy.eye(d)
        for weight in W1:
            chain = chain @ weight
        explicit += powers[K] @ chain

    deviation = float(numpy.max(numpy.abs(recursive - explicit))) if recursive.size else 0.0
    if relative:
        scale = numpy.linalg.norm(recursive)
        deviation = deviation / scale if scale > 0 else deviation
    return deviation


#___Bernstein Merged Form___
def bernsteincoefficients(K):
    '''Return C with C[k, t] the coefficient of L^t in the order-k Bernstein
    polynomial 2^-K binom(K, k) (2 - L)^(K-k) L^k.'''
    if K < 0:
        raise inputerror(f'K must be non-negative, got {K}')
    C = numpy.zeros((K + 1, K + 1))
    for k in range(K + 1):
        for t in range(k, K + 1):
            C[k, t] = (comb(K, k) * comb(K - k, t - k) * 2.0 ** (K - t)
                       * (-1.0) ** (t - k) / 2.0 ** K)
    return C

def bernsteinmerged(Lhat, X, K):
    '''Return the Bernstein subspaces evaluated as mixtures of monomial ones.'''
    monomial = [s.block for s in buildpolysubspaces(Lhat, X, K, 'monomial')]
    C = bernsteincoefficients(K)
    return [sum(C[k, t] * monomial[t] for t in range(K + 1)) for k in range(K + 1)]


#___Least Squares___
def lstsqresidual(blocks, B):
    '''Return the Frobenius residual of the least-squares fit of B on the
    horizontally concatenated blocks.'''
    blocks = [b.block if isinstance(b, featuresubspace) else densematrix(b, 'block') for b in blocks]
    F = numpy.hstack(blocks)
    B = densematrix(B, 'B')
    if B.shape[0] != F.shape[0]:
        raise contracterror(f'B has {B.shape[0]} rows but the blocks have {F.shape[0]}')
    coefficients, *_ = numpy.linalg.lstsq(F, B, rcond = None)
    return float(numpy.linalg.norm(B - F @ coefficients))


#___Correlated Subspaces___
def correlatedsubspaces(n = 60, d = 10, c = 3, seed = 0):
    '''Return a feature space of two linearly correlated subspaces
    Phi_b = Phi_a W_a (W_a a random orthogonal matrix) and labels
    argmax(Phi_a W_B) for a random W_B.'''
    rng = numpy.random.default_rng(seed)
    phi_a = rng.standard_normal((n, d))
    W_a, _ = numpy.linalg.qr(rng.standard_normal((d, d)))
    W_B = rng.standard_normal((d, c))
    phi_b = phi_a @ W_a
    labels = numpy.argmax(phi_a @ W_B, axis = 1)
    space = featurespace([featuresubspace(phi_a, 'polynomial', 0),
                          featuresubspace(phi_b, 'polynomial', 1)])
    return space, labels

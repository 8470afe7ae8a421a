'''FE-GNN Core: FE-GNN Spectral
\n\tStructural principal components from a truncated SVD of a symmetric graph
matrix, with the rank chosen explicitly or by singular-value mass.'''
import logging
import math
import numpy
import scipy.linalg
import scipy.sparse.linalg
from .fegnngraph import inputerror, numericerror, assparsesym, spmm
from .fegnnfeatures import featuresubspace
__all__ = ['rankspec', 'explicitrank', 'massratio', 'svdresult', 'truncatedsvd',
           'structuralcomponents', 'spectralmeasure', 'DENSE_LIMIT', 'OVERSAMPLING',
           'POWER_ITERATIONS', 'RESIDUAL_TOLERANCE', 'TRACE_SAMPLES', 'LANCZOS_STEPS']

logger = logging.getLogger(__name__)

DENSE_LIMIT = 512
OVERSAMPLING = 10
POWER_ITERATIONS = 7
RESIDUAL_TOLERANCE = 1e-6
TRACE_SAMPLES = 20
LANCZOS_STEPS = 50


#___Rank Specifications___
class rankspec(object):
    '''How many singular triplets to keep: an explicit dimension, or the
    smallest rank reaching a ratio of the total singular-value mass
    (optionally rounded up to a multiple of round_to, capped at n).'''

    def __init__(self, dim = None, ratio = None, round_to = None):
        if (dim is None) == (ratio is None):
            raise inputerror('give exactly one of dim and ratio')
        if dim is not None:
            if isinstance(dim, bool) or not isinstance(dim, (int, numpy.integer)):
                raise TypeError('dim must be an int')
            if dim < 1:
                raise inputerror(f'svd dimension must be at least 1, got {dim}')
            dim = int(dim)
        if ratio is not None:
            ratio = float(ratio)
            if not 0.0 < ratio <= 1.0:
                raise inputerror(f'svd ratio must lie in (0, 1], got {ratio}')
        if round_to is not None and (int(round_to) != round_to or round_to < 1):
            raise inputerror('round_to must be a positive int')
        self.dim = dim
        self.ratio = ratio
        self.round_to = None if round_to is None else int(round_to)

    @property
    def explicit(self):
        return self.dim is not None

    def massrank(self, cumulative, total):
        '''Return the unrounded rank whose cumulative mass reaches ratio * total,
        or None when the sequence falls short.'''
        if total <= 0.0:
            return 1
        target = self.ratio * total - 1e-12 * total
        position = int(numpy.searchsorted(cumulative, target, side = 'left'))
        return None if position >= len(cumulative) else position + 1

    def resolve(self, cumulative, total, n):
        '''Return the rank for a cumulative singular-value mass sequence.'''
        if self.explicit:
            return self.dim
        z = self.massrank(cumulative, total)
        z = n if z is None else min(z, n)
        if self.round_to:
            z = min(int(math.ceil(z / self.round_to)) * self.round_to, n)
        return z

    def todict(self):
        return {'dim': self.dim, 'ratio': self.ratio, 'round_to': self.round_to}

    def __repr__(self):
        if self.explicit:
            return f'explicitrank({self.dim})'
        return f'massratio({self.ratio}, round_to={self.round_to})'

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, rankspec) and self.todict() == other.todict()

def explicitrank(z):
    '''Keep exactly z singular triplets.'''
    return rankspec(dim = z)

def massratio(r, round_to = None):
    '''Keep the smallest rank whose cumulative singular-value mass reaches
    r times the total.'''
    return rankspec(ratio = r, round_to = round_to)


#___SVD Results___
class svdresult(object):
    '''Top-z singular triplets of a symmetric matrix S = Q diag(sigma * signs) Q^T.'''

    def __init__(self, q, sigma, signs, total_mass, residual = 0.0):
        self.q = q
        self.sigma = sigma
        self.signs = signs
        self.total_mass = total_mass
        self.residual = residual

    @property
    def z(self):
        return len(self.sigma)

    def reconstruct(self):
        '''Return the rank-z approximation Q diag(sigma * signs) Q^T.'''
        return (self.q * (self.sigma * self.signs)) @ self.q.T

    def __repr__(self):
        return f'svdresult(z={self.z}, total_mass={self.total_mass:.6g}, residual={self.residual:.3g})'


def _canonicalsigns(q):
    #largest-magnitude entry of each column made nonnegative
    rows = numpy.argmax(numpy.abs(q), axis = 0)
    flip = q[rows, numpy.arange(q.shape[1])] < 0
    q[:, flip] *= -1.0
    return q

def _ritzpairs(matrix, basis, z):
    projected = basis.T @ spmm(matrix, basis)
    projected = (projected + projected.T) / 2.0
    values, vectors = numpy.linalg.eigh(projected)
    order = numpy.argsort(-numpy.abs(values), kind = 'stable')[:z]
    return values[order], basis @ vectors[:, order]

def _residual(matrix, q, values):
    if q.shape[1] == 0:
        return 0.0
    scale = max(numpy.max(numpy.abs(values)), 1.0)
    error = spmm(matrix, q) - q * values
    return float(numpy.max(numpy.linalg.norm(error, axis = 0)) / scale)


#___Spectral Quadrature___
def _lanczos(matrix, start, steps):
    #tridiagonal coefficients, fully reorthogonalized
    n = matrix.n
    steps = min(steps, n)
    basis = numpy.zeros((n, steps))
    alphas, betas = [], []
    q = start / numpy.linalg.norm(start)
    scale = None
    for i in range(steps):
        basis[:, i] = q
        r = spmm(matrix, q)
        alphas.append(float(q @ r))
        if scale is None:
            scale = max(float(numpy.linalg.norm(r)), 1.0)
        for _ in range(2):
            r -= basis[:, :i + 1] @ (basis[:, :i + 1].T @ r)
        beta = float(numpy.linalg.norm(r))
        if i + 1 == steps or beta <= 1e-10 * scale:
            break
        betas.append(beta)
        q = r / beta
    return numpy.array(alphas), numpy.array(betas)

def spectralmeasure(S, seed = 0, samples = TRACE_SAMPLES, steps = LANCZOS_STEPS):
    '''Return (nodes, weights) of a stochastic Lanczos quadrature of the
    eigenvalue distribution of a symmetric matrix.
    \nEach Rademacher sample vector contributes the Ritz values of its Lanczos run,
    weighted by the squared first components of the Ritz vectors. Weights sum
    to n, so weights @ f(nodes) estimates trace f(S).'''
    matrix = assparsesym(S)
    n = matrix.n
    if samples < 1 or steps < 1:
        raise inputerror('samples and steps must be positive')
    rng = numpy.random.default_rng([seed, 2])
    nodes, weights = [], []
    for _ in range(samples):
        start = rng.integers(0, 2, size = n) * 2.0 - 1.0
        alphas, betas = _lanczos(matrix, start, steps)
        if len(alphas) == 1:
            theta, first = alphas, numpy.ones(1)
        else:
            theta, vectors = scipy.linalg.eigh_tridiagonal(alphas, betas)
            first = vectors[0]
        nodes.append(theta)
        weights.append(n * first ** 2 / samples)
    return numpy.concatenate(nodes), numpy.concatenate(weights)

def _quadraturerank(nodes, weights, target, n):
    #estimated count of top singular values whose mass reaches target
    magnitudes = numpy.abs(nodes)
    order = numpy.argsort(-magnitudes, kind = 'stable')
    mass = numpy.cumsum(weights[order] * magnitudes[order])
    count = numpy.cumsum(weights[order])
    index = min(int(numpy.searchsorted(mass, target, side = 'left')), len(mass) - 1)
    return max(1, min(n, int(math.ceil(count[index] * 1.2)) + OVERSAMPLING))


#___Truncated SVD___
def truncatedsvd(Ahat, spec, seed = 0, max_sweeps = 5):
    '''Return the top singular triplets of a symmetric matrix.
    \nSingular values are the absolute eigenvalues and the left singular
    vectors the matching eigenvectors. Matrices with at most DENSE_LIMIT rows
    use a dense eigendecomposition; larger ones use seeded randomized
    subspace iteration, refined by a Lanczos solve when the residual stays
    above RESIDUAL_TOLERANCE.
    \nOn the randomized path total_mass is a stochastic Lanczos quadrature
    estimate, and a mass ratio is reached by growing the computed rank until
    the exact top singular values cover ratio * total_mass.'''
    matrix = assparsesym(Ahat)
    if not isinstance(spec, rankspec):
        raise TypeError('spec must be a rankspec')
    n = matrix.n
    if spec.explicit and spec.dim > n:
        raise inputerror(f'svd dimension {spec.dim} exceeds the number of nodes {n}')

    if n <= DENSE_LIMIT:
        values, vectors = numpy.linalg.eigh(matrix.todense())
        order = numpy.argsort(-numpy.abs(values), kind = 'stable')
        values, vectors = values[order], vectors[:, order]
        magnitudes = numpy.abs(values)
        total = float(magnitudes.sum())
        z = spec.resolve(numpy.cumsum(magnitudes), total, n)
        values, q = values[:z], vectors[:, :z].copy()
        residual = _residual(matrix, q, values)
    else:
        nodes, weights = spectralmeasure(matrix, seed)
        total = float(weights @ numpy.abs(nodes))
        if spec.explicit:
            z = spec.dim
            values, q, residual = _randomizedeig(matrix, z, seed, max_sweeps)
        else:
            guess = _quadraturerank(nodes, weights, spec.ratio * total, n)
            values, q, residual, total = _massratioeig(matrix, spec, guess, total, seed, max_sweeps)
            z = len(values)

    q = _canonicalsigns(q)
    signs = numpy.where(values < 0, -1.0, 1.0)
    sigma = numpy.abs(values)
    logger.debug('truncated svd of %d nodes kept z=%d (residual %.3g)', n, z, residual)
    return svdresult(q, sigma, signs, total, residual)

def _randomizedeig(matrix, z, seed, max_sweeps):
    n = matrix.n
    p = min(n, z + OVERSAMPLING)
    rng = numpy.random.default_rng(seed)
    basis, _ = numpy.linalg.qr(spmm(matrix, rng.standard_normal((n, p))))
    residual = math.inf
    for sweep in range(max_sweeps):
        for _ in range(POWER_ITERATIONS):
            basis, _ = numpy.linalg.qr(spmm(matrix, basis))
        values, q = _ritzpairs(matrix, basis, z)
        residual = _residual(matrix, q, values)
        logger.debug('subspace sweep %d residual %.3g', sweep + 1, residual)
        if residual <= RESIDUAL_TOLERANCE:
            return values, q, residual

    if z < n - 1:
        start = rng.standard_normal(n)
        try:
            values, q = scipy.sparse.linalg.eigsh(matrix.matrix, k = z, which = 'LM', v0 = start)
        except scipy.sparse.linalg.ArpackNoConvergence:
            raise numericerror('truncated svd did not converge', residual = residual)
        order = numpy.argsort(-numpy.abs(values), kind = 'stable')
        values, q = values[order], q[:, order]
    else:
        values, vectors = numpy.linalg.eigh(matrix.todense())
        order = numpy.argsort(-numpy.abs(values), kind = 'stable')[:z]
        values, q = values[order], vectors[:, order]
    residual = _residual(matrix, q, values)
    if residual > RESIDUAL_TOLERANCE:
        raise numericerror(f'truncated svd residual {residual:.3g} exceeds {RESIDUAL_TOLERANCE}',
                           residual = residual)
    return values, q, residual

def _massratioeig(matrix, spec, guess, total, seed, max_sweeps):
    n = matrix.n
    while True:
        values, q, residual = _randomizedeig(matrix, guess, seed, max_sweeps)
        cumulative = numpy.cumsum(numpy.abs(values))
        if guess >= n:
            total = float(cumulative[-1])
            break
        if spec.massrank(cumulative, total) is not None:
            break
        logger.debug('rank %d covers %.3g of estimated mass %.6g, growing', guess,
                     cumulative[-1] / total, total)
        guess = min(n, int(math.ceil(guess * 1.5)))
    z = spec.resolve(cumulative, total, n)
    if z > guess:
        values, q, residual = _randomizedeig(matrix, z, seed, max_sweeps)
    else:
        values, q = values[:z], q[:, :z].copy()
        residual = _residual(matrix, q, values)
    return values, q, residual, total


#___Structural Components___
def structuralcomponents(svd):
    '''Return the structural block S whose columns are q_i * sigma_i.'''
    if not isinstance(svd, svdresult):
        raise TypeError('svd must be an svdresult')
    return featuresubspace(svd.q * svd.sigma, kind = 'structural')

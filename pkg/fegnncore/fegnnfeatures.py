'''FE-GNN Core: FE-GNN Features
\n\tPolynomial feature subspaces P_t(L)X in the monomial, Chebyshev and
Bernstein bases, column-wise normalization, and feature space assembly.'''
import logging
import numpy
import scipy.sparse
from math import comb
from .fegnngraph import (inputerror, contracterror, numericerror, densematrix,
                         assparsesym, spmm, spectralradius, sparsesym)
__all__ = ['BASES', 'NORM_EPSILON', 'featuresubspace', 'featurespace',
           'buildpolysubspaces', 'columnnormalize', 'assemble', 'checkbasis']

logger = logging.getLogger(__name__)

BASES = ('monomial', 'chebyshev', 'bernstein')
NORM_EPSILON = 1e-12


def checkbasis(basis):
    '''Return basis lowercased, or raise if it is not a known polynomial basis.'''
    if not isinstance(basis, str):
        raise TypeError('basis must be a string')
    basis = basis.lower()
    if basis not in BASES:
        raise inputerror(f'unknown basis {basis!r}, expected one of {", ".join(BASES)}')
    return basis


#___Feature Subspaces___
class featuresubspace(object):
    '''One dense n x d_t column block of a feature space.
    \nkind is 'polynomial' (with an order and a basis) or 'structural'.'''

    def __init__(self, block, kind = 'polynomial', order = None, basis = None,
                 normalized = False):
        if kind not in ('polynomial', 'structural'):
            raise ValueError("kind must be 'polynomial' or 'structural'")
        if kind == 'polynomial' and (order is None or order < 0):
            raise ValueError('polynomial subspaces need a non-negative order')
        self.block = densematrix(block, 'block')
        self.kind = kind
        self.order = order
        self.basis = basis
        self.normalized = bool(normalized)

    @property
    def n(self):
        return self.block.shape[0]

    @property
    def width(self):
        return self.block.shape[1]

    def label(self):
        '''Return a short name such as "P2" or "S".'''
        return 'S' if self.kind == 'structural' else f'P{self.order}'

    def normalize(self):
        '''Return a column-normalized copy of this subspace.'''
        return featuresubspace(columnnormalize(self.block), self.kind, self.order,
                               self.basis, True)

    def __repr__(self):
        return f'featuresubspace({self.label()}, {self.n}x{self.width}, normalized={self.normalized})'

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, featuresubspace):
            return False
        return (self.kind == other.kind and self.order == other.order
                and self.basis == other.basis and self.normalized == other.normalized
                and numpy.array_equal(self.block, other.block))


class featurespace(object):
    '''An ordered list of feature subspaces: polynomial blocks by order
    followed by at most one structural block.'''

    def __init__(self, subspaces, K = None):
        subspaces = list(subspaces)
        if not subspaces:
            raise inputerror('a feature space needs at least one subspace')
        for subspace in subspaces:
            if not isinstance(subspace, featuresubspace):
                raise TypeError('subspaces must be featuresubspace objects')
        n = subspaces[0].n
        for subspace in subspaces:
            if subspace.n != n:
                raise contracterror(f'subspace {subspace.label()} has {subspace.n} rows, expected {n}')
        structural = [i for i, s in enumerate(subspaces) if s.kind == 'structural']
        if len(structural) > 1:
            raise contracterror('a feature space holds at most one structural block')
        if structural and structural[0] != len(subspaces) - 1:
            raise contracterror('the structural block must come last')
        orders = [s.order for s in subspaces if s.kind == 'polynomial']
        if orders != sorted(orders) or len(set(orders)) != len(orders):
            raise contracterror('polynomial blocks must be ordered by increasing order')
        self.subspaces = subspaces
        self.K = K if K is not None else (max(orders) if orders else None)

    @property
    def n(self):
        return self.subspaces[0].n

    @property
    def width(self):
        '''Total width D of the feature space.'''
        return sum(s.width for s in self.subspaces)

    @property
    def blocks(self):
        return [s.block for s in self.subspaces]

    @property
    def polynomial(self):
        return [s for s in self.subspaces if s.kind == 'polynomial']

    @property
    def structural(self):
        last = self.subspaces[-1]
        return last if last.kind == 'structural' else None

    def widths(self):
        return [s.width for s in self.subspaces]

    def concatenated(self):
        '''Return all blocks joined horizontally as one n x D matrix.'''
        return numpy.hstack(self.blocks)

    def __len__(self):
        return len(self.subspaces)

    def __iter__(self):
        return iter(self.subspaces)

    def __getitem__(self, index):
        return self.subspaces[index]

    def __repr__(self):
        labels = ', '.join(s.label() for s in self.subspaces)
        return f'featurespace([{labels}], n={self.n}, D={self.width})'


#___Polynomial Subspaces___
def _checkfinite(block, order, basis):
    if not numpy.all(numpy.isfinite(block)):
        raise numericerror(f'{basis} subspace overflowed at order {order}', order = order)
    return block

def buildpolysubspaces(Lhat, X, K, basis = 'chebyshev', chebyshev_rescale = False):
    '''Return the K+1 polynomial subspaces P_t(Lhat) X, t = 0..K.
    \nPrecondition: Lhat is the normalized Laplacian of the graph and X has
    one row per node.'''
    Lhat = assparsesym(Lhat)
    X = densematrix(X, 'X')
    basis = checkbasis(basis)
    if isinstance(K, bool) or not isinstance(K, (int, numpy.integer)):
        raise TypeError('K must be an int')
    if K < 0:
        raise inputerror(f'K must be non-negative, got {K}')
    if Lhat.n != X.shape[0]:
        raise contracterror(f'Lhat has {Lhat.n} nodes but X has {X.shape[0]} rows')

    if basis == 'monomial':
        blocks = [X]
        for t in range(1, K + 1):
            blocks.append(_checkfinite(spmm(Lhat, blocks[-1]), t, basis))
    elif basis == 'chebyshev':
        operator = Lhat
        if chebyshev_rescale:
            lambda_max = spectralradius(Lhat)
            if lambda_max > 0:
                scaled = 2.0 / lambda_max * Lhat.matrix - scipy.sparse.identity(Lhat.n, format = 'csr')
                operator = sparsesym(scaled)
            logger.debug('chebyshev rescale with lambda_max %.6f', lambda_max)
        blocks = [X]
        if K >= 1:
            blocks.append(_checkfinite(spmm(operator, X), 1, basis))
        for t in range(2, K + 1):
            block = 2.0 * spmm(operator, blocks[-1]) - blocks[-2]
            blocks.append(_checkfinite(block, t, basis))
    else:
        blocks = []
        power = X
        for t in range(K + 1):
            if t > 0:
                power = _checkfinite(spmm(Lhat, power), t, basis)
            block = power
            for _ in range(K - t):
                #(2I - L) v = 2v - Lv
                block = 2.0 * block - spmm(Lhat, block)
            block = comb(K, t) / 2.0 ** K * block
            blocks.append(_checkfinite(block, t, basis))

    logger.debug('built %d %s subspaces of width %d', K + 1, basis, X.shape[1])
    return [featuresubspace(block, 'polynomial', t, basis) for t, block in enumerate(blocks)]


#___Normalization___
def columnnormalize(M, epsilon = NORM_EPSILON):
    '''Scale every column with L2 norm above epsilon to unit norm; smaller
    columns are returned unchanged.'''
    M = densematrix(M, 'M')
    norms = numpy.linalg.norm(M, axis = 0)
    scale = numpy.where(norms > epsilon, norms, 1.0)
    return M / scale


#___Assembly___
def assemble(poly, structural = None, normalize = True):
    '''Assemble polynomial subspaces and an optional structural block into a
    feature space, normalizing every block independently when asked.'''
    subspaces = list(poly)
    if structural is not None:
        if structural.kind != 'structural':
            raise contracterror('structural block must have kind structural')
        subspaces.append(structural)
    if normalize:
        subspaces = [s if s.normalized else s.normalize() for s in subspaces]
    orders = [s.order for s in subspaces if s.kind == 'polynomial']
    space = featurespace(subspaces, K = max(orders) if orders else None)
    logger.debug('assembled %r', space)
    return space

'''FE-GNN Core: FE-GNN Graph
\n\tGraph representation, the re-normalized adjacency matrix, the normalized
Laplacian, and the sparse-dense products every feature construction runs on.'''
import logging
import numpy
import scipy.sparse
from numpy import ndarray
__all__ = ['inputerror', 'contracterror', 'numericerror', 'densematrix',
           'edgelist', 'sparsesym', 'assparsesym', 'buildadjacency',
           'normalizeadjacency', 'laplacian', 'spmm', 'spectralradius',
           'SYMMETRY_TOLERANCE']

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-12


#___Errors___
class inputerror(ValueError):
    '''Raised when user-supplied input (files, ranges, masks) is invalid.'''

class contracterror(ValueError):
    '''Raised when an operation is called outside its contract, such as
    mismatched dimensions or an asymmetric matrix.'''

class numericerror(ArithmeticError):
    '''Raised when a computation produces non-finite values or does not
    converge.'''

    def __init__(self, message, order = None, residual = None):
        super().__init__(message)
        self.order = order
        self.residual = residual


#___Dense Matrices___
def densematrix(data, name = 'matrix'):
    '''Return data as a finite two-dimensional float64 NumPy array.'''
    if isinstance(data, (scipy.sparse.spmatrix, sparsesym)):
        raise TypeError(f'{name} must be dense')
    try:
        result = numpy.asarray(data, dtype = numpy.float64)
    except (TypeError, ValueError):
        raise TypeError(f'{name} must be a list or NumPy array of numbers')
    if result.ndim != 2:
        raise contracterror(f'{name} must be two-dimensional, got {result.ndim} dimensions')
    if not numpy.all(numpy.isfinite(result)):
        raise numericerror(f'{name} contains non-finite values')
    return result


#___Edge Lists___
class edgelist(object):
    '''Undirected edges (u, v) between nodes 0..n-1, with optional weights.'''

    def __init__(self, pairs, n, weights = None):
        if not isinstance(n, (int, numpy.integer)) or isinstance(n, bool):
            raise TypeError('n must be an int')
        if n < 0:
            raise inputerror('n must be non-negative')
        pairs = numpy.asarray(pairs, dtype = numpy.int64)
        if pairs.size == 0:
            pairs = numpy.zeros((0, 2), dtype = numpy.int64)
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise contracterror('pairs must have shape (m, 2)')
        if weights is None:
            weights = numpy.ones(len(pairs))
        weights = numpy.asarray(weights, dtype = numpy.float64)
        if weights.shape != (len(pairs),):
            raise contracterror('weights must hold one value per pair')
        bad = numpy.flatnonzero((pairs < 0).any(axis = 1) | (pairs >= n).any(axis = 1))
        if len(bad):
            u, v = pairs[bad[0]]
            raise inputerror(f'edge {bad[0]} ({u}, {v}) has an endpoint outside [0, {n})')
        if not numpy.all(numpy.isfinite(weights)):
            raise inputerror('edge weights must be finite')
        self.pairs = pairs
        self.weights = weights
        self.n = int(n)

    def __len__(self):
        return len(self.pairs)

    def __repr__(self):
        return f'edgelist({len(self)} pairs, n={self.n})'

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, edgelist):
            return False
        return (self.n == other.n and numpy.array_equal(self.pairs, other.pairs)
                and numpy.array_equal(self.weights, other.weights))

    def canonical(self):
        '''Return the edge list with u < v, self-loops dropped and duplicates
        removed (the first occurrence keeps its weight), sorted by (u, v).'''
        if len(self) == 0:
            return edgelist(self.pairs, self.n, self.weights)
        low = self.pairs.min(axis = 1)
        high = self.pairs.max(axis = 1)
        keep = low != high
        if not keep.all():
            logger.debug('dropping %d self-loop pairs', int((~keep).sum()))
        low, high, weights = low[keep], high[keep], self.weights[keep]
        keys = low * max(self.n, 1) + high
        _, first = numpy.unique(keys, return_index = True)
        pairs = numpy.stack([low[first], high[first]], axis = 1)
        return edgelist(pairs, self.n, weights[first])

    def isbinary(self):
        '''Return True if every edge weight equals 1.'''
        return bool(numpy.all(self.weights == 1.0))


#___Sparse Symmetric Matrices___
class sparsesym(object):
    '''A symmetric n x n real matrix in compressed row form.
    \nBoth triangles are stored, column indices are sorted within each row
    and there are no duplicate entries.'''

    def __init__(self, data):
        if isinstance(data, sparsesym):
            data = data.matrix
        if isinstance(data, ndarray):
            data = scipy.sparse.csr_matrix(data)
        if not scipy.sparse.issparse(data):
            raise TypeError('data must be a SciPy sparse matrix, NumPy array, or sparsesym')
        data = scipy.sparse.csr_matrix(data, dtype = numpy.float64)
        if data.shape[0] != data.shape[1]:
            raise contracterror(f'matrix must be square, got shape {data.shape}')
        data.sum_duplicates()
        data.sort_indices()
        if not numpy.all(numpy.isfinite(data.data)):
            raise numericerror('matrix contains non-finite values')
        asymmetry = abs(data - data.T)
        if asymmetry.nnz and asymmetry.max() > SYMMETRY_TOLERANCE:
            raise contracterror(f'matrix is not symmetric (max deviation {asymmetry.max():.3g})')
        self.matrix = data

    @property
    def n(self):
        return self.matrix.shape[0]

    @property
    def row_ptr(self):
        return self.matrix.indptr

    @property
    def col_idx(self):
        return self.matrix.indices

    @property
    def values(self):
        return self.matrix.data

    def nnz(self):
        '''Return the number of stored entries.'''
        return self.matrix.nnz

    def todense(self):
        '''Return the matrix as a dense NumPy array.'''
        return self.matrix.toarray()

    def diagonal(self):
        '''Return the main diagonal.'''
        return self.matrix.diagonal()

    def __str__(self):
        return str(self.todense())

    def __repr__(self):
        return f'sparsesym(n={self.n}, nnz={self.nnz()})'

    def __eq__(self, other):
        '''Return True if two matrices have identical structure and values.'''
        if self is other:
            return True
        if not isinstance(other, sparsesym):
            return False
        return (self.n == other.n
                and numpy.array_equal(self.row_ptr, other.row_ptr)
                and numpy.array_equal(self.col_idx, other.col_idx)
                and numpy.array_equal(self.values, other.values))

def assparsesym(matrix):
    '''Return matrix as a sparsesym, validating symmetry.'''
    if isinstance(matrix, sparsesym):
        return matrix
    return sparsesym(matrix)


#___Graph Matrices___
def buildadjacency(edges):
    '''Build the binary (or weighted) symmetric adjacency matrix A of an
    undirected edge list. The diagonal is zero and duplicates are merged.'''
    if not isinstance(edges, edgelist):
        raise TypeError('edges must be an edgelist')
    edges = edges.canonical()
    n = edges.n
    rows = numpy.concatenate([edges.pairs[:, 0], edges.pairs[:, 1]])
    cols = numpy.concatenate([edges.pairs[:, 1], edges.pairs[:, 0]])
    values = numpy.concatenate([edges.weights, edges.weights])
    matrix = scipy.sparse.csr_matrix((values, (rows, cols)), shape = (n, n))
    return sparsesym(matrix)

def normalizeadjacency(A):
    '''Return the re-normalized adjacency (D+I)^(-1/2) (A+I) (D+I)^(-1/2).
    \nPrecondition: A is symmetric with a zero diagonal and nonnegative values.'''
    if not isinstance(A, sparsesym):
        try:
            A = sparsesym(A)
        except contracterror as e:
            raise contracterror(f'adjacency violates the input contract: {e}')
    if numpy.any(A.diagonal() != 0):
        raise contracterror('adjacency must have a zero diagonal')
    if numpy.any(A.values < 0):
        raise contracterror('adjacency must be nonnegative')
    n = A.n
    degree = numpy.asarray(A.matrix.sum(axis = 1)).ravel()
    inv_sqrt = 1.0 / numpy.sqrt(degree + 1.0)
    looped = (A.matrix + scipy.sparse.identity(n, format = 'csr')).tocoo()
    #dinv[i] * dinv[j] is commutative, so (i, j) and (j, i) get identical values
    scale = inv_sqrt[looped.row] * inv_sqrt[looped.col]
    values = looped.data * scale
    matrix = scipy.sparse.csr_matrix((values, (looped.row, looped.col)), shape = (n, n))
    return sparsesym(matrix)

def laplacian(Ahat):
    '''Return the normalized Laplacian I - Ahat.'''
    Ahat = assparsesym(Ahat)
    matrix = scipy.sparse.identity(Ahat.n, format = 'csr') - Ahat.matrix
    matrix = scipy.sparse.csr_matrix(matrix)
    matrix.eliminate_zeros()
    return sparsesym(matrix)


#___Products___
def spmm(S, M):
    '''Multiply a sparse symmetric matrix by a dense matrix.
    \nEach output row is accumulated over its stored entries in column order,
    so results are bit-identical across runs.'''
    S = assparsesym(S)
    M = numpy.asarray(M, dtype = numpy.float64)
    vector = M.ndim == 1
    if vector:
        M = M[:, None]
    if M.ndim != 2 or M.shape[0] != S.n:
        raise contracterror(f'cannot multiply a {S.n}x{S.n} matrix by shape {M.shape}')
    result = numpy.asarray(S.matrix @ M)
    return result[:, 0] if vector else result

def spectralradius(S, iterations = 100, seed = 0):
    '''Estimate the spectral radius of a symmetric matrix by power iteration.'''
    S = assparsesym(S)
    if S.n == 0 or S.nnz() == 0:
        return 0.0
    rng = numpy.random.default_rng(seed)
    vector = rng.standard_normal(S.n)
    vector /= numpy.linalg.norm(vector)
    estimate = 0.0
    for _ in range(iterations):
        product = spmm(S, vector)
        norm = numpy.linalg.norm(product)
        if norm == 0.0:
            return 0.0
        estimate = norm
        vector = product / norm
    return float(estimate)

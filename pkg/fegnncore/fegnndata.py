'''FE-GNN Core: FE-GNN Data
\n\tThe canonical on-disk dataset format, random train/validation/test splits
and seeded stochastic block model generators.

A dataset directory holds three UTF-8 text files; '#' lines are comments.

* edges.txt: one "u v" pair of 0-based node ids per line. Edges are
  unweighted, so weighted edge lists cannot be saved.
* features.csv: n comma-separated rows of d numbers, or features.coo with a
  "n d" header line followed by "i j value" entries.
* labels.txt: one integer label per line, one line per node.'''
import logging
import math
import os
import networkx
import numpy
from .fegnngraph import inputerror, contracterror, densematrix, edgelist
from .fegnnfileio import readdatalines, writetextfile, makedirectory
__all__ = ['dataset', 'splitmasks', 'sbmspec', 'loaddataset', 'savedataset',
           'randomsplit', 'gensbm', 'EDGES_FILE', 'FEATURES_FILE', 'SPARSE_FEATURES_FILE',
           'LABELS_FILE']

logger = logging.getLogger(__name__)

EDGES_FILE = 'edges.txt'
FEATURES_FILE = 'features.csv'
SPARSE_FEATURES_FILE = 'features.coo'
LABELS_FILE = 'labels.txt'


#___Datasets___
class dataset(object):
    '''Node attributes X, integer labels y and an undirected edge list.'''

    def __init__(self, X, y, edges, name = 'dataset'):
        X = densematrix(X, 'X')
        y = numpy.asarray(y)
        if y.ndim != 1 or not numpy.issubdtype(y.dtype, numpy.integer):
            raise TypeError('y must be a vector of integer labels')
        if not isinstance(edges, edgelist):
            raise TypeError('edges must be an edgelist')
        if X.shape[0] != len(y):
            raise contracterror(f'X has {X.shape[0]} rows but there are {len(y)} labels')
        if edges.n != len(y):
            raise contracterror(f'edge list covers {edges.n} nodes but there are {len(y)} labels')
        if len(y) and y.min() < 0:
            raise inputerror('labels must be non-negative')
        c = int(y.max()) + 1 if len(y) else 0
        missing = numpy.setdiff1d(numpy.arange(c), y)
        if len(missing):
            raise inputerror(f'class {missing[0]} has no nodes')
        self.X = X
        self.y = y.astype(numpy.int64)
        self.edges = edges.canonical()
        self.name = name

    @property
    def n(self):
        return len(self.y)

    @property
    def d(self):
        return self.X.shape[1]

    @property
    def c(self):
        return int(self.y.max()) + 1 if self.n else 0

    def __repr__(self):
        return f'dataset({self.name!r}, n={self.n}, d={self.d}, c={self.c}, edges={len(self.edges)})'

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, dataset):
            return False
        return (numpy.array_equal(self.X, other.X) and numpy.array_equal(self.y, other.y)
                and numpy.array_equal(self.edges.pairs, other.edges.pairs) and self.n == other.n)


class splitmasks(object):
    '''Disjoint train, validation and test masks that cover every node.'''

    def __init__(self, train, val, test):
        train, val, test = (numpy.asarray(m, dtype = bool) for m in (train, val, test))
        if not (train.shape == val.shape == test.shape) or train.ndim != 1:
            raise contracterror('masks must be vectors of equal length')
        if (train & val).any() or (train & test).any() or (val & test).any():
            raise inputerror('masks must be disjoint')
        if not (train | val | test).all():
            raise inputerror('masks must cover every node')
        if not train.any():
            raise inputerror('the train mask selects no nodes')
        self.train = train
        self.val = val
        self.test = test

    def sizes(self):
        return int(self.train.sum()), int(self.val.sum()), int(self.test.sum())

    def __repr__(self):
        return 'splitmasks(train={}, val={}, test={})'.format(*self.sizes())

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, splitmasks) and numpy.array_equal(self.train, other.train)
                and numpy.array_equal(self.val, other.val)
                and numpy.array_equal(self.test, other.test))


#___Loading and Saving___
def _readlabels(path):
    values = []
    for number, text in readdatalines(path):
        try:
            values.append((number, int(text)))
        except ValueError:
            raise inputerror(f'{path}:{number}: label {text!r} is not an integer')
    present = {label for _, label in values}
    c = 0
    while c in present:
        c += 1
    for number, label in values:
        if label < 0 or label >= c:
            raise inputerror(f'{path}:{number}: label {label} outside [0, {c})')
    return numpy.array([label for _, label in values], dtype = numpy.int64)

def _readedges(path, n):
    pairs = []
    for number, text in readdatalines(path):
        fields = text.split()
        if len(fields) != 2:
            raise inputerror(f'{path}:{number}: expected "u v", got {text!r}')
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise inputerror(f'{path}:{number}: node ids must be integers')
        if not (0 <= u < n and 0 <= v < n):
            raise inputerror(f'{path}:{number}: endpoint outside [0, {n})')
        pairs.append((u, v))
    return edgelist(pairs, n)

def _readdensefeatures(path, n):
    rows = []
    width = None
    for number, text in readdatalines(path):
        try:
            row = [float(field) for field in text.split(',')]
        except ValueError:
            raise inputerror(f'{path}:{number}: features must be numbers')
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise inputerror(f'{path}:{number}: expected {width} values, got {len(row)}')
        rows.append(row)
    if len(rows) != n:
        raise inputerror(f'{path}: expected {n} feature rows, got {len(rows)}')
    return numpy.array(rows, dtype = numpy.float64).reshape(n, width or 0)

def _readsparsefeatures(path, n):
    lines = readdatalines(path)
    if not lines:
        raise inputerror(f'{path}: missing "n d" header')
    number, header = lines[0]
    try:
        rows, cols = (int(field) for field in header.split())
    except ValueError:
        raise inputerror(f'{path}:{number}: expected "n d" header')
    if rows != n:
        raise inputerror(f'{path}:{number}: header declares {rows} nodes, labels give {n}')
    X = numpy.zeros((rows, cols))
    for number, text in lines[1:]:
        fields = text.split()
        try:
            i, j, value = int(fields[0]), int(fields[1]), float(fields[2])
        except (ValueError, IndexError):
            raise inputerror(f'{path}:{number}: expected "i j value"')
        if len(fields) != 3 or not (0 <= i < rows and 0 <= j < cols):
            raise inputerror(f'{path}:{number}: entry outside the {rows}x{cols} matrix')
        X[i, j] = value
    return X

def loaddataset(path, name = None):
    '''Read and validate a dataset directory in the canonical format.'''
    if not os.path.isdir(path):
        raise inputerror(f'{path}: dataset directory not found')
    y = _readlabels(os.path.join(path, LABELS_FILE))
    n = len(y)
    edges = _readedges(os.path.join(path, EDGES_FILE), n)
    dense = os.path.join(path, FEATURES_FILE)
    sparse = os.path.join(path, SPARSE_FEATURES_FILE)
    if os.path.isfile(dense):
        X = _readdensefeatures(dense, n)
    elif os.path.isfile(sparse):
        X = _readsparsefeatures(sparse, n)
    else:
        raise inputerror(f'{path}: neither {FEATURES_FILE} nor {SPARSE_FEATURES_FILE} found')
    ds = dataset(X, y, edges, name or os.path.basename(os.path.normpath(path)))
    logger.info('loaded %r', ds)
    return ds

def savedataset(ds, path):
    '''Write a dataset in the canonical format with full-precision numbers.'''
    if not isinstance(ds, dataset):
        raise TypeError('ds must be a dataset')
    if not ds.edges.isbinary():
        raise inputerror('the dataset format stores unweighted edges; edge weights would be lost')
    makedirectory(path)
    try:
        writetextfile(os.path.join(path, EDGES_FILE), (f'{u} {v}' for u, v in ds.edges.pairs))
        writetextfile(os.path.join(path, FEATURES_FILE),
                      (','.join(repr(float(x)) for x in row) for row in ds.X))
        writetextfile(os.path.join(path, LABELS_FILE), (str(int(label)) for label in ds.y))
    except OSError as e:
        raise OSError(f'{path}: could not write dataset: {e}') from e
    logger.info('saved %r to %s', ds, path)


#___Splits___
def randomsplit(n, fractions = (0.6, 0.2, 0.2), seed = 0):
    '''Return seeded random masks: the first floor(f_train n) nodes of a
    permutation train, the next floor(f_val n) validate, the rest test.'''
    if n < 3:
        raise inputerror(f'a split needs at least 3 nodes, got {n}')
    if len(fractions) != 3 or min(fractions) < 0 or abs(sum(fractions) - 1.0) > 1e-9:
        raise inputerror('fractions must be three non-negative numbers summing to 1')
    order = numpy.random.default_rng(seed).permutation(n)
    n_train = int(math.floor(fractions[0] * n))
    n_val = int(math.floor(fractions[1] * n))
    masks = numpy.zeros((3, n), dtype = bool)
    masks[0, order[:n_train]] = True
    masks[1, order[n_train:n_train + n_val]] = True
    masks[2, order[n_train + n_val:]] = True
    return splitmasks(*masks)


#___Stochastic Block Models___
class sbmspec(object):
    '''Block sizes, edge probabilities and feature mode of a synthetic graph.
    \nfeatures is 'noise' (standard Gaussian entries) or 'informative'
    (Gaussian around a class mean of norm signal).'''

    def __init__(self, sizes, p_in, p_out, features = 'noise', dim = 8, signal = 1.0,
                 seed = 0):
        sizes = [int(s) for s in sizes]
        if not sizes or min(sizes) < 1:
            raise inputerror('block sizes must be positive')
        for name, p in (('p_in', p_in), ('p_out', p_out)):
            if not 0.0 <= p <= 1.0:
                raise inputerror(f'{name} must lie in [0, 1], got {p}')
        if features not in ('noise', 'informative'):
            raise inputerror("features must be 'noise' or 'informative'")
        if dim < 1:
            raise inputerror('dim must be positive')
        self.sizes = sizes
        self.p_in = float(p_in)
        self.p_out = float(p_out)
        self.features = features
        self.dim = int(dim)
        self.signal = float(signal)
        self.seed = int(seed)

    @property
    def n(self):
        return sum(self.sizes)

    @classmethod
    def fromstring(cls, text):
        '''Parse "n=400,blocks=4,p_in=0.1,p_out=0.01,features=noise,dim=8,
        signal=1.0,seed=0". blocks is a count (n split evenly) or sizes
        joined by "/".'''
        fields = {}
        for part in text.split(','):
            if not part.strip():
                continue
            if '=' not in part:
                raise inputerror(f'sbm spec field {part!r} is not key=value')
            key, value = part.split('=', 1)
            fields[key.strip().replace('-', '_')] = value.strip()
        unknown = set(fields) - {'n', 'blocks', 'p_in', 'p_out', 'features', 'dim', 'signal', 'seed'}
        if unknown:
            raise inputerror(f'unknown sbm spec fields: {", ".join(sorted(unknown))}')
        try:
            blocks = fields.get('blocks', '2')
            if '/' in blocks:
                sizes = [int(s) for s in blocks.split('/')]
            else:
                count = int(blocks)
                n = int(fields.get('n', 100 * count))
                if count < 1 or n < count:
                    raise inputerror('sbm spec needs 1 <= blocks <= n')
                sizes = [n // count + (1 if i < n % count else 0) for i in range(count)]
            if 'n' in fields and int(fields['n']) != sum(sizes):
                raise inputerror('sbm block sizes do not sum to n')
            return cls(sizes, float(fields.get('p_in', 0.1)), float(fields.get('p_out', 0.01)),
                       fields.get('features', 'noise'), int(fields.get('dim', 8)),
                       float(fields.get('signal', 1.0)), int(fields.get('seed', 0)))
        except ValueError as e:
            if isinstance(e, inputerror):
                raise
            raise inputerror(f'malformed sbm spec {text!r}: {e}')

    def tostring(self):
        return (f'blocks={"/".join(map(str, self.sizes))},p_in={self.p_in!r},p_out={self.p_out!r},'
                f'features={self.features},dim={self.dim},signal={self.signal!r},seed={self.seed}')

    def __repr__(self):
        return f'sbmspec({self.tostring()})'

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, sbmspec) and vars(self) == vars(other)

def gensbm(spec):
    '''Sample a stochastic block model dataset. Labels are block ids.'''
    if not isinstance(spec, sbmspec):
        raise TypeError('spec must be an sbmspec')
    c = len(spec.sizes)
    probabilities = numpy.full((c, c), spec.p_out)
    numpy.fill_diagonal(probabilities, spec.p_in)
    graph = networkx.stochastic_block_model(spec.sizes, probabilities.tolist(),
                                            seed = spec.seed, sparse = False)
    pairs = numpy.array(sorted(graph.edges()), dtype = numpy.int64).reshape(-1, 2)
    y = numpy.repeat(numpy.arange(c), spec.sizes)
    rng = numpy.random.default_rng([spec.seed, 1])
    X = rng.standard_normal((spec.n, spec.dim))
    if spec.features == 'informative':
        means = rng.standard_normal((c, spec.dim))
        means *= spec.signal / numpy.linalg.norm(means, axis = 1, keepdims = True)
        X += means[y]
    ds = dataset(X, y, edgelist(pairs, spec.n), f'sbm-{spec.seed}')
    logger.debug('generated %r', ds)
    return ds

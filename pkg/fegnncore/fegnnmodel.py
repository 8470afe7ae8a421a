'''FE-GNN Core: FE-GNN Model
\n\tThe linear FE-GNN predictor with one weight matrix per feature subspace,
its weight-sharing variant, the cross-entropy objective and its analytic
gradients.'''
import logging
import numpy
import scipy.special
from .fegnngraph import inputerror, contracterror, numericerror
from .fegnnfeatures import featurespace
__all__ = ['fegnnparams', 'wsparams', 'lossconfig', 'initparams', 'initwsparams',
           'forward', 'forwardws', 'logits', 'loss', 'crossentropy', 'gradients',
           'predict', 'wsasflattened', 'checklabels', 'checkmask']

logger = logging.getLogger(__name__)


#___Parameters___
class fegnnparams(object):
    '''One weight per feature subspace, in feature space order. Each weight is
    either a d_t x c matrix or a factor pair (d_t x h, h x c).'''

    def __init__(self, weights):
        checked = []
        for weight in weights:
            if isinstance(weight, tuple):
                if len(weight) != 2:
                    raise contracterror('factorized weights are (left, right) pairs')
                left, right = (numpy.asarray(w, dtype = numpy.float64) for w in weight)
                if left.ndim != 2 or right.ndim != 2 or left.shape[1] != right.shape[0]:
                    raise contracterror(f'factor shapes {left.shape} and {right.shape} do not chain')
                checked.append((left, right))
            else:
                weight = numpy.asarray(weight, dtype = numpy.float64)
                if weight.ndim != 2:
                    raise contracterror('weights must be two-dimensional')
                checked.append(weight)
        self.weights = checked

    @property
    def factorized(self):
        return any(isinstance(w, tuple) for w in self.weights)

    def effective(self):
        '''Return the full d_t x c matrix of every subspace.'''
        return [w[0] @ w[1] if isinstance(w, tuple) else w for w in self.weights]

    def arrays(self):
        '''Return every trainable array in a fixed order.'''
        result = []
        for weight in self.weights:
            result.extend(weight if isinstance(weight, tuple) else (weight,))
        return result

    def replace(self, arrays):
        '''Return parameters of the same structure holding the given arrays.'''
        arrays = list(arrays)
        weights = []
        position = 0
        for weight in self.weights:
            if isinstance(weight, tuple):
                weights.append((arrays[position], arrays[position + 1]))
                position += 2
            else:
                weights.append(arrays[position])
                position += 1
        return fegnnparams(weights)

    def copy(self):
        return self.replace([a.copy() for a in self.arrays()])

    def __len__(self):
        return len(self.weights)

    def __repr__(self):
        return f'fegnnparams({len(self)} weights, factorized={self.factorized})'

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, fegnnparams) or len(self.arrays()) != len(other.arrays()):
            return False
        return all(numpy.array_equal(a, b) for a, b in zip(self.arrays(), other.arrays()))


class wsparams(object):
    '''Weight-sharing parameters: one shared d x c matrix scaled by a scalar
    gamma_k per polynomial subspace, and an independent w_s for the
    structural block (None when there is none).'''

    def __init__(self, shared, gamma, w_s = None):
        self.shared = numpy.asarray(shared, dtype = numpy.float64)
        self.gamma = numpy.asarray(gamma, dtype = numpy.float64).ravel()
        self.w_s = None if w_s is None else numpy.asarray(w_s, dtype = numpy.float64)
        if self.shared.ndim != 2:
            raise contracterror('shared weight must be two-dimensional')
        if self.w_s is not None and (self.w_s.ndim != 2 or self.w_s.shape[1] != self.shared.shape[1]):
            raise contracterror('w_s must have as many columns as the shared weight')

    def arrays(self):
        result = [self.shared, self.gamma]
        if self.w_s is not None:
            result.append(self.w_s)
        return result

    def replace(self, arrays):
        arrays = list(arrays)
        return wsparams(arrays[0], arrays[1], arrays[2] if len(arrays) > 2 else None)

    def copy(self):
        return self.replace([a.copy() for a in self.arrays()])

    def __repr__(self):
        return f'wsparams(gamma={len(self.gamma)}, structural={self.w_s is not None})'

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, wsparams) or len(self.arrays()) != len(other.arrays()):
            return False
        return all(numpy.array_equal(a, b) for a, b in zip(self.arrays(), other.arrays()))


class lossconfig(object):
    '''Weight decay and the mask of nodes the loss averages over.'''

    def __init__(self, weight_decay = 0.0, train_mask = None):
        if weight_decay < 0:
            raise inputerror('weight_decay must be non-negative')
        self.weight_decay = float(weight_decay)
        self.train_mask = checkmask(train_mask, 'train_mask')

    def __repr__(self):
        return f'lossconfig(weight_decay={self.weight_decay}, nodes={int(self.train_mask.sum())})'


def checkmask(mask, name = 'mask'):
    '''Return mask as a nonempty boolean vector.'''
    if mask is None:
        raise inputerror(f'{name} is required')
    mask = numpy.asarray(mask, dtype = bool)
    if mask.ndim != 1:
        raise contracterror(f'{name} must be a vector')
    if not mask.any():
        raise inputerror(f'{name} selects no nodes')
    return mask

def checklabels(y, n, c):
    '''Return y as an int vector of length n with labels in [0, c).'''
    y = numpy.asarray(y)
    if y.shape != (n,):
        raise contracterror(f'expected {n} labels, got shape {y.shape}')
    if not numpy.issubdtype(y.dtype, numpy.integer):
        raise TypeError('labels must be integers')
    if len(y) and (y.min() < 0 or y.max() >= c):
        raise inputerror(f'labels must lie in [0, {c})')
    return y


#___Initialization___
def _uniform(rng, rows, cols):
    bound = numpy.sqrt(6.0 / (rows + cols))
    return rng.uniform(-bound, bound, size = (rows, cols))

def initparams(fs, c, seed = 0, hidden = None):
    '''Seeded fan-based uniform initialization of one weight per subspace.
    With hidden set, each weight is a factor pair of inner width hidden.'''
    rng = numpy.random.default_rng(seed)
    weights = []
    for width in fs.widths():
        if hidden:
            weights.append((_uniform(rng, width, hidden), _uniform(rng, hidden, c)))
        else:
            weights.append(_uniform(rng, width, c))
    return fegnnparams(weights)

def initwsparams(fs, c, seed = 0):
    '''Seeded initialization of weight-sharing parameters; gammas start at 1.'''
    poly = fs.polynomial
    if not poly:
        raise inputerror('weight sharing needs at least one polynomial subspace')
    width = _sharedwidth(fs)
    rng = numpy.random.default_rng(seed)
    shared = _uniform(rng, width, c)
    w_s = _uniform(rng, fs.structural.width, c) if fs.structural is not None else None
    return wsparams(shared, numpy.ones(len(poly)), w_s)

def _sharedwidth(fs):
    widths = {s.width for s in fs.polynomial}
    if len(widths) != 1:
        raise contracterror(f'weight sharing needs equal polynomial block widths, got {sorted(widths)}')
    return widths.pop()


#___Forward Passes___
def forward(fs, params):
    '''Return the logits H = sum_t Phi_t W_t.'''
    if not isinstance(fs, featurespace):
        raise TypeError('fs must be a featurespace')
    if len(params) != len(fs):
        raise contracterror(f'{len(params)} weights for {len(fs)} subspaces')
    H = None
    for subspace, weight in zip(fs, params.weights):
        if isinstance(weight, tuple):
            rows = weight[0].shape[0]
            product = (subspace.block @ weight[0]) @ weight[1] if rows == subspace.width else None
        else:
            rows = weight.shape[0]
            product = subspace.block @ weight if rows == subspace.width else None
        if product is None:
            raise contracterror(f'{subspace.label()} has width {subspace.width} but its weight has {rows} rows')
        H = product if H is None else H + product
    return H

def forwardws(fs, params):
    '''Return the weight-sharing logits H = sum_k gamma_k Phi_k W + S W_s.'''
    poly = fs.polynomial
    width = _sharedwidth(fs)
    if width != params.shared.shape[0]:
        raise contracterror(f'blocks have width {width} but the shared weight has {params.shared.shape[0]} rows')
    if len(params.gamma) != len(poly):
        raise contracterror(f'{len(params.gamma)} gammas for {len(poly)} polynomial subspaces')
    H = numpy.zeros((fs.n, params.shared.shape[1]))
    for gamma, subspace in zip(params.gamma, poly):
        H += gamma * (subspace.block @ params.shared)
    if fs.structural is not None:
        if params.w_s is None or params.w_s.shape[0] != fs.structural.width:
            raise contracterror('w_s does not match the structural block')
        H += fs.structural.block @ params.w_s
    return H

def logits(fs, params):
    '''Dispatch to forward or forwardws by parameter type.'''
    if isinstance(params, wsparams):
        return forwardws(fs, params)
    if isinstance(params, fegnnparams):
        return forward(fs, params)
    raise TypeError('params must be fegnnparams or wsparams')


#___Objective___
def crossentropy(H, y, mask):
    '''Return the mean of -log softmax(H_i)[y_i] over masked nodes.'''
    mask = checkmask(mask)
    H = numpy.asarray(H, dtype = numpy.float64)
    y = checklabels(y, H.shape[0], H.shape[1])
    logp = scipy.special.log_softmax(H[mask], axis = 1)
    return float(-numpy.mean(logp[numpy.arange(int(mask.sum())), y[mask]]))

def loss(H, y, cfg, params = None):
    '''Return the masked cross-entropy plus weight_decay times the squared
    norm of every trainable array (gammas included).'''
    value = crossentropy(H, y, cfg.train_mask)
    if params is not None and cfg.weight_decay:
        value += cfg.weight_decay * sum(float(numpy.sum(a * a)) for a in params.arrays())
    return value

def gradients(fs, params, y, cfg):
    '''Return the analytic gradient of loss as parameters of the same
    structure as params.'''
    H = logits(fs, params)
    mask = cfg.train_mask
    y = checklabels(y, H.shape[0], H.shape[1])
    if not numpy.all(numpy.isfinite(H)):
        raise numericerror('logits contain non-finite values')
    G = numpy.zeros_like(H)
    count = int(mask.sum())
    probabilities = scipy.special.softmax(H[mask], axis = 1)
    probabilities[numpy.arange(count), y[mask]] -= 1.0
    G[mask] = probabilities / count
    decay = 2.0 * cfg.weight_decay

    if isinstance(params, wsparams):
        grad_shared = numpy.zeros_like(params.shared)
        grad_gamma = numpy.zeros_like(params.gamma)
        for k, subspace in enumerate(fs.polynomial):
            back = subspace.block.T @ G
            grad_shared += params.gamma[k] * back
            grad_gamma[k] = numpy.sum(back * params.shared)
        arrays = [grad_shared + decay * params.shared, grad_gamma + decay * params.gamma]
        if params.w_s is not None:
            arrays.append(fs.structural.block.T @ G + decay * params.w_s)
        return params.replace(arrays)

    grads = []
    for subspace, weight in zip(fs, params.weights):
        back = subspace.block.T @ G
        if isinstance(weight, tuple):
            left, right = weight
            grads.append((back @ right.T + decay * left, left.T @ back + decay * right))
        else:
            grads.append(back + decay * weight)
    return fegnnparams(grads)


#___Prediction___
def predict(fs, params):
    '''Return argmax class per node; ties go to the lowest class index.'''
    return numpy.argmax(logits(fs, params), axis = 1)

def wsasflattened(params):
    '''Return flattened parameters W_t = gamma_t W with the same output.'''
    if not isinstance(params, wsparams):
        raise TypeError('params must be wsparams')
    weights = [gamma * params.shared for gamma in params.gamma]
    if params.w_s is not None:
        weights.append(params.w_s.copy())
    return fegnnparams(weights)

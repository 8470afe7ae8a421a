'''FE-GNN Core: FE-GNN Optimize
\n\tTraining configuration, the Adam optimizer, the full-batch training loop
with warmup and patience early stopping, and evaluation.'''
import logging
import time
import numpy
from .fegnngraph import inputerror, contracterror, numericerror
from .fegnnfeatures import checkbasis
from .fegnnspectral import rankspec, massratio
from .fegnnmodel import (lossconfig, initparams, initwsparams,
                         logits, loss, crossentropy, gradients, checkmask, checklabels)
__all__ = ['trainconfig', 'adamstate', 'adamstep', 'trainreport', 'train',
           'evaluate', 'accuracy', 'BETA1', 'BETA2', 'ADAM_EPSILON']

logger = logging.getLogger(__name__)

BETA1 = 0.9
BETA2 = 0.999
ADAM_EPSILON = 1e-8


#___Configuration___
class trainconfig(object):
    '''Hyperparameters of one training run.'''

    def __init__(self, lr = 0.01, weight_decay = 0.0005, max_epochs = 1000,
                 warmup_epochs = 50, patience = 200, seed = 0, basis = 'chebyshev',
                 K = 3, rank_spec = None, normalize = True, factor_hidden = None,
                 weight_sharing = False, chebyshev_rescale = False,
                 svd_target = 'adjacency'):
        if rank_spec is None:
            rank_spec = massratio(0.94, round_to = 100)
        if not isinstance(rank_spec, rankspec):
            raise TypeError('rank_spec must be a rankspec')
        if lr <= 0:
            raise inputerror(f'lr must be positive, got {lr}')
        if weight_decay < 0:
            raise inputerror(f'weight_decay must be non-negative, got {weight_decay}')
        for name, value in (('max_epochs', max_epochs), ('warmup_epochs', warmup_epochs),
                            ('patience', patience), ('K', K)):
            if isinstance(value, bool) or not isinstance(value, (int, numpy.integer)):
                raise TypeError(f'{name} must be an int')
            if value < 0:
                raise inputerror(f'{name} must be non-negative, got {value}')
        if factor_hidden is not None and factor_hidden < 1:
            raise inputerror('factor_hidden must be a positive int')
        if weight_sharing and factor_hidden:
            raise inputerror('weight sharing cannot be combined with a hidden factorization')
        if svd_target not in ('adjacency', 'laplacian'):
            raise inputerror("svd_target must be 'adjacency' or 'laplacian'")
        self.lr = float(lr)
        self.weight_decay = float(weight_decay)
        self.max_epochs = int(max_epochs)
        self.warmup_epochs = int(warmup_epochs)
        self.patience = int(patience)
        self.seed = int(seed)
        self.basis = checkbasis(basis)
        self.K = int(K)
        self.rank_spec = rank_spec
        self.normalize = bool(normalize)
        self.factor_hidden = None if factor_hidden is None else int(factor_hidden)
        self.weight_sharing = bool(weight_sharing)
        self.chebyshev_rescale = bool(chebyshev_rescale)
        self.svd_target = svd_target

    def todict(self):
        result = dict(vars(self))
        result['rank_spec'] = self.rank_spec.todict()
        return result

    @classmethod
    def fromdict(cls, data):
        data = dict(data)
        spec = data.pop('rank_spec', None)
        if isinstance(spec, dict):
            spec = rankspec(**spec)
        return cls(rank_spec = spec, **data)

    def replace(self, **changes):
        '''Return a copy with some fields changed.'''
        data = self.todict()
        data['rank_spec'] = self.rank_spec
        data.update(changes)
        return trainconfig(**data)

    def __repr__(self):
        return f'trainconfig({self.todict()})'

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, trainconfig) and self.todict() == other.todict()


#___Adam___
class adamstate(object):
    '''First and second moment accumulators per trainable array.'''

    def __init__(self, arrays):
        self.m = [numpy.zeros_like(a) for a in arrays]
        self.v = [numpy.zeros_like(a) for a in arrays]
        self.t = 0

    def __repr__(self):
        return f'adamstate(t={self.t}, arrays={len(self.m)})'

def adamstep(params, grads, state, lr):
    '''Return (params, state) after one bias-corrected Adam update.
    \nparams and grads are parameter objects or lists of arrays; state is
    updated in place and returned.'''
    structured = not isinstance(params, (list, tuple))
    values = params.arrays() if structured else list(params)
    slopes = grads.arrays() if hasattr(grads, 'arrays') else list(grads)
    if len(values) != len(slopes) or len(values) != len(state.m):
        raise contracterror('params, grads and state hold different numbers of arrays')
    for value, slope in zip(values, slopes):
        if numpy.shape(value) != numpy.shape(slope):
            raise contracterror(f'gradient shape {numpy.shape(slope)} does not match {numpy.shape(value)}')
        if not numpy.all(numpy.isfinite(slope)):
            raise numericerror('gradient contains non-finite values')
    state.t += 1
    correction1 = 1.0 - BETA1 ** state.t
    correction2 = 1.0 - BETA2 ** state.t
    updated = []
    for i, (value, slope) in enumerate(zip(values, slopes)):
        state.m[i] = BETA1 * state.m[i] + (1.0 - BETA1) * slope
        state.v[i] = BETA2 * state.v[i] + (1.0 - BETA2) * slope * slope
        mhat = state.m[i] / correction1
        vhat = state.v[i] / correction2
        updated.append(value - lr * mhat / (numpy.sqrt(vhat) + ADAM_EPSILON))
    return (params.replace(updated) if structured else updated), state


#___Evaluation___
def accuracy(predictions, y, mask):
    '''Return the fraction of masked nodes predicted correctly.'''
    mask = checkmask(mask)
    return float(numpy.mean(numpy.asarray(predictions)[mask] == numpy.asarray(y)[mask]))

def evaluate(params, fs, y, mask):
    '''Return the accuracy (micro-F1) of params on the masked nodes.'''
    mask = checkmask(mask)
    H = logits(fs, params)
    return accuracy(numpy.argmax(H, axis = 1), y, mask)


#___Training___
class trainreport(object):
    '''Per-epoch history plus the selected epoch and its metrics.
    \nhistory rows are (epoch, train_loss, train_acc, val_acc, val_loss);
    best_epoch 0 denotes the initial parameters.'''

    def __init__(self, history, best_epoch, best_val_acc, test_acc, final_train_loss,
                 wall_time_ms, z = None):
        self.history = history
        self.best_epoch = best_epoch
        self.best_val_acc = best_val_acc
        self.test_acc = test_acc
        self.final_train_loss = final_train_loss
        self.wall_time_ms = wall_time_ms
        self.z = z

    @property
    def epochs(self):
        return len(self.history)

    def curverows(self):
        '''Return (epoch, train_loss, val_acc) rows for curve files.'''
        return [(row[0], row[1], row[3]) for row in self.history]

    def todict(self, curves = False):
        result = {'best_epoch': self.best_epoch, 'best_val_acc': self.best_val_acc,
                  'test_acc': self.test_acc, 'epochs': self.epochs,
                  'final_train_loss': self.final_train_loss,
                  'wall_time_ms': self.wall_time_ms}
        if self.z is not None:
            result['z'] = self.z
        if curves:
            result['history'] = [list(row) for row in self.history]
        return result

    def __repr__(self):
        return (f'trainreport(epochs={self.epochs}, best_epoch={self.best_epoch}, '
                f'test_acc={self.test_acc})')

def _checksplits(splits, n):
    train_mask = checkmask(splits.train, 'train mask')
    val_mask = numpy.asarray(splits.val, dtype = bool)
    test_mask = numpy.asarray(splits.test, dtype = bool)
    for mask in (train_mask, val_mask, test_mask):
        if mask.shape != (n,):
            raise contracterror(f'masks must have length {n}')
    if (train_mask & val_mask).any() or (train_mask & test_mask).any() or (val_mask & test_mask).any():
        raise inputerror('train, validation and test masks must be disjoint')
    return train_mask, val_mask, test_mask

def train(fs, y, splits, cfg, params = None, c = None):
    '''Train FE-GNN on a feature space with full-batch Adam.
    \nAfter warmup_epochs, training stops once validation accuracy has not
    improved for patience epochs. Returns the parameters of the best
    validation epoch and a trainreport whose test accuracy is measured once
    on those parameters.
    \nWith an empty validation mask, the epoch of lowest training loss is
    selected and patience counts epochs without a lower training loss;
    validation metrics are then NaN.'''
    if not isinstance(cfg, trainconfig):
        raise TypeError('cfg must be a trainconfig')
    started = time.perf_counter()
    train_mask, val_mask, test_mask = _checksplits(splits, fs.n)
    y = numpy.asarray(y)
    if c is None:
        c = int(y.max()) + 1
    y = checklabels(y, fs.n, c)
    if params is None:
        if cfg.weight_sharing:
            params = initwsparams(fs, c, cfg.seed)
        else:
            params = initparams(fs, c, cfg.seed, cfg.factor_hidden)
    objective = lossconfig(cfg.weight_decay, train_mask)
    has_val = bool(val_mask.any())

    def measure(current):
        H = logits(fs, current)
        predictions = numpy.argmax(H, axis = 1)
        val_acc = accuracy(predictions, y, val_mask) if has_val else float('nan')
        val_loss = crossentropy(H, y, val_mask) if has_val else float('nan')
        return H, predictions, val_acc, val_loss

    def improves(val_acc, val_loss, train_loss):
        #without validation nodes the lowest training loss is kept
        if not has_val:
            return train_loss < best_train_loss
        return val_acc > best_val_acc or (val_acc == best_val_acc and val_loss < best_val_loss)

    H, _, best_val_acc, best_val_loss = measure(params)
    final_train_loss = best_train_loss = loss(H, y, objective, params)
    best = params.copy()
    best_epoch = 0
    state = adamstate(params.arrays())
    history = []
    for epoch in range(1, cfg.max_epochs + 1):
        grads = gradients(fs, params, y, objective)
        params, state = adamstep(params, grads, state, cfg.lr)
        H, predictions, val_acc, val_loss = measure(params)
        train_loss = loss(H, y, objective, params)
        if not numpy.isfinite(train_loss):
            raise numericerror(f'training loss became non-finite at epoch {epoch}')
        history.append((epoch, train_loss, accuracy(predictions, y, train_mask), val_acc, val_loss))
        final_train_loss = train_loss
        if improves(val_acc, val_loss, train_loss):
            best, best_epoch = params.copy(), epoch
            best_val_acc, best_val_loss, best_train_loss = val_acc, val_loss, train_loss
        if epoch > cfg.warmup_epochs and epoch - best_epoch >= cfg.patience:
            logger.debug('early stopping at epoch %d (best %d)', epoch, best_epoch)
            break

    test_acc = evaluate(best, fs, y, test_mask) if test_mask.any() else float('nan')
    wall_time_ms = (time.perf_counter() - started) * 1000.0
    report = trainreport(history, best_epoch, best_val_acc, test_acc, final_train_loss,
                         wall_time_ms)
    logger.info('trained %d epochs, best epoch %d, val %.4f, test %.4f',
                len(history), best_epoch, best_val_acc, test_acc)
    return best, report

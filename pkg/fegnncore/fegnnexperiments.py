'''FE-GNN Core: FE-GNN Experiments
\n\tRun configurations and the experiment drivers behind the command line:
the feature pipeline, repeated seeded training with confidence intervals,
ablations, sensitivity sweeps, hyperparameter grids, diagnostics reports and
synthetic dataset generation. Every record embeds the configuration that
produced it.'''
import logging
import os
import time
from multiprocessing import Pool
import numpy
from .fegnngraph import inputerror, buildadjacency, normalizeadjacency, laplacian
from .fegnnfeatures import BASES, buildpolysubspaces, assemble
from .fegnnspectral import massratio, truncatedsvd, structuralcomponents
from .fegnnoptimize import trainconfig, train
from .fegnndiagnostics import (correlationprofile, writeprofilecsv, columnnormstd,
                               datasetstatistics)
from .fegnndata import loaddataset, savedataset, randomsplit, gensbm, sbmspec
from .fegnnfileio import writecsvfile, writejsonlines, makedirectory, seedpath
__all__ = ['ABLATIONS', 'CURVE_HEADER', 'SVD_SEED', 'runconfig', 'loaddata',
           'buildfeatures', 'runseed', 'summarise', 'runexperiment', 'cmdtrain',
           'cmdablate', 'cmddiagnose', 'cmdsvdsweep', 'ordersweep', 'gridsearch',
           'cmdgen', 'stripwalltime']

logger = logging.getLogger(__name__)

ABLATIONS = ('without_s', 'without_poly_high', 'without_poly_zero', 'weight_sharing',
             'without_norm')
CURVE_HEADER = ['epoch', 'train_loss', 'val_acc']
SVD_SEED = 0
Z_95 = 1.96


#___Run Configuration___
class runconfig(object):
    '''A data source, a training configuration, ablation switches, seeds and
    output paths. weight_sharing lives on the training configuration.'''

    def __init__(self, data = None, sbm = None, train = None, seeds = (0,),
                 without_s = False, without_poly_high = False, without_poly_zero = False,
                 without_norm = False, workers = 1, out = None, curves = None,
                 precompute = False, fractions = (0.6, 0.2, 0.2)):
        if (data is None) == (sbm is None):
            raise inputerror('give exactly one data source: a dataset directory or an sbm spec')
        if isinstance(sbm, str):
            sbm = sbmspec.fromstring(sbm)
        seeds = [int(s) for s in seeds]
        if not seeds:
            raise inputerror('at least one seed is required')
        if workers < 1:
            raise inputerror('workers must be at least 1')
        self.data = data
        self.sbm = sbm
        self.train = train if train is not None else trainconfig()
        self.seeds = seeds
        self.without_s = bool(without_s)
        self.without_poly_high = bool(without_poly_high)
        self.without_poly_zero = bool(without_poly_zero)
        self.without_norm = bool(without_norm)
        self.workers = int(workers)
        self.out = out
        self.curves = curves
        self.precompute = bool(precompute)
        self.fractions = tuple(float(f) for f in fractions)

    def switches(self):
        '''Return the names of the enabled ablation switches.'''
        return [name for name in ABLATIONS
                if (self.train.weight_sharing if name == 'weight_sharing' else getattr(self, name))]

    def variant(self):
        return '+'.join(self.switches()) or 'full'

    def resolvedtrain(self):
        '''Return the training configuration with without_norm applied.'''
        return self.train.replace(normalize = False) if self.without_norm else self.train

    def withswitches(self, enabled = ()):
        '''Return a copy with only the named ablation switches enabled.'''
        data = self.todict()
        for name in ABLATIONS:
            if name != 'weight_sharing':
                data[name] = name in enabled
        data['train']['weight_sharing'] = 'weight_sharing' in enabled
        if 'weight_sharing' in enabled:
            data['train']['factor_hidden'] = None
        return runconfig.fromdict(data)

    def replace(self, **changes):
        data = self.todict()
        data.update(changes)
        return runconfig.fromdict(data)

    def todict(self):
        return {'data': self.data, 'sbm': self.sbm.tostring() if self.sbm else None,
                'train': self.train.todict(), 'seeds': list(self.seeds),
                'without_s': self.without_s, 'without_poly_high': self.without_poly_high,
                'without_poly_zero': self.without_poly_zero, 'without_norm': self.without_norm,
                'workers': self.workers, 'out': self.out, 'curves': self.curves,
                'precompute': self.precompute, 'fractions': list(self.fractions)}

    @classmethod
    def fromdict(cls, data):
        data = dict(data)
        settings = data.pop('train', None)
        if isinstance(settings, dict):
            settings = trainconfig.fromdict(settings)
        return cls(train = settings, **data)

    def __repr__(self):
        return f'runconfig({self.todict()})'

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, runconfig) and self.todict() == other.todict()


#___Pipeline___
def loaddata(cfg):
    '''Load the dataset directory or sample the sbm of a run configuration.'''
    if cfg.data is not None:
        return loaddataset(cfg.data)
    return gensbm(cfg.sbm)

def buildfeatures(ds, settings, without_s = False, without_poly_high = False,
                  without_poly_zero = False):
    '''Build the feature space of a dataset for a training configuration.
    \nReturns (featurespace, z) where z is the structural rank or None.'''
    A = buildadjacency(ds.edges)
    Ahat = normalizeadjacency(A)
    Lhat = laplacian(Ahat)
    poly = []
    if not (without_poly_high and without_poly_zero):
        poly = buildpolysubspaces(Lhat, ds.X, settings.K, settings.basis,
                                  settings.chebyshev_rescale)
        if without_poly_high:
            poly = poly[:1]
        if without_poly_zero:
            poly = poly[1:]
    structural = None
    z = None
    if not without_s:
        target = Ahat if settings.svd_target == 'adjacency' else Lhat
        svd = truncatedsvd(target, settings.rank_spec, SVD_SEED)
        structural = structuralcomponents(svd)
        z = svd.z
    if not poly and structural is None:
        raise inputerror('the ablations remove every feature subspace')
    return assemble(poly, structural, settings.normalize), z

def _switchkwargs(cfg):
    return {'without_s': cfg.without_s, 'without_poly_high': cfg.without_poly_high,
            'without_poly_zero': cfg.without_poly_zero}

def runseed(ds, cfg, seed, features = None):
    '''Split, build features (unless given), train and evaluate for one seed.
    \nReturns a result dictionary and the training report.'''
    settings = cfg.resolvedtrain().replace(seed = seed)
    split = randomsplit(ds.n, cfg.fractions, seed)
    started = time.perf_counter()
    if features is None:
        fs, z = buildfeatures(ds, settings, **_switchkwargs(cfg))
    else:
        fs, z = features
    _, report = train(fs, ds.y, split, settings, c = ds.c)
    report.z = z
    result = {'seed': seed, 'test_acc': report.test_acc, 'val_acc': report.best_val_acc,
              'best_epoch': report.best_epoch, 'epochs': report.epochs,
              'final_train_loss': report.final_train_loss, 'z': z,
              'width': fs.width,
              'wall_time_ms': (time.perf_counter() - started) * 1000.0}
    logger.info('seed %d: test accuracy %.4f after %d epochs', seed, report.test_acc, report.epochs)
    return result, report

def _seedjob(payload):
    ds, data, seed, features = payload
    result, report = runseed(ds, runconfig.fromdict(data), seed, features)
    return result, report.curverows()

def summarise(values):
    '''Return (mean, half-width of the normal-approximation 95% interval).'''
    values = numpy.asarray(values, dtype = numpy.float64)
    if not len(values):
        raise inputerror('nothing to summarise')
    mean = float(numpy.mean(values))
    if len(values) < 2:
        return mean, 0.0
    return mean, float(Z_95 * numpy.std(values, ddof = 1) / numpy.sqrt(len(values)))

def runexperiment(cfg, ds = None):
    '''Run every seed of a configuration and return its record.'''
    if ds is None:
        ds = loaddata(cfg)
    features = None
    precompute_ms = None
    if cfg.precompute:
        started = time.perf_counter()
        features = buildfeatures(ds, cfg.resolvedtrain(), **_switchkwargs(cfg))
        precompute_ms = (time.perf_counter() - started) * 1000.0
    data = cfg.todict()
    payloads = [(ds, data, seed, features) for seed in cfg.seeds]
    if cfg.workers > 1 and len(payloads) > 1:
        with Pool(min(cfg.workers, len(payloads))) as pool:
            outcomes = pool.map(_seedjob, payloads)
    else:
        outcomes = [_seedjob(payload) for payload in payloads]
    runs = [result for result, _ in outcomes]
    if cfg.curves:
        for seed, (_, rows) in zip(cfg.seeds, outcomes):
            path = cfg.curves if len(cfg.seeds) == 1 else seedpath(cfg.curves, seed)
            writecsvfile(path, CURVE_HEADER, rows)
    accuracies = [run['test_acc'] for run in runs]
    mean, ci95 = summarise(accuracies)
    record = {'variant': cfg.variant(), 'dataset': ds.name, 'config': data,
              'seeds': list(cfg.seeds), 'runs': runs, 'test_acc': accuracies,
              'mean': mean, 'ci95': ci95}
    if precompute_ms is not None:
        record['precompute_wall_time_ms'] = precompute_ms
    logger.info('%s on %s: %.4f +/- %.4f over %d seeds', record['variant'], ds.name,
                mean, ci95, len(runs))
    return record

def stripwalltime(record):
    '''Return a copy of a record without wall-time fields.'''
    if isinstance(record, dict):
        return {k: stripwalltime(v) for k, v in record.items() if 'wall_time' not in k}
    if isinstance(record, list):
        return [stripwalltime(v) for v in record]
    return record

def _emit(cfg, records):
    if cfg.out:
        directory = os.path.dirname(str(cfg.out))
        if directory:
            makedirectory(directory)
        writejsonlines(cfg.out, records)
    return records


#___Commands___
def cmdtrain(cfg):
    '''Train over every seed and return the record (also written to cfg.out).'''
    record = runexperiment(cfg)
    _emit(cfg, [record])
    return record

def cmdablate(cfg):
    '''Run the full model and every enabled ablation on identical seeds and
    splits; return one record per variant, full model first.'''
    ds = loaddata(cfg)
    enabled = cfg.switches()
    variants = [cfg.withswitches()] + [cfg.withswitches((name,)) for name in enabled]
    records = [runexperiment(variant, ds) for variant in variants]
    full = records[0]['mean']
    for record in records:
        record['delta'] = record['mean'] - full
    return _emit(cfg, records)

def cmdsvdsweep(cfg, ratios):
    '''Train once per singular-value mass ratio on fixed splits; return the
    records and write "ratio,z,mean,ci95" rows to csv_path when given.'''
    ratios = [float(r) for r in ratios]
    if not ratios:
        raise inputerror('at least one ratio is required')
    specs = [massratio(r, round_to = cfg.train.rank_spec.round_to) for r in ratios]
    ds = loaddata(cfg)
    records = []
    for ratio, spec in zip(ratios, specs):
        record = runexperiment(cfg.replace(train = cfg.train.replace(rank_spec = spec)), ds)
        record['ratio'] = ratio
        records.append(record)
    return _emit(cfg, records)

def ordersweep(cfg, orders):
    '''Train once per polynomial order K on fixed splits.'''
    orders = [int(k) for k in orders]
    if not orders or min(orders) < 0:
        raise inputerror('orders must be non-negative ints')
    ds = loaddata(cfg)
    records = []
    for K in orders:
        record = runexperiment(cfg.replace(train = cfg.train.replace(K = K)), ds)
        record['K'] = K
        records.append(record)
    return _emit(cfg, records)

def gridsearch(cfg, lrs, weight_decays):
    '''Select (lr, weight decay) by mean validation accuracy over the seeds.
    \nTies go to the first cell in grid order. Test accuracy is reported for
    the selected cell only.'''
    if not lrs or not weight_decays:
        raise inputerror('the grid needs at least one lr and one weight decay')
    ds = loaddata(cfg)
    cells = []
    best = None
    for lr in lrs:
        for wd in weight_decays:
            record = runexperiment(cfg.replace(train = cfg.train.replace(lr = lr, weight_decay = wd)), ds)
            val_mean = float(numpy.mean([run['val_acc'] for run in record['runs']]))
            cells.append({'lr': lr, 'weight_decay': wd, 'val_mean': val_mean})
            if best is None or val_mean > best[0]:
                best = (val_mean, record)
    selected = best[1]
    result = {'variant': 'grid', 'dataset': ds.name, 'config': cfg.todict(), 'grid': cells,
              'selected': {'lr': selected['config']['train']['lr'],
                           'weight_decay': selected['config']['train']['weight_decay']},
              'selected_config': selected['config'], 'seeds': list(cfg.seeds),
              'test_acc': selected['test_acc'], 'mean': selected['mean'],
              'ci95': selected['ci95']}
    _emit(cfg, [result])
    return result

def cmddiagnose(cfg, K, out_dir):
    '''Write the coherence profile CSV and a JSON report with column-norm
    dispersion per basis, homophily and dataset statistics.'''
    ds = loaddata(cfg)
    makedirectory(out_dir)
    Lhat = laplacian(normalizeadjacency(buildadjacency(ds.edges)))
    profile = correlationprofile(Lhat, ds.X, K)
    profile_path = os.path.join(out_dir, 'coherence_profile.csv')
    writeprofilecsv(profile, profile_path)
    stds = {basis: columnnormstd([s.block for s in buildpolysubspaces(Lhat, ds.X, K, basis)])
            for basis in BASES}
    quantiles = {str(k): profile.quantiles(k) for k in profile.orders()}
    report = {'dataset': ds.name, 'K': K, 'config': cfg.todict(),
              'statistics': datasetstatistics(ds), 'column_norm_std': stds,
              'coherence_quantiles': quantiles, 'profile_rows': len(profile),
              'profile_csv': profile_path}
    writejsonlines(os.path.join(out_dir, 'diagnostics.jsonl'), [report])
    if cfg.out:
        writejsonlines(cfg.out, [report])
    return report

def cmdgen(spec, path):
    '''Sample an sbm dataset and write it in the canonical format.'''
    if isinstance(spec, str):
        spec = sbmspec.fromstring(spec)
    ds = gensbm(spec)
    savedataset(ds, path)
    return datasetstatistics(ds)

'''FE-GNN Core: FE-GNN Command Line
\n\tThe fegnn command: train, ablate, diagnose, svd-sweep, order-sweep, grid
and gen subcommands over a dataset directory or a synthetic sbm.'''
import argparse
import logging
import sys
from . import __version__
from .fegnngraph import inputerror, contracterror, numericerror
from .fegnnspectral import explicitrank, massratio
from .fegnnoptimize import trainconfig
from .fegnnexperiments import (runconfig, cmdtrain, cmdablate, cmddiagnose, cmdsvdsweep,
                               ordersweep, gridsearch, cmdgen)
from .fegnnfileio import readconfigfile, writecsvfile
from .fegnnconsole import printtable, printkeyvalues
__all__ = ['buildparser', 'parseseeds', 'parsefloats', 'parseints', 'configfromargs',
           'main']

logger = logging.getLogger(__name__)

EXIT_INPUT = 2
EXIT_NUMERIC = 3


#___Parsing Helpers___
def parseseeds(text):
    '''Parse "0,1,2" or ranges such as "0-9" into a list of ints.'''
    seeds = []
    for part in str(text).split(','):
        part = part.strip()
        if not part:
            continue
        try:
            if '-' in part:
                low, high = part.split('-', 1)
                seeds.extend(range(int(low), int(high) + 1))
            else:
                seeds.append(int(part))
        except ValueError:
            raise inputerror(f'invalid seed list {text!r}')
    if not seeds:
        raise inputerror('the seed list is empty')
    return seeds

def parsefloats(text):
    '''Parse a comma-separated list of floats.'''
    try:
        return [float(part) for part in str(text).split(',') if part.strip()]
    except ValueError:
        raise inputerror(f'invalid number list {text!r}')

def parseints(text):
    '''Parse a comma-separated list of ints.'''
    try:
        return [int(part) for part in str(text).split(',') if part.strip()]
    except ValueError:
        raise inputerror(f'invalid integer list {text!r}')


#___Parser___
def _addrunflags(parser):
    source = parser.add_mutually_exclusive_group()
    source.add_argument('--data', metavar = 'DIR', help = 'dataset directory in the canonical format')
    source.add_argument('--sbm', metavar = 'SPEC',
                        help = 'synthetic sbm, e.g. "n=400,blocks=4,p_in=0.1,p_out=0.01,features=noise,dim=8"')
    parser.add_argument('--basis', choices = ['monomial', 'chebyshev', 'bernstein'], default = 'chebyshev')
    parser.add_argument('--k', type = int, default = 3, help = 'maximum polynomial order K')
    rank = parser.add_mutually_exclusive_group()
    rank.add_argument('--svd-ratio', type = float, default = None,
                      help = 'singular-value mass ratio (default 0.94)')
    rank.add_argument('--svd-dim', type = int, default = None, help = 'explicit structural rank')
    parser.add_argument('--svd-round', type = int, default = 100,
                        help = 'round mass-ratio ranks up to a multiple of this (0 disables)')
    parser.add_argument('--svd-target', choices = ['adjacency', 'laplacian'], default = 'adjacency')
    parser.add_argument('--chebyshev-rescale', action = 'store_true')
    parser.add_argument('--no-normalize', action = 'store_true')
    parser.add_argument('--weight-sharing', action = 'store_true')
    parser.add_argument('--without-s', action = 'store_true')
    parser.add_argument('--without-poly-high', action = 'store_true')
    parser.add_argument('--without-poly-zero', action = 'store_true')
    parser.add_argument('--without-norm', action = 'store_true')
    parser.add_argument('--lr', type = float, default = 0.01)
    parser.add_argument('--weight-decay', type = float, default = 0.0005)
    parser.add_argument('--max-epochs', type = int, default = 1000)
    parser.add_argument('--warmup', type = int, default = 50)
    parser.add_argument('--patience', type = int, default = 200)
    parser.add_argument('--seeds', type = parseseeds, default = [0], help = 'e.g. "0-9" or "0,3,7"')
    parser.add_argument('--hidden', type = int, default = None, help = 'enables rank factorization')
    parser.add_argument('--workers', type = int, default = 1)
    parser.add_argument('--out', metavar = 'PATH', help = 'JSON-lines output file')
    parser.add_argument('--curves', metavar = 'PATH', help = 'per-epoch CSV curves')
    parser.add_argument('--precompute', action = 'store_true',
                        help = 'build features once, outside the timed region')

def buildparser():
    '''Return the argument parser of the fegnn command.'''
    parser = argparse.ArgumentParser(prog = 'fegnn', description = 'Feature-expanded graph neural networks.')
    parser.add_argument('--version', action = 'version', version = f'%(prog)s {__version__}')
    parser.add_argument('--config', metavar = 'FILE', help = 'flat "key = value" file of flag defaults')
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action = 'store_true')
    verbosity.add_argument('-q', '--quiet', action = 'store_true')
    commands = parser.add_subparsers(dest = 'command', required = True)

    _addrunflags(commands.add_parser('train', help = 'train over seeds and report accuracy'))
    _addrunflags(commands.add_parser('ablate', help = 'compare the full model with ablations'))
    diagnose = commands.add_parser('diagnose', help = 'coherence profile and feature statistics')
    _addrunflags(diagnose)
    diagnose.add_argument('--out-dir', default = 'diagnostics')
    sweep = commands.add_parser('svd-sweep', help = 'accuracy against singular-value mass ratio')
    _addrunflags(sweep)
    sweep.add_argument('--ratios', type = parsefloats, default = [0.5, 0.7, 0.9, 0.94, 1.0])
    sweep.add_argument('--csv', metavar = 'PATH')
    orders = commands.add_parser('order-sweep', help = 'accuracy against polynomial order')
    _addrunflags(orders)
    orders.add_argument('--orders', type = parseints, default = [0, 1, 2, 3])
    orders.add_argument('--csv', metavar = 'PATH')
    grid = commands.add_parser('grid', help = 'select lr and weight decay on validation accuracy')
    _addrunflags(grid)
    grid.add_argument('--lrs', type = parsefloats, default = [0.01, 0.05, 0.1])
    grid.add_argument('--weight-decays', type = parsefloats, default = [0.0005, 0.005, 0.05])
    gen = commands.add_parser('gen', help = 'write a synthetic sbm dataset to disk')
    gen.add_argument('--sbm', required = True, metavar = 'SPEC')
    gen.add_argument('--out', required = True, metavar = 'DIR')
    return parser


#___Configuration___
def _subparser(parser, command):
    for action in parser._subparsers._group_actions:
        if command in action.choices:
            return action.choices[command]
    return None

def _applyconfigfile(parser, argv, path):
    '''Use the values of a config file as defaults of the chosen subcommand.'''
    values = readconfigfile(path)
    probe, _ = parser.parse_known_args(argv)
    sub = _subparser(parser, probe.command)
    actions = {action.dest: action for action in sub._actions}
    defaults = {}
    for key, text in values.items():
        dest = 'k' if key == 'K' else key
        if dest not in actions:
            raise inputerror(f'{path}: unknown key {key!r}')
        action = actions[dest]
        if isinstance(action, argparse._StoreTrueAction):
            lowered = text.lower()
            if lowered not in ('true', 'false', '1', '0', 'yes', 'no', 'on', 'off'):
                raise inputerror(f'{path}: {key} must be true or false')
            defaults[dest] = lowered in ('true', '1', 'yes', 'on')
        elif action.type is not None:
            try:
                defaults[dest] = action.type(text)
            except (TypeError, ValueError):
                raise inputerror(f'{path}: invalid value {text!r} for {key}')
        else:
            defaults[dest] = text
    sub.set_defaults(**defaults)

def configfromargs(args):
    '''Build a run configuration from parsed arguments.'''
    if args.svd_dim is not None:
        spec = explicitrank(args.svd_dim)
    else:
        spec = massratio(0.94 if args.svd_ratio is None else args.svd_ratio,
                         round_to = args.svd_round or None)
    settings = trainconfig(lr = args.lr, weight_decay = args.weight_decay,
                           max_epochs = args.max_epochs, warmup_epochs = args.warmup,
                           patience = args.patience, seed = args.seeds[0], basis = args.basis,
                           K = args.k, rank_spec = spec, normalize = not args.no_normalize,
                           factor_hidden = args.hidden, weight_sharing = args.weight_sharing,
                           chebyshev_rescale = args.chebyshev_rescale,
                           svd_target = args.svd_target)
    return runconfig(data = args.data, sbm = args.sbm, train = settings, seeds = args.seeds,
                     without_s = args.without_s, without_poly_high = args.without_poly_high,
                     without_poly_zero = args.without_poly_zero,
                     without_norm = args.without_norm, workers = args.workers,
                     out = args.out, curves = args.curves, precompute = args.precompute)


#___Reporting___
def _summaryrows(records, key = None):
    rows = []
    for record in records:
        first = [record[key]] if key else []
        rows.append(first + [record['variant'], record['mean'], record['ci95'],
                             record.get('delta'), len(record['seeds'])])
    return rows

def _runcommand(args):
    if args.command == 'gen':
        statistics = cmdgen(args.sbm, args.out)
        printkeyvalues(statistics)
        return
    cfg = configfromargs(args)
    header = ['variant', 'mean', 'ci95', 'delta', 'seeds']
    if args.command == 'train':
        record = cmdtrain(cfg)
        printtable(['seed', 'test_acc', 'best_epoch', 'epochs', 'z'],
                   [[r['seed'], r['test_acc'], r['best_epoch'], r['epochs'], r['z']] for r in record['runs']])
        printkeyvalues({'mean': record['mean'], 'ci95': record['ci95']})
    elif args.command == 'ablate':
        printtable(header, _summaryrows(cmdablate(cfg)))
    elif args.command == 'diagnose':
        report = cmddiagnose(cfg, args.k, args.out_dir)
        printkeyvalues(report['statistics'])
        printkeyvalues({f'column_norm_std[{b}]': v for b, v in report['column_norm_std'].items()})
    elif args.command == 'svd-sweep':
        records = cmdsvdsweep(cfg, args.ratios)
        rows = [[r['ratio'], r['runs'][0]['z'], r['mean'], r['ci95']] for r in records]
        if args.csv:
            writecsvfile(args.csv, ['ratio', 'z', 'mean', 'ci95'], rows)
        printtable(['ratio', 'z', 'mean', 'ci95'], rows)
    elif args.command == 'order-sweep':
        records = ordersweep(cfg, args.orders)
        rows = [[r['K'], r['mean'], r['ci95']] for r in records]
        if args.csv:
            writecsvfile(args.csv, ['K', 'mean', 'ci95'], rows)
        printtable(['K', 'mean', 'ci95'], rows)
    elif args.command == 'grid':
        result = gridsearch(cfg, args.lrs, args.weight_decays)
        printtable(['lr', 'weight_decay', 'val_mean'],
                   [[c['lr'], c['weight_decay'], c['val_mean']] for c in result['grid']])
        printkeyvalues({'selected lr': result['selected']['lr'],
                        'selected weight_decay': result['selected']['weight_decay'],
                        'test mean': result['mean'], 'test ci95': result['ci95']})


#___Entry Point___
def main(argv = None):
    '''Run the fegnn command and return its exit status.'''
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = buildparser()
    try:
        probe, _ = parser.parse_known_args(argv)
        if probe.config:
            _applyconfigfile(parser, argv, probe.config)
        args = parser.parse_args(argv)
    except inputerror as e:
        print(f'fegnn: error: {e}', file = sys.stderr)
        return EXIT_INPUT
    level = logging.DEBUG if args.verbose else logging.ERROR if args.quiet else logging.WARNING
    logging.basicConfig(level = level, format = '%(levelname)s %(name)s: %(message)s')
    if args.command not in ('gen',) and args.data is None and args.sbm is None:
        logger.error('one of --data or --sbm is required')
        return EXIT_INPUT
    try:
        _runcommand(args)
    except (inputerror, contracterror) as e:
        logger.error('%s', e)
        return EXIT_INPUT
    except (numericerror, OSError) as e:
        logger.error('%s', e)
        return EXIT_NUMERIC
    return 0

import json
import os
import numpy
import pytest

from fegnncore import (runconfig, trainconfig, sbmspec, massratio, explicitrank, savedataset,
                       dataset, cmdtrain, cmdablate, cmddiagnose, cmdsvdsweep, ordersweep,
                       gridsearch, cmdgen, runexperiment, buildfeatures, summarise, stripwalltime,
                       loaddataset, gensbm, inputerror)
from conftest import graphmatrices

SBM = 'n=60,blocks=3,p_in=0.3,p_out=0.02,features=informative,dim=4,signal=3.0,seed=1'


def quickconfig(**changes):
    settings = dict(max_epochs = 30, warmup_epochs = 5, patience = 10, K = 2)
    settings.update(changes.pop('train', {}))
    return runconfig(sbm = SBM, train = trainconfig(**settings), **changes)


#___Run Configuration___
def test_runconfig_needs_one_source():
    with pytest.raises(inputerror):
        runconfig()
    with pytest.raises(inputerror):
        runconfig(data = 'somewhere', sbm = SBM)

def test_runconfig_variant_names():
    assert quickconfig().variant() == 'full'
    cfg = quickconfig(without_s = True, train = {'weight_sharing': True})
    assert cfg.variant() == 'without_s+weight_sharing'

def test_runconfig_roundtrip():
    cfg = quickconfig(seeds = [0, 4], without_norm = True, train = {'rank_spec': explicitrank(7)})
    assert runconfig.fromdict(cfg.todict()) == cfg
    assert runconfig.fromdict(json.loads(json.dumps(cfg.todict()))) == cfg

def test_withswitches_clears_hidden_for_weight_sharing():
    cfg = quickconfig(train = {'factor_hidden': 8})
    shared = cfg.withswitches(('weight_sharing',))
    assert shared.train.weight_sharing and shared.train.factor_hidden is None
    assert cfg.withswitches(('without_s',)).switches() == ['without_s']


#___Pipeline___
def test_feature_widths(smallsbm):
    settings = trainconfig(K = 2, rank_spec = explicitrank(5))
    fs, z = buildfeatures(smallsbm, settings)
    assert z == 5
    assert fs.widths() == [6, 6, 6, 5]

def test_ablated_feature_spaces(smallsbm):
    settings = trainconfig(K = 3, rank_spec = explicitrank(4))
    fs, z = buildfeatures(smallsbm, settings, without_s = True)
    assert z is None and fs.structural is None and len(fs) == 4
    fs, _ = buildfeatures(smallsbm, settings, without_poly_high = True)
    assert fs.widths() == [6, 4]
    fs, _ = buildfeatures(smallsbm, settings, without_poly_zero = True)
    assert [s.order for s in fs.polynomial] == [1, 2, 3]
    with pytest.raises(inputerror):
        buildfeatures(smallsbm, settings, True, True, True)

def test_summarise():
    assert summarise([0.5]) == (0.5, 0.0)
    mean, ci95 = summarise([0.6, 0.8])
    assert mean == pytest.approx(0.7)
    assert ci95 == pytest.approx(1.96 * numpy.std([0.6, 0.8], ddof = 1) / numpy.sqrt(2))


#___Commands___
def test_single_seed_zero_epochs():
    record = cmdtrain(quickconfig(train = {'max_epochs': 0}))
    assert len(record['runs']) == 1
    assert record['runs'][0]['epochs'] == 0
    assert record['mean'] == record['test_acc'][0]
    assert record['ci95'] == 0.0
    assert record['variant'] == 'full'

def test_train_is_deterministic():
    cfg = quickconfig(seeds = [0, 1])
    assert stripwalltime(cmdtrain(cfg)) == stripwalltime(cmdtrain(cfg))

def test_workers_do_not_change_results():
    cfg = quickconfig(seeds = [0, 1, 2])
    serial = stripwalltime(runexperiment(cfg))
    parallel = stripwalltime(runexperiment(cfg.replace(workers = 2)))
    assert parallel['runs'] == serial['runs']
    assert parallel['mean'] == serial['mean']

def test_record_written_as_json_lines(tmp_path):
    out = tmp_path / 'results' / 'train.jsonl'
    record = cmdtrain(quickconfig(out = str(out), seeds = [3]))
    lines = out.read_text().splitlines()
    assert len(lines) == 1
    assert stripwalltime(json.loads(lines[0])) == stripwalltime(json.loads(json.dumps(record)))
    assert json.loads(lines[0])['config']['seeds'] == [3]

def test_curves_per_seed(tmp_path):
    curves = str(tmp_path / 'curves.csv')
    cmdtrain(quickconfig(seeds = [0, 1], curves = curves))
    for seed in (0, 1):
        lines = (tmp_path / f'curves.seed{seed}.csv').read_text().splitlines()
        assert lines[0] == 'epoch,train_loss,val_acc'
        assert len(lines) > 1

def test_precompute_matches_inline_features():
    cfg = quickconfig(seeds = [0, 1])
    inline = stripwalltime(runexperiment(cfg))
    precomputed = runexperiment(cfg.replace(precompute = True))
    assert 'precompute_wall_time_ms' in precomputed
    assert stripwalltime(precomputed)['runs'] == inline['runs']

def test_ablate_without_switches_equals_train():
    cfg = quickconfig(seeds = [0, 1])
    records = cmdablate(cfg)
    assert len(records) == 1
    assert records[0]['delta'] == 0.0
    ablated = stripwalltime(records[0])
    del ablated['delta']
    assert ablated == stripwalltime(cmdtrain(cfg))

def test_ablate_runs_each_switch():
    cfg = quickconfig(without_s = True, without_norm = True, train = {'weight_sharing': True})
    records = cmdablate(cfg)
    assert [r['variant'] for r in records] == ['full', 'without_s', 'weight_sharing', 'without_norm']
    assert all(r['seeds'] == records[0]['seeds'] for r in records)
    assert records[1]['runs'][0]['z'] is None

def test_svd_sweep_full_mass_keeps_every_component(tmp_path, tinydataset):
    savedataset(tinydataset, tmp_path / 'tiny')
    cfg = runconfig(data = str(tmp_path / 'tiny'), train = trainconfig(max_epochs = 5, K = 1))
    records = cmdsvdsweep(cfg, [1.0])
    assert records[0]['ratio'] == 1.0
    assert records[0]['runs'][0]['z'] == 3

def test_svd_sweep_rejects_zero_ratio():
    with pytest.raises(inputerror):
        cmdsvdsweep(quickconfig(), [0.0])

def test_svd_sweep_ranks_grow():
    cfg = quickconfig(train = {'rank_spec': massratio(0.5)})
    records = cmdsvdsweep(cfg, [0.3, 0.6, 0.9])
    ranks = [r['runs'][0]['z'] for r in records]
    assert ranks == sorted(ranks)

def test_order_sweep():
    records = ordersweep(quickconfig(), [0, 2])
    assert [r['K'] for r in records] == [0, 2]
    assert records[0]['config']['train']['K'] == 0
    with pytest.raises(inputerror):
        ordersweep(quickconfig(), [-1])

def test_grid_selects_by_validation():
    result = gridsearch(quickconfig(seeds = [0, 1]), [0.01, 0.1], [0.0005])
    assert len(result['grid']) == 2
    best = max(result['grid'], key = lambda cell: cell['val_mean'])
    assert result['selected']['lr'] == best['lr']
    assert result['selected_config']['train']['lr'] == best['lr']
    assert len(result['test_acc']) == 2

def test_diagnose_complete_graph(tmp_path):
    ds = gensbm(sbmspec([4], 1.0, 0.0, 'noise', 3, 1.0, 0))
    savedataset(ds, tmp_path / 'k4')
    cfg = runconfig(data = str(tmp_path / 'k4'))
    report = cmddiagnose(cfg, 2, str(tmp_path / 'diag'))
    lines = (tmp_path / 'diag' / 'coherence_profile.csv').read_text().splitlines()
    assert lines[0] == 'k,column,E'
    values = [float(line.split(',')[2]) for line in lines[1:] if line.startswith('2,')]
    assert len(values) == 3
    assert numpy.allclose(values, 1.0, atol = 1e-12)
    assert report['statistics']['edges'] == 6
    assert set(report['column_norm_std']) == {'monomial', 'chebyshev', 'bernstein'}
    assert os.path.exists(tmp_path / 'diag' / 'diagnostics.jsonl')

def test_diagnose_empty_graph_has_header_only(tmp_path):
    ds = gensbm(sbmspec([5], 0.0, 0.0, 'noise', 2, 1.0, 0))
    savedataset(ds, tmp_path / 'empty')
    cmddiagnose(runconfig(data = str(tmp_path / 'empty')), 3, str(tmp_path / 'diag'))
    lines = (tmp_path / 'diag' / 'coherence_profile.csv').read_text().splitlines()
    assert lines == ['k,column,E']

def test_gen_writes_loadable_dataset(tmp_path):
    statistics = cmdgen('blocks=10/10,p_in=0.5,p_out=0.05,features=informative,dim=3,seed=4',
                        tmp_path / 'gen')
    ds = loaddataset(tmp_path / 'gen')
    assert ds.n == 20 and ds.d == 3 and ds.c == 2
    assert statistics['edges'] == len(ds.edges)


#___Accuracy on Easy Graphs___
def test_train_on_separable_data_over_ten_seeds():
    spec = sbmspec([40] * 3, 0.3, 0.01, 'informative', 8, 12.0, 5)
    settings = trainconfig(lr = 0.05, max_epochs = 300, warmup_epochs = 20, patience = 100,
                           K = 2, rank_spec = explicitrank(6))
    record = cmdtrain(runconfig(sbm = spec, train = settings, seeds = range(10)))
    assert len(record['test_acc']) == 10
    assert record['mean'] >= 0.99
    assert record['ci95'] >= 0.0

def test_svd_sweep_on_disjoint_cliques():
    #the spectrum is four unit values and zeros, so 0.5 keeps two components and 0.94 all four
    spec = sbmspec([25] * 4, 1.0, 0.0, 'noise', 2, 1.0, 3)
    settings = trainconfig(lr = 0.05, max_epochs = 300, warmup_epochs = 50, patience = 100,
                           K = 1, rank_spec = massratio(0.5))
    records = cmdsvdsweep(runconfig(sbm = spec, train = settings, seeds = range(5)), [0.5, 0.94])
    assert [r['runs'][0]['z'] for r in records] == [2, 4]
    assert records[1]['mean'] >= records[0]['mean'] - 0.02

def test_diagnose_rows_count_nonzero_columns(tmp_path):
    base = gensbm(sbmspec([20, 20], 0.3, 0.05, 'noise', 2, 1.0, 7))
    A, _, Lhat = graphmatrices(base.edges)
    degrees = numpy.asarray(A.matrix.sum(axis = 1)).ravel()
    #Lhat annihilates sqrt(deg + 1)
    X = numpy.column_stack([numpy.sqrt(degrees + 1.0), numpy.zeros(base.n), base.X])
    savedataset(dataset(X, base.y, base.edges), tmp_path / 'graph')
    report = cmddiagnose(runconfig(data = str(tmp_path / 'graph')), 4, str(tmp_path / 'diag'))
    dense = Lhat.todense()
    expected = sum(int(numpy.sum(numpy.linalg.norm(numpy.linalg.matrix_power(dense, k) @ X,
                                                   axis = 0) > 1e-12))
                   for k in range(1, 5))
    lines = (tmp_path / 'diag' / 'coherence_profile.csv').read_text().splitlines()
    assert expected == 8
    assert len(lines) - 1 == expected
    assert report['profile_rows'] == expected
    assert {line.split(',')[1] for line in lines[1:]} == {'2', '3'}

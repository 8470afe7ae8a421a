import math
import os
import numpy
import pytest
from numpy.testing import assert_array_equal

from fegnncore import (dataset, edgelist, loaddataset, savedataset, randomsplit, gensbm,
                       sbmspec, homophilyratio, featuresubspace, featurespace, trainconfig,
                       train, inputerror)


def writefiles(path, edges, features, labels, sparse = False):
    os.makedirs(path, exist_ok = True)
    with open(os.path.join(path, 'edges.txt'), 'w') as file:
        file.write(edges)
    name = 'features.coo' if sparse else 'features.csv'
    with open(os.path.join(path, name), 'w') as file:
        file.write(features)
    with open(os.path.join(path, 'labels.txt'), 'w') as file:
        file.write(labels)
    return path


#___Loading and Saving___
def test_roundtrip(tmp_path, tinydataset):
    savedataset(tinydataset, tmp_path / 'tiny')
    loaded = loaddataset(tmp_path / 'tiny')
    assert loaded == tinydataset
    assert_array_equal(loaded.X, tinydataset.X)

def test_roundtrip_without_edges(tmp_path):
    ds = dataset(numpy.array([[0.1], [-0.2], [0.3]]), numpy.array([1, 0, 1]), edgelist([], 3))
    savedataset(ds, tmp_path / 'empty')
    assert loaddataset(tmp_path / 'empty') == ds

def test_weighted_edges_are_not_saved(tmp_path):
    edges = edgelist([(0, 1), (1, 2)], 3, weights = [1.0, 0.5])
    ds = dataset(numpy.ones((3, 1)), numpy.array([0, 1, 0]), edges)
    with pytest.raises(inputerror, match = 'unweighted'):
        savedataset(ds, tmp_path / 'weighted')
    assert not (tmp_path / 'weighted').exists()

def test_roundtrip_large_sbm(tmp_path):
    ds = gensbm(sbmspec([250, 250, 250, 250], 0.02, 0.002, 'informative', 4, 2.0, 1))
    savedataset(ds, tmp_path / 'sbm')
    assert loaddataset(tmp_path / 'sbm') == ds

def test_comments_and_duplicates(tmp_path):
    path = writefiles(str(tmp_path / 'dup'), '# header\n0 1\n1 0\n1 1\n', '1,2\n3,4\n', '0\n1\n')
    ds = loaddataset(path)
    assert_array_equal(ds.edges.pairs, [[0, 1]])
    assert ds.n == 2 and ds.d == 2 and ds.c == 2

def test_label_out_of_range_names_line(tmp_path):
    path = writefiles(str(tmp_path / 'bad'), '0 1\n', '1\n2\n3\n', '0\n1\n5\n')
    with pytest.raises(inputerror, match = r'labels\.txt:3'):
        loaddataset(path)

def test_endpoint_out_of_range_names_line(tmp_path):
    path = writefiles(str(tmp_path / 'bad'), '0 1\n1 7\n', '1\n2\n', '0\n1\n')
    with pytest.raises(inputerror, match = r'edges\.txt:2'):
        loaddataset(path)

def test_ragged_features_name_line(tmp_path):
    path = writefiles(str(tmp_path / 'bad'), '0 1\n', '1,2\n3\n', '0\n1\n')
    with pytest.raises(inputerror, match = r'features\.csv:2'):
        loaddataset(path)

def test_missing_file(tmp_path):
    path = writefiles(str(tmp_path / 'bad'), '0 1\n', '1,2\n3,4\n', '0\n1\n')
    os.remove(os.path.join(path, 'edges.txt'))
    with pytest.raises(inputerror, match = 'not found'):
        loaddataset(path)

def test_sparse_features(tmp_path):
    path = writefiles(str(tmp_path / 'coo'), '0 1\n', '3 2\n0 1 2.5\n2 0 -1\n', '0\n1\n0\n',
                      sparse = True)
    assert_array_equal(loaddataset(path).X, [[0, 2.5], [0, 0], [-1, 0]])


#___Splits___
def test_split_sizes():
    assert randomsplit(10, seed = 0).sizes() == (6, 2, 2)

@pytest.mark.parametrize('n', [3, 7, 10, 101])
@pytest.mark.parametrize('seed', range(4))
def test_split_disjoint_and_covering(n, seed):
    split = randomsplit(n, seed = seed)
    total = split.train.astype(int) + split.val.astype(int) + split.test.astype(int)
    assert_array_equal(total, numpy.ones(n))
    assert split.sizes()[0] == math.floor(0.6 * n)

def test_split_is_seeded():
    assert randomsplit(50, seed = 3) == randomsplit(50, seed = 3)
    assert randomsplit(50, seed = 3) != randomsplit(50, seed = 4)

def test_split_needs_three_nodes():
    with pytest.raises(inputerror):
        randomsplit(2)

def test_split_fractions_must_sum_to_one():
    with pytest.raises(inputerror):
        randomsplit(10, (0.5, 0.2, 0.2))


#___Stochastic Block Models___
def test_sbm_disjoint_triangles():
    ds = gensbm(sbmspec([3, 3], 1.0, 0.0))
    assert len(ds.edges) == 6
    assert homophilyratio(ds.edges, ds.y) == 1.0

def test_sbm_complete_bipartite():
    ds = gensbm(sbmspec([3, 3], 0.0, 1.0))
    assert len(ds.edges) == 9
    assert homophilyratio(ds.edges, ds.y) == 0.0

def test_sbm_edge_count_near_expectation():
    spec = sbmspec([100] * 4, 0.1, 0.01, seed = 5)
    ds = gensbm(spec)
    within = 4 * 100 * 99 / 2
    between = 6 * 100 * 100
    mean = within * 0.1 + between * 0.01
    std = math.sqrt(within * 0.1 * 0.9 + between * 0.01 * 0.99)
    assert abs(len(ds.edges) - mean) <= 4 * std

def test_sbm_is_seeded():
    spec = sbmspec([20, 20], 0.2, 0.05, 'informative', 3, 2.0, 9)
    assert gensbm(spec) == gensbm(spec)

def test_sbm_spec_parsing():
    spec = sbmspec.fromstring('n=400,blocks=4,p_in=0.01,p_out=0.08,features=noise,dim=8,seed=2')
    assert spec.sizes == [100] * 4
    assert (spec.p_in, spec.p_out, spec.dim, spec.seed) == (0.01, 0.08, 8, 2)
    assert sbmspec.fromstring(spec.tostring()) == spec
    assert sbmspec.fromstring('blocks=3/4/5').sizes == [3, 4, 5]

@pytest.mark.parametrize('text', ['n=10,blocks=3/3', 'p_in=2', 'colour=red', 'blocks'])
def test_sbm_spec_errors(text):
    with pytest.raises(inputerror):
        sbmspec.fromstring(text)

def _featureonlyaccuracy(ds):
    fs = featurespace([featuresubspace(ds.X, order = 0)])
    everyone = type('masks', (), {'train': numpy.ones(ds.n, dtype = bool),
                                  'val': numpy.zeros(ds.n, dtype = bool),
                                  'test': numpy.zeros(ds.n, dtype = bool)})()
    cfg = trainconfig(lr = 0.05, weight_decay = 0.0, max_epochs = 300, warmup_epochs = 300)
    _, report = train(fs, ds.y, everyone, cfg)
    return report.history[-1][2]

def test_informative_features_separate_classes():
    ds = gensbm(sbmspec([100] * 4, 0.05, 0.01, 'informative', 8, 6.0, 0))
    assert _featureonlyaccuracy(ds) >= 0.95

def test_noise_features_are_near_chance():
    accuracies = []
    for seed in range(5):
        ds = gensbm(sbmspec([100] * 4, 0.05, 0.01, 'noise', 8, 1.0, seed))
        split = randomsplit(ds.n, seed = seed)
        fs = featurespace([featuresubspace(ds.X, order = 0)])
        _, report = train(fs, ds.y, split, trainconfig(lr = 0.05, max_epochs = 300))
        accuracies.append(report.test_acc)
    assert numpy.mean(accuracies) <= 0.25 + 0.10

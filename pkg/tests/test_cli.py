import csv
import os
import sys

import pytest

from Attractr import attractr
from Attractr import attractrfunctions as fxn
from Attractr import corpus as cp
from Attractr import model as md
from conftest import tagged

tiny = ['generator.n_train=40', 'generator.n_val=10', 'generator.n_test=20', 'model.d=4', 'train.epochs=1',
        'train.batch_size=16']


def run_cli(command, out_dir, overrides=(), seed='', checkpoints=None, config=''):
    input_args = {'command': command, 'config': config, 'seed': seed, 'out': str(out_dir),
                  'override': list(tiny) + list(overrides), 'suppress_warnings': False}
    if checkpoints is not None:
        input_args['checkpoints'] = checkpoints
    return attractr.run(input_args)


def read_rows(path):
    with open(path, newline='') as in_file:
        return list(csv.reader(in_file))


@pytest.fixture(scope='module')
def trained(tmp_path_factory):
    out_dir = tmp_path_factory.mktemp('run')
    run_cli('gen', out_dir)
    run_cli('train', out_dir, seed='1,2')
    return out_dir


class TestConfig:

    def test_unknown_key(self):
        with pytest.raises(fxn.ConfigError) as err:
            attractr.check_config({'train': {'epoch': 3}})
        assert 'train.epoch' in str(err.value)

    @pytest.mark.parametrize('config', [{'train': {'epochs': 'ten'}}, {'train': {'shuffle': 1}},
                                        {'model': {'d': 2.5}}, {'schema_version': 2}, {'train': 5}])
    def test_wrong_types(self, config):
        with pytest.raises(fxn.ConfigError):
            attractr.check_config(config)

    def test_override_values(self):
        assert attractr.parse_override('train.r=100') == {'train': {'r': 100}}
        assert attractr.parse_override('eval.label=joint-r1') == {'eval': {'label': 'joint-r1'}}
        with pytest.raises(fxn.ConfigError):
            attractr.parse_override('train.r')

    def test_load_layers(self, tmp_path):
        config = attractr.load_config({'config': fxn.example_config_file, 'override': ['train.epochs=2'],
                                       'seed': '4,5', 'out': str(tmp_path)})
        assert config['train']['epochs'] == 2
        assert config['train']['regime'] == 'pretrain'
        assert config['seeds'] == [4, 5]
        assert config['out_dir'] == str(tmp_path)

    def test_duplicate_seeds(self):
        with pytest.raises(fxn.ConfigError):
            attractr.load_config({'seed': '1,1'})

    def test_missing_config_file(self, tmp_path):
        with pytest.raises(fxn.ConfigError):
            attractr.load_config({'config': str(tmp_path / 'nope.json')})


class TestGen:

    def test_reproducible(self, tmp_path):
        run_cli('gen', tmp_path / 'a')
        run_cli('gen', tmp_path / 'b')
        for split in ['train.jsonl', 'val.jsonl', 'test.jsonl', 'stats.json']:
            with open(tmp_path / 'a' / 'data' / split, 'rb') as a, open(tmp_path / 'b' / 'data' / split, 'rb') as b:
                assert a.read() == b.read()

    def test_seed_changes_corpus(self, tmp_path):
        run_cli('gen', tmp_path / 'a', seed='1')
        run_cli('gen', tmp_path / 'b', seed='2')
        assert (tmp_path / 'a' / 'data' / 'train.jsonl').read_text() != \
               (tmp_path / 'b' / 'data' / 'train.jsonl').read_text()

    def test_empty_split(self, tmp_path):
        paths = run_cli('gen', tmp_path, ['generator.n_val=0'])
        assert os.path.getsize(paths['val']) == 0
        assert len(cp.read_jsonl(paths['train'])) == 40


class TestTrain:

    def test_outputs(self, trained):
        assert os.path.isfile(trained / 'vocab.json')
        for seed in [1, 2]:
            rows = read_rows(trained / ('seed-' + str(seed)) / 'metrics.csv')
            assert rows[0] == attractr.metrics_header
            assert len(rows) == 2 and rows[1][1] == 'agreement' and rows[1][4] == 'NA'
            params, cfg = md.load_checkpoint(str(trained / ('seed-' + str(seed)) / 'model.json'))
            assert cfg.heads == ('agreement',) and cfg.d == 4

    def test_joint(self, tmp_path):
        run_cli('gen', tmp_path)
        paths = run_cli('train', tmp_path, ['train.regime="joint"', 'train.task2="lm"', 'train.r=1'], seed='3')
        params, cfg = md.load_checkpoint(paths[0])
        assert cfg.heads == ('agreement', 'lm')
        tasks = [x[1] for x in read_rows(tmp_path / 'seed-3' / 'metrics.csv')[1:]]
        assert tasks == ['agreement', 'lm', 'joint']

    def test_pretrain_supertag(self, tmp_path):
        run_cli('gen', tmp_path)
        run_cli('train', tmp_path, ['train.regime=pretrain', 'train.task2=supertag', 'train.min_tag_count=1'],
                seed='1')
        assert os.path.isfile(tmp_path / 'inventory.json')
        pretrained, cfg_a = md.load_checkpoint(str(tmp_path / 'seed-1' / 'pretrained.json'))
        final, cfg_b = md.load_checkpoint(str(tmp_path / 'seed-1' / 'model.json'))
        assert cfg_a.heads == ('supertag',) and cfg_b.heads == ('agreement',)
        assert cfg_a.n_supertags == len(cp.load_inventory(str(tmp_path / 'inventory.json')))

    def test_missing_corpus(self, tmp_path):
        with pytest.raises(fxn.DataError):
            run_cli('train', tmp_path)

    def test_intervening_only_filters_every_task(self, synthetic, vocab):
        sentences = synthetic + [tagged('The/DT dogs/NNS bark/VBP ./.', 1, 2, 'PL')]
        kept = cp.filter_intervening_noun(sentences)
        assert 0 < len(kept) < len(sentences)
        config = attractr.load_config({'override': ['train.intervening_only=true']})
        inventory = cp.prune_supertags(sentences, min_count=1)
        for task in ['agreement', 'supertag', 'lm']:
            assert len(attractr.task_instances(task, sentences, vocab, inventory, config, None)) == len(kept), task
        config = attractr.load_config({})
        assert len(attractr.task_instances('lm', sentences, vocab, inventory, config, None)) == len(sentences)


class TestDeterminism:

    def test_rerun_is_byte_identical(self, tmp_path):
        overrides = ['train.regime="joint"', 'train.task2="lm"', 'train.r=1']
        for run in ['a', 'b']:
            run_cli('gen', tmp_path / run, overrides)
            run_cli('train', tmp_path / run, overrides, seed='1,2')
            run_cli('eval', tmp_path / run, overrides, seed='1,2', checkpoints=[])

        compared = []
        for root, dirs, files in os.walk(tmp_path / 'a'):
            for name in files:
                relative = os.path.relpath(os.path.join(root, name), tmp_path / 'a')
                with open(tmp_path / 'a' / relative, 'rb') as a, open(tmp_path / 'b' / relative, 'rb') as b:
                    assert a.read() == b.read(), relative
                compared.append(relative)
        for expected in ['seed-1/model.json', 'seed-2/metrics.csv', 'eval/joint/report.json',
                         'eval/joint/report.csv', 'eval/attractors.csv', 'eval/probes.csv']:
            assert os.path.normpath(expected) in compared


class TestEval:

    def test_reports_and_plots(self, trained):
        reports = run_cli('eval', trained, seed='1,2', checkpoints=[])
        report = reports['single']
        assert 0.0 <= report.overall_accuracy <= 1.0
        assert report.runs['summary']['overall_accuracy']['n'] == 2
        assert set(report.per_condition) == {'prepositional', 'relative', 'embedded_verb', 'main_clause_verb'}
        eval_dir = trained / 'eval'
        for name in ['single/report.json', 'single/report.csv', 'templates-prepositional.svg',
                     'templates-prepositional.csv', 'attractors.svg', 'attractors.csv']:
            assert os.path.isfile(eval_dir / name), name
        svg = (eval_dir / 'templates-prepositional.svg').read_text()
        mean = report.per_condition['prepositional']['SS']['mean']
        assert repr(float(mean)) in svg

    def test_explicit_checkpoint_label(self, trained):
        checkpoint = str(trained / 'seed-1' / 'model.json')
        reports = run_cli('eval', trained, ['eval.label="seed one"', 'eval.templates=[]'], checkpoints=[checkpoint])
        assert list(reports) == ['seed one']
        assert os.path.isfile(trained / 'eval' / 'seed_one' / 'report.json')

    def test_vocabulary_mismatch(self, trained, tmp_path):
        params, cfg = md.load_checkpoint(str(trained / 'seed-1' / 'model.json'))
        other = str(tmp_path / 'other.json')
        md.save_checkpoint(params, md.ModelConfig(cfg.d, cfg.vocab_size, heads=cfg.heads, vocab_hash='0' * 64), other)
        with pytest.raises(fxn.CompatibilityError):
            run_cli('eval', trained, checkpoints=[other])

    def test_nothing_to_evaluate(self, tmp_path):
        with pytest.raises(fxn.ConfigError):
            run_cli('eval', tmp_path, checkpoints=[])


class TestTrace:

    def test_frame_outputs(self, trained):
        written = run_cli('trace', trained, ['trace.frames=["P01"]', 'trace.units=[0, 3]'], seed='1',
                          checkpoints=[])
        assert len(written) == 2
        rows = read_rows(trained / 'trace' / 'prepositional-P01.csv')
        assert rows[0] == ['frame', 'condition', 'position', 'token', 'p_plural', 'truth']
        assert len(rows) == 1 + 4 * 8
        ps = [x for x in rows[1:] if x[1] == 'PS']
        assert [x[3] for x in ps] == 'the demo tapes from the popular rock singer'.split()
        assert all(x[5] == '1' for x in ps)

    def test_free_sentence(self, trained):
        run_cli('trace', trained, ['trace.frames=["P01"]', 'trace.units=[]',
                                   'trace.sentences=["the/DT keys/NNS to/TO the/DT cabinet/NN"]'],
                seed='1', checkpoints=[])
        rows = read_rows(trained / 'trace' / 'sentence-1.csv')
        assert [x[3] for x in rows[1:]] == ['the', 'keys', 'to', 'the', 'cabinet']

    def test_unit_out_of_range(self, trained):
        with pytest.raises(fxn.ConfigError):
            run_cli('trace', trained, ['trace.units=[4]'], seed='1', checkpoints=[])

    def test_unknown_frame(self, trained):
        with pytest.raises(fxn.ConfigError):
            run_cli('trace', trained, ['trace.frames=["Z99"]'], seed='1', checkpoints=[])


class TestExitCodes:

    @pytest.mark.parametrize('err, code', [(fxn.ConfigError('x'), 2), (fxn.NumericError('x'), 4),
                                           (fxn.DataError('x'), 3), (fxn.TemplateError('x'), 3),
                                           (fxn.CheckpointVersionError('x'), 3), (fxn.ShapeError('x'), 3),
                                           (KeyError('x'), 1)])
    def test_mapping(self, err, code):
        assert fxn.exit_code(err) == code

    def test_main_exits_with_code(self, tmp_path, monkeypatch):
        monkeypatch.setattr(sys, 'argv', ['attractr', 'train', '-o', str(tmp_path)])
        with pytest.raises(SystemExit) as err:
            attractr.main()
        assert err.value.code == 3

    def test_bad_config_exit(self, tmp_path, monkeypatch):
        monkeypatch.setattr(sys, 'argv', ['attractr', 'gen', '-o', str(tmp_path), '-x', 'train.bogus=1'])
        with pytest.raises(SystemExit) as err:
            attractr.main()
        assert err.value.code == 2

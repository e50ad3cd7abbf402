import dataclasses

import numpy as np
import pytest

from Attractr import corpus as cp
from Attractr import evaluate as ev
from Attractr import model as md
from Attractr import numeric as nm
from Attractr import training as tr


@pytest.fixture(scope='module')
def corpus():
    grammar_cfg = cp.load_grammar()
    train = cp.generate_synthetic(grammar_cfg, 3000, nm.make_rng(0, 'generator', 'train'))
    test = cp.generate_synthetic(grammar_cfg, 500, nm.make_rng(0, 'generator', 'test'))
    vocab = cp.build_vocab(train, ('min_count', 1))
    return train, test, vocab


@pytest.mark.slow
def test_agreement_beats_baselines(corpus):
    train, test, vocab = corpus
    model_cfg = md.ModelConfig(d=20, vocab_size=len(vocab), vocab_hash=vocab.hash())
    cfg = tr.TrainConfig(epochs=8, batch_size=32, learning_rate=0.05, seed=1)
    params, metrics = tr.train_single('agreement', cp.extract_all(train, vocab), cfg, model_cfg, verbose=False)
    assert metrics[-1]['train_loss'] < metrics[0]['train_loss']

    test_instances = cp.extract_all(test, vocab)
    result = ev.eval_agreement(params, model_cfg, test_instances)
    majority = ev.baseline_majority_accuracy(ev.baseline_majority(cp.extract_all(train, vocab)), test_instances)
    last_noun = ev.baseline_last_noun_accuracy(test)[0]
    assert result['overall_accuracy'] > max(majority, last_noun)
    assert result['accuracy_by_attractor']['0']['accuracy'] > 0.9


@pytest.mark.slow
def test_joint_language_model_matches_single_at_zero_weight(corpus):
    train, test, vocab = corpus
    model_cfg = md.ModelConfig(d=10, vocab_size=len(vocab), heads=('agreement', 'lm'))
    agreement = cp.extract_all(train[:500], vocab)
    lm = tr.make_lm_instances([cp.replace_rare(x, vocab) for x in train[:500]], vocab.eos_id)
    cfg = tr.TrainConfig(epochs=2, batch_size=50, seed=3)
    single, _ = tr.train_single('agreement', agreement, cfg, model_cfg, verbose=False)
    joint, _ = tr.train_joint('agreement', 'lm', agreement, lm,
                              dataclasses.replace(cfg, regime='joint', task2='lm', r=0.0), model_cfg, verbose=False)
    for name in md.encoder_tensors + md.head_tensors['agreement']:
        assert (single[name] == joint[name]).all(), name


@pytest.fixture(scope='module')
def replication_corpus():
    grammar_cfg = cp.load_grammar()
    train = cp.generate_synthetic(grammar_cfg, 20000, nm.make_rng(0, 'replication', 'train'))
    test = cp.generate_synthetic(grammar_cfg, 4000, nm.make_rng(0, 'replication', 'test'))
    vocab = cp.build_vocab(train, ('min_count', 1))
    return grammar_cfg, train, test, vocab


def attractor_accuracies(params, model_cfg, instances):
    """
    :return: (accuracy with 2 or more attractors, accuracy with none, accuracy with exactly 3)
    """
    two_plus = [x for x in instances if x.attractor_count != cp.MIXED and x.attractor_count >= 2]
    by_bucket = ev.eval_agreement(params, model_cfg, instances)['accuracy_by_attractor']
    return (ev.eval_agreement(params, model_cfg, two_plus)['overall_accuracy'],
            by_bucket['0']['accuracy'], by_bucket['3']['accuracy'])


@pytest.mark.slow
def test_supertag_pretraining_helps_most_with_attractors(replication_corpus):
    _, train, test, vocab = replication_corpus
    inventory = cp.prune_supertags(train)
    tagging = ev.tagging_instances(train, vocab, inventory)
    # Small agreement set, full supertag set
    agreement = tr.take_fraction(cp.extract_all(train, vocab), 0.1, 0, 'agreement')
    test_instances = cp.extract_all(test, vocab)
    cfg_a = md.ModelConfig(d=30, vocab_size=len(vocab), n_supertags=len(inventory), heads=('supertag',))
    cfg_b = md.ModelConfig(d=30, vocab_size=len(vocab), heads=('agreement',))

    single, pretrained = [], []
    for seed in [1, 2, 3]:
        cfg = tr.TrainConfig(epochs=10, batch_size=32, seed=seed)
        params, _ = tr.train_single('agreement', agreement, cfg, cfg_b, verbose=False)
        single.append(attractor_accuracies(params, cfg_b, test_instances))

        cfg = tr.TrainConfig(task='supertag', task2='agreement', regime='pretrain', epochs=3, epochs_b=10,
                             batch_size=32, seed=seed)
        params, _, _ = tr.pretrain_then_train('supertag', 'agreement', tagging, agreement, cfg, cfg_a, cfg_b,
                                              verbose=False)
        pretrained.append(attractor_accuracies(params, cfg_b, test_instances))

    single, pretrained = np.mean(single, axis=0), np.mean(pretrained, axis=0)
    assert pretrained[0] > single[0]
    assert single[1] - single[2] > pretrained[1] - pretrained[2]


@pytest.mark.slow
def test_joint_lexical_agreement_matches_agreement_head(replication_corpus):
    grammar_cfg, train, test, vocab = replication_corpus
    train = train[:6000]
    lm = tr.make_lm_instances([cp.replace_rare(x, vocab) for x in train], vocab.eos_id)
    agreement = cp.extract_all(train, vocab)
    single_cfg = md.ModelConfig(d=30, vocab_size=len(vocab), heads=('lm',))
    joint_cfg = md.ModelConfig(d=30, vocab_size=len(vocab), heads=('agreement', 'lm'))

    single_lexical, joint_lexical, joint_head = [], [], []
    for seed in [1, 2, 3]:
        cfg = tr.TrainConfig(task='lm', epochs=4, batch_size=32, seed=seed)
        params, _ = tr.train_single('lm', lm, cfg, single_cfg, verbose=False)
        single_lexical.append(ev.eval_lm_probes(params, single_cfg, test[:1000], vocab,
                                                grammar_cfg)['probe_accuracy_lexical'])

        cfg = dataclasses.replace(cfg, task2='agreement', regime='joint', r=100.0)
        params, _ = tr.train_joint('lm', 'agreement', lm, agreement, cfg, joint_cfg, verbose=False)
        result = ev.eval_lm_probes(params, joint_cfg, test[:1000], vocab, grammar_cfg)
        joint_lexical.append(result['probe_accuracy_lexical'])
        joint_head.append(result['agreement_accuracy_same_preambles'])

    assert abs(np.mean(joint_lexical) - np.mean(joint_head)) < 0.05
    assert np.mean(joint_lexical) > np.mean(single_lexical)

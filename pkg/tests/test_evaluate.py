import dataclasses
import json

import numpy as np
import pytest

from Attractr import attractrfunctions as fxn
from Attractr import corpus as cp
from Attractr import evaluate as ev
from Attractr import model as md
from Attractr import numeric as nm
from Attractr import training as tr
from conftest import tagged


@pytest.fixture
def flat_model(vocab):
    """
    Agreement head always 0.5 (so PL), language model uniform over the vocabulary
    """
    cfg = md.ModelConfig(d=6, vocab_size=len(vocab), heads=('agreement', 'lm'), vocab_hash=vocab.hash())
    params = md.init_params(cfg, 1)
    for name in ['agr_w', 'agr_b', 'lm_W', 'lm_b']:
        params[name][:] = 0.0
    return params, cfg


@pytest.fixture(scope='module')
def bock():
    return ev.load_templates(which='bock')


class TestBaselines:

    def test_last_noun_is_fooled_by_attractor(self, number_of_men):
        assert ev.baseline_last_noun(number_of_men) == 'PL'
        assert ev.baseline_last_noun_accuracy([number_of_men]) == (0.0, 1, 0)

    def test_last_noun_abstains(self):
        sentence = tagged('They/PRP run/VBP', 0, 1, 'PL')
        with pytest.warns(UserWarning):
            assert ev.baseline_last_noun_accuracy([sentence]) == (None, 0, 1)

    def test_majority(self):
        assert ev.baseline_majority(['SG', 'PL', 'PL']) == 'PL'
        assert ev.baseline_majority(['SG', 'PL']) == 'SG'
        with pytest.raises(fxn.DataError):
            ev.baseline_majority([])

    def test_baselines_match_rescan(self, grammar):
        sentences = cp.generate_synthetic(dict(grammar, mixed_rate=0.2), 10000, nm.make_rng(12, 'baselines'))
        correct = 0
        for sentence in sentences:
            nouns = [x for x in sentence.pos[:sentence.verb_index] if x in ['NN', 'NNS', 'NNP', 'NNPS']]
            guess = 'PL' if nouns[-1] in ['NNS', 'NNPS'] else 'SG'
            assert ev.baseline_last_noun(sentence) == guess
            correct += guess == sentence.verb_number
        assert ev.baseline_last_noun_accuracy(sentences) == (correct / 10000, 10000, 0)

        instances = cp.extract_all(sentences, cp.build_vocab(sentences, ('min_count', 1)))
        n_plural = sum(x.verb_number == 'PL' for x in sentences)
        majority = 'PL' if n_plural > 10000 - n_plural else 'SG'
        assert ev.baseline_majority(instances) == majority
        assert ev.baseline_majority_accuracy(majority, instances) == max(n_plural, 10000 - n_plural) / 10000

    def test_majority_accuracy(self, synthetic, vocab):
        instances = cp.extract_all(synthetic, vocab)
        label = ev.baseline_majority(instances)
        share = sum(x.label == label for x in instances) / len(instances)
        assert ev.baseline_majority_accuracy(label, instances) == pytest.approx(share)
        assert share >= 0.5

    def test_supertag_majority(self):
        train = [tagged('the/DT run/NN', supertags=['D', 'N']), tagged('the/DT run/VB', supertags=['D', 'V']),
                 tagged('run/VB', supertags=['V']), tagged('run/VB', supertags=['V'])]
        inventory = cp.prune_supertags(train, min_count=1)
        test = [tagged('the/DT run/VB fast/RB', supertags=['D', 'V', 'V'])]
        # 'run' -> V (3 vs 1), unseen 'fast' -> most common overall (V, 3 times)
        assert ev.baseline_supertag_majority(train, test, inventory) == 1.0

    def test_supertag_majority_ties_take_lowest_id(self):
        train = [tagged('the/DT run/VB', supertags=['D', 'V'])]
        inventory = cp.prune_supertags(train, min_count=1)
        assert inventory.encode(['D', 'V']) == [1, 2]
        # unseen 'fast': D and V both seen once, D has the lower id
        test = [tagged('fast/RB', supertags=['V']), tagged('fast/RB', supertags=['D'])]
        assert ev.baseline_supertag_majority(train, test, inventory) == 0.5


class TestBuckets:

    @pytest.mark.parametrize('count, bucket', [(0, '0'), (3, '3'), (4, '4+'), (7, '4+'), (cp.MIXED, cp.MIXED)])
    def test_bucket_of(self, count, bucket):
        assert ev.bucket_of(count) == bucket

    def test_threshold(self):
        assert list(ev.predict_number([0.5, 0.4999, 0.9])) == ['PL', 'SG', 'PL']


class TestModelEvaluation:

    def test_agreement_breakdown(self, flat_model, synthetic, vocab):
        params, cfg = flat_model
        instances = cp.extract_all(synthetic, vocab)
        result = ev.eval_agreement(params, cfg, instances)
        n_plural = sum(x.label == 'PL' for x in instances)
        assert result['overall_accuracy'] == pytest.approx(n_plural / len(instances))
        by_bucket = result['accuracy_by_attractor']
        assert list(by_bucket) == ev.attractor_buckets
        assert sum(x['n'] for x in by_bucket.values()) + result['mixed_bucket_n'] == len(instances)

    def test_uniform_language_model(self, flat_model, synthetic, vocab):
        params, cfg = flat_model
        assert ev.eval_perplexity(params, cfg, synthetic[:10], vocab) == pytest.approx(len(vocab))

    def test_perplexity_matches_brute_force_product(self, vocab):
        cfg = md.ModelConfig(d=5, vocab_size=len(vocab), heads=('lm',))
        params = md.init_params(cfg, 6)
        sentences = [tagged('the/DT dogs/NNS bark/VBP'), tagged('a/DT cat/NN sleeps/VBZ ./.'), tagged('men/NNS')]
        product, n_tokens = 1.0, 0
        for sentence in sentences:
            ids = cp.replace_rare(sentence, vocab)
            targets = ids[1:] + [vocab.eos_id]
            for t in range(len(ids)):
                h = md.encode(params, cfg, ids[:t + 1]).h[0, -1]
                product *= md.head_softmax(params, h, 'lm')[targets[t]]
                n_tokens += 1
        perplexity = ev.eval_perplexity(params, cfg, sentences, vocab)
        assert perplexity == pytest.approx(product ** (-1.0 / n_tokens), rel=1e-9)

        instances = tr.make_lm_instances([cp.replace_rare(x, vocab) for x in sentences], vocab.eos_id)
        loss, _ = tr.loss_lm(params, cfg, tr.make_batches(instances, 3, vocab.pad_id, shuffle=False, task='lm')[0])
        assert perplexity == pytest.approx(2 ** tr.lm_loss_bits(loss), rel=1e-9)

    def test_supertag_inventory_mismatch(self, synthetic, vocab):
        inventory = cp.prune_supertags(synthetic, min_count=1)
        cfg = md.ModelConfig(d=4, vocab_size=len(vocab), n_supertags=len(inventory) + 1, heads=('supertag',))
        with pytest.raises(fxn.ConfigError):
            ev.eval_supertag(md.init_params(cfg, 1), cfg, synthetic, vocab, inventory)

    def test_supertag_accuracy_and_baseline(self, synthetic, vocab):
        inventory = cp.prune_supertags(synthetic, min_count=1)
        cfg = md.ModelConfig(d=4, vocab_size=len(vocab), n_supertags=len(inventory), heads=('supertag',))
        result = ev.eval_supertag(md.init_params(cfg, 1), cfg, synthetic[:10], vocab, inventory, synthetic)
        assert 0.0 <= result['supertag_accuracy'] <= 1.0
        assert result['n_tokens'] == sum(len(x.tokens) for x in synthetic[:10])
        assert result['supertag_majority_baseline'] > 0.8


class TestGrammaticality:

    def test_equal_scores_count_as_correct(self, flat_model, vocab):
        params, cfg = flat_model
        pair = ev.VerbPair('is', 'are')
        preamble = [vocab.word2id['the']]
        assert ev.probe_lexical(params, cfg, preamble, pair, 'SG', vocab) == pytest.approx(0.5)
        assert ev.probe_pos(params, cfg, preamble, 'PL', vocab) == pytest.approx(0.5)

    def test_probabilities_are_complementary(self, vocab):
        cfg = md.ModelConfig(d=6, vocab_size=len(vocab), heads=('lm',))
        params = md.init_params(cfg, 4)
        params['lm_b'][:] = np.linspace(-1, 1, len(vocab))
        pair = ev.VerbPair('is', 'are')
        preamble = [vocab.word2id['the']]
        sg = ev.probe_lexical(params, cfg, preamble, pair, 'SG', vocab)
        pl = ev.probe_lexical(params, cfg, preamble, pair, 'PL', vocab)
        assert sg + pl == pytest.approx(1.0)
        assert sg != pytest.approx(0.5)

    def test_undefined_pair(self, flat_model, vocab):
        params, cfg = flat_model
        with pytest.raises(fxn.UndefinedProbeError):
            ev.probe_lexical(params, cfg, [2], ev.VerbPair('blorks', 'blorks', 'VBZ', 'VBZ'), 'SG', vocab)

    @pytest.mark.parametrize('verb, pair', [('runs', ('runs', 'run')), ('run', ('runs', 'run')),
                                            ('carries', ('carries', 'carry')), ('carry', ('carries', 'carry')),
                                            ('watch', ('watches', 'watch')), ('passes', ('passes', 'pass')),
                                            ('are', ('is', 'are')), ('has', ('has', 'have')),
                                            ('play', ('plays', 'play'))])
    def test_derive_verb_pair(self, verb, pair):
        derived = ev.derive_verb_pair(verb)
        assert (derived.sg, derived.pl) == pair

    def test_derive_from_grammar(self, grammar):
        entry = grammar['main_verbs'][0]
        derived = ev.derive_verb_pair(entry['pl'], grammar)
        assert (derived.sg, derived.pl) == (entry['sg'], entry['pl'])

    def test_verb_forms_on_corpus(self, flat_model, synthetic, vocab, grammar):
        params, cfg = flat_model
        result = ev.eval_lm_probes(params, cfg, synthetic, vocab, grammar)
        assert result['probe_accuracy_lexical'] == 1.0
        assert result['probe_accuracy_pos'] == 1.0
        assert result['n_probed'] == len(synthetic)
        assert result['n_excluded_lexical'] == 0
        n_plural = sum(x.verb_number == 'PL' for x in synthetic)
        assert result['agreement_accuracy_same_preambles'] == pytest.approx(n_plural / len(synthetic))


class TestTemplates:

    def test_suites(self, bock):
        assert [x.name for x in bock] == ['prepositional', 'relative']
        assert all(len(x) == 24 for x in bock)
        wagers = ev.load_templates(which='wagers')
        assert [x.name for x in wagers] == ['embedded_verb', 'main_clause_verb']

    def test_expansion(self, bock):
        items = ev.expand_templates(bock[0])
        assert len(items) == 96
        ps = [x for x in items if x.frame_id == 'P01' and x.condition == 'PS'][0]
        assert ' '.join(ps.tokens) == 'the demo tapes from the popular rock singer'
        assert ps.label == 'PL' and ps.subject_index == 2
        assert (ps.verb_pair.sg, ps.verb_pair.pl) == ('is', 'are')

    def test_only_mismatched_conditions_have_attractors(self, bock):
        main_clause = [x for x in ev.load_templates(which='wagers') if x.name == 'main_clause_verb']
        for suite in bock + main_clause:
            for item in ev.expand_templates(suite):
                nouns = cp.intervening_nouns(item.sentence())
                assert len(nouns) == 1, (item.frame_id, item.condition)
                opposite = [n for i, n in nouns if n != item.label]
                assert len(opposite) == (0 if item.condition in ['SS', 'PP'] else 1), (item.frame_id, item.condition)
                expected = 1 if item.condition in ['SP', 'PS'] else cp.MIXED
                assert cp.count_attractors(item.sentence()) == expected

    def test_relativizers_become_that(self, bock):
        items = ev.expand_templates(bock[1])
        assert all(x not in item.tokens for item in items for x in ev.relativizers)
        r03 = [x for x in items if x.frame_id == 'R03'][0]
        assert 'that' in r03.tokens and r03.pos[r03.tokens.index('that')] == 'WDT'

    def test_embedded_verb_preamble(self):
        embedded = ev.load_templates(which='wagers')[0]
        item = [x for x in ev.expand_templates(embedded) if x.frame_id == 'W01' and x.condition == 'SP'][0]
        assert ' '.join(item.tokens) == 'the player that the coaches'
        assert item.label == 'PL' and (item.verb_pair.sg, item.verb_pair.pl) == ('likes', 'like')

    def test_last_noun_baseline_fails_on_mismatches(self, bock):
        for suite in bock:
            items = ev.expand_templates(suite)
            for condition in ev.conditions:
                sentences = [x.sentence() for x in items if x.condition == condition]
                acc = ev.baseline_last_noun_accuracy(sentences)[0]
                assert acc == (1.0 if condition in ['SS', 'PP'] else 0.0)

    def test_bad_frame(self, tmp_path):
        path = tmp_path / 'frames.tsv'
        path.write_text('\t'.join(ev.template_fields) + '\n' +
                        '\t'.join(['X01', 'prepositional', 'key', 'keys', '', '', '', '', 'is', 'are',
                                   'the/DT {subject}', 'original-filler']) + '\n')
        with pytest.raises(fxn.TemplateError):
            ev.load_templates(str(path))

    def test_frame_with_fixed_noun(self, tmp_path):
        path = tmp_path / 'frames.tsv'
        path.write_text('\t'.join(ev.template_fields) + '\n' +
                        '\t'.join(['X02', 'prepositional', 'tape', 'tapes', 'singer', 'singers', '', '', 'is', 'are',
                                   'the/DT {subject} from/IN the/DT rock/NN {attractor}', 'original-filler']) + '\n')
        with pytest.raises(fxn.TemplateError, match='rock/NN'):
            ev.load_templates(str(path))

    def test_undefined_lexical_items_excluded(self, flat_model, vocab, bock):
        params, cfg = flat_model
        items = ev.expand_templates(bock[0])
        items[0] = dataclasses.replace(items[0], verb_pair=ev.VerbPair('the', 'the'))
        with pytest.warns(UserWarning, match='Excluded 1 template items'):
            hits = ev.template_hits(params, cfg, items, vocab, 'lexical')
        assert hits[0] is None
        assert all(x is True for x in hits[1:])

    def test_flat_model_scores_plural_conditions(self, flat_model, vocab, bock):
        params, cfg = flat_model
        result = ev.eval_psycholinguistic([flat_model, flat_model], bock, vocab)
        prepositional = result['prepositional']
        assert prepositional['SS']['mean'] == 0.0 and prepositional['PP']['mean'] == 1.0
        assert prepositional['PS']['std'] == 0.0 and prepositional['PS']['n'] == 2
        assert prepositional['SP']['n_items'] == 24


class TestSummaries:

    def test_single_run(self):
        summary = ev.summarise_runs([0.75])
        assert summary == {'mean': 0.75, 'std': 0.0, 'n': 1, 'std_of_mean': 0.0}

    def test_population_std(self):
        summary = ev.summarise_runs([1.0, 0.0])
        assert summary['std'] == 0.5
        assert summary['std_of_mean'] == pytest.approx(0.5 / np.sqrt(2))

    def test_report_files(self, tmp_path):
        report = ev.EvalReport(overall_accuracy=0.1, n_instances=3,
                               accuracy_by_attractor={'0': {'accuracy': 0.5, 'n': 2}})
        json_path, csv_path = report.write(str(tmp_path))
        with open(json_path) as in_file:
            assert json.load(in_file)['overall_accuracy'] == 0.1
        lines = open(csv_path).read().splitlines()
        assert lines[0] == 'section,key,value'
        assert 'accuracy_by_attractor,0.accuracy,0.5' in lines
        assert 'perplexity,,NA' in lines

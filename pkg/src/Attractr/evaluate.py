# -*- coding: utf-8 -*-

"""
evaluate.py

Measurement: agreement accuracy broken down by attractor count, the last-noun and majority baselines,
supertagging accuracy, perplexity, language model grammaticality probes (verb forms and POS tags),
and accuracy on controlled template suites crossed for subject/attractor number.
"""

from . import attractrfunctions as fxn
from . import corpus as cp
from . import model as md
from . import numeric as nm
from . import training as tr
import collections as coll
import csv
import dataclasses
import numpy as np
import os
import warnings

warnings.formatwarning = fxn.custom_formatwarning


attractor_buckets = ['0', '1', '2', '3', '4+']
conditions = ['SS', 'SP', 'PS', 'PP']
suite_names = ['prepositional', 'relative', 'embedded_verb', 'main_clause_verb']
template_fields = ['frame_id', 'modifier_type', 'subject_sg', 'subject_pl', 'attractor_sg', 'attractor_pl',
                   'embedded_sg', 'embedded_pl', 'verb_sg', 'verb_pl', 'frame_text', 'source']
relativizers = {'who', 'whom', 'which'}
slot_tags = {'subject': ('NN', 'NNS'), 'attractor': ('NN', 'NNS'), 'embedded': ('VBZ', 'VBP')}

irregular_verbs = {'is': 'are', 'has': 'have', 'does': 'do', 'was': 'were', 'goes': 'go'}


@dataclasses.dataclass(frozen=True)
class VerbPair:
    sg: str
    pl: str
    sg_pos: str = 'VBZ'
    pl_pos: str = 'VBP'

    def form(self, number):
        return self.sg if number == 'SG' else self.pl

    def ids(self, vocab):
        """
        :return: (singular id, plural id), out of vocabulary forms mapped to their POS fallback
        """
        return (vocab.word2id.get(self.sg, vocab.pos_ids[self.sg_pos]),
                vocab.word2id.get(self.pl, vocab.pos_ids[self.pl_pos]))


@dataclasses.dataclass(frozen=True)
class TemplateFrame:
    frame_id: str
    modifier_type: str
    subject_sg: str
    subject_pl: str
    attractor_sg: str
    attractor_pl: str
    embedded_sg: str
    embedded_pl: str
    verb_sg: str
    verb_pl: str
    frame_text: str
    source: str


@dataclasses.dataclass
class TemplateSuite:
    name: str
    frames: list

    def __len__(self):
        return len(self.frames)


@dataclasses.dataclass(frozen=True)
class TemplateItem:
    """
    One expanded preamble: the words before a probed verb, with its condition and correct number
    """
    suite: str
    frame_id: str
    condition: str
    tokens: tuple
    pos: tuple
    label: str
    verb_pair: VerbPair
    subject_index: int = 0

    def sentence(self):
        """
        :return: Sentence whose verb position sits just past the preamble
        """
        return cp.Sentence(tokens=list(self.tokens), pos=list(self.pos), subject_index=self.subject_index,
                           verb_index=len(self.tokens), verb_number=self.label)


@dataclasses.dataclass
class EvalReport:
    overall_accuracy: float = None
    n_instances: int = 0
    accuracy_by_attractor: dict = dataclasses.field(default_factory=dict)
    mixed_bucket_accuracy: float = None
    mixed_bucket_n: int = 0
    baseline_accuracies: dict = dataclasses.field(default_factory=dict)
    supertag_accuracy: float = None
    perplexity: float = None
    probe_accuracy_lexical: float = None
    probe_accuracy_pos: float = None
    probe_details: dict = dataclasses.field(default_factory=dict)
    per_condition: dict = dataclasses.field(default_factory=dict)
    runs: dict = dataclasses.field(default_factory=dict)

    def to_dict(self):
        return dataclasses.asdict(self)

    def rows(self):
        """
        :return: flat (section, key, value) rows for the CSV form of the report
        """
        out = []

        def walk(prefix, value):
            if isinstance(value, dict):
                for key in value:
                    walk(prefix + [str(key)], value[key])
            elif isinstance(value, (list, tuple)):
                for i, x in enumerate(value):
                    walk(prefix + [str(i)], x)
            else:
                out.append([prefix[0], '.'.join(prefix[1:]), 'NA' if value is None else value])

        for field in dataclasses.fields(self):
            walk([field.name], getattr(self, field.name))
        return out

    def write(self, out_dir, prefix='report'):
        """
        :return: paths of the JSON and CSV files written
        """
        json_path = os.path.join(out_dir, prefix + '.json')
        csv_path = os.path.join(out_dir, prefix + '.csv')
        fxn.write_json(json_path, self.to_dict())
        fxn.write_csv(csv_path, ['section', 'key', 'value'], self.rows())
        return json_path, csv_path


def accuracy(correct, total):
    return float(correct) / total if total else None


def bucket_of(attractor_count):
    """
    :return: reporting bucket for an attractor count ('0' ... '3', '4+', or MIXED)
    """
    if attractor_count == cp.MIXED:
        return cp.MIXED
    return '4+' if int(attractor_count) >= 4 else str(attractor_count)


def predict_number(p_plural):
    """
    :return: 'PL' where p_plural >= 0.5, else 'SG'
    """
    return np.where(np.asarray(p_plural) >= 0.5, 'PL', 'SG')


# Baselines

def baseline_last_noun(sentence):
    """
    :param sentence: Sentence with a verb_index
    :return: number of the closest noun before the verb, or None to abstain if there isn't one
    """
    for i in range(sentence.verb_index - 1, -1, -1):
        if sentence.pos[i] in fxn.noun_tags:
            return fxn.noun_tags[sentence.pos[i]]
    return None


def baseline_last_noun_accuracy(sentences):
    """
    :return: (accuracy over the sentences it doesn't abstain on, number scored, number of abstentions)
    """
    correct, scored, abstained = 0, 0, 0
    for sentence in sentences:
        if not sentence.has_agreement():
            continue
        prediction = baseline_last_noun(sentence)
        if prediction is None:
            abstained += 1
            continue
        scored += 1
        correct += prediction == sentence.verb_number
    if abstained:
        warnings.warn("Last noun baseline abstained on " + str(abstained) + " sentences with no preceding noun. ")
    return accuracy(correct, scored), scored, abstained


def baseline_majority(train_instances):
    """
    :param train_instances: AgreementInstances (or plain 'SG'/'PL' labels)
    :return: the more frequent label; SG on an exact tie
    """
    if not train_instances:
        raise fxn.DataError("Majority baseline needs a non-empty training set. ")
    labels = [x if isinstance(x, str) else x.label for x in train_instances]
    counts = coll.Counter(labels)
    return 'PL' if counts['PL'] > counts['SG'] else 'SG'


def baseline_majority_accuracy(majority_label, test_instances):
    return accuracy(sum(x.label == majority_label for x in test_instances), len(test_instances))


def baseline_supertag_majority(train_sentences, test_sentences, inventory):
    """
    Predict for each word its most common tag in training (lowest tag id on ties);
    words never seen in training get the overall most common tag
    :return: per-token accuracy on test_sentences, scored against inventory-encoded tags
    """
    per_word = coll.defaultdict(coll.Counter)
    overall = coll.Counter()
    for sentence in train_sentences:
        tags = cp.tag_sequence(sentence, inventory.source)
        if tags is None:
            continue
        for word, tag_id in zip(sentence.tokens, inventory.encode(tags)):
            per_word[word][tag_id] += 1
            overall[tag_id] += 1
    if not overall:
        raise fxn.DataError("No tagged training sentences for the supertag majority baseline. ")

    def most_common(counter):
        return min(counter, key=lambda x: (-counter[x], x))

    fallback = most_common(overall)
    choice = {word: most_common(per_word[word]) for word in per_word}
    correct, total = 0, 0
    for sentence in test_sentences:
        tags = cp.tag_sequence(sentence, inventory.source)
        if tags is None:
            continue
        for word, tag_id in zip(sentence.tokens, inventory.encode(tags)):
            correct += choice.get(word, fallback) == tag_id
            total += 1
    return accuracy(correct, total)


# Model evaluation

def eval_agreement(params, cfg, instances, pad_id=0):
    """
    :param instances: AgreementInstances
    :return: dict with overall accuracy, per attractor bucket (accuracy, n) for 0..3 and 4+, and the MIXED bucket
    """
    if not instances:
        raise fxn.DataError("No agreement instances to evaluate. ")
    predictions = predict_number(md.predict_plural(params, cfg, [x.preamble for x in instances], pad_id))
    hits = predictions == np.array([x.label for x in instances])

    tallies = {x: [0, 0] for x in attractor_buckets + [cp.MIXED]}
    for instance, hit in zip(instances, hits):
        bucket = bucket_of(instance.attractor_count)
        tallies[bucket][0] += int(hit)
        tallies[bucket][1] += 1

    return {'overall_accuracy': accuracy(int(np.sum(hits)), len(instances)),
            'n_instances': len(instances),
            'accuracy_by_attractor': {x: {'accuracy': accuracy(*tallies[x]), 'n': tallies[x][1]}
                                      for x in attractor_buckets},
            'mixed_bucket_accuracy': accuracy(*tallies[cp.MIXED]),
            'mixed_bucket_n': tallies[cp.MIXED][1]}


def tagging_instances(sentences, vocab, inventory):
    """
    :return: SequenceInstances for the sentences carrying the inventory's kind of tags
    """
    ids, tags = [], []
    for sentence in sentences:
        sequence = cp.tag_sequence(sentence, inventory.source)
        if sequence is None:
            continue
        ids.append(cp.replace_rare(sentence, vocab))
        tags.append(inventory.encode(sequence))
    return tr.make_tagging_instances(ids, tags)


def eval_supertag(params, cfg, sentences, vocab, inventory, train_sentences=None, pad_id=0):
    """
    :return: dict with per-token tagging accuracy over every position (dummy tags included), the token count,
      and the majority-tag-per-word baseline when training sentences are given
    """
    if cfg.n_supertags != len(inventory):
        raise fxn.ConfigError("Model was trained with " + str(cfg.n_supertags) + " tags but the inventory has " +
                              str(len(inventory)) + ". ")
    instances = tagging_instances(sentences, vocab, inventory)
    if not instances:
        raise fxn.DataError("No tagged sentences to evaluate. ")
    out = {'supertag_accuracy': tr.validation_metric(params, cfg, 'supertag', instances, pad_id),
           'n_tokens': sum(len(x.tokens) for x in instances)}
    if train_sentences is not None:
        out['supertag_majority_baseline'] = baseline_supertag_majority(train_sentences, sentences, inventory)
    return out


def eval_perplexity(params, cfg, sentences, vocab, pad_id=0):
    """
    :return: 2 ** (token-averaged negative log2 likelihood of every word and the end of sentence marker)
    """
    instances = tr.make_lm_instances([cp.replace_rare(x, vocab) for x in sentences], vocab.eos_id)
    if not instances:
        raise fxn.DataError("No sentences to compute perplexity on. ")
    return tr.validation_metric(params, cfg, 'lm', instances, pad_id)


def next_word_log_probs(params, cfg, preamble):
    """
    :return: log distribution over the vocabulary for the word following the preamble
    """
    trace = md.encode(params, cfg, list(preamble))
    return nm.log_softmax(md.head_logits(params, trace.h[0, -1], 'lm'))


def normalised_pair_probability(log_probs, correct_id, incorrect_id):
    """
    :return: p(correct) / (p(correct) + p(incorrect))
    """
    if correct_id == incorrect_id:
        raise fxn.UndefinedProbeError("Both forms map to the same vocabulary entry. ")
    top = max(log_probs[correct_id], log_probs[incorrect_id])
    p_correct = np.exp(log_probs[correct_id] - top)
    p_incorrect = np.exp(log_probs[incorrect_id] - top)
    return float(p_correct / (p_correct + p_incorrect))


def probe_lexical(params, cfg, preamble, pair, number, vocab, log_probs=None):
    """
    :param preamble: token ids before the verb
    :param pair: VerbPair for the verb
    :param number: correct number ('SG' or 'PL')
    :param log_probs: optional precomputed next word log distribution
    :return: normalised probability of the correct verb form (correct iff >= 0.5)
    """
    if log_probs is None:
        log_probs = next_word_log_probs(params, cfg, preamble)
    sg_id, pl_id = pair.ids(vocab)
    if sg_id == pl_id:
        raise fxn.UndefinedProbeError("Verb forms '" + pair.sg + "' and '" + pair.pl +
                                      "' share a vocabulary entry. ")
    correct, incorrect = (sg_id, pl_id) if number == 'SG' else (pl_id, sg_id)
    return normalised_pair_probability(log_probs, correct, incorrect)


def probe_pos(params, cfg, preamble, number, vocab, log_probs=None):
    """
    :return: normalised probability of the correct present tense POS entry (VBP for plural, VBZ for singular)
    """
    if log_probs is None:
        log_probs = next_word_log_probs(params, cfg, preamble)
    vbz, vbp = vocab.pos_ids['VBZ'], vocab.pos_ids['VBP']
    correct, incorrect = (vbz, vbp) if number == 'SG' else (vbp, vbz)
    return normalised_pair_probability(log_probs, correct, incorrect)


def derive_verb_pair(verb, grammar_cfg=None):
    """
    :param verb: a present tense verb form (either number)
    :param grammar_cfg: optional grammar whose lexicons are checked first
    :return: VerbPair (irregulars and simple -s/-es morphology as a fallback)
    """
    if grammar_cfg:
        for field in ['main_verbs', 'transitive_present']:
            for entry in grammar_cfg.get(field, []):
                if verb in (entry['sg'], entry['pl']):
                    return VerbPair(entry['sg'], entry['pl'])

    for sg, pl in irregular_verbs.items():
        if verb in (sg, pl):
            return VerbPair(sg, pl)
    if verb.endswith('ies') and len(verb) > 4:
        return VerbPair(verb, verb[:-3] + 'y')
    if verb.endswith(('sses', 'shes', 'ches', 'xes', 'zzes')):
        return VerbPair(verb, verb[:-2])
    if verb.endswith('s') and not verb.endswith('ss'):
        return VerbPair(verb, verb[:-1])
    if verb.endswith('y') and len(verb) > 2 and verb[-2] not in 'aeiou':
        return VerbPair(verb[:-1] + 'ies', verb)
    if verb.endswith(('ss', 'sh', 'ch', 'x', 'zz')):
        return VerbPair(verb + 'es', verb)
    return VerbPair(verb + 's', verb)


def eval_lm_probes(params, cfg, sentences, vocab, grammar_cfg=None):
    """
    Run the lexical and POS probes on each annotated sentence's preamble (the same preambles the
    agreement head sees), plus the agreement head itself when the model has one
    :return: dict of probe accuracies, counts and excluded (undefined) lexical probes
    """
    lexical_hits, pos_hits, agreement_preambles, labels = [], [], [], []
    excluded = 0
    for sentence in sentences:
        if not sentence.has_agreement():
            continue
        preamble = cp.replace_rare(sentence, vocab)[:sentence.verb_index]
        log_probs = next_word_log_probs(params, cfg, preamble)
        number = sentence.verb_number
        pos_hits.append(probe_pos(params, cfg, preamble, number, vocab, log_probs) >= 0.5)
        try:
            pair = derive_verb_pair(sentence.tokens[sentence.verb_index], grammar_cfg)
            lexical_hits.append(probe_lexical(params, cfg, preamble, pair, number, vocab, log_probs) >= 0.5)
        except fxn.UndefinedProbeError:
            excluded += 1
        agreement_preambles.append(preamble)
        labels.append(number)

    if not pos_hits:
        raise fxn.DataError("No annotated sentences to probe. ")
    if excluded:
        warnings.warn("Excluded " + str(excluded) + " lexical probes whose verb forms share a vocabulary entry. ")

    out = {'probe_accuracy_lexical': accuracy(sum(lexical_hits), len(lexical_hits)),
           'probe_accuracy_pos': accuracy(sum(pos_hits), len(pos_hits)),
           'n_probed': len(pos_hits),
           'n_excluded_lexical': excluded,
           'agreement_accuracy_same_preambles': None}
    if 'agreement' in cfg.heads:
        predictions = predict_number(md.predict_plural(params, cfg, agreement_preambles))
        out['agreement_accuracy_same_preambles'] = float(np.mean(predictions == np.array(labels)))
    return out


# Templates

def read_template_file(path):
    """
    :param path: tab separated template file; lines starting with '#' are comments
    :return: list of TemplateFrames
    """
    if not os.path.isfile(path):
        raise fxn.TemplateError("Cannot find template file " + path + ". ")
    with open(path, 'r', encoding='utf-8') as in_file:
        lines = [x for x in in_file if x.strip() and not x.startswith('#')]

    reader = csv.DictReader(lines, delimiter='\t')
    if reader.fieldnames is None or any(x not in reader.fieldnames for x in template_fields):
        raise fxn.TemplateError("Template file " + path + " must have the columns: " + ', '.join(template_fields))
    frames = []
    for row in reader:
        frames.append(TemplateFrame(**{x: (row[x] or '').strip() for x in template_fields}))
    return frames


def check_frame(frame):
    """
    Raise a TemplateError if a frame lacks a number-markable slot or the forms to fill it, or has a noun outside them
    """
    for slot in ['subject', 'attractor']:
        if '{' + slot + '}' not in frame.frame_text:
            raise fxn.TemplateError("Frame " + frame.frame_id + " has no {" + slot + "} slot. ")
        if not getattr(frame, slot + '_sg') or not getattr(frame, slot + '_pl'):
            raise fxn.TemplateError("Frame " + frame.frame_id + " is missing " + slot + " forms. ")
    if '{embedded}' in frame.frame_text and not (frame.embedded_sg and frame.embedded_pl):
        raise fxn.TemplateError("Frame " + frame.frame_id + " has an {embedded} slot but no embedded verb forms. ")
    if not frame.verb_sg or not frame.verb_pl:
        raise fxn.TemplateError("Frame " + frame.frame_id + " is missing its verb forms. ")
    fixed_nouns = [x for x in frame.frame_text.split() if x.rpartition('/')[2] in fxn.noun_tags]
    if fixed_nouns:
        raise fxn.TemplateError("Frame " + frame.frame_id + " has nouns outside its slots (" + ' '.join(fixed_nouns) +
                                "); only {subject} and {attractor} may hold nouns. ")


def load_templates(path=None, which=None):
    """
    :param path: template file; defaults to the packaged file for `which`
    :param which: 'bock' (prepositional and subject relative frames) or 'wagers' (object relative frames)
    :return: list of TemplateSuites: prepositional/relative, or embedded_verb/main_clause_verb
    """
    if path is None:
        if which not in fxn.template_files:
            raise fxn.ConfigError("Template set must be one of " + ', '.join(fxn.template_files) + ". ")
        path = fxn.template_files[which]
    frames = read_template_file(path)
    for frame in frames:
        check_frame(frame)

    by_type = coll.defaultdict(list)
    for frame in frames:
        by_type[frame.modifier_type].append(frame)

    suites = []
    for modifier_type in by_type:
        if modifier_type in ['prepositional', 'relative']:
            suites.append(TemplateSuite(modifier_type, by_type[modifier_type]))
        elif modifier_type == 'object_relative':
            suites.append(TemplateSuite('embedded_verb', by_type[modifier_type]))
            suites.append(TemplateSuite('main_clause_verb', by_type[modifier_type]))
        else:
            raise fxn.TemplateError("Unknown modifier type '" + modifier_type + "' in " + path + ". ")
    return sorted(suites, key=lambda x: suite_names.index(x.name))


def fill_frame(frame, subject, attractor):
    """
    :return: (words, tags) for the frame with slots filled for the given numbers; relativizers become 'that'
    """
    words, tags = [], []
    for chunk in frame.frame_text.split():
        if chunk.startswith('{') and chunk.endswith('}'):
            slot = chunk[1:-1]
            if slot not in slot_tags:
                raise fxn.TemplateError("Frame " + frame.frame_id + " has an unknown slot " + chunk + ". ")
            number = subject if slot == 'subject' else attractor
            words.append(getattr(frame, slot + ('_sg' if number == 'SG' else '_pl')))
            tags.append(slot_tags[slot][0 if number == 'SG' else 1])
        else:
            word, sep, tag = chunk.rpartition('/')
            if not sep or not word:
                raise fxn.TemplateError("Frame " + frame.frame_id + " token '" + chunk + "' should be word/TAG. ")
            if word.lower() in relativizers:
                word, tag = 'that', 'WDT'
            words.append(word)
            tags.append(tag)
    return words, tags


def expand_templates(suite):
    """
    :param suite: TemplateSuite
    :return: TemplateItems, four per frame (SS, SP, PS, PP: subject number then attractor number)
    """
    items = []
    for frame in suite.frames:
        check_frame(frame)
        for condition in conditions:
            subject = 'SG' if condition[0] == 'S' else 'PL'
            attractor = 'SG' if condition[1] == 'S' else 'PL'
            words, tags = fill_frame(frame, subject, attractor)

            if suite.name == 'embedded_verb':
                if '{embedded}' not in frame.frame_text:
                    raise fxn.TemplateError("Frame " + frame.frame_id + " has no embedded verb to probe. ")
                cut = frame.frame_text.split().index('{embedded}')
                words, tags = words[:cut], tags[:cut]
                label, pair = attractor, VerbPair(frame.embedded_sg, frame.embedded_pl)
            else:
                label, pair = subject, VerbPair(frame.verb_sg, frame.verb_pl)

            items.append(TemplateItem(suite.name, frame.frame_id, condition, tuple(words), tuple(tags), label, pair,
                                      frame.frame_text.split().index('{subject}')))
    return items


def template_ids(item, vocab):
    return cp.replace_rare(cp.Sentence(tokens=list(item.tokens), pos=list(item.pos)), vocab)


def template_hits(params, cfg, items, vocab, method):
    """
    :param method: 'agreement' (agreement head), 'lexical' or 'pos' (language model probes)
    :return: list of booleans, one per item; None for lexical items whose verb forms share a vocabulary entry
      (excluded from scoring, as in eval_lm_probes)
    """
    preambles = [template_ids(x, vocab) for x in items]
    if method == 'agreement':
        predictions = predict_number(md.predict_plural(params, cfg, preambles))
        return [p == x.label for p, x in zip(predictions, items)]

    hits = []
    undefined = 0
    for item, preamble in zip(items, preambles):
        if method == 'lexical':
            try:
                hits.append(probe_lexical(params, cfg, preamble, item.verb_pair, item.label, vocab) >= 0.5)
            except fxn.UndefinedProbeError:
                undefined += 1
                hits.append(None)
        elif method == 'pos':
            hits.append(probe_pos(params, cfg, preamble, item.label, vocab) >= 0.5)
        else:
            raise fxn.ConfigError("Unknown template scoring method '" + str(method) + "'. ")
    if undefined:
        warnings.warn("Excluded " + str(undefined) + " template items whose verb forms share a vocabulary entry. ")
    return hits


def summarise_runs(values):
    """
    :param values: one number per run (seed)
    :return: dict of mean, standard deviation across runs (population; 0 for a single run), n, and the
      standard deviation expected of an n-run average if runs are Gaussian
    """
    values = np.asarray([x for x in values if x is not None], dtype=np.float64)
    if len(values) == 0:
        return {'mean': None, 'std': None, 'n': 0, 'std_of_mean': None}
    std = float(np.std(values))
    return {'mean': float(np.mean(values)), 'std': std, 'n': int(len(values)),
            'std_of_mean': std / np.sqrt(len(values))}


def eval_psycholinguistic(models, suites, vocab, method=None):
    """
    :param models: list of (ModelParams, ModelConfig), one per run
    :param suites: TemplateSuites
    :param method: 'agreement', 'lexical' or 'pos'; defaults to the agreement head where present, else lexical
    :return: {suite: {condition: {'mean', 'std', 'n', 'std_of_mean', 'n_items', 'n_excluded', 'runs'}}}
      (n_excluded sums undefined lexical items over runs)
    """
    if not models:
        raise fxn.ConfigError("Template evaluation needs at least one model. ")
    out = {}
    for suite in suites:
        items = expand_templates(suite)
        per_run = {x: [] for x in conditions}
        excluded = {x: 0 for x in conditions}
        for params, cfg in models:
            how = method or ('agreement' if 'agreement' in cfg.heads else 'lexical')
            hits = template_hits(params, cfg, items, vocab, how)
            for condition in conditions:
                chosen = [h for h, x in zip(hits, items) if x.condition == condition and h is not None]
                per_run[condition].append(accuracy(sum(chosen), len(chosen)))
                excluded[condition] += sum(h is None and x.condition == condition for h, x in zip(hits, items))

        out[suite.name] = {}
        for condition in conditions:
            summary = summarise_runs(per_run[condition])
            summary['n_items'] = sum(x.condition == condition for x in items)
            summary['n_excluded'] = excluded[condition]
            summary['runs'] = per_run[condition]
            out[suite.name][condition] = summary
    return out

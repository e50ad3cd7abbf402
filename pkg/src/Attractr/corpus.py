# -*- coding: utf-8 -*-

"""
corpus.py

Annotated corpus handling: JSONL ingestion, frequency-thresholded vocabularies with POS fallbacks,
agreement instance extraction with attractor counting, supertag inventories and a template grammar
generator producing fully annotated synthetic sentences.
"""

from . import attractrfunctions as fxn
import collections as coll
import dataclasses
import json
import os
import warnings

warnings.formatwarning = fxn.custom_formatwarning


MIXED = 'MIXED'
dummy_tag = '<dummy>'
merged_present_tag = 'VBPRES'
jsonl_fields = ['tokens', 'pos', 'supertags', 'subject_index', 'verb_index', 'verb_number']

toy_supertags = ['NP[nb]/N', 'N', 'N/N', '(NP\\NP)/NP', '(NP\\NP)/(S[dcl]\\NP)', '(NP\\NP)/(S[dcl]/NP)',
                 '(S[dcl]\\NP)/NP', 'S[dcl]\\NP', '(S[dcl]\\NP)/(S[adj]\\NP)', 'S[adj]\\NP', '(S\\NP)\\(S\\NP)',
                 '.', 'NP', 'NP/NP', 'conj', ',', 'PP/NP', '((S\\NP)\\(S\\NP))/NP', 'S[dcl]', 'S[dcl]/NP',
                 '(S[b]\\NP)/NP', 'S[b]\\NP', '(S[dcl]\\NP)/(S[b]\\NP)', '(S[dcl]\\NP)/PP', '(S[ng]\\NP)/NP',
                 'S[ng]\\NP', '(S/S)/NP', 'N/PP', '(S[dcl]\\NP[sg])/(S[dcl]\\NP[sg])',
                 '(S[dcl]\\NP[pl])/(S[dcl]\\NP[pl])']

# Supertag assigned by each generator rule
rule_tags = {'det': 'NP[nb]/N', 'noun': 'N', 'adj': 'N/N', 'prep': '(NP\\NP)/NP',
             'subj_rel': '(NP\\NP)/(S[dcl]\\NP)', 'obj_rel': '(NP\\NP)/(S[dcl]/NP)',
             'trans_verb': '(S[dcl]\\NP)/NP', 'intrans_verb': 'S[dcl]\\NP',
             'copula': '(S[dcl]\\NP)/(S[adj]\\NP)', 'pred_adj': 'S[adj]\\NP',
             'adverb': '(S\\NP)\\(S\\NP)', 'stop': '.',
             'preposed_prep': '(S/S)/NP', 'comma': ',',
             # preverbal adverbs carry the subject's agreement feature
             'preverbal_sg': '(S[dcl]\\NP[sg])/(S[dcl]\\NP[sg])', 'preverbal_pl': '(S[dcl]\\NP[pl])/(S[dcl]\\NP[pl])'}

constructions = ['pp', 'relative', 'object_relative']


@dataclasses.dataclass
class Sentence:
    tokens: list
    pos: list
    supertags: list = None
    subject_index: int = None
    verb_index: int = None
    verb_number: str = None

    def has_agreement(self):
        return self.subject_index is not None and self.verb_index is not None and self.verb_number is not None

    def to_dict(self):
        return {x: getattr(self, x) for x in jsonl_fields}


@dataclasses.dataclass(frozen=True)
class AgreementInstance:
    preamble: tuple
    label: str
    attractor_count: object
    has_intervening_noun: bool
    sentence_index: int = None


class Vocab:
    """
    Word <-> id map. Ids are dense from 0: padding, end of sentence, every Penn tag (the fallback
    entries for rare words), then the retained words by descending frequency.
    """

    def __init__(self, words, rule):
        self.rule = tuple(rule)
        self.id2word = [fxn.pad_token, fxn.eos_token] + list(fxn.penn_tags)
        self.word2id = {w: i for i, w in enumerate(self.id2word)}
        for word in words:
            if word not in self.word2id:
                self.word2id[word] = len(self.id2word)
                self.id2word.append(word)

        self.pad_id = self.word2id[fxn.pad_token]
        self.eos_id = self.word2id[fxn.eos_token]
        self.pos_ids = {tag: self.word2id[tag] for tag in fxn.penn_tags}

    def __len__(self):
        return len(self.id2word)

    def __contains__(self, word):
        return word in self.word2id

    def hash(self):
        return fxn.text_hash(self.id2word)

    def to_dict(self):
        return {'rule': list(self.rule), 'words': self.id2word[2 + len(fxn.penn_tags):]}

    @classmethod
    def from_dict(cls, vocab_dict):
        return cls(vocab_dict['words'], vocab_dict['rule'])


class TagInventory:
    """
    Tag -> id map for the tags seen at least min_count times in training data; everything else
    (rarer tags, tags never seen in training) maps to the dummy id 0.
    """

    def __init__(self, counts, min_count=10, source='supertag'):
        self.min_count = min_count
        self.source = source
        self.counts = dict(counts)
        retained = sorted([x for x in counts if counts[x] >= min_count], key=lambda x: (-counts[x], x))
        self.id2tag = [dummy_tag] + retained
        self.tag2id = {t: i for i, t in enumerate(self.id2tag)}
        self.dummy_id = 0

        total = sum(counts.values())
        self.dummy_fraction = sum(counts[x] for x in counts if x not in self.tag2id) / total if total else 0.0

    def __len__(self):
        return len(self.id2tag)

    def encode(self, tags):
        return [self.tag2id.get(x, self.dummy_id) for x in tags]

    def hash(self):
        return fxn.text_hash(self.id2tag)

    def to_dict(self):
        return {'min_count': self.min_count, 'source': self.source, 'counts': self.counts}

    @classmethod
    def from_dict(cls, inventory_dict):
        return cls(inventory_dict['counts'], inventory_dict['min_count'], inventory_dict['source'])


def validate_sentence(sentence):
    """
    :param sentence: Sentence
    :return: list of str problems (empty if the sentence satisfies the annotation contract)
    """
    problems = []
    if not isinstance(sentence.tokens, list) or not all(isinstance(x, str) for x in sentence.tokens):
        return ["tokens must be a list of strings"]
    if not sentence.tokens:
        problems.append("tokens is empty")
    if not isinstance(sentence.pos, list) or len(sentence.pos) != len(sentence.tokens):
        problems.append("pos must be a list parallel to tokens (" + str(len(sentence.tokens)) + " entries)")
        return problems
    if not all(isinstance(x, str) for x in sentence.pos):
        problems.append("pos must hold a string for every token")
        return problems
    if sentence.supertags is not None and (not isinstance(sentence.supertags, list) or
                                           len(sentence.supertags) != len(sentence.tokens) or
                                           not all(isinstance(x, str) for x in sentence.supertags)):
        problems.append("supertags must be null or a list of strings parallel to tokens")

    annotations = [sentence.subject_index, sentence.verb_index, sentence.verb_number]
    if any(x is not None for x in annotations) and not all(x is not None for x in annotations):
        problems.append("subject_index, verb_index and verb_number must be all present or all null")
        return problems

    if sentence.verb_index is not None:
        n = len(sentence.tokens)
        for field in ['subject_index', 'verb_index']:
            value = getattr(sentence, field)
            if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value < n:
                problems.append(field + " " + repr(value) + " is not a token position")
        if problems:
            return problems
        if sentence.subject_index >= sentence.verb_index:
            problems.append("subject_index must precede verb_index")
        verb_tag = sentence.pos[sentence.verb_index]
        if verb_tag not in fxn.verb_number_tags:
            problems.append("token at verb_index is tagged " + verb_tag + ", not VBZ/VBP")
        elif fxn.verb_number_tags[verb_tag] != sentence.verb_number:
            problems.append("verb_number " + str(sentence.verb_number) + " is inconsistent with tag " + verb_tag)

    return problems


def sentence_from_dict(obj):
    """
    :param obj: decoded JSON object for one line
    :return: Sentence (not yet validated)
    """
    if not isinstance(obj, dict):
        raise ValueError("line is not a JSON object")
    unknown = [x for x in obj if x not in jsonl_fields]
    if unknown:
        raise ValueError("unknown field(s) " + ', '.join(unknown))
    if 'tokens' not in obj or 'pos' not in obj:
        raise ValueError("tokens and pos are required")
    return Sentence(**{x: obj.get(x) for x in jsonl_fields})


def read_jsonl(path, strict=False):
    """
    :param path: path to a (optionally gzipped) JSONL file, one annotated sentence per line
    :param strict: raise on any bad line, rather than skipping it with a warning
    :return: list of validated Sentences
    """
    if not os.path.isfile(path):
        raise fxn.DataError("Cannot find corpus file " + path + ". ")

    sentences = []
    bad_lines = []
    try:
        with fxn.opener(path, 'rb') as in_file:
            for line_no, raw_line in enumerate(in_file, start=1):
                try:
                    line = raw_line.decode('utf-8')
                except UnicodeDecodeError:
                    raise fxn.DataError("Corpus file " + path + " is not UTF-8 encoded (line " + str(line_no) + "). ")
                if not line.strip():
                    continue
                try:
                    sentence = sentence_from_dict(json.loads(line))
                    problems = validate_sentence(sentence)
                except (ValueError, TypeError) as err:
                    problems = [str(err)]
                if problems:
                    bad_lines.append(path + ", line " + str(line_no) + ": " + '; '.join(problems))
                else:
                    sentences.append(sentence)
    except fxn.DataError:
        raise
    except (OSError, EOFError) as err:
        raise fxn.DataError("Unable to read corpus file " + path + ": " + str(err))

    if bad_lines:
        if strict:
            raise fxn.DataError("Invalid lines in corpus: \n" + '\n'.join(bad_lines))
        for message in bad_lines:
            warnings.warn("Skipping invalid sentence - " + message)

    return sentences


def write_jsonl(path, sentences):
    """
    :param path: output path
    :param sentences: iterable of Sentences, written one JSON object per line in schema field order
    """
    fxn.make_parent(path)
    with open(path, 'w', encoding='utf-8', newline='\n') as out_file:
        for sentence in sentences:
            out_file.write(json.dumps(sentence.to_dict(), ensure_ascii=False) + '\n')


def parse_rule(rule):
    """
    :param rule: ('top_k', k) / ('min_count', c), or the equivalent {'rule': ..., 'value': ...} dict
    :return: normalised (name, int) tuple
    """
    if isinstance(rule, dict):
        rule = (rule.get('rule'), rule.get('value'))
    name, value = rule
    if name not in ['top_k', 'min_count'] or not isinstance(value, int) or value < 0:
        raise fxn.ConfigError("Vocabulary rule must be top_k or min_count with a non-negative integer, not " +
                              str(rule) + ". ")
    return name, value


def build_vocab(sentences, rule):
    """
    :param sentences: training Sentences
    :param rule: ('top_k', k) keeps the k most frequent words; ('min_count', c) keeps words seen at least c times.
      Ties at the boundary are broken by lexicographic order.
    :return: Vocab
    """
    if not sentences:
        raise fxn.DataError("Cannot build a vocabulary from an empty corpus. ")
    name, value = parse_rule(rule)

    counts = coll.Counter()
    for sentence in sentences:
        counts.update(sentence.tokens)
    ranked = sorted(counts, key=lambda x: (-counts[x], x))

    if name == 'top_k':
        kept = ranked[:value]
    else:
        kept = [x for x in ranked if counts[x] >= value]

    return Vocab(kept, (name, value))


def save_vocab(vocab, path):
    fxn.write_json(path, vocab.to_dict())


def load_vocab(path):
    """
    :return: Vocab rebuilt from a save_vocab file (ids identical to the saved one)
    """
    vocab_dict = fxn.read_json(path, fxn.DataError)
    if not isinstance(vocab_dict, dict) or 'words' not in vocab_dict or 'rule' not in vocab_dict:
        raise fxn.DataError("Vocabulary file " + path + " lacks 'words' or 'rule'. ")
    return Vocab.from_dict(vocab_dict)


def save_inventory(inventory, path):
    fxn.write_json(path, inventory.to_dict())


def load_inventory(path):
    inventory_dict = fxn.read_json(path, fxn.DataError)
    if not isinstance(inventory_dict, dict) or any(x not in inventory_dict for x in ['counts', 'min_count', 'source']):
        raise fxn.DataError("Tag inventory file " + path + " is missing fields. ")
    return TagInventory.from_dict(inventory_dict)


def replace_rare(sentence, vocab):
    """
    :param sentence: Sentence (POS for every token)
    :param vocab: Vocab
    :return: list of ids; words outside the vocabulary are replaced by their POS tag's id
    """
    ids = []
    for word, tag in zip(sentence.tokens, sentence.pos):
        if word in vocab.word2id:
            ids.append(vocab.word2id[word])
        elif tag in vocab.pos_ids:
            ids.append(vocab.pos_ids[tag])
        else:
            raise fxn.AnnotationError("Out of vocabulary word '" + word + "' has unknown POS tag '" + tag + "'. ")
    return ids


def subject_number(sentence):
    """
    :return: 'SG'/'PL' from the subject's noun tag, falling back to the verb's number
    """
    return fxn.noun_tags.get(sentence.pos[sentence.subject_index], sentence.verb_number)


def intervening_nouns(sentence):
    """
    :return: list of (index, number) for nouns strictly between subject and verb
    """
    return [(i, fxn.noun_tags[sentence.pos[i]]) for i in range(sentence.subject_index + 1, sentence.verb_index)
            if sentence.pos[i] in fxn.noun_tags]


def count_attractors(sentence):
    """
    :param sentence: Sentence with subject/verb annotations
    :return: 0 if no nouns intervene; the number of intervening nouns if all of them have the opposite number
      from the subject; otherwise MIXED
    """
    nouns = intervening_nouns(sentence)
    if not nouns:
        return 0
    target = fxn.opposite(subject_number(sentence))
    if all(number == target for i, number in nouns):
        return len(nouns)
    return MIXED


def extract_agreement(sentence, vocab, sentence_index=None):
    """
    :param sentence: annotated Sentence
    :param vocab: Vocab
    :param sentence_index: optional position of the sentence in its corpus, kept for later lookups
    :return: AgreementInstance, or None (with a warning) if the agreement annotation is missing
    """
    if not sentence.has_agreement():
        warnings.warn("Skipping sentence " + ('' if sentence_index is None else str(sentence_index) + ' ') +
                      "with no subject/verb annotation: '" + ' '.join(sentence.tokens[:8]) + "...'")
        return None

    ids = replace_rare(sentence, vocab)
    return AgreementInstance(preamble=tuple(ids[:sentence.verb_index]),
                             label=sentence.verb_number,
                             attractor_count=count_attractors(sentence),
                             has_intervening_noun=len(intervening_nouns(sentence)) > 0,
                             sentence_index=sentence_index)


def extract_all(sentences, vocab):
    """
    :return: AgreementInstances for every annotated sentence (sentence_index set), unannotated ones skipped
    """
    out = []
    skipped = 0
    for i, sentence in enumerate(sentences):
        if sentence.has_agreement():
            out.append(extract_agreement(sentence, vocab, i))
        else:
            skipped += 1
    if skipped:
        warnings.warn("Skipped " + str(skipped) + " sentences with no agreement annotation. ")
    return out


def strip_pos_number(pos_tag):
    """
    :param pos_tag: Penn tag
    :return: the tag with number information removed (NNS -> NN, NNPS -> NNP, VBZ/VBP -> VBPRES)
    """
    if pos_tag == 'NNS':
        return 'NN'
    elif pos_tag == 'NNPS':
        return 'NNP'
    elif pos_tag in fxn.verb_number_tags:
        return merged_present_tag
    return pos_tag


def tag_sequence(sentence, source='supertag'):
    """
    :param source: 'supertag' for the CCG annotation, 'pos' for number-stripped POS tags
    :return: list of tags for the sentence, or None if it lacks that annotation
    """
    if source == 'pos':
        return [strip_pos_number(x) for x in sentence.pos]
    elif source == 'supertag':
        return sentence.supertags
    raise fxn.ConfigError("Unknown tag source '" + str(source) + "' (should be supertag or pos). ")


def prune_supertags(sentences, min_count=10, source='supertag'):
    """
    :param sentences: TRAINING Sentences only (the inventory is frozen from them)
    :param min_count: tags seen fewer times map to the dummy id
    :param source: 'supertag' or 'pos' (number-stripped POS tagging as the auxiliary task)
    :return: TagInventory
    """
    counts = coll.Counter()
    for sentence in sentences:
        tags = tag_sequence(sentence, source)
        if tags is not None:
            counts.update(tags)
    if not counts:
        raise fxn.DataError("No " + source + " annotations found to build a tag inventory from. ")
    return TagInventory(counts, min_count, source)


def filter_intervening_noun(sentences):
    """
    :return: the annotated sentences with at least one noun (of any number) between subject and verb
    """
    return [x for x in sentences if x.has_agreement() and intervening_nouns(x)]


def attractor_histogram(sentences):
    """
    :return: dict of attractor count (or MIXED) as str: number of annotated sentences
    """
    counts = coll.Counter(str(count_attractors(x)) for x in sentences if x.has_agreement())
    return {x: counts[x] for x in sorted(counts, key=lambda k: (k == MIXED, k))}


def label_balance(sentences):
    """
    :return: dict of verb number: count over annotated sentences
    """
    counts = coll.Counter(x.verb_number for x in sentences if x.has_agreement())
    return {x: counts[x] for x in fxn.numbers}


def check_grammar(grammar_cfg):
    """
    Raise a ConfigError if a grammar config can't generate sentences
    """
    for field in ['nouns', 'adjectives', 'prepositions', 'transitive_past', 'transitive_present', 'main_verbs',
                  'predicate_adjectives', 'adverbs']:
        if not grammar_cfg.get(field):
            raise fxn.ConfigError("Grammar lexicon '" + field + "' is missing or empty. ")
    for field in ['nouns', 'transitive_present', 'main_verbs']:
        for entry in grammar_cfg[field]:
            if not isinstance(entry, dict) or 'sg' not in entry or 'pl' not in entry:
                raise fxn.ConfigError("Every '" + field + "' entry needs 'sg' and 'pl' forms: " + str(entry))
    for rate, field in [('preposed_rate', 'preposed_prepositions'), ('preverbal_rate', 'preverbal_adverbs')]:
        if grammar_cfg.get(rate, 0.0) > 0 and not grammar_cfg.get(field):
            raise fxn.ConfigError("Grammar " + rate + " is set but lexicon '" + field + "' is missing or empty. ")

    weights = grammar_cfg.get('attractor_weights', [])
    if not weights or min(weights) < 0 or sum(weights) <= 0:
        raise fxn.ConfigError("Grammar attractor_weights must be non-negative with a positive sum. ")
    construction_weights = grammar_cfg.get('construction_weights', {})
    if any(x not in constructions for x in construction_weights) or \
            sum(construction_weights.get(x, 0) for x in constructions) <= 0:
        raise fxn.ConfigError("Grammar construction_weights must cover " + ', '.join(constructions) +
                              " with a positive sum. ")


def load_grammar(path=None):
    """
    :param path: path to a grammar JSON file; defaults to the packaged grammar
    :return: validated grammar dict
    """
    grammar_cfg = fxn.read_json(path or fxn.grammar_file, fxn.ConfigError)
    check_grammar(grammar_cfg)
    return grammar_cfg


def pick(rng, options):
    return options[int(rng.integers(len(options)))]


def pick_weighted(rng, options, weights):
    total = float(sum(weights))
    return options[int(rng.choice(len(options), p=[w / total for w in weights]))]


def noun_phrase(grammar_cfg, rng, number):
    """
    :return: list of (word, pos, supertag) for 'the [adj] noun', and the offset of the head noun
    """
    words = [('the', 'DT', rule_tags['det'])]
    if rng.random() < grammar_cfg.get('adjective_rate', 0.0):
        words.append((pick(rng, grammar_cfg['adjectives']), 'JJ', rule_tags['adj']))
    noun = pick(rng, grammar_cfg['nouns'])
    words.append((noun['sg'] if number == 'SG' else noun['pl'], 'NN' if number == 'SG' else 'NNS', rule_tags['noun']))
    return words, len(words) - 1


def modifier(grammar_cfg, rng, number, construction):
    """
    :param number: number of the noun this modifier introduces
    :param construction: 'pp' (from the singer), 'relative' (that promoted the singer) or
      'object_relative' (that the singer likes)
    :return: list of (word, pos, supertag) introducing exactly one noun
    """
    np_words, head = noun_phrase(grammar_cfg, rng, number)
    if construction == 'pp':
        return [(pick(rng, grammar_cfg['prepositions']), 'IN', rule_tags['prep'])] + np_words
    elif construction == 'relative':
        return [('that', 'WDT', rule_tags['subj_rel']),
                (pick(rng, grammar_cfg['transitive_past']), 'VBD', rule_tags['trans_verb'])] + np_words
    elif construction == 'object_relative':
        verb = pick(rng, grammar_cfg['transitive_present'])
        embedded = (verb['sg'], 'VBZ', rule_tags['trans_verb']) if number == 'SG' else \
            (verb['pl'], 'VBP', rule_tags['trans_verb'])
        return [('that', 'WDT', rule_tags['obj_rel'])] + np_words + [embedded]
    raise fxn.ConfigError("Unknown construction '" + str(construction) + "'. ")


def generate_sentence(grammar_cfg, rng, construction=None):
    """
    :param construction: force every modifier to one construction type (None = sample by grammar weights)
    :return: (Sentence, requested attractor count or MIXED)
    """
    n_nouns = int(rng.choice(len(grammar_cfg['attractor_weights']),
                             p=[w / float(sum(grammar_cfg['attractor_weights']))
                                for w in grammar_cfg['attractor_weights']]))
    subj_number = 'PL' if rng.random() < grammar_cfg.get('plural_rate', 0.5) else 'SG'

    numbers = [fxn.opposite(subj_number)] * n_nouns
    requested = n_nouns
    if n_nouns and rng.random() < grammar_cfg.get('mixed_rate', 0.0):
        numbers[int(rng.integers(n_nouns))] = subj_number
        requested = MIXED

    words = []
    if rng.random() < grammar_cfg.get('preposed_rate', 0.0):
        preposed_number = 'PL' if rng.random() < grammar_cfg.get('plural_rate', 0.5) else 'SG'
        words.append((pick(rng, grammar_cfg['preposed_prepositions']), 'IN', rule_tags['preposed_prep']))
        words += noun_phrase(grammar_cfg, rng, preposed_number)[0]
        words.append((',', ',', rule_tags['comma']))
    subject_words, head = noun_phrase(grammar_cfg, rng, subj_number)
    subject_index = len(words) + head
    words += subject_words
    weights = grammar_cfg['construction_weights']
    for number in numbers:
        kind = construction or pick_weighted(rng, constructions, [weights.get(x, 0) for x in constructions])
        words += modifier(grammar_cfg, rng, number, kind)

    if rng.random() < grammar_cfg.get('preverbal_rate', 0.0):
        tag = rule_tags['preverbal_' + subj_number.lower()]
        words.append((pick(rng, grammar_cfg['preverbal_adverbs']), 'RB', tag))
    verb_index = len(words)
    verb = pick(rng, grammar_cfg['main_verbs'])
    verb_word, verb_tag = (verb['sg'], 'VBZ') if subj_number == 'SG' else (verb['pl'], 'VBP')
    if verb.get('copula'):
        words.append((verb_word, verb_tag, rule_tags['copula']))
        words.append((pick(rng, grammar_cfg['predicate_adjectives']), 'JJ', rule_tags['pred_adj']))
    else:
        words.append((verb_word, verb_tag, rule_tags['intrans_verb']))
        if rng.random() < grammar_cfg.get('adverb_rate', 0.0):
            words.append((pick(rng, grammar_cfg['adverbs']), 'RB', rule_tags['adverb']))
    words.append(('.', '.', rule_tags['stop']))

    sentence = Sentence(tokens=[x[0] for x in words], pos=[x[1] for x in words], supertags=[x[2] for x in words],
                        subject_index=subject_index, verb_index=verb_index, verb_number=subj_number)
    return sentence, requested


def generate_synthetic(grammar_cfg, n, rng, construction=None):
    """
    :param grammar_cfg: grammar dict (lexicons with number marking, construction and attractor weights)
    :param n: number of sentences
    :param rng: numpy Generator
    :param construction: optionally force 'pp', 'relative' or 'object_relative' modifiers throughout
    :return: list of fully annotated Sentences, attractor counts re-verified with count_attractors
    """
    check_grammar(grammar_cfg)
    if construction is not None and construction not in constructions:
        raise fxn.ConfigError("Unknown construction '" + str(construction) + "'. ")

    sentences = []
    for _ in range(n):
        sentence, requested = generate_sentence(grammar_cfg, rng, construction)
        if count_attractors(sentence) != requested:
            raise fxn.ConfigError("Generated sentence '" + ' '.join(sentence.tokens) + "' has attractor count " +
                                  str(count_attractors(sentence)) + ", not the requested " + str(requested) +
                                  " - check that nouns in the grammar are not also used as other words. ")
        sentences.append(sentence)
    return sentences

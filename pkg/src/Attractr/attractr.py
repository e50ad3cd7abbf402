# -*- coding: utf-8 -*-

"""
attractr.py

Command line entry point: generate synthetic corpora, train agreement/supertagging/language models
(single task, joint, or pre-train then train) over a list of seeds, evaluate checkpoints, and trace
per-word plural predictions and hidden unit activations.

"""

from . import attractrfunctions as fxn
from . import corpus as cp
from . import evaluate as ev
from . import model as md
from . import numeric as nm
from . import plots as pl
from . import training as tr
import argparse
import concurrent.futures
import copy
import glob
import json
import numpy as np
import os
import re
import sys
import time
import warnings


__version__ = fxn.__version__

sys.tracebacklimit = 0  # comment when debugging
warnings.formatwarning = fxn.custom_formatwarning

schema_version = 1
metrics_header = ['epoch', 'task', 'train_loss', 'val_metric', 'wall_seconds']

# Every accepted key, with its default; None defaults take any value of the listed types
default_config = {
    'schema_version': schema_version,
    'out_dir': 'attractr-out',
    'seeds': [1, 2, 3],
    'data': {'train': None, 'val': None, 'test': None, 'strict': False},
    'generator': {'grammar': None, 'seed': 0, 'n_train': 20000, 'n_val': 1000, 'n_test': 2000,
                  'construction': None},
    'vocab': {'rule': 'min_count', 'value': 1},
    'model': {'d': 50},
    'train': {'regime': 'single', 'task': 'agreement', 'task2': None, 'r': None, 'epochs': 20, 'epochs_b': None,
              'batch_size': 128, 'learning_rate': 0.05, 'shuffle': True, 'max_norm': None,
              'freeze_embeddings': False, 'record_wall_time': False, 'tag_source': 'supertag', 'min_tag_count': 10,
              'agreement_fraction': 1.0, 'tagging_fraction': 1.0, 'intervening_only': False},
    'eval': {'label': None, 'groups': None, 'templates': ['bock', 'wagers'], 'template_method': None,
             'probes': True},
    'trace': {'template': 'bock', 'frames': None, 'sentences': [], 'units': [0, 1]},
}

nullable_types = {
    'data.train': str, 'data.val': str, 'data.test': str, 'generator.grammar': str, 'generator.construction': str,
    'train.task2': str, 'train.r': (int, float), 'train.epochs_b': int, 'train.max_norm': (int, float),
    'eval.label': str, 'eval.groups': dict, 'eval.template_method': str, 'trace.frames': list,
}


def args():
    """
    args(): Obtains command line arguments which dictate the script's behaviour
    """

    # Help flag
    parser = argparse.ArgumentParser(
        description="attractr v" + str(__version__) + '\n' +
                    ": Train LSTMs to predict subject-verb number agreement, alone or alongside CCG supertagging "
                    "and language modelling, and measure how they cope with agreement attractors.\n"
                    "E.g. 'attractr gen -c config.json' then 'attractr train -c config.json'.")

    parser.add_argument('--version', action='version', version='attractr v' + str(__version__))

    commands = parser.add_subparsers(dest='command', metavar='{gen,train,eval,trace}')
    commands.required = True
    helps = {'gen': "Generate synthetic train/val/test corpora from a template grammar.",
             'train': "Train one model per seed with the configured regime.",
             'eval': "Evaluate checkpoints: accuracy by attractor count, baselines, probes, template suites.",
             'trace': "Trace per-word plural probabilities and unit activations of a trained model."}

    for command in ['gen', 'train', 'eval', 'trace']:
        sub = commands.add_parser(command, help=helps[command], description=helps[command])

        sub.add_argument('-c', '--config', required=False, type=str, default='',
                         help="Path to an experiment config JSON. Optional: defaults apply to any missing field.")

        sub.add_argument('-s', '--seed', required=False, type=str, default='',
                         help="Comma separated seed list, e.g. '1,2,3'. Overrides the config's seeds.")

        sub.add_argument('-o', '--out', required=False, type=str, default='',
                         help="Output directory. Overrides the config's out_dir.")

        sub.add_argument('-x', '--override', required=False, type=str, nargs='*', default=[],
                         help="Dotted key=value config overrides, values read as JSON where possible, "
                              "e.g. 'train.r=100 model.d=20'.")

        sub.add_argument('-sw', '--suppress_warnings', action='store_true', required=False, default=False,
                         help="Suppress warning messages.")

        if command in ['eval', 'trace']:
            sub.add_argument('-k', '--checkpoints', required=False, type=str, nargs='*', default=[],
                             help="Checkpoint files. Default: every seed's model.json under the output directory.")

    return parser.parse_args()


def check_config(config, reference=None, path=''):
    """
    Raise a ConfigError for any unknown key or badly typed value, naming its dotted path
    """
    reference = default_config if reference is None else reference
    if not isinstance(config, dict):
        raise fxn.ConfigError("Config section '" + (path or '<root>') + "' should be an object. ")

    for key in config:
        dotted = path + key
        if key not in reference:
            raise fxn.ConfigError("Unknown config key '" + dotted + "'. ")
        value, default = config[key], reference[key]
        if isinstance(default, dict):
            check_config(value, default, dotted + '.')
        elif default is None or dotted in nullable_types:
            if value is not None and not isinstance(value, nullable_types.get(dotted, object)):
                raise fxn.ConfigError("Config key '" + dotted + "' has the wrong type (" + type(value).__name__ +
                                      "). ")
        elif isinstance(default, bool):
            if not isinstance(value, bool):
                raise fxn.ConfigError("Config key '" + dotted + "' should be true or false. ")
        elif isinstance(default, float):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise fxn.ConfigError("Config key '" + dotted + "' should be a number. ")
        elif not isinstance(value, type(default)) or isinstance(value, bool) != isinstance(default, bool):
            raise fxn.ConfigError("Config key '" + dotted + "' should be of type " + type(default).__name__ + ". ")

    if path == '' and config.get('schema_version', schema_version) != schema_version:
        raise fxn.ConfigError("Unsupported config schema_version " + str(config.get('schema_version')) +
                              " (this version reads " + str(schema_version) + "). ")


def merge(base, update):
    out = copy.deepcopy(base)
    for key in update:
        if isinstance(out.get(key), dict) and isinstance(update[key], dict):
            out[key] = merge(out[key], update[key])
        else:
            out[key] = copy.deepcopy(update[key])
    return out


def parse_override(override):
    """
    :param override: 'dotted.key=value'
    :return: nested dict setting that one key
    """
    if '=' not in override:
        raise fxn.ConfigError("Override '" + override + "' should look like section.key=value. ")
    key, value = override.split('=', 1)
    try:
        value = json.loads(value)
    except ValueError:
        pass
    out = value
    for part in reversed(key.split('.')):
        out = {part: out}
    return out


def parse_seeds(seed_str):
    try:
        seeds = [int(x) for x in seed_str.split(',') if x.strip()]
    except ValueError:
        raise fxn.ConfigError("Seeds should be comma separated integers, not '" + seed_str + "'. ")
    if not seeds:
        raise fxn.ConfigError("No seeds given. ")
    return seeds


def load_config(input_args):
    """
    :param input_args: dict of parsed command line arguments
    :return: validated config dict (defaults, then the config file, then command line overrides)
    """
    config = {}
    if input_args.get('config'):
        config = fxn.read_json(input_args['config'], fxn.ConfigError)
        check_config(config)
    for override in input_args.get('override') or []:
        update = parse_override(override)
        check_config(update)
        config = merge(config, update)

    config = merge(default_config, config)
    if input_args.get('seed'):
        config['seeds'] = parse_seeds(input_args['seed'])
    if input_args.get('out'):
        config['out_dir'] = input_args['out']
    check_config(config)

    if not config['seeds'] or not all(isinstance(x, int) and not isinstance(x, bool) for x in config['seeds']):
        raise fxn.ConfigError("Config seeds should be a non-empty list of integers. ")
    if len(set(config['seeds'])) != len(config['seeds']):
        raise fxn.ConfigError("Config seeds contain duplicates. ")
    return config


def train_config(config, seed):
    """
    :return: TrainConfig for one seed (validates the training section)
    """
    section = config['train']
    return tr.TrainConfig(task=section['task'], task2=section['task2'], regime=section['regime'], r=section['r'],
                          epochs=section['epochs'], epochs_b=section['epochs_b'], batch_size=section['batch_size'],
                          learning_rate=section['learning_rate'], seed=seed, shuffle=section['shuffle'],
                          max_norm=section['max_norm'], freeze_embeddings=section['freeze_embeddings'],
                          record_wall_time=section['record_wall_time'])


def data_path(config, split):
    return config['data'][split] or os.path.join(config['out_dir'], 'data', split + '.jsonl')


def read_split(config, split, required=True):
    path = data_path(config, split)
    if not os.path.isfile(path):
        if required:
            raise fxn.DataError("Cannot find the " + split + " corpus at " + path + ". Run 'attractr gen' first, "
                                "or set data." + split + " in the config. ")
        return None
    return cp.read_jsonl(path, config['data']['strict'])


def seed_dir(config, seed):
    return os.path.join(config['out_dir'], 'seed-' + str(seed))


def thread_count():
    """
    :return: number of seeds to run at once, from ATTRACTR_THREADS (default 1)
    """
    value = os.environ.get('ATTRACTR_THREADS', '1')
    try:
        threads = int(value)
    except ValueError:
        raise fxn.ConfigError("ATTRACTR_THREADS should be a positive integer, not '" + value + "'. ")
    if threads < 1:
        raise fxn.ConfigError("ATTRACTR_THREADS should be a positive integer, not '" + value + "'. ")
    return threads


def run_seeds(function, seeds):
    """
    Run function(seed) for each seed, in parallel threads if ATTRACTR_THREADS > 1
    :return: results in seed order
    """
    threads = min(thread_count(), len(seeds))
    if threads == 1:
        return [function(seed) for seed in seeds]
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(function, seeds))


# gen

def split_stats(sentences):
    if not sentences:
        return {}
    return {'n': len(sentences),
            'attractor_histogram': cp.attractor_histogram(sentences),
            'label_balance': cp.label_balance(sentences)}


def cmd_gen(config):
    """
    Write train/val/test JSONL corpora and stats.json (attractor histogram and label balance per split)
    :return: dict of split: output path
    """
    section = config['generator']
    grammar_cfg = cp.load_grammar(section['grammar'])
    out_dir = os.path.join(config['out_dir'], 'data')

    paths, stats = {}, {}
    for split in ['train', 'val', 'test']:
        n = section['n_' + split]
        if n < 0:
            raise fxn.ConfigError("generator.n_" + split + " must be >= 0. ")
        sentences = cp.generate_synthetic(grammar_cfg, n, nm.make_rng(section['seed'], 'generator', split),
                                          section['construction'])
        paths[split] = os.path.join(out_dir, split + '.jsonl')
        cp.write_jsonl(paths[split], sentences)
        stats[split] = split_stats(sentences)
        print("Wrote " + str(n) + " " + split + " sentences to " + paths[split])

    fxn.write_json(os.path.join(out_dir, 'stats.json'), stats)
    return paths


# train

def needs_inventory(config):
    section = config['train']
    return 'supertag' in [section['task'], section['task2']]


def task_instances(task, sentences, vocab, inventory, config, seed):
    """
    :return: training (or validation) instances for one task, subset by the configured fraction when seed is given.
      With train.intervening_only every task sees only sentences with a noun between subject and verb.
    """
    section = config['train']
    if section['intervening_only']:
        sentences = cp.filter_intervening_noun(sentences)
    if task == 'agreement':
        instances = cp.extract_all(sentences, vocab)
        fraction = section['agreement_fraction']
    elif task == 'supertag':
        instances = ev.tagging_instances(sentences, vocab, inventory)
        fraction = section['tagging_fraction']
    else:
        instances = tr.make_lm_instances([cp.replace_rare(x, vocab) for x in sentences], vocab.eos_id)
        fraction = 1.0
    if seed is None:
        return instances
    return tr.take_fraction(instances, fraction, seed, task)


def model_config(config, vocab, inventory, heads):
    return md.ModelConfig(d=config['model']['d'], vocab_size=len(vocab),
                          n_supertags=len(inventory) if inventory else 0, heads=tuple(heads), vocab_hash=vocab.hash())


def write_metrics(path, metrics):
    fxn.write_csv(path, metrics_header, [[row[x] for x in metrics_header] for row in metrics])


def train_seed(config, seed, train, val, vocab, inventory, verbose):
    """
    Train one seed's model and write its checkpoint(s) and metrics CSV. A numeric failure leaves a
    FAILED marker in the seed directory and is returned, not raised, so other seeds still finish.
    :return: (seed, error or None)
    """
    cfg = train_config(config, seed)
    out_dir = seed_dir(config, seed)
    failed_marker = os.path.join(out_dir, 'FAILED')
    if os.path.isfile(failed_marker):
        os.remove(failed_marker)

    main_task, aux_task = cfg.task, cfg.task2
    train_main = task_instances(main_task, train, vocab, inventory, config, seed)
    val_main = task_instances(main_task, val, vocab, inventory, config, None) if val else None

    try:
        if cfg.regime == 'single':
            mcfg = model_config(config, vocab, inventory, [main_task])
            params, metrics = tr.train_single(main_task, train_main, cfg, mcfg, val_main, pad_id=vocab.pad_id,
                                              verbose=verbose)
        else:
            train_aux = task_instances(aux_task, train, vocab, inventory, config, seed)
            val_aux = task_instances(aux_task, val, vocab, inventory, config, None) if val else None
            if cfg.regime == 'joint':
                mcfg = model_config(config, vocab, inventory, [main_task, aux_task])
                params, metrics = tr.train_joint(main_task, aux_task, train_main, train_aux, cfg, mcfg, val_main,
                                                 val_aux, pad_id=vocab.pad_id, verbose=verbose)
            else:
                cfg_a = model_config(config, vocab, inventory, [aux_task])
                mcfg = model_config(config, vocab, inventory, [main_task])
                params, metrics, params_a = tr.pretrain_then_train(aux_task, main_task, train_aux, train_main, cfg,
                                                                   cfg_a, mcfg, val_aux, val_main,
                                                                   pad_id=vocab.pad_id, verbose=verbose)
                md.save_checkpoint(params_a, cfg_a, os.path.join(out_dir, 'pretrained.json'))

    except fxn.NumericError as err:
        fxn.make_parent(failed_marker)
        with open(failed_marker, 'w', encoding='utf-8') as out_file:
            out_file.write("Seed " + str(seed) + ": " + str(err) + '\n')
        warnings.warn("Seed " + str(seed) + " aborted: " + str(err))
        return seed, err

    md.save_checkpoint(params, mcfg, os.path.join(out_dir, 'model.json'))
    write_metrics(os.path.join(out_dir, 'metrics.csv'), metrics)
    return seed, None


def cmd_train(config):
    """
    Build the vocabulary (and tag inventory) from the training corpus, then train one model per seed
    :return: list of checkpoint paths
    """
    train = read_split(config, 'train')
    val = read_split(config, 'val', required=False)
    if not train:
        raise fxn.DataError("Training corpus is empty. ")

    vocab = cp.build_vocab(train, (config['vocab']['rule'], config['vocab']['value']))
    cp.save_vocab(vocab, os.path.join(config['out_dir'], 'vocab.json'))
    inventory = None
    if needs_inventory(config):
        inventory = cp.prune_supertags(train, config['train']['min_tag_count'], config['train']['tag_source'])
        cp.save_inventory(inventory, os.path.join(config['out_dir'], 'inventory.json'))
        print("Tag inventory: " + str(len(inventory)) + " tags, dummy fraction " +
              format(inventory.dummy_fraction, '.4f'))
    print("Vocabulary: " + str(len(vocab)) + " entries")

    train_config(config, config['seeds'][0])
    verbose = thread_count() == 1
    results = run_seeds(lambda seed: train_seed(config, seed, train, val, vocab, inventory, verbose),
                        config['seeds'])

    failures = [err for seed, err in results if err is not None]
    if failures:
        raise fxn.NumericError(str(len(failures)) + " of " + str(len(results)) + " seeds aborted: " +
                               '; '.join(str(x) for x in failures))
    return [os.path.join(seed_dir(config, seed), 'model.json') for seed in config['seeds']]


# eval

def find_checkpoints(config, given):
    """
    :return: {group label: [checkpoint paths]}
    """
    groups = config['eval']['groups']
    if given:
        return {config['eval']['label'] or config['train']['regime']: list(given)}
    if groups:
        out = {}
        for label in groups:
            paths = []
            for pattern in groups[label]:
                paths += sorted(glob.glob(pattern))
            out[label] = paths
        return out

    found = []
    for seed in config['seeds']:
        path = os.path.join(seed_dir(config, seed), 'model.json')
        if os.path.isfile(path):
            found.append(path)
    return {config['eval']['label'] or config['train']['regime']: found}


def load_vocab_for(config):
    path = os.path.join(config['out_dir'], 'vocab.json')
    if not os.path.isfile(path):
        raise fxn.DataError("Cannot find the vocabulary at " + path + ". Train first, or point out_dir at a run. ")
    return cp.load_vocab(path)


def load_models(paths, vocab):
    """
    :return: list of (params, ModelConfig), each checked against the vocabulary hash
    """
    models = []
    for path in paths:
        params, mcfg = md.load_checkpoint(path)
        if mcfg.vocab_hash != vocab.hash():
            raise fxn.CompatibilityError("Checkpoint " + path + " was trained with a different vocabulary. ")
        models.append((params, mcfg))
    return models


def evaluate_model(params, mcfg, test, test_instances, train, vocab, inventory, config, grammar_cfg):
    """
    :return: dict of this one model's scores
    """
    scores = {}
    if 'agreement' in mcfg.heads:
        scores.update(ev.eval_agreement(params, mcfg, test_instances, vocab.pad_id))
    if 'supertag' in mcfg.heads:
        if inventory is None:
            raise fxn.DataError("Model has a tagging head but no inventory.json was found. ")
        scores.update(ev.eval_supertag(params, mcfg, test, vocab, inventory, train, vocab.pad_id))
    if 'lm' in mcfg.heads:
        scores['perplexity'] = ev.eval_perplexity(params, mcfg, test, vocab, vocab.pad_id)
        if config['eval']['probes']:
            scores.update(ev.eval_lm_probes(params, mcfg, test, vocab, grammar_cfg))
    return scores


def summarise_group(per_run):
    """
    :param per_run: list of per-model score dicts
    :return: {score: summarise_runs(...)} for every scalar score, per bucket for attractor accuracies
    """
    out = {}
    keys = sorted(set(k for run in per_run for k in run))
    for key in keys:
        values = [run.get(key) for run in per_run]
        if key == 'accuracy_by_attractor':
            out[key] = {b: ev.summarise_runs([v[b]['accuracy'] for v in values if v]) for b in ev.attractor_buckets}
        elif all(isinstance(v, (int, float)) or v is None for v in values):
            out[key] = ev.summarise_runs(values)
    return out


def group_report(per_run, baselines, per_condition):
    summary = summarise_group(per_run)

    def mean_of(key):
        return summary[key]['mean'] if key in summary else None

    report = ev.EvalReport(overall_accuracy=mean_of('overall_accuracy'),
                           n_instances=per_run[0].get('n_instances', 0) if per_run else 0,
                           mixed_bucket_accuracy=mean_of('mixed_bucket_accuracy'),
                           mixed_bucket_n=per_run[0].get('mixed_bucket_n', 0) if per_run else 0,
                           baseline_accuracies=baselines,
                           supertag_accuracy=mean_of('supertag_accuracy'),
                           perplexity=mean_of('perplexity'),
                           probe_accuracy_lexical=mean_of('probe_accuracy_lexical'),
                           probe_accuracy_pos=mean_of('probe_accuracy_pos'),
                           per_condition=per_condition,
                           runs={'per_run': per_run, 'summary': summary})
    if 'accuracy_by_attractor' in summary:
        report.accuracy_by_attractor = {b: {'accuracy': summary['accuracy_by_attractor'][b]['mean'],
                                            'std': summary['accuracy_by_attractor'][b]['std'],
                                            'n': per_run[0]['accuracy_by_attractor'][b]['n']}
                                        for b in ev.attractor_buckets}
    if 'probe_accuracy_lexical' in summary:
        report.probe_details = {k: summary[k] for k in ['agreement_accuracy_same_preambles', 'n_probed',
                                                        'n_excluded_lexical'] if k in summary}
    return report


def safe_label(label):
    return re.sub(r'[^A-Za-z0-9_.+-]+', '_', label)


def cmd_eval(config, checkpoints):
    """
    Evaluate every checkpoint group on the test corpus and the template suites
    :return: {group label: EvalReport}
    """
    groups = find_checkpoints(config, checkpoints)
    if not any(groups.values()):
        raise fxn.ConfigError("No checkpoints to evaluate: pass --checkpoints, set eval.groups, or train first. ")
    for label in groups:
        if not groups[label]:
            raise fxn.ConfigError("Checkpoint group '" + label + "' matched no files. ")

    vocab = load_vocab_for(config)
    inventory_path = os.path.join(config['out_dir'], 'inventory.json')
    inventory = cp.load_inventory(inventory_path) if os.path.isfile(inventory_path) else None
    grammar_cfg = cp.load_grammar(config['generator']['grammar'])

    test = read_split(config, 'test')
    train = read_split(config, 'train', required=False)
    test_instances = cp.extract_all(test, vocab)

    baselines = {}
    if test_instances:
        baselines['last_noun'], scored, abstained = ev.baseline_last_noun_accuracy(test)
        baselines['last_noun_abstained'] = abstained
    if train:
        majority = ev.baseline_majority(cp.extract_all(train, vocab) or ['SG'])
        baselines['majority_label'] = majority
        baselines['majority'] = ev.baseline_majority_accuracy(majority, test_instances)

    suites = []
    for which in config['eval']['templates']:
        suites += ev.load_templates(which=which)

    eval_dir = os.path.join(config['out_dir'], 'eval')
    reports, conditions, attractors, probes = {}, {}, {}, {}
    for label in groups:
        models = load_models(groups[label], vocab)
        per_run = [evaluate_model(params, mcfg, test, test_instances, train, vocab, inventory, config, grammar_cfg)
                   for params, mcfg in models]
        scorable = all('agreement' in mcfg.heads or 'lm' in mcfg.heads for params, mcfg in models)
        per_condition = ev.eval_psycholinguistic(models, suites, vocab, config['eval']['template_method']) \
            if suites and scorable else {}
        reports[label] = group_report(per_run, baselines, per_condition)
        reports[label].write(os.path.join(eval_dir, safe_label(label)))
        print("Evaluated " + str(len(models)) + " " + label + " checkpoint(s): overall agreement accuracy " +
              str(reports[label].overall_accuracy))

        for suite in per_condition:
            conditions.setdefault(suite, {})[label] = per_condition[suite]
        summary = reports[label].runs['summary']
        if 'accuracy_by_attractor' in summary:
            attractors[label] = summary['accuracy_by_attractor']
        if 'probe_accuracy_lexical' in summary:
            probes[label] = {'lexical': (summary['probe_accuracy_lexical']['mean'],
                                         summary['probe_accuracy_lexical']['std']),
                             'pos': (summary['probe_accuracy_pos']['mean'], summary['probe_accuracy_pos']['std'])}
            if summary.get('agreement_accuracy_same_preambles', {}).get('mean') is not None:
                probes[label]['agreement'] = (summary['agreement_accuracy_same_preambles']['mean'],
                                              summary['agreement_accuracy_same_preambles']['std'])

    for suite in conditions:
        pl.plot_conditions(suite, conditions[suite], os.path.join(eval_dir, 'templates-' + suite + '.svg'))
    if attractors:
        pl.plot_attractors(attractors, os.path.join(eval_dir, 'attractors.svg'))
    if probes:
        pl.plot_probes(probes, os.path.join(eval_dir, 'probes.svg'))
    return reports


# trace

def parse_tagged(sentence_str):
    """
    :param sentence_str: 'word/TAG word/TAG ...'
    :return: Sentence (no agreement annotation)
    """
    words, tags = [], []
    for chunk in sentence_str.split():
        word, sep, tag = chunk.rpartition('/')
        if not sep or not word:
            raise fxn.ConfigError("Trace sentence token '" + chunk + "' should be word/TAG. ")
        words.append(word)
        tags.append(tag)
    return cp.Sentence(tokens=words, pos=tags)


def trace_sequences(config):
    """
    :return: {trace name: {condition: (words, ids-ready Sentence, truth number or None)}}
    """
    section = config['trace']
    out = {}
    suites = ev.load_templates(which=section['template'])
    wanted = section['frames']
    for suite in suites:
        if suite.name == 'embedded_verb':
            continue
        frames = [x for x in suite.frames if wanted is None or x.frame_id in wanted]
        if wanted is None:
            frames = frames[:1]
        for item in ev.expand_templates(ev.TemplateSuite(suite.name, frames)):
            key = suite.name + '-' + item.frame_id
            out.setdefault(key, {})[item.condition] = (list(item.tokens), item.sentence(), item.label)
    if wanted:
        found = set(x.split('-', 1)[1] for x in out)
        missing = [x for x in wanted if x not in found]
        if missing:
            raise fxn.ConfigError("Trace frames not found in the " + section['template'] + " templates: " +
                                  ', '.join(missing) + ". ")

    for i, sentence_str in enumerate(section['sentences'], start=1):
        sentence = parse_tagged(sentence_str)
        nouns = [fxn.noun_tags[x] for x in sentence.pos if x in fxn.noun_tags]
        out['sentence-' + str(i)] = {'input': (sentence.tokens, sentence, nouns[0] if nouns else None)}
    return out


def cmd_trace(config, checkpoints):
    """
    For one checkpoint: plural probability after every word and selected unit activations, for all four
    number configurations of each traced frame
    :return: list of written CSV paths
    """
    paths = checkpoints or [os.path.join(seed_dir(config, config['seeds'][0]), 'model.json')]
    vocab = load_vocab_for(config)
    params, mcfg = load_models(paths[:1], vocab)[0]
    if 'agreement' not in mcfg.heads:
        raise fxn.ConfigError("Tracing needs a model with an agreement head. ")
    units = config['trace']['units']
    bad = [x for x in units if not isinstance(x, int) or not 0 <= x < mcfg.d]
    if bad:
        raise fxn.ConfigError("Trace unit indices must lie in [0, " + str(mcfg.d) + "): " + str(bad))

    trace_dir = os.path.join(config['out_dir'], 'trace')
    written = []
    for name, variants in trace_sequences(config).items():
        tokens, p_plural, truth, hidden = {}, {}, {}, {}
        for condition, (words, sentence, number) in variants.items():
            p, h = md.plural_trajectory(params, mcfg, cp.replace_rare(sentence, vocab))
            tokens[condition] = words
            p_plural[condition] = [float(x) for x in p]
            truth[condition] = None if number is None else fxn.label_convention[number]
            hidden[condition] = np.asarray(h)
        written.append(pl.plot_trace(name, tokens, p_plural, truth,
                                     os.path.join(trace_dir, safe_label(name) + '.svg'))[1])
        if units:
            written.append(pl.plot_units(name, tokens, hidden, units,
                                         os.path.join(trace_dir, safe_label(name) + '-units.svg'))[1])
    print("Traced " + str(len(written)) + " outputs into " + trace_dir)
    return written


def run(input_args):
    """
    :param input_args: dict of parsed command line arguments
    :return: whatever the chosen command returns
    """
    if input_args.get('suppress_warnings'):
        warnings.filterwarnings('ignore')
    config = load_config(input_args)

    command = input_args['command']
    if command == 'gen':
        if input_args.get('seed'):
            config['generator']['seed'] = config['seeds'][0]
        return cmd_gen(config)
    elif command == 'train':
        return cmd_train(config)
    elif command == 'eval':
        return cmd_eval(config, input_args.get('checkpoints'))
    elif command == 'trace':
        return cmd_trace(config, input_args.get('checkpoints'))
    raise fxn.ConfigError("Unknown command '" + str(command) + "'. ")


def main():

    start = time.time()
    input_args = vars(args())
    try:
        run(input_args)
    except Exception as err:
        code = fxn.exit_code(err)
        if code == 1:
            raise
        print(type(err).__name__ + ': ' + str(err), file=sys.stderr)
        sys.exit(code)

    print("Took", str(round(time.time() - start, 2)), "seconds")


if __name__ == '__main__':
    main()

# -*- coding: utf-8 -*-

"""
attractrfunctions.py

Functions and constants shared by attractr and its related modules
"""

import csv
import gzip
import hashlib
import importlib.resources as importlib_resources
import io
import json
import os
import zlib

__version__ = '0.3.0'

data_files = importlib_resources.files("Data")
grammar_file = str(data_files / 'grammar.json')
example_config_file = str(data_files / 'example-config.json')
data_dir = os.path.dirname(grammar_file)
templates_dir = os.path.join(data_dir, 'templates')
template_files = {'bock': os.path.join(templates_dir, 'prepositional-relative.tsv'),
                  'wagers': os.path.join(templates_dir, 'object-relative.tsv')}


class ShapeError(ValueError):
    pass


class VocabularyError(ValueError):
    pass


class ConfigError(ValueError):
    pass


class LabelError(ValueError):
    pass


class EmptyBatchError(ValueError):
    pass


class UndefinedProbeError(ValueError):
    pass


class CompatibilityError(ValueError):
    pass


class NumericError(ArithmeticError):
    pass


class DataError(IOError):
    pass


class AnnotationError(DataError):
    pass


class TemplateError(DataError):
    pass


class CheckpointError(IOError):
    pass


class MalformedCheckpointError(CheckpointError):
    pass


class CheckpointVersionError(CheckpointError):
    pass


# CLI exit codes, checked in order (most specific first)
exit_codes = [(ConfigError, 2),
              (NumericError, 4),
              (DataError, 3),
              (CheckpointError, 3),
              (CompatibilityError, 3),
              (ShapeError, 3),
              (VocabularyError, 3),
              (LabelError, 3),
              (UndefinedProbeError, 3),
              (EmptyBatchError, 3)]


def custom_formatwarning(warning_msg, *args, **kwargs):
    """
    Function to make warnings.warn output just the warning text, not the underlying code
    See https://stackoverflow.com/questions/2187269/print-only-the-message-on-warnings
    """
    return str(warning_msg) + '\n'


def exit_code(err):
    """
    :param err: an exception raised while running a command
    :return: the process exit code for that class of failure (1 if unrecognised)
    """
    for err_type, code in exit_codes:
        if isinstance(err, err_type):
            return code
    return 1


def opener(in_file, mode='r'):
    """
    :param in_file: path to file to be opened
    :param mode: 'r' or 'w' (text), or 'rb'/'wb' (bytes)
    :return: the appropriate file opening command (open or gzip.open)
    """
    if 'b' in mode:
        return gzip.open(in_file, mode) if in_file.endswith('.gz') else open(in_file, mode)
    elif in_file.endswith('.gz'):
        return gzip.open(in_file, mode + 't', encoding='utf-8')
    else:
        return open(in_file, mode, encoding='utf-8', newline='')


def stream_key(name):
    """
    :param name: str naming a random stream (a tensor name, a task name)
    :return: stable 32 bit integer key for that name, identical on every platform
    """
    return zlib.crc32(name.encode('utf-8'))


def format_float(value):
    """
    :param value: a finite float
    :return: 17 significant digit decimal string that always reads back as a float (so -0.0 survives)
    """
    out_str = format(float(value), '.17g')
    if not any(x in out_str for x in '.en'):
        out_str += '.0'
    return out_str


def write_json(out_path, data):
    """
    Write a JSON document with sorted keys and a trailing newline, so reruns are byte-identical
    :param out_path: path to output file
    :param data: JSON-serialisable object
    """
    make_parent(out_path)
    with open(out_path, 'w', encoding='utf-8', newline='\n') as out_file:
        out_file.write(json.dumps(data, sort_keys=True, indent=1) + '\n')


def read_json(in_path, error_type=DataError):
    """
    :param in_path: path to a JSON file
    :param error_type: exception class to raise on an unreadable or unparseable file
    :return: the decoded object
    """
    if not os.path.isfile(in_path):
        raise error_type("Cannot find JSON file at this path: " + in_path + ". ")
    try:
        with open(in_path, 'r', encoding='utf-8') as in_file:
            return json.load(in_file)
    except (ValueError, UnicodeDecodeError) as err:
        raise error_type("Unable to parse JSON file " + in_path + ": " + str(err))


def write_csv(out_path, header, rows):
    """
    :param out_path: path to output csv
    :param header: list of column names
    :param rows: iterable of lists (floats are written at full precision)
    """
    make_parent(out_path)
    with open(out_path, 'w', encoding='utf-8', newline='') as out_file:
        out_file.write(csv_text(header, rows))


def csv_text(header, rows):
    """
    :return: csv document as a str, with '\n' line endings and repr-exact floats
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(x)) if isinstance(x, float) else x for x in row])
    return buffer.getvalue()


def make_parent(out_path):
    """
    Make sure the directory an output file is going into exists
    """
    parent = os.path.dirname(out_path)
    if parent:
        try:
            os.makedirs(parent, exist_ok=True)
        except OSError as err:
            raise DataError("Unable to create output directory " + parent + ": " + str(err))


def text_hash(items):
    """
    :param items: sequence of str
    :return: sha256 hex digest of the items joined by newlines (used to tie checkpoints to vocabularies)
    """
    return hashlib.sha256('\n'.join(items).encode('utf-8')).hexdigest()


def opposite(number):
    """
    :param number: 'SG' or 'PL'
    :return: the other one
    """
    return 'PL' if number == 'SG' else 'SG'


# Penn Treebank tag set, used for the POS fallback vocabulary entries
penn_tags = ['CC', 'CD', 'DT', 'EX', 'FW', 'IN', 'JJ', 'JJR', 'JJS', 'LS', 'MD',
             'NN', 'NNS', 'NNP', 'NNPS', 'PDT', 'POS', 'PRP', 'PRP$', 'RB', 'RBR', 'RBS', 'RP',
             'SYM', 'TO', 'UH', 'VB', 'VBD', 'VBG', 'VBN', 'VBP', 'VBZ', 'WDT', 'WP', 'WP$', 'WRB',
             '#', '$', '.', ',', ':', '(', ')', '``', "''", '-LRB-', '-RRB-', 'HYPH', 'NFP', 'ADD', 'AFX', 'XX']

noun_tags = {'NN': 'SG', 'NNP': 'SG', 'NNS': 'PL', 'NNPS': 'PL'}
verb_number_tags = {'VBZ': 'SG', 'VBP': 'PL'}
numbers = ['SG', 'PL']

# Label convention for the agreement sigmoid
label_convention = {'PL': 1, 'SG': 0}

pad_token = '<pad>'
eos_token = '<eos>'

tasks = ['agreement', 'supertag', 'lm']

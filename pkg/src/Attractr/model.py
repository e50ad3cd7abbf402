# -*- coding: utf-8 -*-

"""
model.py

The shared encoder (word embedding + single layer LSTM) and its task heads, with an exact hand-written
backward pass through time and the checkpoint file format.

Parameters are held in a plain dict of name: float64 array (ModelParams). LSTM gate blocks are stored
side by side in the order input, forget, output, candidate.
"""

from . import attractrfunctions as fxn
from . import numeric as nm
import dataclasses
import json
import numpy as np


checkpoint_version = 1
encoder_tensors = ['embedding', 'lstm_W', 'lstm_U', 'lstm_b']
head_tensors = {'agreement': ['agr_w', 'agr_b'],
                'supertag': ['st_W', 'st_b'],
                'lm': ['lm_W', 'lm_b']}
softmax_heads = {'supertag': ('st_W', 'st_b'),
                 'lm': ('lm_W', 'lm_b')}


@dataclasses.dataclass(frozen=True)
class ModelConfig:
    d: int
    vocab_size: int
    n_supertags: int = 0
    heads: tuple = ('agreement',)
    vocab_hash: str = ''

    def __post_init__(self):
        if self.d < 1:
            raise fxn.ConfigError("Model dimension d must be at least 1, not " + str(self.d) + ". ")
        if self.vocab_size < 2:
            raise fxn.ConfigError("Vocabulary size must be at least 2, not " + str(self.vocab_size) + ". ")
        if not self.heads:
            raise fxn.ConfigError("A model needs at least one task head. ")
        unknown = [str(x) for x in self.heads if x not in fxn.tasks]
        if unknown:
            raise fxn.ConfigError("Unknown head(s) requested: " + ', '.join(unknown) +
                                  ". Options are " + ', '.join(fxn.tasks) + ". ")
        # Canonical order, so equal configs compare (and serialise) equal
        object.__setattr__(self, 'heads', tuple(x for x in fxn.tasks if x in self.heads))
        if 'supertag' in self.heads and self.n_supertags < 1:
            raise fxn.ConfigError("A supertag head needs n_supertags >= 1. ")

    def to_dict(self):
        return {'d': self.d, 'vocab_size': self.vocab_size, 'n_supertags': self.n_supertags,
                'heads': list(self.heads), 'label_convention': dict(fxn.label_convention),
                'vocab_hash': self.vocab_hash}

    @classmethod
    def from_dict(cls, config_dict):
        return cls(d=int(config_dict['d']), vocab_size=int(config_dict['vocab_size']),
                   n_supertags=int(config_dict.get('n_supertags', 0)), heads=tuple(config_dict['heads']),
                   vocab_hash=config_dict.get('vocab_hash', ''))


@dataclasses.dataclass
class ForwardTrace:
    """
    Everything the backward pass needs from one (batched) run of the encoder.
    Arrays are batch x time (x units); a single sentence is a batch of one.
    """
    tokens: np.ndarray
    mask: np.ndarray
    x: np.ndarray
    z: np.ndarray
    gates: np.ndarray
    c: np.ndarray
    h: np.ndarray

    def __len__(self):
        return self.tokens.shape[1]


def tensor_shapes(cfg):
    """
    :param cfg: ModelConfig
    :return: dict of tensor name: shape, for every trainable tensor the config implies
    """
    d, v = cfg.d, cfg.vocab_size
    shapes = {'embedding': (v, d), 'lstm_W': (d, 4 * d), 'lstm_U': (d, 4 * d), 'lstm_b': (4 * d,)}
    if 'agreement' in cfg.heads:
        shapes.update({'agr_w': (d,), 'agr_b': (1,)})
    if 'supertag' in cfg.heads:
        shapes.update({'st_W': (d, cfg.n_supertags), 'st_b': (cfg.n_supertags,)})
    if 'lm' in cfg.heads:
        shapes.update({'lm_W': (d, v), 'lm_b': (v,)})
    return shapes


def glorot_bound(name, cfg):
    """
    :return: a = sqrt(6 / (fan_in + fan_out)) for a weight tensor (LSTM gate blocks count as d x d each)
    """
    shape = tensor_shapes(cfg)[name]
    if name in ['lstm_W', 'lstm_U']:
        fan_in, fan_out = cfg.d, cfg.d
    elif len(shape) == 1:
        fan_in, fan_out = shape[0], 1
    else:
        fan_in, fan_out = shape
    return np.sqrt(6.0 / (fan_in + fan_out))


def init_params(cfg, seed):
    """
    :param cfg: ModelConfig
    :param seed: integer seed; every tensor draws from its own named stream, so adding or dropping a head
      never changes the values of the other tensors
    :return: ModelParams dict
    """
    params = {}
    for name, shape in tensor_shapes(cfg).items():
        if name in ['lstm_b', 'agr_b', 'st_b', 'lm_b']:
            params[name] = np.zeros(shape)
        else:
            a = glorot_bound(name, cfg)
            params[name] = nm.make_rng(seed, 'init', name).uniform(-a, a, size=shape)

    # Forget gate starts open
    params['lstm_b'][cfg.d:2 * cfg.d] = 1.0
    return params


def check_params(params, cfg):
    """
    Raise a ShapeError naming the first tensor that is missing or doesn't match the config
    """
    for name, shape in tensor_shapes(cfg).items():
        if name not in params:
            raise fxn.ShapeError("Tensor '" + name + "' is missing from the parameters. ")
        if params[name].shape != shape:
            raise fxn.ShapeError("Tensor '" + name + "' has shape " + str(params[name].shape) +
                                 ", expected " + str(shape) + ". ")


def pad_sequences(sequences, pad_id):
    """
    :param sequences: list of token id sequences (each non-empty)
    :param pad_id: id used to fill positions past the end of a sequence
    :return: token matrix (batch x max_len), lengths vector, float mask matrix
    """
    lengths = np.array([len(x) for x in sequences], dtype=np.int64)
    if len(sequences) == 0 or lengths.min() < 1:
        raise fxn.ShapeError("Cannot pad an empty batch or a batch containing an empty sequence. ")
    tokens = np.full((len(sequences), int(lengths.max())), pad_id, dtype=np.int64)
    for b, seq in enumerate(sequences):
        tokens[b, :len(seq)] = seq
    mask = (np.arange(tokens.shape[1])[None, :] < lengths[:, None]).astype(np.float64)
    return tokens, lengths, mask


def encode(params, cfg, token_ids, mask=None):
    """
    Run the LSTM over one sequence (1D) or a right-padded batch (2D): gates i, f, o = sigmoid, g = tanh,
    c_t = f*c_{t-1} + i*g, h_t = o*tanh(c_t), starting from h_0 = c_0 = 0
    :param params: ModelParams
    :param cfg: ModelConfig
    :param token_ids: sequence of ids, or batch x time matrix
    :param mask: optional batch x time float mask (1 at real tokens)
    :return: ForwardTrace
    """
    tokens = np.asarray(token_ids, dtype=np.int64)
    if tokens.ndim == 1:
        tokens = tokens[None, :]
    if tokens.ndim != 2 or tokens.shape[1] == 0 or tokens.shape[0] == 0:
        raise fxn.ShapeError("Encoder input must be a non-empty sequence, got shape " + str(tokens.shape) + ". ")
    if mask is None:
        mask = np.ones(tokens.shape)

    bad = np.argwhere((tokens < 0) | (tokens >= cfg.vocab_size))
    if len(bad):
        b, t = bad[0]
        raise fxn.VocabularyError("Token id " + str(tokens[b, t]) + " at position " + str(t) +
                                  (" of sequence " + str(b) if tokens.shape[0] > 1 else '') +
                                  " is outside the vocabulary (size " + str(cfg.vocab_size) + "). ")

    d = cfg.d
    n_batch, n_steps = tokens.shape
    W, U, bias = params['lstm_W'], params['lstm_U'], params['lstm_b']

    x = params['embedding'][tokens]
    z = np.zeros((n_batch, n_steps, 4 * d))
    gates = np.zeros((n_batch, n_steps, 4 * d))
    c = np.zeros((n_batch, n_steps, d))
    h = np.zeros((n_batch, n_steps, d))

    h_prev = np.zeros((n_batch, d))
    c_prev = np.zeros((n_batch, d))
    for t in range(n_steps):
        z[:, t] = x[:, t] @ W + h_prev @ U + bias
        gates[:, t, :3 * d] = nm.sigmoid(z[:, t, :3 * d])
        gates[:, t, 3 * d:] = np.tanh(z[:, t, 3 * d:])
        i, f, o, g = np.split(gates[:, t], 4, axis=1)
        c[:, t] = f * c_prev + i * g
        h[:, t] = o * np.tanh(c[:, t])
        h_prev, c_prev = h[:, t], c[:, t]

    return ForwardTrace(tokens=tokens, mask=np.asarray(mask, dtype=np.float64), x=x, z=z, gates=gates, c=c, h=h)


def backward(params, cfg, trace, output_grads):
    """
    Backpropagation through time for the encoder
    :param params: ModelParams
    :param cfg: ModelConfig
    :param trace: ForwardTrace from encode()
    :param output_grads: dL/dh_t, same shape as trace.h (zeros wherever nothing was read out)
    :return: dict of gradients for the encoder tensors (embedding rows of every token touched)
    """
    output_grads = np.asarray(output_grads, dtype=np.float64)
    if output_grads.shape != trace.h.shape:
        raise fxn.ShapeError("Output gradients of shape " + str(output_grads.shape) +
                             " do not align with the trace hidden states " + str(trace.h.shape) + ". ")

    d = cfg.d
    W, U = params['lstm_W'], params['lstm_U']
    n_batch, n_steps = trace.tokens.shape

    dW = np.zeros_like(W)
    dU = np.zeros_like(U)
    db = np.zeros(4 * d)
    dx = np.zeros_like(trace.x)
    dz = np.zeros((n_batch, 4 * d))

    dh_next = np.zeros((n_batch, d))
    dc_next = np.zeros((n_batch, d))
    zeros = np.zeros((n_batch, d))
    for t in reversed(range(n_steps)):
        i, f, o, g = np.split(trace.gates[:, t], 4, axis=1)
        c_prev = trace.c[:, t - 1] if t > 0 else zeros
        h_prev = trace.h[:, t - 1] if t > 0 else zeros
        tanh_c = np.tanh(trace.c[:, t])

        dh = output_grads[:, t] + dh_next
        dc = dc_next + dh * o * (1.0 - tanh_c ** 2)

        dz[:, :d] = dc * g * i * (1.0 - i)
        dz[:, d:2 * d] = dc * c_prev * f * (1.0 - f)
        dz[:, 2 * d:3 * d] = dh * tanh_c * o * (1.0 - o)
        dz[:, 3 * d:] = dc * i * (1.0 - g ** 2)

        dW += trace.x[:, t].T @ dz
        dU += h_prev.T @ dz
        db += dz.sum(axis=0)
        dx[:, t] = dz @ W.T

        dh_next = dz @ U.T
        dc_next = dc * f

    d_embedding = np.zeros_like(params['embedding'])
    np.add.at(d_embedding, trace.tokens, dx)

    return {'embedding': d_embedding, 'lstm_W': dW, 'lstm_U': dU, 'lstm_b': db}


def require_head(params, which):
    """
    Raise a ConfigError if the named head isn't part of this model
    """
    for name in head_tensors[which]:
        if name not in params:
            raise fxn.ConfigError("This model has no " + which + " head. ")


def agreement_logit(params, h):
    require_head(params, 'agreement')
    return np.asarray(h) @ params['agr_w'] + params['agr_b'][0]


def head_agreement(params, h_last):
    """
    :param params: ModelParams with an agreement head
    :param h_last: hidden state at the final preamble token (vector, or batch x d)
    :return: probability that the verb is PLURAL (label convention PL = 1, SG = 0)
    """
    return nm.sigmoid(agreement_logit(params, h_last))


def head_logits(params, h, which):
    """
    :param which: 'supertag' or 'lm'
    :return: pre-softmax scores over the tag inventory or the vocabulary
    """
    if which not in softmax_heads:
        raise fxn.ConfigError("Unknown softmax head '" + str(which) + "'. ")
    require_head(params, which)
    weights, bias = softmax_heads[which]
    return np.asarray(h) @ params[weights] + params[bias]


def head_softmax(params, h, which):
    """
    :param params: ModelParams
    :param h: hidden state(s), last axis d
    :param which: 'supertag' or 'lm'
    :return: probability distribution(s) over supertags or words
    """
    return nm.softmax(head_logits(params, h, which))


def last_states(trace, lengths):
    """
    :return: batch x d hidden states at each sequence's final real token
    """
    return trace.h[np.arange(trace.h.shape[0]), np.asarray(lengths) - 1]


def predict_plural(params, cfg, preambles, pad_id=0, batch_size=256):
    """
    :param preambles: list of token id sequences
    :return: array of plural probabilities, one per preamble
    """
    out = []
    for start in range(0, len(preambles), batch_size):
        chunk = preambles[start:start + batch_size]
        tokens, lengths, mask = pad_sequences(chunk, pad_id)
        trace = encode(params, cfg, tokens, mask)
        out.append(head_agreement(params, last_states(trace, lengths)))
    return np.concatenate(out) if out else np.zeros(0)


def plural_trajectory(params, cfg, token_ids):
    """
    :return: (plural probability after each word, hidden state matrix time x d) for one sequence
    """
    trace = encode(params, cfg, token_ids)
    return np.atleast_1d(head_agreement(params, trace.h[0])), trace.h[0]


def transfer_encoder(source, target):
    """
    Seed a fresh model with an already trained encoder
    :param source: ModelParams trained on the first task
    :param target: freshly initialised ModelParams for the second task
    :return: new ModelParams: encoder tensors copied exactly from source, head tensors from target untouched
    """
    for name in encoder_tensors:
        if source[name].shape != target[name].shape:
            raise fxn.ShapeError("Cannot transfer '" + name + "': source shape " + str(source[name].shape) +
                                 " does not match target shape " + str(target[name].shape) + ". ")
    out_params = {name: np.array(target[name], copy=True) for name in target}
    for name in encoder_tensors:
        out_params[name] = np.array(source[name], copy=True)
    return out_params


def save_checkpoint(params, cfg, path):
    """
    Write ModelParams as a versioned JSON document, floats at 17 significant digits (bit-exact on reload)
    :param params: ModelParams
    :param cfg: ModelConfig
    :param path: output file path
    """
    check_params(params, cfg)
    bad = nm.all_finite(params)
    if bad:
        raise fxn.NumericError("Refusing to save a checkpoint: tensor '" + bad + "' has non-finite values. ")

    tensor_lines = []
    for name in sorted(tensor_shapes(cfg)):
        values = ', '.join(fxn.format_float(x) for x in params[name].reshape(-1))
        tensor_lines.append('  ' + json.dumps(name) + ': {"shape": ' + json.dumps(list(params[name].shape)) +
                            ', "data": [' + values + ']}')

    out_str = '{\n "format_version": ' + str(checkpoint_version) + ',\n' + \
              ' "config": ' + json.dumps(cfg.to_dict(), sort_keys=True) + ',\n' + \
              ' "tensors": {\n' + ',\n'.join(tensor_lines) + '\n }\n}\n'

    fxn.make_parent(path)
    with open(path, 'w', encoding='utf-8', newline='\n') as out_file:
        out_file.write(out_str)


def load_checkpoint(path):
    """
    :param path: checkpoint file written by save_checkpoint
    :return: (ModelParams, ModelConfig)
    """
    try:
        with open(path, 'r', encoding='utf-8') as in_file:
            document = json.load(in_file)
    except FileNotFoundError:
        raise fxn.MalformedCheckpointError("No checkpoint found at " + path + ". ")
    except (ValueError, UnicodeDecodeError) as err:
        raise fxn.MalformedCheckpointError("Checkpoint " + path + " is not a valid document: " + str(err))

    if not isinstance(document, dict) or not all(x in document for x in ['format_version', 'config', 'tensors']):
        raise fxn.MalformedCheckpointError("Checkpoint " + path + " lacks format_version/config/tensors fields. ")

    if document['format_version'] != checkpoint_version:
        raise fxn.CheckpointVersionError("Checkpoint " + path + " has format version " +
                                         str(document['format_version']) + "; only version " +
                                         str(checkpoint_version) + " is supported. ")

    try:
        config_dict = document['config']
        if config_dict.get('label_convention', fxn.label_convention) != fxn.label_convention:
            raise fxn.MalformedCheckpointError("Checkpoint " + path + " uses an unexpected label convention: " +
                                               str(config_dict['label_convention']))
        cfg = ModelConfig.from_dict(config_dict)
    except (KeyError, TypeError, AttributeError, fxn.ConfigError) as err:
        raise fxn.MalformedCheckpointError("Checkpoint " + path + " has an invalid config: " + str(err))

    expected = tensor_shapes(cfg)
    tensors = document['tensors']
    if not isinstance(tensors, dict):
        raise fxn.MalformedCheckpointError("Checkpoint " + path + " tensors field is not a map. ")
    extra = [x for x in tensors if x not in expected]
    if extra:
        raise fxn.MalformedCheckpointError("Checkpoint " + path + " has unexpected tensors: " + ', '.join(extra))

    params = {}
    for name, shape in expected.items():
        if name not in tensors:
            raise fxn.MalformedCheckpointError("Checkpoint " + path + " is missing tensor '" + name + "'. ")
        try:
            stored_shape = tuple(int(x) for x in tensors[name]['shape'])
            data = np.array(tensors[name]['data'], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as err:
            raise fxn.MalformedCheckpointError("Tensor '" + name + "' in " + path + " is malformed: " + str(err))
        if stored_shape != shape:
            raise fxn.ShapeError("Tensor '" + name + "' in " + path + " has shape " + str(stored_shape) +
                                 " but the config implies " + str(shape) + ". ")
        if data.ndim != 1 or data.size != int(np.prod(shape)):
            raise fxn.ShapeError("Tensor '" + name + "' in " + path + " holds " + str(data.size) +
                                 " values, expected " + str(int(np.prod(shape))) + ". ")
        params[name] = data.reshape(shape)

    return params, cfg

# -*- coding: utf-8 -*-

"""
numeric.py

Dense float64 maths used by the model: matrix product with shape checks, stable softmax/sigmoid,
seeded random streams and a central-difference gradient checker for the hand-written backward passes.

Random streams are numpy PCG64 generators (128 bit LCG state, XSL-RR output permutation) seeded
through SeedSequence, so the same seed gives the same draws on every platform.
"""

from . import attractrfunctions as fxn
import numpy as np


def make_rng(seed, *streams):
    """
    :param seed: integer seed
    :param streams: optional extra str/int keys, giving an independent stream per key
    :return: numpy Generator; two calls with the same arguments give identical draw sequences
    """
    keys = [int(seed)] + [fxn.stream_key(x) if isinstance(x, str) else int(x) for x in streams]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(keys)))


def matmul(a, b):
    """
    :param a: 2D float array (n x k)
    :param b: 2D float array (k x m)
    :return: the n x m matrix product
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise fxn.ShapeError("Cannot multiply matrices of shape " + str(a.shape) + " and " + str(b.shape) + ". ")
    return a @ b


def softmax(v):
    """
    :param v: float array, normalised along its last axis
    :return: probabilities along the last axis (max-subtracted before exponentiation)
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim == 0 or v.shape[-1] == 0:
        raise fxn.ShapeError("Cannot take the softmax of an empty vector. ")
    shifted = v - np.max(v, axis=-1, keepdims=True)
    exps = np.exp(shifted)
    return exps / np.sum(exps, axis=-1, keepdims=True)


def log_softmax(v):
    """
    :param v: float array, normalised along its last axis
    :return: log probabilities computed directly (never log(0))
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim == 0 or v.shape[-1] == 0:
        raise fxn.ShapeError("Cannot take the log softmax of an empty vector. ")
    shifted = v - np.max(v, axis=-1, keepdims=True)
    return shifted - np.log(np.sum(np.exp(shifted), axis=-1, keepdims=True))


def sigmoid(x):
    """
    :param x: scalar or array
    :return: 1 / (1 + e^-x), saturating without overflow at extreme x
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.exp(-np.logaddexp(0.0, -x))
    return float(out) if out.ndim == 0 else out


def log_sigmoid(x):
    """
    :return: log(sigmoid(x)), stable for large |x|
    """
    return -np.logaddexp(0.0, -np.asarray(x, dtype=np.float64))


def all_finite(tensors):
    """
    :param tensors: dict of name: array
    :return: name of the first tensor with a NaN/Inf entry, or '' if all are finite
    """
    for name in tensors:
        if not np.all(np.isfinite(tensors[name])):
            return name
    return ''


def grad_check(loss_fn, grads_fn, params, eps=1e-5, floor=1e-8):
    """
    Compare analytic gradients to central differences (f(θ+eps) - f(θ-eps)) / (2 eps), entry by entry
    :param loss_fn: function taking a params dict, returning a scalar loss
    :param grads_fn: function taking a params dict, returning a dict of gradients with the same names/shapes
    :param params: dict of name: float64 array, the probe point (restored on return)
    :param eps: finite difference step, within [1e-6, 1e-3]
    :param floor: smallest denominator of the relative error |a - n| / max(|a|, |n|, floor)
    :return: dict with max_rel_error, the name/index where it occurred, max_abs_error and per-tensor maxima
    """
    if not 1e-6 <= eps <= 1e-3:
        raise fxn.ConfigError("Gradient check step must lie in [1e-6, 1e-3], not " + str(eps) + ". ")

    base = loss_fn(params)
    if not np.isfinite(base):
        raise fxn.NumericError("Loss is not finite at the gradient check probe point. ")

    analytic = grads_fn(params)
    report = {'max_rel_error': 0.0, 'max_abs_error': 0.0, 'worst': None, 'per_tensor': {}}

    for name in sorted(params):
        tensor = params[name]
        if name not in analytic:
            raise fxn.ShapeError("No analytic gradient returned for tensor '" + name + "'. ")
        grad = np.asarray(analytic[name], dtype=np.float64)
        if grad.shape != tensor.shape:
            raise fxn.ShapeError("Gradient for '" + name + "' has shape " + str(grad.shape) +
                                 " but the tensor has shape " + str(tensor.shape) + ". ")

        worst_here = 0.0
        for i in range(tensor.size):
            idx = np.unravel_index(i, tensor.shape)
            keep = tensor[idx]
            tensor[idx] = keep + eps
            plus = loss_fn(params)
            tensor[idx] = keep - eps
            minus = loss_fn(params)
            tensor[idx] = keep
            numeric = (plus - minus) / (2 * eps)

            abs_err = abs(numeric - grad[idx])
            rel_err = abs_err / max(abs(numeric), abs(grad[idx]), floor)
            report['max_abs_error'] = max(report['max_abs_error'], abs_err)
            worst_here = max(worst_here, rel_err)
            if rel_err > report['max_rel_error']:
                report['max_rel_error'] = rel_err
                report['worst'] = (name, i)

        report['per_tensor'][name] = worst_here

    return report

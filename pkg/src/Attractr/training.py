# -*- coding: utf-8 -*-

"""
training.py

Task losses (agreement, supertagging, language modelling), the weighted joint loss, AdaGrad, batching,
and the three training regimes: single task, joint, and pre-train then train.
"""

from . import attractrfunctions as fxn
from . import model as md
from . import numeric as nm
import dataclasses
import numpy as np
import time
import warnings

warnings.formatwarning = fxn.custom_formatwarning


regimes = ['single', 'joint', 'pretrain']
adagrad_epsilon = 1e-8


@dataclasses.dataclass(frozen=True)
class TrainConfig:
    task: str = 'agreement'
    task2: str = None
    regime: str = 'single'
    r: float = None
    epochs: int = 20
    epochs_b: int = None
    batch_size: int = 128
    learning_rate: float = 0.05
    seed: int = 1
    shuffle: bool = True
    max_norm: float = None
    freeze_embeddings: bool = False
    record_wall_time: bool = False

    def __post_init__(self):
        if self.regime not in regimes:
            raise fxn.ConfigError("Unknown training regime '" + str(self.regime) + "'. Options are " +
                                  ', '.join(regimes) + ". ")
        for task in [self.task, self.task2]:
            if task is not None and task not in fxn.tasks:
                raise fxn.ConfigError("Unknown task '" + str(task) + "'. Options are " + ', '.join(fxn.tasks) + ". ")
        if self.regime != 'single' and (self.task2 is None or self.task2 == self.task):
            raise fxn.ConfigError("The " + self.regime + " regime needs a second, different task (task2). ")
        if self.regime == 'joint' and self.r is None:
            raise fxn.ConfigError("Joint training needs the task 2 weighting ratio r. ")
        if self.r is not None and self.r < 0:
            raise fxn.ConfigError("Weighting ratio r must be >= 0, not " + str(self.r) + ". ")
        if self.epochs < 1:
            raise fxn.ConfigError("Training needs at least one epoch, not " + str(self.epochs) + ". ")
        if self.epochs_b is not None and self.epochs_b < 0:
            raise fxn.ConfigError("Second phase epochs must be >= 0, not " + str(self.epochs_b) + ". ")
        if self.batch_size < 1:
            raise fxn.ConfigError("Batch size must be at least 1, not " + str(self.batch_size) + ". ")
        if self.learning_rate <= 0:
            raise fxn.ConfigError("Learning rate must be positive, not " + str(self.learning_rate) + ". ")
        if self.max_norm is not None and self.max_norm <= 0:
            raise fxn.ConfigError("max_norm must be positive if given, not " + str(self.max_norm) + ". ")


@dataclasses.dataclass
class AdaGradState:
    G: dict
    epsilon: float = adagrad_epsilon


@dataclasses.dataclass(frozen=True)
class SequenceInstance:
    """
    Token ids plus one label per position: tag ids for tagging, next-token ids for language modelling
    """
    tokens: tuple
    labels: tuple


@dataclasses.dataclass
class TaskBatch:
    task: str
    tokens: np.ndarray
    lengths: np.ndarray
    mask: np.ndarray
    labels: np.ndarray

    def __len__(self):
        return self.tokens.shape[0]


def make_lm_instances(id_sequences, eos_id):
    """
    :param id_sequences: list of token id sequences (whole sentences)
    :param eos_id: end of sentence id, the target after the last word
    :return: SequenceInstances whose labels are the inputs shifted by one
    """
    return [SequenceInstance(tuple(x), tuple(x[1:]) + (eos_id,)) for x in id_sequences if len(x)]


def make_tagging_instances(id_sequences, tag_id_sequences):
    """
    :return: SequenceInstances pairing each token sequence with its tag ids
    """
    out = []
    for ids, tags in zip(id_sequences, tag_id_sequences):
        if len(ids) != len(tags):
            raise fxn.ShapeError("Token and tag sequences differ in length (" + str(len(ids)) + " vs " +
                                 str(len(tags)) + "). ")
        if len(ids):
            out.append(SequenceInstance(tuple(ids), tuple(tags)))
    return out


def take_fraction(instances, fraction, seed, name):
    """
    :param fraction: share of the instances to keep, in (0, 1]
    :param name: stream name, so each task draws its own subset
    :return: a seeded random subset of that size (in corpus order); the full list when fraction is 1
    """
    if not 0 < fraction <= 1:
        raise fxn.ConfigError("Training data fraction must lie in (0, 1], not " + str(fraction) + ". ")
    if fraction == 1:
        return list(instances)
    keep = max(1, int(round(len(instances) * fraction)))
    chosen = sorted(nm.make_rng(seed, 'subset', name).permutation(len(instances))[:keep])
    return [instances[i] for i in chosen]


def instance_task(instance):
    """
    :return: 'agreement' for agreement instances, otherwise None (sequence instances serve two tasks)
    """
    return 'agreement' if hasattr(instance, 'preamble') else None


def make_batches(instances, batch_size, pad_id, rng=None, shuffle=True, task=None):
    """
    :param instances: AgreementInstances or SequenceInstances
    :param batch_size: maximum batch size
    :param pad_id: id used for padding (masked out of every loss)
    :param rng: numpy Generator (required when shuffling)
    :param shuffle: shuffle the order (one permutation per call) or keep corpus order
    :param task: 'agreement', 'supertag' or 'lm' (inferred for agreement instances)
    :return: list of TaskBatches covering every instance exactly once
    """
    if not instances:
        raise fxn.EmptyBatchError("Cannot make batches from an empty set of instances. ")
    task = task or instance_task(instances[0])
    if task not in fxn.tasks:
        raise fxn.ConfigError("Cannot infer the task for these instances - pass task explicitly. ")

    if shuffle:
        if rng is None:
            raise fxn.ConfigError("Shuffled batching needs a random generator. ")
        order = rng.permutation(len(instances))
    else:
        order = np.arange(len(instances))

    batches = []
    for start in range(0, len(order), batch_size):
        chunk = [instances[i] for i in order[start:start + batch_size]]
        if task == 'agreement':
            tokens, lengths, mask = md.pad_sequences([x.preamble for x in chunk], pad_id)
            labels = np.array([fxn.label_convention[x.label] for x in chunk], dtype=np.float64)
        else:
            tokens, lengths, mask = md.pad_sequences([x.tokens for x in chunk], pad_id)
            labels = np.zeros(tokens.shape, dtype=np.int64)
            for b, x in enumerate(chunk):
                labels[b, :len(x.labels)] = x.labels
        batches.append(TaskBatch(task, tokens, lengths, mask, labels))
    return batches


def agreement_nll(logits, labels):
    """
    :param logits: pre-sigmoid agreement scores
    :param labels: 1 for PL, 0 for SG
    :return: mean negative log-probability of the correct number, and its gradient w.r.t. the logits
    """
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    log_p_correct = labels * nm.log_sigmoid(logits) + (1.0 - labels) * nm.log_sigmoid(-logits)
    loss = -float(np.mean(log_p_correct))
    d_logits = (nm.sigmoid(logits) - labels) / len(labels)
    return loss, d_logits


def softmax_nll(logits, labels, mask):
    """
    :param logits: batch x time x classes
    :param labels: batch x time class ids
    :param mask: batch x time, 1 where a label counts
    :return: token-averaged negative log-likelihood (sum over all masked positions / their number),
      and the gradient w.r.t. the logits
    """
    n_tokens = float(np.sum(mask))
    if n_tokens == 0:
        raise fxn.EmptyBatchError("No labelled positions in this batch. ")
    log_probs = nm.log_softmax(logits)
    picked = np.take_along_axis(log_probs, labels[..., None], axis=-1)[..., 0]
    loss = -float(np.sum(picked * mask)) / n_tokens

    d_logits = np.exp(log_probs)
    np.put_along_axis(d_logits, labels[..., None], np.take_along_axis(d_logits, labels[..., None], axis=-1) - 1.0,
                      axis=-1)
    d_logits *= (mask / n_tokens)[..., None]
    return loss, d_logits


def loss_agreement(params, cfg, batch):
    """
    L_agr = -(1/|S|) sum_s log q(num(s) | preamble of s)
    :return: (loss, gradient dict for the encoder and agreement head)
    """
    if batch.task != 'agreement' or len(batch) == 0:
        raise fxn.EmptyBatchError("Batch carries no agreement labels. ")
    trace = md.encode(params, cfg, batch.tokens, batch.mask)
    h_last = md.last_states(trace, batch.lengths)
    loss, d_logits = agreement_nll(md.agreement_logit(params, h_last), batch.labels)

    d_h = np.zeros_like(trace.h)
    d_h[np.arange(len(batch)), batch.lengths - 1] = np.outer(d_logits, params['agr_w'])

    grads = md.backward(params, cfg, trace, d_h)
    grads['agr_w'] = h_last.T @ d_logits
    grads['agr_b'] = np.array([np.sum(d_logits)])
    return loss, grads


def sequence_loss(params, cfg, batch, which):
    """
    Per-token cross entropy for the supertag or LM head, averaged over every real token in the batch
    :return: (loss, gradient dict for the encoder and that head)
    """
    n_classes = cfg.n_supertags if which == 'supertag' else cfg.vocab_size
    real = batch.mask > 0
    if np.any(batch.labels[real] >= n_classes) or np.any(batch.labels[real] < 0):
        raise fxn.LabelError("Label id outside the " + which + " inventory (size " + str(n_classes) + "). ")

    trace = md.encode(params, cfg, batch.tokens, batch.mask)
    logits = md.head_logits(params, trace.h, which)
    loss, d_logits = softmax_nll(logits, batch.labels, batch.mask)

    weights, bias = md.softmax_heads[which]
    d_h = d_logits @ params[weights].T
    grads = md.backward(params, cfg, trace, d_h)
    grads[weights] = np.einsum('btd,btk->dk', trace.h, d_logits)
    grads[bias] = d_logits.sum(axis=(0, 1))
    return loss, grads


def loss_supertag(params, cfg, batch):
    """
    L_ST = -(1 / sum |s|) sum_s sum_j log r(tag(w_j) | s up to w_j)
    """
    return sequence_loss(params, cfg, batch, 'supertag')


def loss_lm(params, cfg, batch):
    """
    Mean negative log-likelihood over all predicted tokens (natural log; see lm_loss_bits for base 2)
    """
    return sequence_loss(params, cfg, batch, 'lm')


def lm_loss_bits(loss):
    """
    :return: a natural-log loss converted to bits, so perplexity = 2 ** lm_loss_bits(loss)
    """
    return loss / np.log(2.0)


loss_functions = {'agreement': loss_agreement, 'supertag': loss_supertag, 'lm': loss_lm}


def task_weights(r):
    """
    :return: (1 / (1 + r), r / (1 + r))
    """
    if r < 0:
        raise fxn.ConfigError("Weighting ratio r must be >= 0, not " + str(r) + ". ")
    return 1.0 / (1.0 + r), r / (1.0 + r)


def combine_losses(l1, l2, r):
    """
    :return: L = 1/(1+r) L1 + r/(1+r) L2
    """
    w1, w2 = task_weights(r)
    return w1 * l1 + w2 * l2


def combine_gradients(g1, g2, r, names):
    """
    :param g1: gradient dict from task 1
    :param g2: gradient dict from task 2
    :param names: every parameter name (absent entries count as zero)
    :return: gradient dict of the combined loss
    """
    w1, w2 = task_weights(r)
    out = {}
    for name in names:
        if name in g1 and name in g2:
            out[name] = w1 * g1[name] + w2 * g2[name]
        elif name in g1:
            out[name] = w1 * g1[name]
        elif name in g2:
            out[name] = w2 * g2[name]
    return out


def init_adagrad(params):
    return AdaGradState(G={name: np.zeros_like(params[name]) for name in params})


def clip_gradients(grads, max_norm):
    """
    :return: grads rescaled so their global L2 norm is at most max_norm
    """
    norm = np.sqrt(sum(float(np.sum(g ** 2)) for g in grads.values()))
    if norm <= max_norm:
        return grads
    return {name: g * (max_norm / norm) for name, g in grads.items()}


def adagrad_step(params, grads, state, lr, frozen=()):
    """
    G += g^2; theta -= lr * g / (sqrt(G) + 1e-8), elementwise and in place
    :param frozen: names of tensors left untouched
    :return: (params, state)
    """
    bad = nm.all_finite(grads)
    if bad:
        raise fxn.NumericError("Non-finite gradient in tensor '" + bad + "' - update step aborted. ")

    for name in grads:
        if name in frozen:
            continue
        if grads[name].shape != params[name].shape:
            raise fxn.ShapeError("Gradient for '" + name + "' has shape " + str(grads[name].shape) +
                                 ", parameter has shape " + str(params[name].shape) + ". ")
        state.G[name] += grads[name] ** 2
        params[name] -= lr * grads[name] / (np.sqrt(state.G[name]) + state.epsilon)

    return params, state


def batch_weight(batch):
    return float(np.sum(batch.mask)) if batch.task != 'agreement' else float(len(batch))


def validation_metric(params, cfg, task, instances, pad_id=0, batch_size=256):
    """
    :return: accuracy for agreement/tagging, perplexity for language modelling
    """
    if task == 'agreement':
        p_plural = md.predict_plural(params, cfg, [x.preamble for x in instances], pad_id, batch_size)
        predictions = np.where(p_plural >= 0.5, 'PL', 'SG')
        return float(np.mean(predictions == np.array([x.label for x in instances])))

    correct, total, nll = 0.0, 0.0, 0.0
    for batch in make_batches(instances, batch_size, pad_id, shuffle=False, task=task):
        if task == 'lm':
            trace = md.encode(params, cfg, batch.tokens, batch.mask)
            loss, _ = softmax_nll(md.head_logits(params, trace.h, 'lm'), batch.labels, batch.mask)
            nll += loss * np.sum(batch.mask)
        else:
            trace = md.encode(params, cfg, batch.tokens, batch.mask)
            predicted = np.argmax(md.head_logits(params, trace.h, 'supertag'), axis=-1)
            correct += float(np.sum((predicted == batch.labels) * batch.mask))
        total += float(np.sum(batch.mask))

    if task == 'lm':
        return float(2.0 ** lm_loss_bits(nll / total))
    return correct / total


def epoch_row(epoch, task, train_loss, val_metric, started, cfg):
    return {'epoch': epoch, 'task': task, 'train_loss': train_loss,
            'val_metric': 'NA' if val_metric is None else val_metric,
            'wall_seconds': round(time.time() - started, 3) if cfg.record_wall_time else 'NA'}


def run_step(params, state, grads, cfg, epoch, batch_no):
    """
    Clip (optionally) and apply one AdaGrad update, turning numeric failures into errors with coordinates
    """
    if cfg.max_norm:
        grads = clip_gradients(grads, cfg.max_norm)
    frozen = ('embedding',) if cfg.freeze_embeddings else ()
    try:
        adagrad_step(params, grads, state, cfg.learning_rate, frozen)
    except fxn.NumericError as err:
        raise fxn.NumericError("Epoch " + str(epoch) + ", batch " + str(batch_no) + ": " + str(err))


def check_loss(loss, epoch, batch_no):
    if not np.isfinite(loss):
        raise fxn.NumericError("Epoch " + str(epoch) + ", batch " + str(batch_no) + ": loss is not finite. ")


def train_single(task, instances, cfg, model_cfg, val_instances=None, params=None, pad_id=0, verbose=True):
    """
    :param task: 'agreement', 'supertag' or 'lm'
    :param instances: training instances for that task
    :param cfg: TrainConfig (epochs, batch size, learning rate, seed, shuffle)
    :param model_cfg: ModelConfig (must include the task's head)
    :param val_instances: optional held-out instances, scored after every epoch
    :param params: optional starting ModelParams (copied, not modified); freshly initialised from cfg.seed otherwise
    :return: (trained ModelParams, list of per-epoch metric dicts)
    """
    if cfg.epochs < 1:
        raise fxn.ConfigError("Training needs at least one epoch, not " + str(cfg.epochs) + ". ")
    if not instances:
        raise fxn.DataError("No training instances for the " + task + " task. ")
    if task not in model_cfg.heads:
        raise fxn.ConfigError("Model has no " + task + " head to train. ")

    if params is None:
        params = md.init_params(model_cfg, cfg.seed)
    else:
        params = {name: np.array(x, copy=True) for name, x in params.items()}
    state = init_adagrad(params)
    rng = nm.make_rng(cfg.seed, 'batches', task)
    loss_fn = loss_functions[task]

    metrics = []
    for epoch in range(1, cfg.epochs + 1):
        started = time.time()
        total, weight = 0.0, 0.0
        batches = make_batches(instances, cfg.batch_size, pad_id, rng, cfg.shuffle, task)
        for batch_no, batch in enumerate(batches, start=1):
            loss, grads = loss_fn(params, model_cfg, batch)
            check_loss(loss, epoch, batch_no)
            run_step(params, state, grads, cfg, epoch, batch_no)
            total += loss * batch_weight(batch)
            weight += batch_weight(batch)

        val_metric = validation_metric(params, model_cfg, task, val_instances, pad_id) if val_instances else None
        metrics.append(epoch_row(epoch, task, total / weight, val_metric, started, cfg))
        if verbose:
            print("Epoch " + str(epoch) + " (" + task + "): train loss " + format(total / weight, '.4f') +
                  ('' if val_metric is None else ", validation " + format(val_metric, '.4f')))

    return params, metrics


def batch_stream(instances, cfg, pad_id, rng, task):
    """
    Yield batches forever, reshuffling at the start of every pass over the instances
    """
    while True:
        for batch in make_batches(instances, cfg.batch_size, pad_id, rng, cfg.shuffle, task):
            yield batch


def train_joint(task1, task2, instances1, instances2, cfg, model_cfg, val1=None, val2=None, pad_id=0,
                verbose=True):
    """
    One shared encoder, parallel heads, one AdaGrad step per pair of batches on
    L = 1/(1+r) L1 + r/(1+r) L2. An epoch ends when the larger corpus has been seen once;
    the smaller one is recycled.
    :return: (trained ModelParams, list of per-epoch metric dicts for task1, task2 and the joint loss)
    """
    if cfg.r is None:
        raise fxn.ConfigError("Joint training needs the task 2 weighting ratio r. ")
    if cfg.epochs < 1:
        raise fxn.ConfigError("Training needs at least one epoch, not " + str(cfg.epochs) + ". ")
    if not instances1 or not instances2:
        raise fxn.DataError("Joint training needs instances for both " + task1 + " and " + task2 + ". ")
    for task in [task1, task2]:
        if task not in model_cfg.heads:
            raise fxn.ConfigError("Model has no " + task + " head to train. ")

    params = md.init_params(model_cfg, cfg.seed)
    state = init_adagrad(params)
    stream1 = batch_stream(instances1, cfg, pad_id, nm.make_rng(cfg.seed, 'batches', task1), task1)
    stream2 = batch_stream(instances2, cfg, pad_id, nm.make_rng(cfg.seed, 'batches', task2), task2)
    n_steps = max(-(-len(instances1) // cfg.batch_size), -(-len(instances2) // cfg.batch_size))

    metrics = []
    for epoch in range(1, cfg.epochs + 1):
        started = time.time()
        sums = {task1: [0.0, 0.0], task2: [0.0, 0.0], 'joint': [0.0, 0.0]}
        for batch_no in range(1, n_steps + 1):
            batch1, batch2 = next(stream1), next(stream2)
            l1, g1 = loss_functions[task1](params, model_cfg, batch1)
            l2, g2 = loss_functions[task2](params, model_cfg, batch2)
            combined = combine_losses(l1, l2, cfg.r)
            check_loss(combined, epoch, batch_no)
            run_step(params, state, combine_gradients(g1, g2, cfg.r, params), cfg, epoch, batch_no)

            for key, loss, batch in [(task1, l1, batch1), (task2, l2, batch2), ('joint', combined, None)]:
                w = batch_weight(batch) if batch is not None else 1.0
                sums[key][0] += loss * w
                sums[key][1] += w

        for task, val in [(task1, val1), (task2, val2)]:
            val_metric = validation_metric(params, model_cfg, task, val, pad_id) if val else None
            metrics.append(epoch_row(epoch, task, sums[task][0] / sums[task][1], val_metric, started, cfg))
        metrics.append(epoch_row(epoch, 'joint', sums['joint'][0] / sums['joint'][1], None, started, cfg))
        if verbose:
            print("Epoch " + str(epoch) + " (joint " + task1 + "+" + task2 + ", r=" + str(cfg.r) + "): loss " +
                  format(sums['joint'][0] / sums['joint'][1], '.4f'))

    return params, metrics


def pretrain_then_train(task_a, task_b, instances_a, instances_b, cfg, model_cfg_a, model_cfg_b,
                        val_a=None, val_b=None, pad_id=0, verbose=True):
    """
    Train on task_a, copy its embedding + LSTM into a freshly initialised task_b model, then train on task_b
    (cfg.epochs_b epochs, defaulting to cfg.epochs; 0 leaves the new head untrained)
    :return: (final ModelParams, per-epoch metrics of both phases, phase A ModelParams)
    """
    params_a, metrics_a = train_single(task_a, instances_a, cfg, model_cfg_a, val_a, pad_id=pad_id, verbose=verbose)
    for row in metrics_a:
        row['task'] = 'pretrain:' + row['task']

    params_b = md.transfer_encoder(params_a, md.init_params(model_cfg_b, cfg.seed))
    epochs_b = cfg.epochs if cfg.epochs_b is None else cfg.epochs_b
    if epochs_b == 0:
        return params_b, metrics_a, params_a

    params_b, metrics_b = train_single(task_b, instances_b, dataclasses.replace(cfg, epochs=epochs_b), model_cfg_b,
                                       val_b, params=params_b, pad_id=pad_id, verbose=verbose)
    return params_b, metrics_a + metrics_b, params_a

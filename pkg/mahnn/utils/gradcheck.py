import logging
from collections import OrderedDict

import numpy as np

from mahnn.config import TrainConfig
from mahnn.constants import MODE_TRAIN, PRECISION_F64
from mahnn.embeddings import Vocabulary
from mahnn.exceptions import ContractError
from mahnn.attention import sample_channel_mask
from mahnn.network import MahNN
from mahnn.tensor import finite_diff_report, precision


logger = logging.getLogger(__name__)

GRADIENT_TOLERANCE = 1e-4

TOY_LENGTH = 5
TOY_CLASSES = 3
TOY_BATCH = 2
TOY_WORDS = 8
TOY_SEMANTIC_SCALE = 2.0

TOY_SETTINGS = {
    'hidden_size': 4,
    'embedding_dim': 6,
    'channels': 2,
    'keep_probabilities': (0.8,),
    'attention_dim': 4,
    'filter_sizes': (2, 3),
    'filter_maps': 3,
    'dropout': 0.0,
    'l2': 0.0005,
    'precision': PRECISION_F64,
}


def toy_config(**overrides):
    settings = dict(TOY_SETTINGS)
    settings.update(overrides)
    return TrainConfig(**settings)


def build_toy_model(config):
    """
    Toy ``MahNN`` with attention biases drawn from U(-1, 1)

    Zero biases leave the semantic bias gradient at round-off level.
    """
    vocabulary = Vocabulary(f'token{index}' for index in range(TOY_WORDS))
    with precision(PRECISION_F64):
        model = MahNN(
            config, vocabulary,
            num_classes=TOY_CLASSES,
            sequence_length=TOY_LENGTH,
        )

    rng = np.random.default_rng([config.seed, 5])
    for channel in model.channels:
        biases = [channel.syntactic.b]
        if channel.semantic is not None:
            biases.append(channel.semantic.b)
            channel.semantic.W2.data = (
                TOY_SEMANTIC_SCALE * channel.semantic.W2.data
            )
        for bias in biases:
            bias.data = np.asarray(
                rng.uniform(-1.0, 1.0, size=bias.shape), dtype=np.float64
            )
    return model


def toy_batch(model, seed=0):
    """Random ids and labels, the first example starts with one pad"""
    rng = np.random.default_rng([seed, 3])
    ids = rng.integers(2, len(model.vocabulary),
                       size=(TOY_BATCH, model.sequence_length))
    masks = np.zeros(ids.shape, dtype=bool)
    ids[0, 0] = model.vocabulary.pad_id
    masks[0, 0] = True
    labels = rng.integers(0, model.num_classes, size=TOY_BATCH)
    return ids, masks, labels


def gradient_check(model, ids, masks, labels, seed=0, eps=1e-5):
    """
    Largest relative gradient error per parameter group

    Channel masks are sampled once and frozen so every evaluation of the
    loss sees the same function.
    """
    if model.config.dropout > 0:
        raise ContractError(
            f'gradient checks need dropout 0, got {model.config.dropout}'
        )
    rng = np.random.default_rng([seed, 4])

    with precision(PRECISION_F64):
        frozen = [
            sample_channel_mask(
                model.sequence_length, channel.keep_probability, rng,
                mode=MODE_TRAIN, batch=len(ids)
            )
            for channel in model.channels
        ]

        def objective():
            value, _ = model.loss(
                ids, masks, labels, mode=MODE_TRAIN, channel_masks=frozen
            )
            return value

        errors = finite_diff_report(
            objective, model.named_parameters(trainable_only=True), eps
        )

    report = OrderedDict()
    for group, params in model.parameter_groups().items():
        report[group] = max(errors[name] for name in params)
        logger.info(
            'Gradient check %s: max relative error %.3e', group, report[group]
        )
    return report


def failing_groups(report, tolerance=GRADIENT_TOLERANCE):
    return [group for group, error in report.items() if error > tolerance]

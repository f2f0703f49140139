import logging
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from .attention import (
    ChannelParams,
    ChannelSet,
    SemanticChannelParams,
    SyntacticChannelParams,
    build_channels,
)
from .classifier import ConvFilterBank, SoftmaxHead, classify, conv_maxpool
from .classifier import loss as classification_loss
from .constants import MODE_INFER, MODE_TRAIN
from .embeddings import EmbeddingTable, encode_batch, init_oov
from .encoder import EncodedSequence, LstmParams, encode_embedded
from .exceptions import ConfigError
from .tensor import Tensor, dropout


logger = logging.getLogger(__name__)


@dataclass
class ForwardPass:
    probabilities: Tensor
    features: Tensor
    channel_set: ChannelSet
    encoded: EncodedSequence

    def predictions(self):
        # argmax keeps the lowest index on ties
        return np.argmax(self.probabilities.data, axis=-1)


class MahNN:
    """
    Bi-LSTM encoder, multichannel attention and convolutional classifier

    :param config: ``TrainConfig``
    :param vocabulary: ``Vocabulary`` the ids refer to
    :param num_classes: size of the label set
    :param sequence_length: fixed padded length of every input
    :param embeddings: optional pretrained ``EmbeddingTable``, a random one is
        drawn otherwise
    """

    def __init__(self, config, vocabulary, num_classes, sequence_length,
                 embeddings=None, class_names=None):
        self.config = config
        self.vocabulary = vocabulary
        self.num_classes = num_classes
        self.sequence_length = sequence_length
        self.class_names = list(
            class_names or [str(c) for c in range(num_classes)]
        )

        if sequence_length < max(config.filter_sizes):
            raise ConfigError(
                f'filter width {max(config.filter_sizes)} exceeds the '
                f'sequence length {sequence_length}'
            )

        rng = np.random.default_rng(config.seed)
        hidden = config.hidden_size
        width = 2 * hidden

        if embeddings is None:
            embeddings = EmbeddingTable.empty(
                len(vocabulary), config.embedding_dim
            )
        if embeddings.num_rows != len(vocabulary):
            raise ConfigError(
                f'embedding table has {embeddings.num_rows} rows for '
                f'{len(vocabulary)} vocabulary entries'
            )
        if embeddings.dim != config.embedding_dim:
            raise ConfigError(
                f'embedding table has {embeddings.dim} dimensions, '
                f'embedding_dim is {config.embedding_dim}'
            )
        self.embeddings = init_oov(embeddings, rng, config.oov_range)
        self.embeddings.trainable = not config.freeze_embeddings

        self.forward_lstm = LstmParams(
            hidden, config.embedding_dim, rng, name='lstm_forward'
        )
        self.backward_lstm = LstmParams(
            hidden, config.embedding_dim, rng, name='lstm_backward'
        )

        self.channels = []
        for index, keep in enumerate(config.keep_probabilities):
            name = f'channel_{index}'
            syntactic = SyntacticChannelParams(
                width, keep, rng, name=f'{name}.syntactic'
            )
            semantic = None
            if not config.rv:
                semantic = SemanticChannelParams(
                    width, config.semantic_dim, rng, name=f'{name}.semantic'
                )
            self.channels.append(ChannelParams(syntactic, semantic))

        self.filter_bank = ConvFilterBank(
            config.filter_sizes, config.filter_maps, len(self.channels),
            width, rng
        )
        self.head = SoftmaxHead(self.filter_bank.total_maps, num_classes, rng)

        logger.debug(
            'Built %s with %s parameter tensors for length %s',
            config.variant, len(self.named_parameters()), sequence_length
        )

    def _components(self):
        components = [
            ('embedding', self.embeddings),
            ('lstm_forward', self.forward_lstm),
            ('lstm_backward', self.backward_lstm),
        ]
        for index, channel in enumerate(self.channels):
            components.append(
                (f'channel_{index}.syntactic', channel.syntactic)
            )
            if channel.semantic is not None:
                components.append(
                    (f'channel_{index}.semantic', channel.semantic)
                )
        components += [
            ('filters', self.filter_bank),
            ('softmax_head', self.head),
        ]
        return components

    def named_parameters(self, trainable_only=False):
        params = OrderedDict()
        for _, component in self._components():
            for name, tensor in component.named_parameters().items():
                if trainable_only and not tensor.requires_grad:
                    continue
                params[name] = tensor
        return params

    def parameter_groups(self, trainable_only=True):
        groups = OrderedDict()
        for group, component in self._components():
            params = {
                name: tensor
                for name, tensor in component.named_parameters().items()
                if tensor.requires_grad or not trainable_only
            }
            if params:
                groups[group] = params
        return groups

    def regularized_weights(self):
        weights = self.forward_lstm.regularized()
        weights += self.backward_lstm.regularized()
        for channel in self.channels:
            weights += channel.regularized()
        weights += self.filter_bank.regularized()
        weights += self.head.regularized()
        return weights

    def manifest(self):
        return [
            {'name': name, 'shape': list(tensor.shape)}
            for name, tensor in self.named_parameters().items()
        ]

    def encode(self, token_lists):
        return encode_batch(token_lists, self.sequence_length, self.vocabulary)

    def forward(self, ids, pad_mask, mode=MODE_INFER, rng=None,
                channel_masks=None):
        """
        Class probabilities for a batch of padded id sequences

        :param mode: ``train`` samples channel masks and applies dropout,
            ``infer`` is deterministic
        :param channel_masks: fixed ``V_l`` per channel, overrides sampling
        """
        ids = np.asarray(ids, dtype=np.int64)
        pad_mask = np.asarray(pad_mask, dtype=bool)
        training = mode == MODE_TRAIN
        rate = self.config.dropout

        inputs = dropout(self.embeddings.lookup(ids), rate, rng, training)
        H = encode_embedded(inputs, self.forward_lstm, self.backward_lstm)
        encoded = EncodedSequence(H=H, pad_mask=pad_mask)

        channel_set = build_channels(
            encoded, self.channels, mode=mode, rng=rng,
            semantic_axis=self.config.semantic_axis, masks=channel_masks,
        )
        channel_set.channels = [
            dropout(channel, rate, rng, training)
            for channel in channel_set.channels
        ]

        features = dropout(
            conv_maxpool(channel_set, self.filter_bank), rate, rng, training
        )
        probabilities = classify(features, self.head)
        return ForwardPass(probabilities, features, channel_set, encoded)

    def loss(self, ids, pad_mask, labels, mode=MODE_TRAIN, rng=None,
             channel_masks=None):
        result = self.forward(
            ids, pad_mask, mode=mode, rng=rng, channel_masks=channel_masks
        )
        value = classification_loss(
            result.probabilities, labels,
            regularized=self.regularized_weights(), l2=self.config.l2,
        )
        return value, result

    def predict(self, ids, pad_mask):
        return self.forward(ids, pad_mask, mode=MODE_INFER).predictions()

    def state(self):
        """Copies of every parameter array, keyed by name"""
        return {
            name: tensor.data.copy()
            for name, tensor in self.named_parameters().items()
        }

    def load_state(self, state):
        params = self.named_parameters()
        missing = sorted(set(params) - set(state))
        unexpected = sorted(set(state) - set(params))
        if missing or unexpected:
            raise ConfigError(
                [f'missing parameter {name!r}' for name in missing]
                + [f'unexpected parameter {name!r}' for name in unexpected]
            )
        for name, tensor in params.items():
            value = np.asarray(state[name])
            if value.shape != tensor.shape:
                raise ConfigError(
                    f'parameter {name!r} has shape {value.shape}, '
                    f'expected {tensor.shape}'
                )
            tensor.data = value.astype(tensor.data.dtype, copy=True)

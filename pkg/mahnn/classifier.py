import numpy as np

from .attention import ChannelSet
from .exceptions import ConfigError, ContractError, DimensionError
from .tensor import (
    Tensor,
    add,
    as_tensor,
    concat,
    getitem,
    log,
    matmul,
    max_along,
    mul,
    relu,
    reshape,
    scale,
    softmax_along,
    stack,
    sum_along,
    transpose,
)


LOG_FLOOR = 1e-12


class ConvFilterBank:
    """``filter_maps`` filters of shape ``L x l x 2h`` per filter width ``l``"""

    def __init__(self, filter_sizes, filter_maps, num_channels, width,
                 rng=None, name='conv'):
        if not filter_sizes or min(filter_sizes) < 1:
            raise ConfigError('filter widths must be positive')

        self.filter_sizes = tuple(filter_sizes)
        self.filter_maps = filter_maps
        self.num_channels = num_channels
        self.width = width
        self.name = name

        self.weights = {}
        self.biases = {}
        for size in self.filter_sizes:
            shape = (filter_maps, num_channels, size, width)
            bound = 1.0 / np.sqrt(num_channels * size * width)
            values = (
                np.zeros(shape) if rng is None
                else rng.uniform(-bound, bound, size=shape)
            )
            self.weights[size] = Tensor(
                values, requires_grad=True, name=f'{name}.W_{size}'
            )
            self.biases[size] = Tensor(
                np.zeros(filter_maps), requires_grad=True,
                name=f'{name}.b_{size}'
            )

    @property
    def total_maps(self):
        return self.filter_maps * len(self.filter_sizes)

    def check_length(self, length):
        widest = max(self.filter_sizes)
        if widest > length:
            raise ConfigError(
                f'filter width {widest} exceeds the sequence length {length}'
            )

    def named_parameters(self):
        params = {}
        for size in self.filter_sizes:
            params[self.weights[size].name] = self.weights[size]
            params[self.biases[size].name] = self.biases[size]
        return params

    def regularized(self):
        return [self.weights[size] for size in self.filter_sizes]


class SoftmaxHead:

    def __init__(self, num_features, num_classes, rng=None, name='head'):
        if num_classes < 2:
            raise ConfigError('a classifier needs at least two classes')

        bound = 1.0 / np.sqrt(num_features)
        shape = (num_classes, num_features)
        values = (
            np.zeros(shape) if rng is None
            else rng.uniform(-bound, bound, size=shape)
        )
        self.W = Tensor(values, requires_grad=True, name=f'{name}.W')
        self.b = Tensor(
            np.zeros(num_classes), requires_grad=True, name=f'{name}.b'
        )

    @property
    def num_classes(self):
        return self.W.shape[0]

    def named_parameters(self):
        return {self.W.name: self.W, self.b.name: self.b}

    def regularized(self):
        return [self.W]


def conv_maxpool(channels, bank):
    """
    Max-over-time pooled relu feature per filter

    Channel slabs are summed inside each filter response. Features follow
    the declared filter order.
    """
    if isinstance(channels, ChannelSet):
        channels = channels.channels
    channels = [as_tensor(channel) for channel in channels]

    if len(channels) != bank.num_channels:
        raise DimensionError(
            'conv_maxpool', (len(channels),), (bank.num_channels,)
        )
    if channels[0].shape[-1] != bank.width:
        raise DimensionError(
            'conv_maxpool', channels[0].shape, (bank.width,)
        )

    length = channels[0].shape[-2]
    bank.check_length(length)

    # (..., n, L, 2h)
    slabs = stack(channels, axis=-2)
    batch_shape = slabs.shape[:-3]

    features = []
    for size in bank.filter_sizes:
        positions = length - size + 1
        windows = [
            getitem(slabs, (Ellipsis, slice(k, k + positions),
                            slice(None), slice(None)))
            for k in range(size)
        ]
        # (..., positions, L, size, 2h)
        window = stack(windows, axis=-2)
        flat_size = bank.num_channels * size * bank.width
        flat = reshape(window, batch_shape + (positions, flat_size))

        kernel = reshape(bank.weights[size], (bank.filter_maps, flat_size))
        responses = add(matmul(flat, transpose(kernel)), bank.biases[size])
        features.append(max_along(relu(responses), axis=-2))

    return concat(features, axis=-1)


def classify(r, head):
    """Class distribution ``softmax(W r + b)``"""
    r = as_tensor(r)
    if r.shape[-1] != head.W.shape[1]:
        raise DimensionError('classify', r.shape, head.W.shape)

    single = r.ndim == 1
    if single:
        r = reshape(r, (1, r.shape[0]))

    y = softmax_along(add(matmul(r, transpose(head.W)), head.b), axis=-1)
    return reshape(y, (head.num_classes,)) if single else y


def l2_penalty(weights):
    total = None
    for weight in weights:
        squared = sum_along(mul(weight, weight))
        total = squared if total is None else add(total, squared)
    return total


def loss(y, labels, regularized=(), l2=0.0):
    """
    Mean cross entropy of the true labels plus ``l2`` times the squared norm
    of ``regularized``
    """
    y = as_tensor(y)
    if y.ndim == 1:
        y = reshape(y, (1, y.shape[0]))
    labels = np.atleast_1d(np.asarray(labels, dtype=np.int64))
    num_classes = y.shape[-1]

    if labels.shape[0] != y.shape[0]:
        raise DimensionError('loss', y.shape, labels.shape)
    if labels.min() < 0 or labels.max() >= num_classes:
        raise ContractError(
            f'labels must lie in [0, {num_classes}), got {labels.tolist()}'
        )
    if l2 < 0:
        raise ContractError(f'l2 must not be negative, got {l2}')

    picked = getitem(y, (np.arange(y.shape[0]), labels))
    total = scale(sum_along(log(picked, floor=LOG_FLOOR)), -1.0 / y.shape[0])

    if l2 > 0 and regularized:
        total = add(total, scale(l2_penalty(regularized), l2))
    return total

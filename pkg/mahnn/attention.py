from dataclasses import dataclass, field

import numpy as np

from .constants import (
    MODE_INFER,
    MODE_TRAIN,
    PAD_PENALTY,
    SEMANTIC_AXIS_DIMENSIONS,
    SEMANTIC_AXIS_POSITIONS,
)
from .encoder import EncodedSequence
from .exceptions import ConfigError, ContractError, DimensionError
from .tensor import (
    Tensor,
    add,
    as_tensor,
    expand_dims,
    get_dtype,
    matmul,
    mul,
    sigmoid,
    softmax_along,
    sum_along,
    swapaxes,
    tanh,
    transpose,
)


def _annotations(H):
    if isinstance(H, EncodedSequence):
        return H.H
    return as_tensor(H)


class SyntacticChannelParams:
    """Bilinear association weights ``W_l``, scalar bias ``b_l`` and ``p_l``"""

    def __init__(self, width, keep_probability=0.9, rng=None, name='channel'):
        if not 0 < keep_probability <= 1:
            raise ConfigError(
                f'keep probability must lie in (0, 1], got {keep_probability}'
            )
        self.width = width
        self.keep_probability = keep_probability
        self.name = name

        bound = 1.0 / np.sqrt(width)
        values = (
            np.zeros((width, width)) if rng is None
            else rng.uniform(-bound, bound, size=(width, width))
        )
        self.W = Tensor(values, requires_grad=True, name=f'{name}.W')
        self.b = Tensor(0.0, requires_grad=True, name=f'{name}.b')

    def named_parameters(self):
        return {self.W.name: self.W, self.b.name: self.b}

    def regularized(self):
        return [self.W]


class SemanticChannelParams:
    """``W_l1``, ``W_l2`` of shape ``d_a x 2h`` and bias ``b_l`` of ``d_a``"""

    def __init__(self, width, attention_dim, rng=None, name='channel'):
        self.width = width
        self.attention_dim = attention_dim
        self.name = name

        shape = (attention_dim, width)
        first, second = np.zeros(shape), np.zeros(shape)
        if rng is not None:
            first = rng.uniform(-1.0, 1.0, size=shape) / np.sqrt(attention_dim)
            second = rng.uniform(-1.0, 1.0, size=shape) / np.sqrt(width)

        self.W1 = Tensor(first, requires_grad=True, name=f'{name}.W1')
        self.W2 = Tensor(second, requires_grad=True, name=f'{name}.W2')
        self.b = Tensor(
            np.zeros(attention_dim), requires_grad=True, name=f'{name}.b'
        )

    def named_parameters(self):
        return {
            self.W1.name: self.W1,
            self.W2.name: self.W2,
            self.b.name: self.b,
        }

    def regularized(self):
        return [self.W1, self.W2]


@dataclass
class ChannelSet:
    channels: list = field(default_factory=list)
    syntactic: list = field(default_factory=list)
    semantic: list = field(default_factory=list)
    masks: list = field(default_factory=list)

    def __len__(self):
        return len(self.channels)


def association_matrix(H, p):
    """``M[i, j] = tanh(h_i . (W_l h_j) + b_l)``"""
    H = _annotations(H)
    if H.shape[-2] < 1:
        raise ContractError('association matrix of an empty sequence')
    if H.shape[-1] != p.W.shape[0]:
        raise DimensionError('association_matrix', H.shape, p.W.shape)

    projected = matmul(H, transpose(p.W))
    return tanh(add(matmul(H, swapaxes(projected)), p.b))


def sample_channel_mask(n, keep_probability, rng=None, mode=MODE_TRAIN,
                        batch=None):
    """
    Channel mask ``V_l``

    Training draws fresh Bernoulli(``p_l``) entries, inference substitutes
    the expectation ``p_l`` everywhere.
    """
    if not 0 < keep_probability <= 1:
        raise ConfigError(
            f'keep probability must lie in (0, 1], got {keep_probability}'
        )
    shape = (n, n) if batch is None else (batch, n, n)

    if keep_probability == 1 or mode == MODE_INFER:
        return np.full(shape, keep_probability, dtype=get_dtype())
    if rng is None:
        raise ContractError('sampling a train mode mask needs an rng')
    return (rng.random(shape) < keep_probability).astype(get_dtype())


def syntactic_weights(M, V, pad_mask):
    """Masked column sums of ``M * V`` through a softmax over positions"""
    M = as_tensor(M)
    V = np.asarray(V)
    pad_mask = np.asarray(pad_mask, dtype=bool)

    if V.shape != M.shape[-2:] and V.shape != M.shape:
        raise DimensionError('syntactic_weights', M.shape, V.shape)
    if pad_mask.shape[-1] != M.shape[-1]:
        raise DimensionError('syntactic_weights', M.shape, pad_mask.shape)

    column_sums = sum_along(mul(M, Tensor._wrap(V.astype(get_dtype()))),
                            axis=-2)
    penalty = np.where(pad_mask, PAD_PENALTY, 0.0).astype(get_dtype())
    return softmax_along(add(column_sums, penalty), axis=-1)


def semantic_weights(H, p, axis=SEMANTIC_AXIS_POSITIONS):
    """
    Per-dimension weights ``softmax(W_l1^T sigmoid(W_l2 h_i + b_l))``

    With ``positions`` every hidden dimension is normalized across the
    sequence, ``dimensions`` normalizes each position across its hidden
    dimensions instead.
    """
    H = _annotations(H)
    if H.shape[-1] != p.W2.shape[1]:
        raise DimensionError('semantic_weights', H.shape, p.W2.shape)
    if axis not in (SEMANTIC_AXIS_POSITIONS, SEMANTIC_AXIS_DIMENSIONS):
        raise ConfigError(f'Unknown semantic axis {axis!r}')

    hidden = sigmoid(add(matmul(H, transpose(p.W2)), p.b))
    scores = matmul(hidden, p.W1)
    return softmax_along(
        scores, axis=-2 if axis == SEMANTIC_AXIS_POSITIONS else -1
    )


def build_channel(H, a, A_bar=None):
    """Row ``i`` is ``a_i * (A_bar[i] * h_i)``, ``A_bar`` of None means ones"""
    H = _annotations(H)
    weighted = H if A_bar is None else mul(as_tensor(A_bar), H)
    return mul(expand_dims(a, -1), weighted)


class ChannelParams:
    """Parameters of one channel, ``semantic`` is None for the rv variant"""

    def __init__(self, syntactic, semantic=None):
        self.syntactic = syntactic
        self.semantic = semantic

    @property
    def keep_probability(self):
        return self.syntactic.keep_probability

    def named_parameters(self):
        params = dict(self.syntactic.named_parameters())
        if self.semantic is not None:
            params.update(self.semantic.named_parameters())
        return params

    def regularized(self):
        weights = self.syntactic.regularized()
        if self.semantic is not None:
            weights += self.semantic.regularized()
        return weights


def build_channels(H, params, pad_mask=None, mode=MODE_INFER, rng=None,
                   semantic_axis=SEMANTIC_AXIS_POSITIONS, masks=None):
    """
    Runs the attention pipeline once per channel

    :param params: list of ``ChannelParams``
    :param masks: optional fixed ``V_l`` per channel, used instead of
        sampling
    """
    if not params:
        raise ContractError('at least one channel is required')

    if isinstance(H, EncodedSequence) and pad_mask is None:
        pad_mask = H.pad_mask
    H = _annotations(H)
    n = H.shape[-2]
    batch = H.shape[0] if H.ndim == 3 else None
    if pad_mask is None:
        pad_mask = np.zeros(H.shape[:-1], dtype=bool)

    channel_set = ChannelSet()
    for index, channel in enumerate(params):
        if masks is not None:
            mask = masks[index]
        else:
            mask = sample_channel_mask(
                n, channel.keep_probability, rng=rng, mode=mode, batch=batch
            )

        M = association_matrix(H, channel.syntactic)
        a = syntactic_weights(M, mask, pad_mask)

        if channel.semantic is None:
            A_bar = None
        else:
            A_bar = semantic_weights(H, channel.semantic, axis=semantic_axis)

        channel_set.channels.append(build_channel(H, a, A_bar))
        channel_set.syntactic.append(a)
        channel_set.semantic.append(A_bar)
        channel_set.masks.append(mask)

    return channel_set

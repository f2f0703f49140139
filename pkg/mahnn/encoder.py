from dataclasses import dataclass

import numpy as np

from .exceptions import ContractError, DimensionError
from .tensor import (
    Tensor,
    add,
    as_tensor,
    concat,
    getitem,
    matmul,
    mul,
    reshape,
    sigmoid,
    stack,
    tanh,
    transpose,
)


GATES = ('f', 'i', 'o', 'C')


class LstmParams:
    """Weights ``W_g`` of shape ``h x (h + d)`` and biases ``b_g`` per gate"""

    def __init__(self, hidden_size, input_size, rng=None, name='lstm'):
        self.hidden_size = hidden_size
        self.input_size = input_size
        self.name = name

        bound = 1.0 / np.sqrt(hidden_size)
        shape = (hidden_size, hidden_size + input_size)

        self.weights = {}
        self.biases = {}
        for gate in GATES:
            if rng is None:
                values = np.zeros(shape)
            else:
                values = rng.uniform(-bound, bound, size=shape)
            self.weights[gate] = Tensor(
                values, requires_grad=True, name=f'{name}.W_{gate}'
            )
            self.biases[gate] = Tensor(
                np.zeros(hidden_size), requires_grad=True,
                name=f'{name}.b_{gate}'
            )

    def named_parameters(self):
        params = {}
        for gate in GATES:
            params[self.weights[gate].name] = self.weights[gate]
            params[self.biases[gate].name] = self.biases[gate]
        return params

    def regularized(self):
        return [self.weights[gate] for gate in GATES]


@dataclass
class EncodedSequence:
    H: Tensor
    pad_mask: np.ndarray

    @property
    def length(self):
        return self.H.shape[-2]


def _gate(p, gate, joined):
    return add(matmul(joined, transpose(p.weights[gate])), p.biases[gate])


def lstm_step(p, h_prev, c_prev, x_t):
    """
    One LSTM transition on ``[h_prev ; x_t]``

    Accepts single vectors or a leading batch axis.
    """
    h_prev, c_prev, x_t = as_tensor(h_prev), as_tensor(c_prev), as_tensor(x_t)

    if h_prev.shape[-1] != p.hidden_size or c_prev.shape != h_prev.shape:
        raise DimensionError('lstm_step', h_prev.shape, c_prev.shape)
    if x_t.shape[-1] != p.input_size or x_t.shape[:-1] != h_prev.shape[:-1]:
        raise DimensionError('lstm_step', h_prev.shape, x_t.shape)

    single = h_prev.ndim == 1
    joined = concat([h_prev, x_t], axis=-1)
    if single:
        joined = reshape(joined, (1, joined.shape[0]))
        c_prev = reshape(c_prev, (1, c_prev.shape[0]))

    forget = sigmoid(_gate(p, 'f', joined))
    keep = sigmoid(_gate(p, 'i', joined))
    output = sigmoid(_gate(p, 'o', joined))
    candidate = tanh(_gate(p, 'C', joined))

    c_t = add(mul(forget, c_prev), mul(keep, candidate))
    h_t = mul(output, tanh(c_t))

    if single:
        return reshape(h_t, (p.hidden_size,)), reshape(c_t, (p.hidden_size,))
    return h_t, c_t


def _run(p, inputs, order):
    batch_shape = inputs.shape[:-2]
    h = Tensor(np.zeros(batch_shape + (p.hidden_size,)))
    c = Tensor(np.zeros(batch_shape + (p.hidden_size,)))

    states = {}
    for position in order:
        x_t = getitem(inputs, (Ellipsis, position, slice(None)))
        h, c = lstm_step(p, h, c, x_t)
        states[position] = h

    return stack([states[i] for i in sorted(states)], axis=-2)


def encode_embedded(inputs, fwd, bwd):
    """Bi-LSTM annotations ``[->h_i ; <-h_i]`` of embedded inputs"""
    inputs = as_tensor(inputs)
    length = inputs.shape[-2]
    if length < 1:
        raise ContractError('cannot encode an empty sequence')

    forward = _run(fwd, inputs, range(length))
    backward = _run(bwd, inputs, reversed(range(length)))
    return concat([forward, backward], axis=-1)


def bilstm_encode(ids, table, fwd, bwd, pad_mask=None):
    ids = np.asarray(ids, dtype=np.int64)
    if ids.shape[-1] < 1:
        raise ContractError('cannot encode an empty sequence')
    if pad_mask is None:
        pad_mask = np.zeros(ids.shape, dtype=bool)

    H = encode_embedded(table.lookup(ids), fwd, bwd)
    return EncodedSequence(H=H, pad_mask=np.asarray(pad_mask, dtype=bool))

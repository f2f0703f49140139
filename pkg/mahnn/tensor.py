import contextlib
import logging
import threading

import numpy as np

from .constants import PRECISION_F32, PRECISION_F64
from .exceptions import ContractError, DimensionError, NumericError


logger = logging.getLogger(__name__)

_DTYPES = {
    PRECISION_F64: np.float64,
    PRECISION_F32: np.float32,
}

_settings = {
    'dtype': np.float64,
    # flips the tanh local gradient so the gradient check has something to
    # catch, only ever enabled by ``corrupted_tanh_gradient``
    'corrupt_tanh_gradient': False,
}

_local = threading.local()


def get_dtype():
    return _settings['dtype']


def set_precision(mode):
    if mode not in _DTYPES:
        raise ContractError(f'Unknown precision mode {mode!r}')
    _settings['dtype'] = _DTYPES[mode]


@contextlib.contextmanager
def precision(mode):
    previous = _settings['dtype']
    set_precision(mode)
    try:
        yield
    finally:
        _settings['dtype'] = previous


@contextlib.contextmanager
def corrupted_tanh_gradient():
    _settings['corrupt_tanh_gradient'] = True
    try:
        yield
    finally:
        _settings['corrupt_tanh_gradient'] = False


class Tensor:
    """
    Dense row-major array with an optional gradient slot

    Tensors produced while a ``Tape`` is active and that depend on a
    ``requires_grad`` input are recorded on that tape.
    """

    def __init__(self, data, requires_grad=False, name=None):
        self.data = np.array(data, dtype=get_dtype())
        self.requires_grad = requires_grad
        self.name = name
        self.grad = None
        self.node_id = None
        self._tape = None

    @classmethod
    def _wrap(cls, data):
        tensor = cls.__new__(cls)
        tensor.data = np.asarray(data)
        tensor.requires_grad = False
        tensor.name = None
        tensor.grad = None
        tensor.node_id = None
        tensor._tape = None
        return tensor

    def __repr__(self):
        label = f' name={self.name!r}' if self.name else ''
        return (
            f'Tensor(shape={self.shape}{label}, '
            f'requires_grad={self.requires_grad})'
        )

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    @property
    def is_leaf(self):
        return self.node_id is None

    def item(self):
        return self.data.item()

    def numpy(self):
        return self.data

    def zero_grad(self):
        self.grad = None

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __neg__(self):
        return scale(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, index):
        return getitem(self, index)


def as_tensor(value):
    if isinstance(value, Tensor):
        return value
    return Tensor._wrap(np.asarray(value, dtype=get_dtype()))


class Node:
    __slots__ = ('op', 'inputs', 'output', 'backward_fn')

    def __init__(self, op, inputs, output, backward_fn):
        self.op = op
        self.inputs = inputs
        self.output = output
        self.backward_fn = backward_fn


class Tape:
    """
    Ordered record of primitive operations

    Recording order is a topological order of the graph, so a single reverse
    sweep visits every node once. A tape belongs to the thread that opened
    it.
    """

    def __init__(self):
        self.nodes = []

    def __enter__(self):
        stack = _tape_stack()
        stack.append(self)
        return self

    def __exit__(self, exc_type, exc, traceback):
        _tape_stack().pop()

    def __len__(self):
        return len(self.nodes)

    @staticmethod
    def current():
        stack = _tape_stack()
        return stack[-1] if stack else None

    def record(self, op, inputs, output, backward_fn):
        output.node_id = len(self.nodes)
        output._tape = self
        output.requires_grad = True
        self.nodes.append(Node(op, inputs, output, backward_fn))

    def backward(self, loss):
        """
        Gradients of a scalar ``loss`` for every ``requires_grad`` leaf

        Returns a dict keyed by tensor. Gradients of a tensor consumed by
        several operations are summed. ``grad`` of every leaf is set too.
        """
        if loss.size != 1:
            raise ContractError(
                f'backward needs a scalar loss, got shape {loss.shape}'
            )

        if loss.is_leaf:
            if not loss.requires_grad:
                raise ContractError('loss does not require gradients')
            loss.grad = np.ones_like(loss.data)
            return {loss: loss.grad}

        if loss._tape is not self:
            raise ContractError('loss was not recorded on this tape')

        pending = {id(loss): np.ones_like(loss.data)}
        leaves = {}

        for node in reversed(self.nodes[:loss.node_id + 1]):
            grad = pending.pop(id(node.output), None)
            if grad is None:
                continue

            input_grads = node.backward_fn(grad)

            for tensor, input_grad in zip(node.inputs, input_grads):
                if input_grad is None or not tensor.requires_grad:
                    continue

                key = id(tensor)
                if key in pending:
                    pending[key] = pending[key] + input_grad
                else:
                    pending[key] = input_grad

                if tensor.is_leaf:
                    leaves[key] = tensor

        gradients = {}
        for key, tensor in leaves.items():
            grad = np.asarray(pending[key]).reshape(tensor.shape)
            tensor.grad = grad
            gradients[tensor] = grad

        return gradients


def _tape_stack():
    if not hasattr(_local, 'stack'):
        _local.stack = []
    return _local.stack


def backward(loss):
    """Runs the reverse sweep on the tape ``loss`` was recorded on"""
    if loss._tape is None:
        return Tape().backward(loss)
    return loss._tape.backward(loss)


def _result(op, inputs, data, backward_fn):
    output = Tensor._wrap(data)
    tape = Tape.current()

    if tape is not None and any(t.requires_grad for t in inputs):
        tape.record(op, inputs, output, backward_fn)

    return output


def _unbroadcast(grad, shape):
    if grad.shape == shape:
        return grad

    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)

    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)

    return grad


def _broadcast_shape(op, a, b):
    try:
        return np.broadcast(a.data, b.data).shape
    except ValueError:
        raise DimensionError(op, a.shape, b.shape) from None


def add(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape('add', a, b)

    def backward_fn(grad):
        return _unbroadcast(grad, a.shape), _unbroadcast(grad, b.shape)

    return _result('add', (a, b), a.data + b.data, backward_fn)


def sub(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape('sub', a, b)

    def backward_fn(grad):
        return _unbroadcast(grad, a.shape), _unbroadcast(-grad, b.shape)

    return _result('sub', (a, b), a.data - b.data, backward_fn)


def mul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape('mul', a, b)

    def backward_fn(grad):
        return (
            _unbroadcast(grad * b.data, a.shape),
            _unbroadcast(grad * a.data, b.shape),
        )

    return _result('mul', (a, b), a.data * b.data, backward_fn)


def scale(a, factor):
    a = as_tensor(a)
    factor = float(factor)

    def backward_fn(grad):
        return (grad * factor,)

    return _result('scale', (a,), a.data * factor, backward_fn)


def matmul(a, b):
    a, b = as_tensor(a), as_tensor(b)

    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise DimensionError('matmul', a.shape, b.shape)

    def backward_fn(grad):
        grad_a = np.matmul(grad, np.swapaxes(b.data, -1, -2))
        grad_b = np.matmul(np.swapaxes(a.data, -1, -2), grad)
        return _unbroadcast(grad_a, a.shape), _unbroadcast(grad_b, b.shape)

    return _result('matmul', (a, b), np.matmul(a.data, b.data), backward_fn)


def tanh(x):
    x = as_tensor(x)
    out = np.tanh(x.data)

    def backward_fn(grad):
        if _settings['corrupt_tanh_gradient']:
            return (grad * (1.0 - out),)
        return (grad * (1.0 - out * out),)

    return _result('tanh', (x,), out, backward_fn)


def sigmoid(x):
    x = as_tensor(x)
    # tanh form never overflows for large negative inputs
    out = 0.5 * (1.0 + np.tanh(0.5 * x.data))

    def backward_fn(grad):
        return (grad * out * (1.0 - out),)

    return _result('sigmoid', (x,), out, backward_fn)


def relu(x):
    x = as_tensor(x)
    active = x.data > 0

    def backward_fn(grad):
        return (grad * active,)

    return _result('relu', (x,), np.where(active, x.data, 0.0), backward_fn)


def exp(x):
    x = as_tensor(x)
    out = np.exp(x.data)

    def backward_fn(grad):
        return (grad * out,)

    return _result('exp', (x,), out, backward_fn)


def log(x, floor=0.0):
    """Natural log with its argument clamped at ``floor``"""
    x = as_tensor(x)
    clamped = np.maximum(x.data, floor)

    def backward_fn(grad):
        return (np.where(x.data > floor, grad / clamped, 0.0),)

    return _result('log', (x,), np.log(clamped), backward_fn)


POINTWISE_OPS = {
    'tanh': tanh,
    'sigmoid': sigmoid,
    'relu': relu,
    'add': add,
    'mul': mul,
    'scale': scale,
}


def pointwise(op, *args):
    try:
        function = POINTWISE_OPS[op]
    except KeyError:
        raise ContractError(f'Unknown pointwise op {op!r}') from None
    return function(*args)


def softmax_along(x, axis=-1):
    """Max-shifted softmax, outputs along ``axis`` sum to one"""
    x = as_tensor(x)

    if np.isnan(x.data).any():
        raise NumericError('softmax received NaN scores')

    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    weights = np.exp(shifted)
    out = weights / weights.sum(axis=axis, keepdims=True)

    def backward_fn(grad):
        inner = (grad * out).sum(axis=axis, keepdims=True)
        return (out * (grad - inner),)

    return _result('softmax', (x,), out, backward_fn)


def sum_along(x, axis=None, keepdims=False):
    x = as_tensor(x)
    out = x.data.sum(axis=axis, keepdims=keepdims)

    def backward_fn(grad):
        if axis is not None and not keepdims:
            grad = np.expand_dims(grad, axis)
        return (np.broadcast_to(grad, x.shape).copy(),)

    return _result('sum', (x,), out, backward_fn)


def reshape(x, shape):
    x = as_tensor(x)

    def backward_fn(grad):
        return (grad.reshape(x.shape),)

    return _result('reshape', (x,), x.data.reshape(shape), backward_fn)


def expand_dims(x, axis):
    return reshape(x, np.expand_dims(as_tensor(x).data, axis).shape)


def transpose(x, axes=None):
    x = as_tensor(x)
    if axes is None:
        axes = tuple(reversed(range(x.ndim)))
    inverse = tuple(np.argsort(axes))

    def backward_fn(grad):
        return (np.transpose(grad, inverse),)

    return _result('transpose', (x,), np.transpose(x.data, axes), backward_fn)


def swapaxes(x, first=-1, second=-2):
    x = as_tensor(x)
    axes = list(range(x.ndim))
    axes[first], axes[second] = axes[second], axes[first]
    return transpose(x, tuple(axes))


def getitem(x, index):
    x = as_tensor(x)

    parts = index if isinstance(index, tuple) else (index,)
    basic = all(
        part is None or part is Ellipsis or isinstance(part, (int, slice))
        for part in parts
    )

    def backward_fn(grad):
        full = np.zeros_like(x.data)
        if basic:
            full[index] += grad
        else:
            np.add.at(full, index, grad)
        return (full,)

    return _result('getitem', (x,), x.data[index], backward_fn)


def take_rows(table, ids):
    """Row lookup ``table[ids]`` for an integer array of any shape"""
    table = as_tensor(table)
    ids = np.asarray(ids, dtype=np.int64)

    if ids.size and (ids.min() < 0 or ids.max() >= table.shape[0]):
        raise IndexError(
            f'id out of range [0, {table.shape[0]}): '
            f'min {ids.min()}, max {ids.max()}'
        )

    def backward_fn(grad):
        full = np.zeros_like(table.data)
        np.add.at(full, ids, grad)
        return (full,)

    return _result('take_rows', (table,), table.data[ids], backward_fn)


def concat(tensors, axis=-1):
    tensors = [as_tensor(t) for t in tensors]
    try:
        out = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError:
        raise DimensionError('concat', *(t.shape for t in tensors)) from None
    offsets = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward_fn(grad):
        return tuple(np.split(grad, offsets, axis=axis))

    return _result('concat', tuple(tensors), out, backward_fn)


def stack(tensors, axis=0):
    tensors = [as_tensor(t) for t in tensors]
    try:
        out = np.stack([t.data for t in tensors], axis=axis)
    except ValueError:
        raise DimensionError('stack', *(t.shape for t in tensors)) from None

    def backward_fn(grad):
        moved = np.moveaxis(grad, axis, 0)
        return tuple(moved[i] for i in range(len(tensors)))

    return _result('stack', tuple(tensors), out, backward_fn)


def max_along(x, axis=-1):
    """Maximum along ``axis``, ties resolved toward the lowest index"""
    x = as_tensor(x)
    winners = np.expand_dims(np.argmax(x.data, axis=axis), axis)
    out = np.take_along_axis(x.data, winners, axis=axis)

    def backward_fn(grad):
        full = np.zeros_like(x.data)
        np.put_along_axis(full, winners, np.expand_dims(grad, axis), axis)
        return (full,)

    return _result(
        'max', (x,), np.squeeze(out, axis=axis), backward_fn
    )


def dropout(x, rate, rng, training):
    """Inverted dropout, identity outside training or when ``rate`` is 0"""
    x = as_tensor(x)
    if not training or rate <= 0.0:
        return x
    if rng is None:
        raise ContractError('train mode dropout needs an rng')
    keep = 1.0 - rate
    mask = (rng.random(x.shape) < keep).astype(get_dtype()) / keep
    return mul(x, Tensor._wrap(mask))


def _scalar(value):
    value = float(as_tensor(value).data.reshape(-1)[0])
    if not np.isfinite(value):
        raise NumericError(f'objective is not finite: {value}')
    return value


def finite_diff_report(f, named_params, eps=1e-5):
    """
    Largest relative error per parameter between autodiff and central
    differences

    :param f: callable without arguments building a scalar loss from the
        current parameter values
    :param named_params: mapping of name to ``Tensor``, entries with
        ``requires_grad`` false are skipped
    :param eps: central difference step
    """
    if eps <= 0:
        raise ContractError(f'eps must be positive, got {eps}')
    if get_dtype() != np.float64:
        raise ContractError('finite difference checks need 64-bit precision')

    trainable = {
        name: param for name, param in named_params.items()
        if param.requires_grad
    }

    with Tape() as tape:
        loss = f()
    _scalar(loss)
    gradients = tape.backward(loss)

    report = {}
    for name, param in trainable.items():
        analytic = gradients.get(param)
        if analytic is None:
            analytic = np.zeros_like(param.data)
        analytic = analytic.reshape(-1)
        flat = param.data.reshape(-1)

        worst = 0.0
        for index in range(flat.size):
            original = flat[index]

            flat[index] = original + eps
            upper = _scalar(f())
            flat[index] = original - eps
            lower = _scalar(f())
            flat[index] = original

            numeric = (upper - lower) / (2.0 * eps)
            exact = float(analytic[index])
            error = abs(exact - numeric) / max(
                abs(exact), abs(numeric), 1e-8
            )
            worst = max(worst, error)

        logger.debug('Gradient check %s: max relative error %s', name, worst)
        report[name] = worst

    return report


def finite_diff_check(f, params, eps=1e-5):
    named = {str(index): param for index, param in enumerate(params)}
    return max(finite_diff_report(f, named, eps).values(), default=0.0)

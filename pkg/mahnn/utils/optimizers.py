from dataclasses import dataclass, field

import numpy as np

from mahnn.constants import OPTIMIZER_ADAM, OPTIMIZER_SGD
from mahnn.exceptions import ConfigError, NumericError


def _check_finite(grads):
    for name, grad in grads.items():
        if not np.isfinite(grad).all():
            raise NumericError(f'non-finite gradient for parameter {name!r}')


def sgd_step(params, grads, lr):
    """``theta <- theta - lr * g`` for every parameter with a gradient"""
    _check_finite(grads)
    for name, param in params.items():
        grad = grads.get(name)
        if grad is not None:
            param.data -= lr * grad
    return params


@dataclass
class AdamState:
    step: int = 0
    first: dict = field(default_factory=dict)
    second: dict = field(default_factory=dict)


def adam_step(params, grads, state, lr, beta1=0.9, beta2=0.999, eps=1e-8):
    """
    One bias-corrected Adam update

    :param params: mapping of name to ``Tensor``, updated in place
    :param grads: mapping of name to gradient array
    :param state: ``AdamState`` carrying the moments and the timestep
    """
    _check_finite(grads)
    state.step += 1

    first_correction = 1.0 - beta1 ** state.step
    second_correction = 1.0 - beta2 ** state.step

    for name, param in params.items():
        grad = grads.get(name)
        if grad is None:
            continue

        if name not in state.first:
            state.first[name] = np.zeros_like(param.data)
            state.second[name] = np.zeros_like(param.data)

        first = state.first[name]
        second = state.second[name]
        first *= beta1
        first += (1.0 - beta1) * grad
        second *= beta2
        second += (1.0 - beta2) * (grad * grad)

        denominator = np.sqrt(second / second_correction) + eps
        param.data -= lr * (first / first_correction) / denominator

    return params, state


class SGD:

    def __init__(self, params, lr):
        self.params = params
        self.lr = lr

    def step(self, grads):
        sgd_step(self.params, grads, self.lr)


class Adam:

    def __init__(self, params, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.state = AdamState()

    def step(self, grads):
        adam_step(
            self.params, grads, self.state, self.lr,
            beta1=self.beta1, beta2=self.beta2, eps=self.eps
        )


def build_optimizer(name, params, lr):
    if name == OPTIMIZER_ADAM:
        return Adam(params, lr)
    if name == OPTIMIZER_SGD:
        return SGD(params, lr)
    raise ConfigError(f'Unknown optimizer {name!r}')

from django.test import SimpleTestCase

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from mahnn.exceptions import ContractError, DimensionError, NumericError
from mahnn.tensor import (
    Tape,
    Tensor,
    add,
    backward,
    concat,
    corrupted_tanh_gradient,
    dropout,
    finite_diff_check,
    finite_diff_report,
    getitem,
    log,
    matmul,
    max_along,
    mul,
    pointwise,
    precision,
    relu,
    sigmoid,
    softmax_along,
    stack,
    sum_along,
    take_rows,
    tanh,
)


class TapeTest(SimpleTestCase):

    def test_broadcast_add_gradient_is_summed(self):
        a = Tensor(np.ones((2, 3)), requires_grad=True)
        b = Tensor(np.arange(3.0), requires_grad=True)

        with Tape() as tape:
            loss = sum_along(add(a, b))
        gradients = tape.backward(loss)

        assert_array_equal(gradients[a], np.ones((2, 3)))
        assert_array_equal(gradients[b], np.full(3, 2.0))
        assert_array_equal(b.grad, np.full(3, 2.0))

    def test_gradients_of_shared_inputs_accumulate(self):
        x = Tensor(np.array([1.0, -2.0, 3.0]), requires_grad=True)

        with Tape() as tape:
            loss = sum_along(add(mul(x, x), x))
        gradients = tape.backward(loss)

        assert_allclose(gradients[x], 2 * x.data + 1)

    def test_non_scalar_loss_is_rejected(self):
        x = Tensor(np.ones(3), requires_grad=True)

        with Tape() as tape:
            y = mul(x, x)

        with self.assertRaises(ContractError):
            tape.backward(y)

    def test_loss_from_another_tape_is_rejected(self):
        x = Tensor(np.ones(3), requires_grad=True)

        with Tape():
            loss = sum_along(x)

        with self.assertRaises(ContractError):
            Tape().backward(loss)

    def test_leaf_loss_gets_unit_gradient(self):
        x = Tensor(2.0, requires_grad=True)
        gradients = backward(x)

        assert_array_equal(gradients[x], 1.0)

    def test_nothing_is_recorded_without_a_tape(self):
        x = Tensor(np.ones(3), requires_grad=True)
        y = mul(x, x)

        self.assertTrue(y.is_leaf)

    def test_constants_are_not_recorded(self):
        with Tape() as tape:
            add(Tensor(np.ones(2)), Tensor(np.ones(2)))

        self.assertEqual(len(tape), 0)

    def test_tapes_nest(self):
        x = Tensor(np.ones(2), requires_grad=True)

        with Tape() as outer:
            with Tape() as inner:
                sum_along(x)
            self.assertIs(Tape.current(), outer)

        self.assertEqual(len(inner), 1)
        self.assertEqual(len(outer), 0)
        self.assertIsNone(Tape.current())

    def test_replaying_a_tape_gives_identical_gradients(self):
        rng = np.random.default_rng(3)
        x = Tensor(rng.normal(size=(3, 4)), requires_grad=True)
        w = Tensor(rng.normal(size=(4, 2)), requires_grad=True)

        with Tape() as tape:
            scores = softmax_along(tanh(matmul(x, w)), axis=0)
            loss = sum_along(mul(scores, scores))
        first = tape.backward(loss)
        second = tape.backward(loss)

        for tensor in (x, w):
            self.assertEqual(
                first[tensor].tobytes(), second[tensor].tobytes()
            )


class OperationTest(SimpleTestCase):

    def test_matmul_shape_mismatch(self):
        with self.assertRaises(DimensionError) as context:
            matmul(Tensor(np.ones((2, 3))), Tensor(np.ones((4, 2))))

        self.assertEqual(context.exception.shapes, ((2, 3), (4, 2)))

    def test_softmax_sums_to_one_and_survives_large_scores(self):
        x = Tensor(np.array([[1000.0, 1000.0, -1000.0], [0.0, 1.0, 2.0]]))
        y = softmax_along(x, axis=-1)

        assert_allclose(y.data.sum(axis=-1), np.ones(2))
        assert_allclose(y.data[0], [0.5, 0.5, 0.0])

    def test_softmax_rejects_nan(self):
        with self.assertRaises(NumericError):
            softmax_along(Tensor(np.array([0.0, np.nan])))

    def test_max_gradient_goes_to_lowest_tied_index(self):
        x = Tensor(np.array([1.0, 3.0, 3.0]), requires_grad=True)

        with Tape() as tape:
            loss = max_along(x, axis=-1)
        gradients = tape.backward(loss)

        self.assertEqual(loss.item(), 3.0)
        assert_array_equal(gradients[x], [0.0, 1.0, 0.0])

    def test_take_rows_accumulates_repeated_ids(self):
        table = Tensor(np.arange(6.0).reshape(3, 2), requires_grad=True)

        with Tape() as tape:
            loss = sum_along(take_rows(table, [[0, 2], [2, 2]]))
        gradients = tape.backward(loss)

        assert_array_equal(gradients[table], [[1, 1], [0, 0], [3, 3]])

    def test_take_rows_out_of_range(self):
        table = Tensor(np.zeros((3, 2)))

        with self.assertRaises(IndexError):
            take_rows(table, [0, 3])

    def test_log_is_clamped(self):
        x = Tensor(np.array([0.0, 1.0]))
        y = log(x, floor=1e-12)

        assert_allclose(y.data, [np.log(1e-12), 0.0])

    def test_sigmoid_is_stable(self):
        y = sigmoid(Tensor(np.array([-1000.0, 0.0, 1000.0])))

        assert_allclose(y.data, [0.0, 0.5, 1.0])

    def test_relu(self):
        y = relu(Tensor(np.array([-1.0, 0.0, 2.0])))

        assert_array_equal(y.data, [0.0, 0.0, 2.0])

    def test_pointwise_dispatch(self):
        x = Tensor(np.array([0.5]))

        assert_array_equal(pointwise('tanh', x).data, np.tanh([0.5]))
        with self.assertRaises(ContractError):
            pointwise('cosh', x)

    def test_concat_stack_and_fancy_index_gradients(self):
        rng = np.random.default_rng(0)
        a = Tensor(rng.normal(size=(2, 3)), requires_grad=True)
        b = Tensor(rng.normal(size=(2, 3)), requires_grad=True)

        def objective():
            joined = concat([a, b], axis=-1)
            stacked = stack([a, b], axis=0)
            rows, columns = np.array([0, 1, 1]), np.array([0, 4, 5])
            picked = getitem(joined, (rows, columns))
            return add(
                sum_along(tanh(picked)),
                sum_along(mul(stacked, stacked)),
            )

        self.assertLess(finite_diff_check(objective, [a, b]), 1e-6)

    def test_dropout_outside_training_is_identity(self):
        x = Tensor(np.ones((2, 3)))

        self.assertIs(dropout(x, 0.5, None, training=False), x)
        self.assertIs(dropout(x, 0.0, None, training=True), x)

    def test_train_mode_dropout_needs_an_rng(self):
        with self.assertRaises(ContractError):
            dropout(Tensor(np.ones(3)), 0.5, None, training=True)

    def test_dropout_scales_kept_entries(self):
        y = dropout(Tensor(np.ones(1000)), 0.5, np.random.default_rng(0),
                    training=True)

        self.assertEqual(set(np.unique(y.data)), {0.0, 2.0})


class PrecisionTest(SimpleTestCase):

    def test_precision_switch(self):
        with precision('f32'):
            self.assertEqual(Tensor([1.0]).data.dtype, np.float32)
        self.assertEqual(Tensor([1.0]).data.dtype, np.float64)

    def test_unknown_precision(self):
        with self.assertRaises(ContractError):
            with precision('f16'):
                pass


class FiniteDifferenceTest(SimpleTestCase):

    def setUp(self):
        rng = np.random.default_rng(7)
        self.x = Tensor(rng.normal(size=(3, 4)), requires_grad=True)
        self.w = Tensor(rng.normal(size=(4, 2)), requires_grad=True)

    def objective(self):
        return sum_along(tanh(matmul(self.x, self.w)))

    def test_autodiff_matches_central_differences(self):
        self.assertLess(finite_diff_check(self.objective, [self.x, self.w]),
                        1e-6)

    def test_corrupted_tanh_gradient_is_caught(self):
        with corrupted_tanh_gradient():
            error = finite_diff_check(self.objective, [self.x, self.w])

        self.assertGreater(error, 1e-4)

    def test_frozen_parameters_are_skipped(self):
        self.w.requires_grad = False
        report = finite_diff_report(
            self.objective, {'x': self.x, 'w': self.w}
        )

        self.assertEqual(list(report), ['x'])

    def test_needs_64_bit_precision(self):
        with precision('f32'):
            with self.assertRaises(ContractError):
                finite_diff_check(self.objective, [self.x])

    def test_needs_positive_step(self):
        with self.assertRaises(ContractError):
            finite_diff_check(self.objective, [self.x], eps=0)

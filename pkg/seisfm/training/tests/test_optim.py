import unittest

import numpy as np

from seisfm.exceptions import ConfigurationError
from training import AdamW, FreezeViolation, TrainConfig, adamw_step, collect_gradients
from training.store import DECODER, ENCODER, ParameterStore

import training.tests.helper as helper


class AdamWStepTests(unittest.TestCase):

    def test_zero_gradients_no_decay(self):
        store = helper.create_store(np.float64)
        before = store.snapshot()
        grads = {n: np.zeros_like(t.data) for n, t in store.items()}
        config = TrainConfig(weight_decay=0.0)
        moments = None
        for t in range(1, 4):
            moments = adamw_step(store, grads, config, t, moments)
        for name, value in before.items():
            np.testing.assert_array_equal(store[name].data, value)

    def test_single_step_closed_form(self):
        store = ParameterStore(np.float64)
        store.add('encoder.p', np.array([1.0]), ENCODER)
        adamw_step(store, {'encoder.p': np.array([1.0])}, TrainConfig(lr=0.1, weight_decay=0.0), 1)
        self.assertAlmostEqual(store['encoder.p'].data[0], 1 - 0.1 / (1 + 1e-8), delta=1e-12)

    def test_quadratic_step_with_decay(self):
        # f(p) = p^2 / 2 at p = 3, so g = 3; decay shrinks p before the Adam step.
        store = ParameterStore(np.float64)
        store.add('decoder.p', np.array([3.0]), DECODER)
        config = TrainConfig(lr=0.01, weight_decay=0.1)
        adamw_step(store, {'decoder.p': np.array([3.0])}, config, 1)
        expected = 3.0 * (1 - 0.01 * 0.1) - 0.01 * 3.0 / (3.0 + 1e-8)
        self.assertAlmostEqual(store['decoder.p'].data[0], expected, delta=1e-12)

    def test_bias_correction_second_step(self):
        store = ParameterStore(np.float64)
        store.add('encoder.p', np.array([0.0]), ENCODER)
        config = TrainConfig(lr=1.0, weight_decay=0.0)
        moments = adamw_step(store, {'encoder.p': np.array([2.0])}, config, 1)
        adamw_step(store, {'encoder.p': np.array([1.0])}, config, 2, moments)
        m = 0.9 * 0.2 + 0.1 * 1.0
        v = 0.999 * 0.004 + 0.001 * 1.0
        step2 = (m / (1 - 0.9 ** 2)) / (np.sqrt(v / (1 - 0.999 ** 2)) + 1e-8)
        step1 = 1.0 / (1.0 + 1e-8 / 2.0)
        self.assertAlmostEqual(store['encoder.p'].data[0], -step1 - step2, delta=1e-9)

    def test_frozen_gradient_rejected(self):
        store = helper.create_store()
        store.set_trainable(ENCODER, False)
        with self.assertRaises(FreezeViolation):
            adamw_step(store, {'encoder.stem.bias': np.ones(4)}, TrainConfig(), 1)

    def test_frozen_partition_bit_identical(self):
        store = helper.create_store()
        store.set_trainable(ENCODER, False)
        digest = store.digest(ENCODER)
        decoder_digest = store.digest(DECODER)
        grads = {n: np.ones_like(t.data) for n, t in store.items(DECODER)}
        moments = {}
        for t in range(1, 101):
            adamw_step(store, grads, TrainConfig(), t, moments)
        self.assertEqual(store.digest(ENCODER), digest)
        self.assertNotEqual(store.digest(DECODER), decoder_digest)

    def test_step_numbering(self):
        with self.assertRaises(ConfigurationError):
            adamw_step(helper.create_store(), {}, TrainConfig(), 0)


class CollectGradientsTests(unittest.TestCase):

    def test_frozen_tensor_with_gradient(self):
        store = helper.create_store()
        store.set_trainable(ENCODER, False)
        store['encoder.stem.bias'].grad = np.ones(4)
        with self.assertRaises(FreezeViolation):
            collect_gradients(store)

    def test_optimizer_counts_steps(self):
        store = helper.create_store()
        for _, tensor in store.items():
            tensor.grad = np.ones_like(tensor.data)
        optimizer = AdamW(store, TrainConfig())
        optimizer.step()
        optimizer.step()
        self.assertEqual(optimizer.t, 2)
        optimizer.zero_grad()
        self.assertTrue(all(t.grad is None for _, t in store.items()))


class TrainConfigTests(unittest.TestCase):

    def test_defaults(self):
        config = TrainConfig().validate()
        self.assertEqual((config.lr, config.weight_decay, config.betas, config.batch), (0.001, 0.01, (0.9, 0.999), 8))

    def test_task_epochs(self):
        config = TrainConfig(epochs=3, task_epochs={'demultiple': 50})
        self.assertEqual(config.epochs_for('demultiple'), 50)
        self.assertEqual(config.epochs_for('denoise'), 3)
        self.assertEqual(config.epochs_for(None), 3)

    def test_invalid(self):
        for config in (TrainConfig(lr=0), TrainConfig(epochs=0), TrainConfig(batch=0), TrainConfig(schedule='cosine'),
                       TrainConfig(betas=(0.9, 1.0)), TrainConfig(loss='huber'), TrainConfig(weight_decay=-1)):
            with self.assertRaises(ConfigurationError):
                config.validate()

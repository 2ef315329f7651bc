import unittest

import numpy as np

from decoder import (
    DOUBLE_CONV, MODERN_CONV, TRANSPOSED_CONV, ConfigurationError, DecoderConfig, block_parameter_count,
    build_model,
)
from decoder.build import DoubleConv, ModernConv
from encoders import CONV, GLOBAL, HYBRID, WINDOWED
from tensorkit import ShapeError, Tensor, backward, grad_check
from training.store import DECODER, ParameterStore

import decoder.tests.helper as helper
import encoders.tests.helper as encoder_helper


class BuildDecoderTests(unittest.TestCase):

    def test_five_upsampling_steps(self):
        decoder = helper.build()
        self.assertEqual(decoder.upsampling_steps, 5)
        out = decoder.decode(helper.random_pyramid(helper.CONV_TINY_SHAPES))
        self.assertEqual(out.shape, (1, 64, 64))
        self.assertTrue(np.isfinite(out.data).all())

    def test_without_skips_single_adapter(self):
        decoder = helper.build(skip_connections=False)
        self.assertEqual(len(decoder.adapters), 1)
        self.assertEqual(decoder.upsampling_steps, 5)
        self.assertFalse([n for n in decoder.store.names() if n.startswith(('decoder.adapter1', 'decoder.adapter2', 'decoder.adapter3'))])

    def test_same_seed_bit_identical(self):
        self.assertEqual(helper.build(seed=5).store.digest(), helper.build(seed=5).store.digest())

    def test_zero_initialised_head(self):
        decoder = helper.build(zero_init_head=True)
        pyramid = helper.random_pyramid(helper.CONV_TINY_SHAPES)
        for e in pyramid:
            e.data[...] = 0.0
        np.testing.assert_array_equal(decoder.decode(pyramid).data, np.zeros((1, 64, 64)))

    def test_non_hierarchical_pyramid(self):
        for skip in (True, False):
            decoder = helper.build(helper.TRUNK_SHAPES, output_shape=(32, 32), skip_connections=skip)
            out = decoder.decode(helper.random_pyramid(helper.TRUNK_SHAPES, batch=2))
            self.assertEqual(out.shape, (2, 32, 32))
        decoder = helper.build(helper.TRUNK_SHAPES, output_shape=(32, 32))
        self.assertEqual([len(a.ups) for a in decoder.adapters], [3, 2, 1, 0])

    def test_transposed_conv_and_double_conv(self):
        decoder = helper.build(block=DOUBLE_CONV, upsample=TRANSPOSED_CONV)
        self.assertEqual(decoder.decode(helper.random_pyramid(helper.CONV_TINY_SHAPES)).shape, (1, 64, 64))

    def test_mismatched_pyramid(self):
        decoder = helper.build()
        with self.assertRaises(ShapeError):
            decoder.decode(helper.random_pyramid(helper.VIT_TINY_SHAPES))

    def test_unbridgeable_strides(self):
        with self.assertRaises(ConfigurationError):
            helper.build([(16, 18, 18), (32, 9, 9), (64, 5, 5), (128, 3, 3)])
        with self.assertRaises(ConfigurationError):
            helper.build(output_shape=(48, 64))

    def test_invalid_config(self):
        for config in (DecoderConfig(block='triple-conv'), DecoderConfig(upsample='nearest'),
                       DecoderConfig(bottleneck_multiplier=0), DecoderConfig(channels=(8, 4))):
            with self.assertRaises(ConfigurationError):
                config.validate()

    def test_custom_widths(self):
        decoder = helper.build(skip_connections=False, channels=(16, 8, 4), head_channels=4)
        widths = [block.body.contract.w.shape[0] for _, block in decoder.steps]
        self.assertEqual(widths, [8, 4, 4, 4, 4])


class GradientFlowTests(unittest.TestCase):

    def regression_loss(self, decoder, pyramid):
        out = decoder.decode(pyramid)
        target = Tensor(np.random.default_rng(1).standard_normal(out.shape))
        return (out - target).square().mean()

    def test_every_stage_receives_gradient_with_skips(self):
        pyramid = helper.random_pyramid(helper.CONV_TINY_SHAPES, requires_grad=True)
        backward(self.regression_loss(helper.build(), pyramid))
        for e in pyramid:
            self.assertIsNotNone(e.grad)
            self.assertGreater(np.abs(e.grad).sum(), 0.0)

    def test_only_stage_four_without_skips(self):
        pyramid = helper.random_pyramid(helper.CONV_TINY_SHAPES, requires_grad=True)
        backward(self.regression_loss(helper.build(skip_connections=False), pyramid))
        for e in pyramid.embeddings[:3]:
            self.assertIsNone(e.grad)
        self.assertGreater(np.abs(pyramid[3].grad).sum(), 0.0)

    def test_encoder_stages_receive_gradient(self):
        for archetype in (CONV, WINDOWED, HYBRID):
            model = build_model(encoder_helper.small_config(archetype), DecoderConfig(), seed=0, dtype=np.float64)
            x = encoder_helper.random_gathers((2, 16, 16))
            loss = (model(x) - Tensor(np.ones((2, 16, 16)))).abs().mean()
            backward(loss)
            for s in range(1, 5):
                grads = [t.grad for n, t in model.store.items() if n.startswith('encoder.stage%d.' % s)]
                self.assertTrue(all(g is not None for g in grads), (archetype, s))
                self.assertGreater(sum(np.abs(g).sum() for g in grads), 0.0, (archetype, s))


class ParameterCountTests(unittest.TestCase):

    def test_closed_form_matches_built_blocks(self):
        rng = np.random.default_rng(0)
        for kind, cls in ((DOUBLE_CONV, DoubleConv), (MODERN_CONV, ModernConv)):
            for c_in, c_out, m in ((24, 8, 2), (8, 8, 1), (192, 64, 3)):
                store = ParameterStore()
                cls(store, 'block', DECODER, rng, c_in, c_out, m)
                self.assertEqual(store.count(), block_parameter_count(kind, c_in, c_out, m))

    def test_modern_conv_is_smaller(self):
        for c_in, c_out in ((32, 16), (64, 32), (192, 64), (16, 16)):
            self.assertLess(block_parameter_count(MODERN_CONV, c_in, c_out, 2),
                            block_parameter_count(DOUBLE_CONV, c_in, c_out, 2))
        self.assertLess(helper.build(block=MODERN_CONV).parameter_count, helper.build(block=DOUBLE_CONV).parameter_count)


class ComposedModelTests(unittest.TestCase):

    def test_output_matches_input_dims(self):
        for archetype in (CONV, WINDOWED, GLOBAL, HYBRID):
            for skip in (True, False):
                model = build_model(encoder_helper.small_config(archetype, input_shape=(16, 32)),
                                    DecoderConfig(skip_connections=skip), seed=0)
                self.assertEqual(model.predict(encoder_helper.random_gathers((16, 32))).shape, (16, 32))
                self.assertEqual(model.predict(encoder_helper.random_gathers((3, 16, 32))).shape, (3, 16, 32))

    def test_full_model_l1_gradient(self):
        for archetype in (CONV, WINDOWED, GLOBAL, HYBRID):
            model = build_model(encoder_helper.small_config(archetype), DecoderConfig(head_channels=4), seed=1,
                                dtype=np.float64)
            target = Tensor(encoder_helper.random_gathers((16, 16), seed=9))

            def loss(x):
                return (model(x) - target).abs().mean()
            for seed in (0, 1, 2):
                point = encoder_helper.random_gathers((16, 16), seed=3 + seed)
                report = grad_check(loss, point, h=1e-5, tol=1e-4, coordinates=20, seed=seed)
                self.assertLess(report.max_rel_error, 1e-4, "%s (seed %d): %s" % (archetype, seed, report))

    def test_full_model_parameter_gradient(self):
        model = build_model(encoder_helper.small_config(WINDOWED), DecoderConfig(head_channels=4), seed=1,
                            dtype=np.float64)
        x = encoder_helper.random_gathers((16, 16), seed=3)
        target = Tensor(encoder_helper.random_gathers((16, 16), seed=9))
        stem = model.encoder.stem

        def loss(kernel):
            original = stem.kernel
            stem.kernel = kernel
            try:
                return (model(x) - target).square().mean()
            finally:
                stem.kernel = original
        report = grad_check(loss, stem.kernel.data, coordinates=8, seed=0)
        self.assertLess(report.max_rel_error, 1e-3, str(report))

"""Finite-difference checks of every differentiable primitive at 64-bit precision."""
import unittest

import numpy as np

from tensorkit import (
    Tensor, attention, bilinear_upsample2x, channel_layernorm, concat, conv2d, gelu, grad_check,
    layernorm, linear, roll, softmax, transposed_conv2x, window_merge, window_partition,
)
from metrics import ssim

import tensorkit.tests.helper as helper


TOL = 1e-4
COORDINATES = 20


class GradCheckTests(unittest.TestCase):

    def check(self, f, shape, seeds=(0, 1, 2), scale=1.0):
        for seed in seeds:
            point = helper.random_array(shape, seed=seed, scale=scale)
            report = grad_check(f, point, h=1e-5, tol=TOL, coordinates=COORDINATES, seed=seed)
            self.assertTrue(report.passed, "%s (seed %d)" % (report, seed))

    def test_l1_signs_are_exact(self):
        target = Tensor(np.zeros((3, 4)))
        point = np.arange(12, dtype=float).reshape(3, 4) - 5.5
        report = grad_check(lambda x: (x - target).abs().sum(), point)
        self.assertTrue(report.passed)
        self.assertEqual(sorted(set(e.analytic for e in report.entries)), [-1.0, 1.0])

    def test_conv2d_input(self):
        kernel = helper.random_tensor((4, 3, 3, 3), seed=10)
        bias = helper.random_tensor((4,), seed=11)
        self.check(lambda x: helper.weighted_sum(conv2d(x, kernel, bias, stride=2, padding=1)), (2, 3, 7, 6))

    def test_conv2d_kernel(self):
        x = helper.random_tensor((2, 3, 6, 6), seed=10)
        bias = helper.random_tensor((4,), seed=11)
        self.check(lambda k: helper.weighted_sum(conv2d(x, k, bias, padding=1)), (4, 3, 3, 3))

    def test_conv2d_bias(self):
        x = helper.random_tensor((2, 3, 6, 6), seed=10)
        kernel = helper.random_tensor((4, 3, 3, 3), seed=12)
        self.check(lambda b: helper.weighted_sum(conv2d(x, kernel, b)), (4,))

    def test_depthwise_conv2d(self):
        kernel = helper.random_tensor((4, 1, 7, 7), seed=10)
        bias = Tensor(np.zeros(4))
        self.check(lambda x: helper.weighted_sum(conv2d(x, kernel, bias, padding=3, groups=4)), (1, 4, 8, 8))

    def test_linear(self):
        bias = helper.random_tensor((5,), seed=11)
        x = helper.random_tensor((2, 3, 4), seed=10)
        self.check(lambda w: helper.weighted_sum(linear(x, w, bias)), (5, 4))
        weight = helper.random_tensor((5, 4), seed=12)
        self.check(lambda x: helper.weighted_sum(linear(x, weight, bias)), (2, 3, 4))

    def test_layernorm(self):
        gamma = helper.random_tensor((6,), seed=10)
        beta = helper.random_tensor((6,), seed=11)
        self.check(lambda x: helper.weighted_sum(layernorm(x, gamma, beta)), (3, 6))
        x = helper.random_tensor((3, 6), seed=12)
        self.check(lambda g: helper.weighted_sum(layernorm(x, g, beta)), (6,))

    def test_channel_layernorm(self):
        gamma = helper.random_tensor((4,), seed=10)
        beta = helper.random_tensor((4,), seed=11)
        self.check(lambda x: helper.weighted_sum(channel_layernorm(x, gamma, beta)), (2, 4, 3, 3))

    def test_attention(self):
        k = helper.random_tensor((2, 5, 4), seed=10)
        v = helper.random_tensor((2, 5, 4), seed=11)
        self.check(lambda q: helper.weighted_sum(attention(q, k, v)), (2, 5, 4))
        q = helper.random_tensor((2, 5, 4), seed=12)
        self.check(lambda k: helper.weighted_sum(attention(q, k, v)), (2, 5, 4))

    def test_gelu_and_softmax(self):
        self.check(lambda x: helper.weighted_sum(gelu(x)), (4, 5), scale=2.0)
        self.check(lambda x: helper.weighted_sum(softmax(x)), (4, 5), scale=2.0)

    def test_upsampling(self):
        self.check(lambda x: helper.weighted_sum(bilinear_upsample2x(x)), (2, 3, 4, 5))
        kernel = helper.random_tensor((3, 2, 2, 2), seed=10)
        bias = helper.random_tensor((2,), seed=11)
        self.check(lambda x: helper.weighted_sum(transposed_conv2x(x, kernel, bias)), (2, 3, 4, 4))
        x = helper.random_tensor((2, 3, 4, 4), seed=12)
        self.check(lambda k: helper.weighted_sum(transposed_conv2x(x, k, bias)), (3, 2, 2, 2))

    def test_layout_primitives(self):
        other = helper.random_tensor((2, 2, 4, 4), seed=10)
        self.check(lambda x: helper.weighted_sum(concat([x, other], axis=1)), (2, 3, 4, 4))
        self.check(lambda x: helper.weighted_sum(roll(x, (-1, -1), (2, 3))), (1, 2, 4, 4))

        def windowed(x):
            windows, layout = window_partition(x, 2)
            return helper.weighted_sum(window_merge(windows * 3.0, layout))
        self.check(windowed, (2, 4, 4))

    def test_arithmetic(self):
        other = Tensor(helper.random_array((3, 4), seed=10) ** 2 + 1.0)
        self.check(lambda x: helper.weighted_sum(x / other), (3, 4))
        self.check(lambda x: helper.weighted_sum(other / (x.square() + 1.0)), (3, 4))
        self.check(lambda x: helper.weighted_sum(x @ other.transpose(1, 0)), (2, 4))
        self.check(lambda x: (x.mean(axis=1) * 4.0).sum() - x.sum(axis=0).square().mean(), (3, 4))

    def test_ssim_against_fixed_reference(self):
        reference = helper.random_array((16, 16), seed=20)
        data_range = float(reference.max() - reference.min())
        for seed in (0, 1, 2):
            point = reference + 0.3 * helper.random_array((16, 16), seed=seed)
            report = grad_check(lambda x: ssim(x, reference, data_range), point, h=1e-5, tol=1e-3,
                                coordinates=COORDINATES, seed=seed)
            self.assertLess(report.max_rel_error, 1e-3, "%s (seed %d)" % (report, seed))

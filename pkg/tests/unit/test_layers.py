"""Tests for convolution, activators, dropout and pixel shuffling."""

import numpy as np
import pytest

from text_superres.exceptions import InvalidArgumentError
from text_superres.layers import (
    LEAKY_SLOPE,
    activate,
    activate_backward,
    conv2d,
    conv2d_backward,
    depth_to_space,
    dropout,
    space_to_depth,
)
from text_superres.models import Activator


def _naive_conv(x, kernel, bias):
    """Zero-padded same-size cross-correlation with explicit loops."""
    n, c_in, h, w = x.shape
    c_out, _, k, _ = kernel.shape
    pad = k // 2
    padded = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    out = np.zeros((n, c_out, h, w))
    for b in range(n):
        for o in range(c_out):
            for i in range(h):
                for j in range(w):
                    total = bias[o]
                    for c in range(c_in):
                        for u in range(k):
                            for v in range(k):
                                total += kernel[o, c, u, v] * padded[b, c, i + u, j + v]
                    out[b, o, i, j] = total
    return out


def _naive_depth_to_space(x, factor):
    """Pixel shuffle written out element by element."""
    n, channels, h, w = x.shape
    c_out = channels // (factor * factor)
    out = np.zeros((n, c_out, h * factor, w * factor))
    for b in range(n):
        for c in range(channels):
            block, k = divmod(c, factor * factor)
            dy, dx = divmod(k, factor)
            for i in range(h):
                for j in range(w):
                    out[b, block, factor * i + dy, factor * j + dx] = x[b, c, i, j]
    return out


class TestConv2d:
    """Test cases for conv2d and its backward pass."""

    def test_identity_kernel(self, rng):
        x = rng.random((3, 6, 7))
        kernel = np.zeros((3, 3, 3, 3))
        for c in range(3):
            kernel[c, c, 1, 1] = 1.0
        assert np.allclose(conv2d(x, kernel, np.zeros(3)), x, atol=1e-12, rtol=0)

    def test_pointwise_sum(self):
        a, b = 0.25, 0.5
        x = np.stack([np.full((4, 4), a), np.full((4, 4), b)])
        out = conv2d(x, np.ones((1, 2, 1, 1)), np.zeros(1))
        assert out.shape == (1, 4, 4)
        assert np.allclose(out, a + b)

    @pytest.mark.parametrize("seed", range(100))
    def test_matches_naive_loops(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 3))
        c_in = int(rng.integers(1, 4))
        c_out = int(rng.integers(1, 5))
        k = 3 if seed % 3 else 1
        h, w = int(rng.integers(1, 7)), int(rng.integers(1, 7))
        x = rng.standard_normal((n, c_in, h, w))
        kernel = rng.standard_normal((c_out, c_in, k, k))
        bias = rng.standard_normal(c_out)
        assert np.allclose(conv2d(x, kernel, bias), _naive_conv(x, kernel, bias), atol=1e-9)

    def test_unbatched_matches_batched(self, rng):
        x = rng.standard_normal((2, 5, 5))
        kernel = rng.standard_normal((4, 2, 3, 3))
        bias = rng.standard_normal(4)
        single = conv2d(x, kernel, bias)
        assert single.shape == (4, 5, 5)
        assert np.allclose(single, conv2d(x[np.newaxis], kernel, bias)[0])

    def test_channel_mismatch(self, rng):
        with pytest.raises(InvalidArgumentError):
            conv2d(rng.random((2, 4, 4)), np.zeros((1, 3, 3, 3)), np.zeros(1))

    def test_unsupported_kernel_size(self, rng):
        with pytest.raises(InvalidArgumentError):
            conv2d(rng.random((1, 6, 6)), np.zeros((1, 1, 5, 5)), np.zeros(1))

    @pytest.mark.parametrize("k", [1, 3])
    def test_backward_matches_finite_differences(self, rng, k):
        """conv2d is linear, so central differences are exact up to rounding."""
        x = rng.standard_normal((2, 2, 4, 5))
        kernel = rng.standard_normal((3, 2, k, k))
        bias = rng.standard_normal(3)
        g = rng.standard_normal((2, 3, 4, 5))
        grad_x, grad_kernel, grad_bias = conv2d_backward(x, kernel, g)

        def loss(xv, kv, bv):
            return float(np.sum(conv2d(xv, kv, bv) * g))

        eps = 1e-4
        for index in [(0, 0, 0, 0), (1, 1, 3, 4), (0, 1, 2, 2)]:
            dx = np.zeros_like(x)
            dx[index] = eps
            numeric = (loss(x + dx, kernel, bias) - loss(x - dx, kernel, bias)) / (2 * eps)
            assert grad_x[index] == pytest.approx(numeric, rel=1e-6, abs=1e-7)
        for index in [(0, 0, 0, 0), (2, 1, k - 1, k - 1)]:
            dk = np.zeros_like(kernel)
            dk[index] = eps
            numeric = (loss(x, kernel + dk, bias) - loss(x, kernel - dk, bias)) / (2 * eps)
            assert grad_kernel[index] == pytest.approx(numeric, rel=1e-6, abs=1e-7)
        assert np.allclose(grad_bias, g.sum(axis=(0, 2, 3)))

    def test_backward_unbatched_shapes(self, rng):
        grad_x, grad_kernel, grad_bias = conv2d_backward(
            rng.random((2, 4, 4)), rng.random((3, 2, 3, 3)), rng.random((3, 4, 4))
        )
        assert grad_x.shape == (2, 4, 4)
        assert grad_kernel.shape == (3, 2, 3, 3)
        assert grad_bias.shape == (3,)


class TestActivators:
    """Test cases for activate and activate_backward."""

    def test_prelu_values(self):
        x = np.array([-3.0, -4.0, 2.0]).reshape(1, 1, 3)
        assert activate(x, Activator.PRELU, np.array([0.0])).ravel().tolist() == [0.0, 0.0, 2.0]
        assert activate(x, Activator.PRELU, np.array([0.25])).ravel().tolist() == [-0.75, -1.0, 2.0]

    def test_per_channel_slopes(self):
        x = np.full((2, 1, 1), -2.0)
        out = activate(x, Activator.PRELU, np.array([0.5, 0.1]))
        assert out.ravel().tolist() == [-1.0, pytest.approx(-0.2)]

    def test_prelu_needs_slopes(self):
        with pytest.raises(InvalidArgumentError):
            activate(np.zeros((2, 1, 1)), Activator.PRELU, np.array([0.1]))
        with pytest.raises(InvalidArgumentError):
            activate(np.zeros((2, 1, 1)), Activator.PRELU)

    def test_fixed_activators(self):
        x = np.array([-1.0, 0.0, 2.0]).reshape(1, 1, 3)
        assert activate(x, Activator.RELU).ravel().tolist() == [0.0, 0.0, 2.0]
        assert activate(x, Activator.LEAKY_RELU).ravel().tolist() == [-LEAKY_SLOPE, 0.0, 2.0]
        assert activate(x, Activator.SIGMOID).ravel()[1] == 0.5
        assert activate(x, Activator.TANH).ravel()[1] == 0.0
        assert activate(x, Activator.SELU).ravel()[1] == 0.0

    @pytest.mark.parametrize("kind", list(Activator))
    def test_backward_matches_finite_differences(self, rng, kind):
        x = rng.uniform(0.05, 1.0, (1, 2, 3, 3)) * rng.choice([-1.0, 1.0], (1, 2, 3, 3))
        slope = np.array([0.25, -0.1]) if kind is Activator.PRELU else None
        g = rng.standard_normal(x.shape)
        grad_x, grad_slope = activate_backward(x, kind, slope, g)
        eps = 1e-6
        numeric = (activate(x + eps, kind, slope) - activate(x - eps, kind, slope)) / (2 * eps)
        assert np.allclose(grad_x, numeric * g, rtol=1e-6, atol=1e-8)
        if kind is Activator.PRELU:
            expected = np.where(x > 0, 0.0, x * g).sum(axis=(0, 2, 3))
            assert np.allclose(grad_slope, expected)
        else:
            assert grad_slope is None


class TestDropout:
    """Test cases for inverted dropout."""

    def test_keep_one_is_identity(self, rng):
        x = rng.random((2, 3, 3))
        out, mask = dropout(x, 1.0, None)
        assert out is x
        assert mask is None

    def test_preserves_expectation(self):
        rng = np.random.default_rng(0)
        x = np.ones((100,))
        total = np.zeros_like(x)
        for _ in range(10000):
            out, _ = dropout(x, 0.8, rng)
            total += out
        assert np.allclose(total / 10000, 1.0, atol=0.03)

    def test_mask_values(self):
        out, mask = dropout(np.ones((1000,)), 0.5, np.random.default_rng(1))
        assert set(np.unique(mask).tolist()) <= {0.0, 2.0}
        assert np.array_equal(out, mask)

    def test_same_seed_same_mask(self):
        x = np.ones((50,))
        first = dropout(x, 0.8, np.random.default_rng(9))[1]
        second = dropout(x, 0.8, np.random.default_rng(9))[1]
        assert np.array_equal(first, second)


class TestPixelShuffle:
    """Test cases for depth_to_space and space_to_depth."""

    def test_four_channels_to_block(self):
        x = np.array([1.0, 2.0, 3.0, 4.0]).reshape(4, 1, 1)
        assert depth_to_space(x, 2).tolist() == [[[1.0, 2.0], [3.0, 4.0]]]

    def test_constant_stays_constant(self):
        out = depth_to_space(np.full((2, 16, 3, 5), 0.3), 4)
        assert out.shape == (2, 1, 12, 20)
        assert np.all(out == 0.3)

    def test_channel_placement(self, rng):
        x = rng.random((8, 3, 4))
        out = depth_to_space(x, 2)
        for c in range(2):
            for k in range(4):
                assert np.array_equal(out[c, k // 2 :: 2, k % 2 :: 2], x[c * 4 + k])

    @pytest.mark.parametrize("factor", [2, 4])
    def test_inverse_both_ways(self, rng, factor):
        x = rng.random((2, factor * factor, 3, 5))
        assert np.array_equal(space_to_depth(depth_to_space(x, factor), factor), x)
        y = rng.random((2, 1, 3 * factor, 5 * factor))
        assert np.array_equal(depth_to_space(space_to_depth(y, factor), factor), y)

    @pytest.mark.parametrize("seed", range(100))
    def test_matches_index_loops(self, seed):
        rng = np.random.default_rng(1000 + seed)
        factor = int(rng.choice([1, 2, 3, 4]))
        n = int(rng.integers(1, 3))
        c = int(rng.integers(1, 4))
        h, w = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        x = rng.standard_normal((n, c * factor * factor, h, w))
        expected = _naive_depth_to_space(x, factor)
        out = depth_to_space(x, factor)
        assert out.shape == expected.shape
        assert np.allclose(out, expected, atol=1e-9, rtol=0)
        assert np.array_equal(space_to_depth(out, factor), x)

    def test_space_to_depth_is_adjoint(self, rng):
        x = rng.random((4, 3, 3))
        y = rng.random((1, 6, 6))
        assert np.sum(depth_to_space(x, 2) * y) == pytest.approx(np.sum(x * space_to_depth(y, 2)))

    def test_indivisible_channels(self):
        with pytest.raises(InvalidArgumentError):
            depth_to_space(np.zeros((3, 2, 2)), 2)

    def test_indivisible_grid(self):
        with pytest.raises(InvalidArgumentError):
            space_to_depth(np.zeros((1, 5, 4)), 2)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morphan import verify
from morphan.nn import layers as L
from morphan.nn.gradcheck import grad_check, numeric_gradient, relative_error
from morphan.nn.loss import BCE_EPS, bce_loss, bce_mean
from morphan.nn.optim import AdamState, adam_step


class TestShapes:
    def test_conv1x2_stride2(self):
        layer = L.Conv1x2Stride2(5)
        out, _ = layer.forward(np.ones((3, 7, 4), dtype=np.float32))
        assert out.shape == (3, 5, 7, 2)

    def test_conv2x2_valid(self):
        layer = L.Conv2x2Valid(5, 4)
        out, _ = layer.forward(np.ones((3, 5, 7, 2), dtype=np.float32))
        assert out.shape == (3, 4, 6, 1)

    def test_char_conv_bank_keeps_length(self):
        layer = L.CharConvBank(6, m=4, filters=3)
        out, _ = layer.forward(np.array([[0, 1, 2, -1, -1]]))
        assert out.shape == (1, 15, 5)

    def test_bad_shapes_raise(self):
        with pytest.raises(L.ShapeError):
            L.Conv1x2Stride2(2).forward(np.ones((3, 7, 3)))
        with pytest.raises(L.ShapeError):
            L.Dense(3, 1).forward(np.ones((2, 4)))
        with pytest.raises(L.ShapeError):
            L.CharConvBank(3, m=2).forward(np.array([[3]]))


class TestConvolutionValues:
    def test_conv1x2_matches_loops(self):
        rng = np.random.default_rng(0)
        layer = L.Conv1x2Stride2(3, rng=rng, dtype=np.float64)
        layer.params["bias"][:] = rng.normal(size=3)
        x = rng.normal(size=(2, 5, 4))
        out, _ = layer.forward(x)
        w, b = layer.params["weight"], layer.params["bias"]
        for bi in range(2):
            for f in range(3):
                for r in range(5):
                    for c in range(2):
                        ref = w[f, 0] * x[bi, r, 2 * c] + w[f, 1] * x[bi, r, 2 * c + 1] + b[f]
                        assert np.isclose(out[bi, f, r, c], ref)

    def test_conv2x2_matches_loops(self):
        rng = np.random.default_rng(1)
        layer = L.Conv2x2Valid(3, 2, rng=rng, dtype=np.float64)
        layer.params["bias"][:] = rng.normal(size=2)
        x = rng.normal(size=(2, 3, 4, 2))
        out, _ = layer.forward(x)
        w, b = layer.params["weight"], layer.params["bias"]
        for bi in range(2):
            for o in range(2):
                for r in range(3):
                    ref = np.sum(w[o] * x[bi, :, r:r + 2, :]) + b[o]
                    assert np.isclose(out[bi, o, r, 0], ref)

    def test_char_bank_matches_direct_convolution(self):
        rng = np.random.default_rng(2)
        layer = L.CharConvBank(4, m=3, widths=(2, 3, 4, 5, 6), filters=2, rng=rng, dtype=np.float64)
        for p in layer.params.values():
            p[...] = rng.normal(size=p.shape)
        idx = np.array([[0, 3, 1, -1, 2, 2]])
        out, _ = layer.forward(idx)
        emb = np.vstack([layer.params["char_embeddings"], np.zeros((1, 3))])
        x = emb[np.where(idx < 0, 4, idx)][0]
        for bank, w in enumerate(layer.widths):
            pad = w // 2
            xp = np.vstack([np.zeros((pad, 3)), x, np.zeros((pad, 3))])
            W, b = layer.params[f"conv{w}.weight"], layer.params[f"conv{w}.bias"]
            for f in range(2):
                for t in range(6):
                    ref = np.sum(W[f] * xp[t:t + w]) + b[f]
                    assert np.isclose(out[0, bank * 2 + f, t], ref)

    def test_unknown_character_is_zero_row(self):
        layer = L.CharConvBank(3, m=2, widths=(2,), filters=1, bias=False)
        out, _ = layer.forward(np.array([[-1, -1]]))
        assert np.all(out == 0)


class TestPoolAndActivations:
    def test_pool_respects_lengths_and_ties(self):
        x = np.array([[[1.0, 5.0, 9.0], [2.0, 2.0, 0.0]]])
        out, cache = L.MaxPoolPositions().forward(x, lengths=np.array([2]))
        assert out.tolist() == [[5.0, 2.0]]
        dx, _ = L.MaxPoolPositions().backward(cache, np.ones((1, 2)))
        assert dx.tolist() == [[[0, 1, 0], [1, 0, 0]]]

    def test_sigmoid_is_stable(self):
        out, _ = L.Sigmoid().forward(np.array([-1000.0, 0.0, 1000.0]))
        assert np.all(np.isfinite(out)) and out[1] == 0.5
        assert out[0] == 0.0 and out[2] == 1.0

    def test_relu_gradient_zero_at_kink(self):
        relu = L.ReLU()
        _, cache = relu.forward(np.array([-1.0, 0.0, 2.0]))
        dx, _ = relu.backward(cache, np.ones(3))
        assert dx.tolist() == [0.0, 0.0, 1.0]

    def test_non_finite_detected(self):
        with pytest.raises(L.NonFiniteError):
            L.Dense(2, 1).forward(np.array([[np.nan, 1.0]], dtype=np.float32))


class TestLoss:
    def test_values(self):
        loss, grad = bce_loss(0.25, 1.0)
        assert np.isclose(loss, -np.log(0.25)) and np.isclose(grad, -4.0)

    def test_clamp_keeps_finite(self):
        loss, grad = bce_loss(np.array([0.0, 1.0]), np.array([1.0, 0.0]))
        assert np.allclose(loss, -np.log(BCE_EPS), rtol=1e-6)
        assert np.all(np.isfinite(grad))

    def test_mean_divides_gradient(self):
        p, y = np.array([0.2, 0.7]), np.array([0.0, 1.0])
        m, g = bce_mean(p, y)
        assert np.isclose(m, np.mean(bce_loss(p, y)[0]))
        assert np.allclose(g, bce_loss(p, y)[1] / 2)

    @settings(deadline=None)
    @given(st.floats(0.01, 0.99), st.sampled_from([0.0, 1.0]))
    def test_gradient_matches_finite_difference(self, p, y):
        h = 1e-6
        num = (bce_loss(p + h, y)[0] - bce_loss(p - h, y)[0]) / (2 * h)
        assert np.isclose(bce_loss(p, y)[1], num, rtol=1e-4)


class TestAdam:
    def test_first_step_moves_by_lr(self):
        p = {"w": np.array([1.0, -2.0, 3.0])}
        adam_step(p, {"w": np.array([0.5, -0.1, 0.0])}, AdamState())
        # after bias correction the first update is lr * sign(g) (up to eps)
        assert np.allclose(p["w"], [1.0 - 1e-3, -2.0 + 1e-3, 3.0], atol=1e-8)

    def test_matches_reference_over_steps(self):
        rng = np.random.default_rng(0)
        w = rng.normal(size=4)
        p = {"w": w.copy()}
        st_ = AdamState(lr=0.01)
        m = v = np.zeros(4)
        for t in range(1, 6):
            g = rng.normal(size=4)
            adam_step(p, {"w": g}, st_)
            m = 0.9 * m + 0.1 * g
            v = 0.999 * v + 0.001 * g * g
            w = w - 0.01 * (m / (1 - 0.9 ** t)) / (np.sqrt(v / (1 - 0.999 ** t)) + 1e-8)
        assert np.allclose(p["w"], w)

    def test_rejects_nan(self):
        with pytest.raises(L.NonFiniteError):
            adam_step({"w": np.zeros(2)}, {"w": np.array([np.nan, 0.0])}, AdamState())


class TestGradcheck:
    def test_relative_error_floor(self):
        assert relative_error(1e-9, 0.0) == pytest.approx(1e-3)
        assert relative_error(2.0, 1.0) == 0.5

    def test_numeric_gradient_of_quadratic(self):
        x = np.array([1.0, -2.0])
        g = numeric_gradient(lambda: float(np.sum(x ** 2)), x)
        assert np.allclose(g, 2 * x)

    @pytest.mark.parametrize("kind", verify.LAYER_CHECK_KINDS)
    def test_each_layer(self, kind):
        assert max(verify.check_layer(kind, s) for s in range(5)) < verify.TOLERANCE

    def test_sequential_bce(self):
        assert verify.check_sequential_bce(0) < 1e-6

    def test_full_stack_one_seed(self):
        assert verify.check_full_stack(3) < verify.TOLERANCE

    def test_layer_without_params(self):
        assert grad_check([L.ReLU()], bce_mean, np.ones((2, 1)), np.ones((2, 1))) == 0.0

    def test_float32_rejected(self):
        from morphan.nn.gradcheck import check_parameter_gradients

        with pytest.raises(TypeError):
            check_parameter_gradients({"w": np.zeros(2, dtype=np.float32)}, lambda: 0.0, {"w": np.zeros(2)})

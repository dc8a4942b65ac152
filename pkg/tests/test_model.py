"""Core data model: validation, flat weights, scaling."""

import numpy as np
import pytest

from mlpsens import (
    Dataset,
    LayerSpec,
    NetworkSpec,
    ValidationError,
    activation,
    apply_scaler,
    fit_scaler,
    flatten_network,
    invert_scaler,
    network_from_flat,
    predict,
    validate_network,
)


def random_network(rng, structure, kinds=("sigmoid", "tanh", "linear")):
    acts = [activation(rng.choice(kinds)) for _ in structure[1:-1]]
    acts.append(activation("linear"))
    count = sum((p + 1) * n for p, n in zip(structure, structure[1:]))
    return network_from_flat(structure, rng.normal(size=count), acts)


class TestValidateNetwork:
    def test_well_formed_3_10_1(self):
        rng = np.random.default_rng(0)
        net = random_network(rng, [3, 10, 1])
        assert validate_network(net) == []

    def test_softmax_in_hidden_layer_is_flagged(self):
        rng = np.random.default_rng(1)
        layers = (
            LayerSpec(4, rng.normal(size=(3, 4)), activation("softmax")),
            LayerSpec(1, rng.normal(size=(5, 1)), activation("linear")),
        )
        net = NetworkSpec(("a", "b"), ("y",), layers)
        problems = validate_network(net)
        assert len(problems) == 1
        assert "softmax" in problems[0] and "layer 2" in problems[0]

    def test_missing_bias_row_is_a_shape_violation(self):
        rng = np.random.default_rng(2)
        layers = (
            LayerSpec(4, rng.normal(size=(5, 4)), activation("tanh")),
            # 4 rows after a 4-wide layer: bias row missing, expect 5
            LayerSpec(1, rng.normal(size=(4, 1)), activation("linear")),
        )
        net = NetworkSpec(("a", "b", "c", "d"), ("y",), layers)
        problems = validate_network(net)
        assert len(problems) == 1
        assert "5" in problems[0] and "bias" in problems[0]

    def test_duplicate_names_and_nonfinite_weights(self):
        layers = (LayerSpec(1, np.array([[np.inf], [1.0]]), activation("linear")),)
        net = NetworkSpec(("x", "x"), ("y",), layers)
        problems = validate_network(net)
        assert any("duplicate" in p for p in problems)
        assert any("non-finite" in p for p in problems)


class TestNetworkFromFlat:
    def test_single_neuron_affine(self):
        net = network_from_flat([1, 1], [1.0, 2.0], [activation("linear")])
        assert predict(net, np.array([[3.0]]))[0, 0] == pytest.approx(7.0)

    def test_3_10_1_weight_count(self):
        # (3+1)*10 + (10+1)*1 = 51
        weights = np.arange(51, dtype=float)
        net = network_from_flat(
            [3, 10, 1], weights, [activation("sigmoid"), activation("linear")]
        )
        assert validate_network(net) == []
        assert net.structure == (3, 10, 1)

    def test_count_mismatch_names_expected_and_actual(self):
        with pytest.raises(ValidationError, match="6.*5|5.*6"):
            network_from_flat([2, 2], [1.0] * 5, [activation("linear")])

    def test_flatten_round_trip(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            depth = rng.integers(2, 5)
            structure = [int(rng.integers(1, 7)) for _ in range(depth)]
            net = random_network(rng, structure)
            rebuilt = network_from_flat(
                structure,
                flatten_network(net),
                [l.activation for l in net.layers],
                net.input_names,
                net.output_names,
            )
            assert rebuilt.structure == net.structure
            for a, b in zip(net.layers, rebuilt.layers):
                np.testing.assert_array_equal(a.weights, b.weights)
                assert a.activation == b.activation

    def test_column_major_layout(self):
        # two neurons, one input: [bias1, w1, bias2, w2]
        net = network_from_flat([1, 2], [10.0, 11.0, 20.0, 21.0],
                                [activation("linear")])
        np.testing.assert_array_equal(
            net.layers[0].weights, [[10.0, 20.0], [11.0, 21.0]]
        )


class TestActivationKind:
    def test_parameter_defaults(self):
        assert activation("prelu").param == 0.01
        assert activation("elu").param == 1.0

    def test_invalid_parameters(self):
        with pytest.raises(ValidationError):
            activation("elu", 0.0)
        with pytest.raises(ValidationError):
            activation("prelu", -0.5)
        with pytest.raises(ValidationError):
            activation("gelu")


def _dataset(values, **kwargs):
    values = np.asarray(values, dtype=float)
    names = tuple(f"c{i}" for i in range(values.shape[1]))
    defaults = dict(
        column_names=names,
        values=values,
        input_columns=tuple(range(values.shape[1] - 1)),
        output_columns=(values.shape[1] - 1,),
    )
    defaults.update(kwargs)
    return Dataset(**defaults)


class TestScaler:
    def test_sample_sd_of_1_2_3_is_exactly_one(self):
        data = _dataset([[1.0, 0.0], [2.0, 0.0], [3.0, 0.0]],
                        input_columns=(0,), output_columns=())
        scaler = fit_scaler(data, [0])
        assert scaler.means == (2.0,)
        assert scaler.sds == (1.0,)

    def test_apply_then_invert_is_identity(self):
        rng = np.random.default_rng(4)
        data = _dataset(rng.normal(size=(40, 3)) * 7 + 3)
        scaler = fit_scaler(data, [0, 1, 2])
        back = invert_scaler(apply_scaler(data, scaler), scaler)
        np.testing.assert_allclose(back.values, data.values, rtol=1e-12)

    def test_applied_columns_have_zero_mean_unit_sd(self):
        rng = np.random.default_rng(5)
        data = _dataset(rng.normal(size=(60, 2)) * 4 - 2)
        scaled = apply_scaler(data, fit_scaler(data, [0, 1]))
        np.testing.assert_allclose(scaled.values.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(scaled.values.std(axis=0, ddof=1), 1.0, rtol=1e-12)

    def test_constant_column_rejected_by_name(self):
        data = _dataset([[5.0, 1.0], [5.0, 2.0], [5.0, 3.0]])
        with pytest.raises(ValidationError, match="c0"):
            fit_scaler(data, [0])


class TestDatasetInvariants:
    def test_roles_must_be_disjoint(self):
        with pytest.raises(ValidationError):
            _dataset([[1.0, 2.0]], input_columns=(0,), output_columns=(0,))

    def test_nonfinite_in_used_columns_rejected(self):
        with pytest.raises(ValidationError):
            _dataset([[1.0, np.nan]])

    def test_empty_matrix_rejected(self):
        with pytest.raises(ValidationError):
            _dataset(np.empty((0, 2)))

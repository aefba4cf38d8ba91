import json
import math

import numpy as np
import pytest

import voxcrf


def random_instance(shape, labels=2, seed=0):
    rng = np.random.default_rng(seed)
    intensity = rng.random(shape, dtype=np.float32)
    unary = rng.uniform(-2, 2, size=shape + (labels,))
    return intensity, unary


def test_softmax_matches_numpy():
    _, unary = random_instance((3, 4, 5))
    expected = np.exp(unary - unary.max(axis=-1, keepdims=True))
    expected /= expected.sum(axis=-1, keepdims=True)
    np.testing.assert_allclose(voxcrf.softmax(unary), expected, atol=1e-12)


def test_refine_reductions():
    intensity, unary = random_instance((6, 6, 6), seed=1)
    soft = voxcrf.softmax(unary)
    beliefs, report = voxcrf.refine(intensity, unary, voxcrf.KernelSpec(w1=0, w2=0), mu=2.0)
    np.testing.assert_allclose(beliefs, soft, atol=1e-12)
    assert report["converged"]

    six, _ = voxcrf.refine(intensity, unary, voxcrf.KernelSpec(mode="six"))
    e18, _ = voxcrf.refine(intensity, unary, voxcrf.KernelSpec(mode="eighteen", alpha=0.0))
    np.testing.assert_allclose(six, e18, atol=1e-12)
    np.testing.assert_allclose(six.sum(axis=-1), 1.0, atol=1e-9)


def test_decoupled_exact_marginals_equal_mean_field():
    intensity, unary = random_instance((2, 2, 2), seed=2)
    exact, log_z = voxcrf.exact_marginals(intensity, unary, mu=0.0)
    mf, _ = voxcrf.refine(intensity, unary, mu=0.0)
    np.testing.assert_allclose(exact, mf, atol=1e-9)
    assert math.isfinite(log_z)
    with pytest.raises(voxcrf.EnumerationRefused):
        voxcrf.exact_marginals(*random_instance((3, 3, 3)))


def test_kernel_and_offsets():
    a, s = voxcrf.kernel_components(voxcrf.KernelSpec(), (1, 0, 0), 0.3, 0.3)
    assert a == pytest.approx(math.exp(-0.5), abs=1e-15)
    assert s == pytest.approx(math.exp(-0.5), abs=1e-15)
    assert len(voxcrf.neighborhood_offsets("six")) == 6
    assert len(voxcrf.neighborhood_offsets("eighteen")) == 18
    assert len(voxcrf.neighborhood_offsets("26")) == 26


def test_filter_and_mask():
    flat = np.full((5, 6, 7), 1.5, dtype=np.float32)
    np.testing.assert_allclose(voxcrf.gaussian_filter(flat, 1.0), flat, atol=1e-6)
    labels = np.zeros((8, 8, 8), dtype=np.uint8)
    labels[4, 4, 4] = 1
    np.testing.assert_array_equal(voxcrf.label_mask(labels, sigma=0.1, floor=0.5), labels.astype(np.float32))
    wide = voxcrf.label_mask(labels, sigma=2.0, floor=0.0)
    assert wide[4, 4, 4] == 1.0 and wide[4, 4, 5] > 0


def test_loss_and_precision():
    labels = np.zeros((4, 4, 4), dtype=np.uint8)
    labels[1:3, 1:3, 1:3] = 1
    uniform = np.full(labels.shape + (2,), 0.5)
    assert voxcrf.masked_cross_entropy(uniform, labels.astype(np.float32)) == pytest.approx(math.log(2), abs=1e-12)
    m = voxcrf.precision_metrics(labels, labels)
    assert (m["pos_prec"], m["neg_prec"], m["tp"]) == (100.0, 100.0, 8)
    empty = voxcrf.precision_metrics(np.zeros_like(labels), labels)
    assert empty["pos_prec"] is None


def test_synthetic_pipeline():
    intensity, labels = voxcrf.synthetic_nodule((12, 12, 12), [(5.5, 5.5, 5.5, 3, 1.0)], noise=0.3, seed=4)
    assert intensity.shape == (12, 12, 12) and labels.sum() == 136
    unary = voxcrf.unary_from_intensity(intensity)
    beliefs, _ = voxcrf.refine(intensity, unary, voxcrf.KernelSpec(mode="eighteen", alpha=0.5), mu=2.0)
    refined = voxcrf.precision_metrics(voxcrf.argmax_labels(beliefs), labels)
    plain = voxcrf.precision_metrics(voxcrf.argmax_labels(voxcrf.softmax(unary)), labels)
    assert refined["pos_prec"] + refined["neg_prec"] >= plain["pos_prec"] + plain["neg_prec"]


def test_invalid_arguments_raise():
    with pytest.raises(ValueError):
        voxcrf.KernelSpec(theta_alpha=0)
    with pytest.raises(ValueError):
        voxcrf.KernelSpec(mode="seven")
    with pytest.raises(ValueError):
        voxcrf.softmax(np.zeros((2, 2, 2, 1)))


def test_run_cli(tmp_path):
    code, out, _ = voxcrf.run_cli(["oracle-check", "--dims", "2,2,2", "--mu", "zero", "--instances", "3"])
    assert code == 0
    assert json.loads(out)["full_agreement_instances"] == 3
    code, _, err = voxcrf.run_cli(["refine", "--w1", "nope"])
    assert code == 2 and err


def test_compatibility_forms_agree():
    intensity, unary = random_instance((4, 4, 4), seed=5)
    as_int, _ = voxcrf.refine(intensity, unary, mu=2)
    as_float, _ = voxcrf.refine(intensity, unary, mu=2.0)
    as_matrix, _ = voxcrf.refine(intensity, unary, mu=np.array([[0.0, 2.0], [2.0, 0.0]]))
    np.testing.assert_array_equal(as_int, as_float)
    np.testing.assert_array_equal(as_matrix, as_float)
    with pytest.raises(ValueError):
        voxcrf.refine(intensity, unary, mu=np.eye(3))

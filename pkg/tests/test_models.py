import numpy as np
import pytest

from helpers import (
    knn_oracle,
    mlp_oracle,
    mlp_oracle_scores,
    random_knn,
    random_mlp,
    random_rf,
    random_svm,
    rf_oracle,
    svm_oracle,
)
from nilmedge.features import DEFAULT_LAYOUT
from nilmedge.models.base import Scaler, ZeroVarianceError
from nilmedge.models.forest import RfModel, TreeIntegrityError, TreeNodes
from nilmedge.models.knn import KnnModel, predict_knn
from nilmedge.models.mlp import MlpModel, predict_mlp
from nilmedge.models.svm import SvmModel, kernel_matrix, predict_svm


def _base(n_classes, f):
    return dict(class_names=tuple(f"c{k}" for k in range(n_classes)),
                layout=DEFAULT_LAYOUT, selected_indices=tuple(range(f)), scaler=None)


class TestScaler:
    def test_fit_transform(self, rng):
        x = rng.normal(3.0, 2.0, size=(200, 4))
        s = Scaler.fit(x)
        z = s.transform(x)
        np.testing.assert_allclose(z.mean(axis=0), 0, atol=1e-12)
        np.testing.assert_allclose(z.std(axis=0), 1, rtol=1e-12)

    def test_zero_variance_rejected(self, rng):
        x = rng.normal(size=(50, 3))
        x[:, 1] = 7.0
        with pytest.raises(ZeroVarianceError) as err:
            Scaler.fit(x)
        assert "1" in str(err.value)


class TestKnn:
    def test_k1_returns_matching_row_label(self, rng):
        m = random_knn(rng, k=1)
        for row in (0, 10, 30):
            assert predict_knn(m, m.train_x[row]) == m.train_y[row]

    def test_majority_two_to_one(self):
        m = KnnModel(**_base(2, 1), k=3,
                     train_x=np.array([[0.0], [0.1], [5.0]]),
                     train_y=np.array([0, 0, 1]))
        assert predict_knn(m, np.array([0.05])) == 0

    def test_matches_full_sort_oracle(self, rng):
        m = random_knn(rng, n=200, f=5, n_classes=4, k=5)
        queries = rng.normal(size=(100, 5))
        for q in queries:
            assert predict_knn(m, q) == knn_oracle(m, q)

    def test_distance_tie_prefers_lower_row(self):
        # two training rows equidistant from the query, different labels
        m = KnnModel(**_base(2, 1), k=1,
                     train_x=np.array([[1.0], [-1.0]]),
                     train_y=np.array([1, 0]))
        assert predict_knn(m, np.array([0.0])) == 1  # row 0 wins the tie

    def test_permutation_invariance_without_ties(self, rng):
        m = random_knn(rng, n=80, f=4, n_classes=3, k=5)
        perm = rng.permutation(80)
        m2 = KnnModel(**_base(3, 4), k=5, train_x=m.train_x[perm], train_y=m.train_y[perm])
        for q in rng.normal(size=(40, 4)):
            assert predict_knn(m, q) == predict_knn(m2, q)

    def test_k_larger_than_n_rejected(self, rng):
        with pytest.raises(ValueError):
            random_knn(rng, n=3, k=5)

    def test_dimension_mismatch_rejected(self, rng):
        m = random_knn(rng, f=5)
        with pytest.raises(ValueError):
            predict_knn(m, np.zeros(4))


class TestSvm:
    def test_linear_self_kernel_decision(self):
        sv = np.array([[3.0, 4.0]])
        m = SvmModel(**_base(2, 2), kernel="linear", gamma=1.0,
                     support=sv, sv_counts=np.array([1, 0]),
                     dual_coef=np.array([[1.0]]), intercepts=np.array([0.0]))
        d = m.decision_pairs(sv)[0, 0]
        assert d == 25.0  # squared norm of the SV
        assert predict_svm(m, sv[0]) == 0

    def test_rbf_kernel_is_one_at_zero_distance(self, rng):
        x = rng.normal(size=(3, 4))
        k = kernel_matrix("rbf", 0.7, x, x)
        np.testing.assert_allclose(np.diag(k), 1.0, rtol=0, atol=0)

    def test_matches_pairwise_enumeration_oracle(self, rng):
        m = random_svm(rng, n_classes=4)
        for q in rng.normal(size=(100, 5)):
            assert predict_svm(m, q) == svm_oracle(m, q)

    def test_linear_kernel_against_oracle(self, rng):
        m = random_svm(rng, n_classes=3, kernel="linear")
        for q in rng.normal(size=(50, 5)):
            assert predict_svm(m, q) == svm_oracle(m, q)

    def test_rbf_translation_invariance(self, rng):
        m = random_svm(rng, n_classes=3)
        shift = rng.normal(size=5)
        shifted = SvmModel(**_base(3, 5), kernel="rbf", gamma=m.gamma,
                           support=m.support + shift, sv_counts=m.sv_counts,
                           dual_coef=m.dual_coef, intercepts=m.intercepts)
        x = rng.normal(size=(20, 5))
        np.testing.assert_allclose(m.decision_pairs(x), shifted.decision_pairs(x + shift),
                                   rtol=1e-9)

    def test_dual_coef_shape_enforced(self, rng):
        with pytest.raises(ValueError):
            SvmModel(**_base(3, 2), kernel="rbf", gamma=1.0,
                     support=rng.normal(size=(6, 2)), sv_counts=np.array([2, 2, 2]),
                     dual_coef=rng.normal(size=(3, 6)),  # should be (2, 6)
                     intercepts=np.zeros(3))

    def test_paper_scale_coefficient_accounting(self, rng):
        # 10 classes with a shared pool of 1950 SVs carries 9 coefficient
        # rows, i.e. 17550 dual coefficients
        m = random_svm(rng, n_sv_per_class=195, f=8, n_classes=10)
        assert m.dual_coef.shape == (9, 1950)
        assert m.dual_coef.size == 17550


class TestMlp:
    def test_all_zero_weights_tie_break_to_class_zero(self):
        m = MlpModel(**_base(3, 4),
                     weights=(np.zeros((5, 4)), np.zeros((3, 5))),
                     biases=(np.zeros(5), np.zeros(3)))
        assert predict_mlp(m, np.ones(4)) == 0

    def test_single_path_sign_toggle(self):
        w1 = np.zeros((2, 2)); w1[0, 0] = 1.0
        w2 = np.zeros((2, 2)); w2[0, 0] = 1.0
        m = MlpModel(**_base(2, 2), weights=(w1, w2), biases=(np.zeros(2), np.zeros(2)))
        assert predict_mlp(m, np.array([3.0, 0.0])) == 0
        assert predict_mlp(m, np.array([-3.0, 0.0])) == 0  # relu kills it, tie -> 0
        w2b = np.zeros((2, 2)); w2b[1, 0] = 1.0
        m2 = MlpModel(**_base(2, 2), weights=(w1, w2b), biases=(np.zeros(2), np.zeros(2)))
        assert predict_mlp(m2, np.array([3.0, 0.0])) == 1

    def test_matches_scalar_oracle(self, rng):
        m = random_mlp(rng, sizes=(4, 3, 3, 2))
        for q in rng.normal(size=(100, 4)):
            got_scores = m.scores_matrix(q[None, :])[0]
            want_scores = mlp_oracle_scores(m, q)
            np.testing.assert_allclose(got_scores, want_scores, rtol=1e-12, atol=1e-12)
            assert predict_mlp(m, q) == mlp_oracle(m, q)

    def test_final_layer_positive_scaling_keeps_argmax(self, rng):
        m = random_mlp(rng, sizes=(4, 6, 5, 3))
        scaled = MlpModel(**_base(3, 4),
                          weights=m.weights[:-1] + (7.5 * m.weights[-1],),
                          biases=m.biases[:-1] + (7.5 * m.biases[-1],))
        x = rng.normal(size=(50, 4))
        np.testing.assert_array_equal(m.predict_matrix(x), scaled.predict_matrix(x))

    def test_inconsistent_layers_rejected(self, rng):
        with pytest.raises(ValueError):
            MlpModel(**_base(2, 3),
                     weights=(rng.normal(size=(4, 3)), rng.normal(size=(2, 5))),
                     biases=(np.zeros(4), np.zeros(2)))

    def test_parameter_count(self):
        m = MlpModel(**_base(2, 3),
                     weights=(np.zeros((4, 3)), np.zeros((2, 4))),
                     biases=(np.zeros(4), np.zeros(2)))
        assert m.parameter_count == 12 + 4 + 8 + 2
        assert m.layer_sizes == (3, 4, 2)


class TestRf:
    def test_unanimous_leaf_trees(self):
        leaf = TreeNodes(feature=[-1], threshold=[0.0], left=[-1], right=[-1], leaf_class=[2])
        m = RfModel(**_base(3, 2), trees=(leaf,) * 5)
        assert m.predict_matrix(np.zeros((1, 2)))[0] == 2

    def test_boundary_goes_left(self):
        tree = TreeNodes(feature=[0, -1, -1], threshold=[0.5, 0, 0],
                         left=[1, -1, -1], right=[2, -1, -1], leaf_class=[-1, 0, 1])
        m = RfModel(**_base(2, 1), trees=(tree,))
        assert m.predict_matrix(np.array([[0.5]]))[0] == 0  # x <= thr -> left
        assert m.predict_matrix(np.array([[0.5000001]]))[0] == 1

    def test_matches_traversal_oracle(self, rng):
        m = random_rf(rng, n_trees=100, f=5, n_classes=3, depth=5)
        for q in rng.normal(size=(50, 5)):
            assert int(m.predict_matrix(q[None, :])[0]) == rf_oracle(m, q)

    def test_monotone_transform_invariance(self, rng):
        # cube both thresholds and inputs: routing decisions are unchanged
        m = random_rf(rng, n_trees=30, f=4, n_classes=3)
        def cube(v): return np.sign(v) * np.abs(v) ** 3
        trees2 = tuple(
            TreeNodes(feature=t.feature, threshold=cube(t.threshold),
                      left=t.left, right=t.right, leaf_class=t.leaf_class)
            for t in m.trees
        )
        m2 = RfModel(**_base(3, 4), trees=trees2)
        x = rng.normal(size=(60, 4))
        np.testing.assert_array_equal(m.predict_matrix(x), m2.predict_matrix(cube(x)))

    def test_vote_tie_prefers_lowest_class(self):
        leaf0 = TreeNodes(feature=[-1], threshold=[0.0], left=[-1], right=[-1], leaf_class=[0])
        leaf2 = TreeNodes(feature=[-1], threshold=[0.0], left=[-1], right=[-1], leaf_class=[2])
        m = RfModel(**_base(3, 1), trees=(leaf2, leaf0))
        assert m.predict_matrix(np.zeros((1, 1)))[0] == 0

    def test_corrupt_child_index_rejected(self):
        with pytest.raises(TreeIntegrityError):
            tree = TreeNodes(feature=[0], threshold=[0.5], left=[5], right=[1],
                             leaf_class=[-1])
            RfModel(**_base(2, 1), trees=(tree,))

    def test_worst_case_depth(self):
        tree = TreeNodes(feature=[0, 0, -1, -1, -1],
                         threshold=[0.0, -1.0, 0, 0, 0],
                         left=[1, 3, -1, -1, -1],
                         right=[2, 4, -1, -1, -1],
                         leaf_class=[-1, -1, 0, 1, 0])
        assert tree.worst_case_depth() == 2


class TestDeterminism:
    def test_all_predictors_are_pure(self, rng):
        models = [random_knn(rng), random_svm(rng), random_mlp(rng, (5, 4, 3)),
                  random_rf(rng, f=5)]
        x = rng.normal(size=(20, 5))
        for m in models:
            a = m.predict_matrix(x[:, : m.n_features])
            b = m.predict_matrix(x[:, : m.n_features])
            np.testing.assert_array_equal(a, b)

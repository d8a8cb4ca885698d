import numpy as np
import pytest

from presmon.encoding import PrefixEncoder
from presmon.estimator import (
    Hyperparams,
    OutcomeEstimator,
    case_folds,
    make_training_set,
    tune_hyperparams,
)
from presmon.eventlog.model import EventLog, Prefix, Trace, Event
from presmon.exceptions import TrainingError
from presmon.synthetic import SyntheticSpec, generate_synthetic

from conftest import make_trace


@pytest.fixture(scope="module")
def small_log():
    return generate_synthetic(SyntheticSpec(n_cases=150, class_ratio=0.5, length_min=3,
                                            length_median=5, length_max=8, signal=0.9, seed=11))


class TestTrainingSet:
    def test_row_count_per_trace(self):
        log = EventLog((make_trace("c", ["a", "b", "c", "d"], outcome=True),))
        enc = PrefixEncoder().fit(log)
        X, y = make_training_set(log, enc)
        assert X.shape[0] == 3  # lengths 1..3 only, the completed case decides nothing
        assert (y == 1).all()

    def test_length_one_contributes_nothing(self):
        log = EventLog((make_trace("c", ["a"]), make_trace("d", ["a", "b"], outcome=True)))
        enc = PrefixEncoder().fit(log)
        X, y = make_training_set(log, enc)
        assert X.shape[0] == 1

    def test_row_count_arithmetic(self):
        log = EventLog((make_trace("c", list("abc")), make_trace("d", list("abcde"))))
        enc = PrefixEncoder().fit(log)
        X, _ = make_training_set(log, enc)
        assert X.shape[0] == (3 - 1) + (5 - 1) == 6

    def test_zero_rows_is_training_error(self):
        log = EventLog((make_trace("c", ["a"]),))
        enc = PrefixEncoder().fit(log)
        with pytest.raises(TrainingError):
            make_training_set(log, enc)


class TestHyperparams:
    def test_validation(self):
        with pytest.raises(ValueError):
            Hyperparams(n_trees=0)
        with pytest.raises(ValueError):
            Hyperparams(subsample=1.5)
        with pytest.raises(ValueError):
            Hyperparams(learning_rate=0.0)

    def test_dict_roundtrip(self):
        hp = Hyperparams(n_trees=33, learning_rate=0.2)
        assert Hyperparams(**hp.to_dict()) == hp


class TestCaseFolds:
    def test_all_rows_of_a_case_share_a_fold(self, rng):
        case_ids = np.repeat([f"c{i}" for i in range(30)], 4)
        folds = case_folds(case_ids, 3, seed=0)
        for cid in np.unique(case_ids):
            assert np.unique(folds[case_ids == cid]).size == 1
        assert set(np.unique(folds)) == {0, 1, 2}

    def test_deterministic(self):
        case_ids = np.array([f"c{i}" for i in range(20)])
        assert np.array_equal(case_folds(case_ids, 3, 7), case_folds(case_ids, 3, 7))


def _xor_log(n=120, seed=0):
    # outcome = parity of two binary case attributes: a depth-1 stump cannot
    # separate it, a deeper tree can
    rng = np.random.default_rng(seed)
    traces = []
    for i in range(n):
        x1, x2 = int(rng.integers(2)), int(rng.integers(2))
        outcome = bool(x1 ^ x2)
        traces.append(make_trace(f"c{i}", ["a", "b", "c"], outcome=outcome,
                                 case_attrs={"x1": float(x1), "x2": float(x2)},
                                 t0=1000.0 + i))
    return EventLog(tuple(traces))


class TestTuning:
    def test_budget_one_returns_default(self, small_log):
        enc = PrefixEncoder().fit(small_log)
        assert tune_hyperparams(small_log, enc, 1, seed=0) == Hyperparams()

    def test_budget_zero_rejected(self, small_log):
        enc = PrefixEncoder().fit(small_log)
        with pytest.raises(ValueError):
            tune_hyperparams(small_log, enc, 0)

    def test_deeper_candidate_wins_on_nonlinear_data(self):
        log = _xor_log()
        enc = PrefixEncoder().fit(log)
        shallow = Hyperparams(n_trees=1, max_depth=1)
        deep = Hyperparams(n_trees=60, max_depth=3)
        best = tune_hyperparams(log, enc, 2, seed=0, candidates=[shallow, deep])
        assert best == deep

    def test_same_seed_same_selection(self, small_log):
        enc = PrefixEncoder().fit(small_log)
        a = tune_hyperparams(small_log, enc, 3, seed=4)
        b = tune_hyperparams(small_log, enc, 3, seed=4)
        assert a == b


class TestOutcomeEstimator:
    @pytest.fixture(scope="class")
    def trained(self, small_log):
        return OutcomeEstimator.train(small_log, Hyperparams(n_trees=40))

    def test_predictions_in_unit_interval(self, trained, small_log):
        for trace in list(small_log)[:10]:
            for k in range(1, len(trace)):
                assert 0.0 <= trained.predict(Prefix(trace, k)) <= 1.0

    def test_undesired_heavy_prefix_scores_high(self, trained, small_log):
        # strong-signal log: full-information prefixes of undesired cases
        scores = [trained.predict(Prefix(t, len(t) - 1)) for t in small_log if t.outcome]
        assert np.mean(scores) > 0.5

    def test_identical_vectors_identical_predictions(self, trained, small_log):
        trace = small_log.traces[0]
        p = Prefix(trace, 2)
        assert trained.predict(p) == trained.predict(Prefix(trace, 2))

    def test_prefix_scores_length(self, trained, small_log):
        trace = small_log.traces[0]
        assert trained.prefix_scores(trace).shape == (len(trace) - 1,)

    def test_score_log_matches_fresh_predictions(self, trained, small_log):
        cached = trained.score_log(small_log)
        for trace in list(small_log)[:8]:
            fresh = trained.prefix_scores(trace)
            assert np.array_equal(cached[trace.case_id], fresh)

    def test_save_load_roundtrip_exact(self, trained, small_log, tmp_path):
        path = tmp_path / "model.json"
        trained.save(path)
        loaded = OutcomeEstimator.load(path)
        for trace in list(small_log)[:10]:
            assert np.array_equal(loaded.prefix_scores(trace), trained.prefix_scores(trace))
        # resaving the loaded model reproduces the file byte for byte
        loaded.save(tmp_path / "model2.json")
        assert (tmp_path / "model2.json").read_bytes() == path.read_bytes()

    def test_logreg_behind_same_interface(self, small_log, tmp_path):
        est = OutcomeEstimator.train(small_log, kind="logreg")
        path = tmp_path / "lr.json"
        est.save(path)
        loaded = OutcomeEstimator.load(path)
        trace = small_log.traces[0]
        assert np.array_equal(loaded.prefix_scores(trace), est.prefix_scores(trace))

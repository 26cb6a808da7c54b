import dataclasses
import math

import numpy as np
import pytest

from sceneopt.metrics import collision_pairs
from sceneopt.optimizer import OptResult, OptimizerParams, optimize
from sceneopt.scene import (
    ConstraintSet,
    ObjectState,
    RoomSpec,
    SceneState,
    derive_all_verticals,
)
from sceneopt.tuning import (
    LINEAR_FIELDS,
    LOG_FIELDS,
    ParamRange,
    SearchSpace,
    TrialRecord,
    gen_corpus,
    load_corpus,
    penalty,
    save_corpus,
    search,
)


def box(oid, x, y, dims=(1.0, 1.0, 0.5)):
    return ObjectState(oid, oid, (x, y), 0.0, 0.0, dims)


def tiny_corpus():
    dirty = derive_all_verticals(
        SceneState(RoomSpec(4.0, 3.0, 2.5), (box("a", 1.6, 1.5), box("b", 2.2, 1.5)))
    )
    clean = derive_all_verticals(
        SceneState(RoomSpec(4.0, 3.0, 2.5), (box("a", 1.0, 1.0), box("b", 3.0, 2.0)))
    )
    return [(dirty, ConstraintSet()), (clean, ConstraintSet())]


class TestParamRange:
    def test_validation(self):
        with pytest.raises(ValueError):
            ParamRange(2.0, 1.0)
        with pytest.raises(ValueError):
            ParamRange(1.0, 2.0, scale="cubic")
        with pytest.raises(ValueError):
            ParamRange(0.0, 2.0, scale="log")

    def test_linear_within_bounds(self):
        rng = np.random.default_rng(0)
        r = ParamRange(0.5, 2.0)
        for _ in range(200):
            assert 0.5 <= r.sample(rng) <= 2.0

    def test_log_spans_decades(self):
        rng = np.random.default_rng(0)
        r = ParamRange(0.01, 100.0, scale="log")
        draws = [r.sample(rng) for _ in range(300)]
        assert all(0.01 <= v <= 100.0 for v in draws)
        # log-uniform puts real mass in the bottom decade
        assert sum(1 for v in draws if v < 0.1) > 30
        assert sum(1 for v in draws if v > 10.0) > 30

    def test_integer_rounds_and_clamps(self):
        rng = np.random.default_rng(1)
        r = ParamRange(2.0, 5.0, integer=True)
        draws = {r.sample(rng) for _ in range(100)}
        assert draws <= {2, 3, 4, 5}
        assert len(draws) > 1


class TestSearchSpace:
    def test_validation(self):
        with pytest.raises(ValueError):
            SearchSpace(ranges={}, budget=0)
        with pytest.raises(ValueError):
            SearchSpace(ranges={}, prune_interval=0)
        with pytest.raises(ValueError, match="unknown parameter"):
            SearchSpace(ranges={"w_gravity": ParamRange(0.1, 1.0)})

    def test_around_defaults_covers_tuned_fields(self):
        space = SearchSpace.around_defaults(span=10.0)
        assert set(space.ranges) == set(LOG_FIELDS) | set(LINEAR_FIELDS)
        base = OptimizerParams()
        r = space.ranges["w_col"]
        assert r.scale == "log"
        assert r.lo == pytest.approx(base.w_col / 10)
        assert r.hi == pytest.approx(base.w_col * 10)
        td = space.ranges["t_deadlock"]
        assert td.integer
        assert td.lo == 2.0  # clamped above the 1.7 a plain span would give
        assert td.hi == pytest.approx(base.t_deadlock * 10)

    def test_sample_only_touches_ranged_fields(self):
        space = SearchSpace.around_defaults(span=3.0)
        rng = np.random.default_rng(7)
        p = space.sample(rng)
        p.validate()
        base = OptimizerParams()
        assert isinstance(p.t_deadlock, int)
        # fields outside the search space keep their defaults
        assert p.eps_conv == base.eps_conv
        assert p.t_max == base.t_max
        assert p.window == base.window
        assert p.collision_mode == base.collision_mode
        assert p.w_col != base.w_col

    def test_sample_deterministic(self):
        space = SearchSpace.around_defaults(span=3.0)
        a = space.sample(np.random.default_rng(3))
        b = space.sample(np.random.default_rng(3))
        assert a == b


class TestTrialRecord:
    def test_mean_penalty(self):
        t = TrialRecord(index=0, params=OptimizerParams())
        assert t.mean_penalty == math.inf
        t.scene_penalties = [1.0, 3.0]
        assert t.mean_penalty == 2.0
        assert t.prefix_mean(0) == 1.0
        assert t.prefix_mean(1) == 2.0


class TestPenalty:
    def test_satisfied_run_scores_zero(self):
        scene = tiny_corpus()[1][0]
        res = optimize(scene)
        assert penalty(res, OptimizerParams()) == 0.0

    def test_raw_mass_plus_residual(self):
        scene = tiny_corpus()[0][0]
        params = OptimizerParams()
        fake = OptResult(scene, ConstraintSet(), 0, False)
        # one overlapping pair: two raw area rows of 0.4 each, and the
        # residual adds the weighted net force on both objects
        expect = 2 * 0.4 + 2 * (params.w_col * 0.4)
        assert penalty(fake, params) == pytest.approx(expect)

    def test_measured_in_area_mode_regardless(self):
        scene = tiny_corpus()[0][0]
        fake = OptResult(scene, ConstraintSet(), 0, False)
        sat = OptimizerParams(collision_mode="sat")
        area = OptimizerParams(collision_mode="area")
        assert penalty(fake, sat) == penalty(fake, area)

    def test_nonfinite_pose_is_infinite(self):
        bad = ObjectState("a", "a", (math.nan, 1.0), 0.0, 0.0, (1, 1, 1))
        scene = SceneState(RoomSpec(4, 3, 2.5), (bad,))
        fake = OptResult(scene, ConstraintSet(), 0, False)
        assert penalty(fake, OptimizerParams()) == math.inf


class TestSearch:
    def small_space(self, budget=5):
        return SearchSpace.around_defaults(budget=budget, span=3.0)

    def test_baseline_is_trial_zero(self):
        best, trials = search(tiny_corpus(), self.small_space(), seed=0)
        assert trials[0].index == 0
        assert trials[0].params == OptimizerParams()
        assert not trials[0].pruned
        assert len(trials) == 5

    def test_deterministic(self):
        best_a, trials_a = search(tiny_corpus(), self.small_space(), seed=4)
        best_b, trials_b = search(tiny_corpus(), self.small_space(), seed=4)
        assert best_a.index == best_b.index
        assert [t.params for t in trials_a] == [t.params for t in trials_b]
        assert [t.scene_penalties for t in trials_a] == [t.scene_penalties for t in trials_b]

    def test_winner_is_best_completed(self):
        best, trials = search(tiny_corpus(), self.small_space(budget=8), seed=1)
        assert not best.pruned
        completed = [t for t in trials if not t.pruned]
        assert best.mean_penalty == min(t.mean_penalty for t in completed)
        # baseline completes, so the winner can only match or beat it
        assert best.mean_penalty <= trials[0].mean_penalty

    def test_pruned_trials_stopped_early(self):
        corpus = tiny_corpus() * 3  # six scenes give pruning room to act
        _, trials = search(corpus, self.small_space(budget=10), seed=2)
        for t in trials:
            if t.pruned:
                assert len(t.scene_penalties) < len(corpus)
            else:
                assert len(t.scene_penalties) == len(corpus)

    def test_empty_corpus(self):
        with pytest.raises(ValueError, match="empty"):
            search([], self.small_space())

    def test_without_baseline(self):
        space = SearchSpace.around_defaults(budget=2, span=3.0, include_baseline=False)
        _, trials = search(tiny_corpus(), space, seed=9)
        assert trials[0].params != OptimizerParams()


class TestGenCorpus:
    def test_deterministic(self):
        a = gen_corpus(3, seed=4)
        b = gen_corpus(3, seed=4)
        assert a == b

    def test_scenes_valid_and_sized(self):
        for scene, cons in gen_corpus(6, seed=1):
            scene.validate()
            cons.validate(scene)
            assert 5 <= len(scene.objects) <= 20
            assert 3.0 <= scene.room.width <= 8.0

    def test_mostly_conflicted(self):
        corpus = gen_corpus(10, seed=0)
        dirty = sum(1 for scene, _ in corpus if collision_pairs(scene))
        assert dirty >= 8

    def test_seed_changes_output(self):
        assert gen_corpus(2, seed=0) != gen_corpus(2, seed=1)


class TestCorpusIO:
    def test_round_trip(self, tmp_path):
        corpus = gen_corpus(3, seed=6)
        d1 = tmp_path / "one"
        paths = save_corpus(str(d1), corpus)
        assert [p.split("/")[-1] for p in paths] == [
            "scene_000.json",
            "scene_001.json",
            "scene_002.json",
        ]
        loaded = load_corpus(str(d1))
        assert len(loaded) == 3
        # canonicalized floats are stable: a second save is byte-identical
        d2 = tmp_path / "two"
        save_corpus(str(d2), loaded)
        for name in ("scene_000.json", "scene_001.json", "scene_002.json"):
            assert (d1 / name).read_bytes() == (d2 / name).read_bytes()
        for (s1, c1), (s2, c2) in zip(loaded, corpus):
            assert [o.id for o in s1.objects] == [o.id for o in s2.objects]
            assert len(c1) == len(c2)
            for r1, r2 in zip(c1.adjacent, c2.adjacent):
                assert (r1.a, r1.b) == (r2.a, r2.b)
                assert r1.distance == pytest.approx(r2.distance, rel=1e-8)

    def test_empty_directory(self, tmp_path):
        with pytest.raises(ValueError, match="no scene files"):
            load_corpus(str(tmp_path))

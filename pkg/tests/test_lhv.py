"""Deterministic-strategy tests.

Histograms, case counts, and example values below were frozen from an
independent exact-arithmetic enumerator before this module was written.
"""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import bell_lab as bl
from bell_lab import _accel, lhv
from bell_lab.errors import EnumerationSizeError

F = Fraction


def all_strategies(d):
    for s in np.ndindex(d, d, d, d):
        yield tuple(int(x) for x in s)


class TestStrategyValue:
    def test_all_zero_strategy(self):
        for d in (2, 3, 7):
            assert bl.strategy_bell_value((0, 0, 0, 0), d).exact == 2
            assert bl.classify_strategy((0, 0, 0, 0), d) == "Case1i"

    def test_frozen_examples_d3(self):
        cases = {
            (2, 2, 2, 2): ("Case3i", F(-1)),
            (2, 0, 0, 2): ("Case1ii", F(-4)),
            (1, 0, 0, 2): ("Case1ii", F(-1)),
            (2, 1, 2, 0): ("Case2ii", F(-1)),
        }
        for s, (label, value) in cases.items():
            assert bl.classify_strategy(s, 3) == label
            assert bl.strategy_bell_value(s, 3).exact == value

    def test_outcome_sums(self):
        assert bl.outcome_sums((1, 2, 3, 4)) == (4, 5, 5, 6)

    def test_sum_identity(self):
        # r11 + r22 = r12 + r21 for every strategy
        for s in all_strategies(3):
            r11, r12, r21, r22 = bl.outcome_sums(s)
            assert r11 + r22 == r12 + r21

    def test_rejects_out_of_range_outcomes(self):
        with pytest.raises(ValueError):
            bl.strategy_bell_value((0, 0, 0, 3), 3)
        with pytest.raises(ValueError):
            bl.strategy_bell_value((-1, 0, 0, 0), 3)

    @given(st.integers(2, 12), st.data())
    @settings(max_examples=60, deadline=None)
    def test_closed_form_equals_table_evaluation(self, d, data):
        s = tuple(data.draw(st.integers(0, d - 1)) for _ in range(4))
        direct = bl.strategy_bell_value(s, d).exact
        via_table = bl.bell_expression(bl.strategy_to_table(s, d)).exact
        assert direct == via_table

    @given(st.integers(2, 12), st.data())
    @settings(max_examples=60, deadline=None)
    def test_value_lies_in_class_value_set(self, d, data):
        s = tuple(data.draw(st.integers(0, d - 1)) for _ in range(4))
        value = bl.strategy_bell_value(s, d).exact
        assert value in bl.lhv_value_set(d)
        assert value in bl.case_value_set(bl.classify_strategy(s, d), d)


class TestValueSets:
    def test_global_sets(self):
        assert bl.lhv_value_set(2) == {F(2), F(-2)}
        assert bl.lhv_value_set(3) == {F(2), F(-1), F(-4)}
        assert bl.lhv_value_set(4) == {F(2), F(-2, 3), F(-10, 3)}
        assert bl.lhv_value_set(5) == {F(2), F(-1, 2), F(-3)}

    def test_case_sets_d3(self):
        s = bl.spin(3)
        low = F(-1) / s
        bottom = F(-2) * (s + 1) / s
        assert bl.case_value_set("Case1i", 3) == {F(2), low}
        assert bl.case_value_set("Case1ii", 3) == {low, bottom}
        assert bl.case_value_set("Case2i", 3) == {F(2)}
        assert bl.case_value_set("Case2ii", 3) == {F(2), low}
        assert bl.case_value_set("Case2iii", 3) == {low, bottom}
        assert bl.case_value_set("Case3i", 3) == {F(2), low}
        assert bl.case_value_set("Case3ii", 3) == {F(2)}

    def test_unknown_label_rejected(self):
        with pytest.raises(ValueError):
            bl.case_value_set("Case9", 3)

    def test_attained_values_within_case_sets(self):
        # d=3 is too small for Case2iii to reach its bottom value; from d=4 on
        # every admissible (label, value) combination occurs
        seen3 = {}
        for s in all_strategies(3):
            label = bl.classify_strategy(s, 3)
            seen3.setdefault(label, set()).add(bl.strategy_bell_value(s, 3).exact)
        for label, values in seen3.items():
            assert values <= bl.case_value_set(label, 3)
        assert seen3["Case2iii"] == {F(-1)}

        seen4 = {}
        for s in all_strategies(4):
            label = bl.classify_strategy(s, 4)
            seen4.setdefault(label, set()).add(bl.strategy_bell_value(s, 4).exact)
        for label, values in seen4.items():
            assert values == bl.case_value_set(label, 4)


class TestEnumeration:
    def test_histograms_match_frozen_counts(self):
        expect = {
            2: {F(2): 8, F(-2): 8},
            3: {F(2): 30, F(-1): 48, F(-4): 3},
            4: {F(2): 80, F(-2, 3): 160, F(-10, 3): 16},
            5: {F(2): 175, F(-1, 2): 400, F(-3): 50},
        }
        for d, hist in expect.items():
            summary = bl.enumerate_strategies(d)
            assert summary.histogram == hist
            assert summary.max_value == 2
            assert summary.n_strategies == d**4

    def test_case_counts_d3(self):
        summary = bl.enumerate_strategies(3)
        assert summary.case_counts == {
            "Case1i": 26,
            "Case1ii": 10,
            "Case2i": 10,
            "Case2ii": 24,
            "Case2iii": 2,
            "Case3i": 7,
            "Case3ii": 2,
        }

    def test_counts_agree_with_classifier(self):
        for d in (2, 4):
            summary = bl.enumerate_strategies(d)
            counts = {}
            for s in all_strategies(d):
                label = bl.classify_strategy(s, d)
                counts[label] = counts.get(label, 0) + 1
            assert {k: v for k, v in summary.case_counts.items() if v} == counts

    def test_against_inline_reference_enumeration(self):
        # independent path: evaluate every strategy through the table machinery
        for d in (2, 3):
            hist = {}
            for s in all_strategies(d):
                v = bl.bell_expression(bl.strategy_to_table(s, d)).exact
                hist[v] = hist.get(v, 0) + 1
            assert bl.enumerate_strategies(d).histogram == hist

    def test_argmax_rows_attain_maximum(self):
        for d in (2, 3, 5):
            summary = bl.enumerate_strategies(d)
            assert summary.argmax_count == summary.histogram[summary.max_value]
            assert len(summary.argmax) == summary.argmax_count
            for row in summary.argmax:
                s = tuple(int(x) for x in row)
                assert bl.strategy_bell_value(s, d).exact == summary.max_value

    def test_custom_mapping_still_bounded_by_two(self):
        table = ((1, 0, 2), (0, 2, 1), (2, 1, 0))
        g = bl.OutcomeMapping(3, table, "custom")
        summary = bl.enumerate_strategies(3, g)
        assert summary.max_value <= 2
        assert summary.mapping == "custom"

    def test_difference_mapping_same_histogram(self):
        g = bl.OutcomeMapping.difference_mapping(4)
        assert bl.enumerate_strategies(4, g).histogram == bl.enumerate_strategies(4).histogram

    def test_threads_do_not_change_result(self):
        base = bl.enumerate_strategies(5)
        threaded = bl.enumerate_strategies(5, threads=3)
        assert threaded.to_json_dict() == base.to_json_dict()

    def test_size_guard(self):
        with pytest.raises(EnumerationSizeError):
            bl.enumerate_strategies(65)

    def test_json_shape(self):
        obj = bl.enumerate_strategies(2).to_json_dict()
        assert obj["schema_version"] == 1
        assert obj["max"] == "2"
        assert obj["histogram"] == {"2": 8, "-2": 8}
        assert list(obj["histogram"]) == ["2", "-2"]
        assert obj["cases_degenerate"] is True
        assert "seed" not in obj
        obj3 = bl.enumerate_strategies(3).to_json_dict()
        assert "cases_degenerate" not in obj3
        assert obj3["argmax_count"] == 30


class TestSampling:
    def test_seeded_reproducibility(self):
        a = bl.sample_strategies(20, 500, seed=9)
        b = bl.sample_strategies(20, 500, seed=9)
        assert a.to_json_dict() == b.to_json_dict()
        assert a.method == "sampled"
        assert a.to_json_dict()["seed"] == 9

    def test_sampled_values_subset_of_value_set(self):
        summary = bl.sample_strategies(33, 2000, seed=3)
        assert set(summary.histogram) <= bl.lhv_value_set(33)
        assert summary.max_value == 2

    def test_small_d_sampling_matches_support(self):
        summary = bl.sample_strategies(3, 4000, seed=1)
        assert set(summary.histogram) == {F(2), F(-1), F(-4)}


class TestBackends:
    def test_numpy_and_loop_backends_agree(self):
        for d in (2, 3, 5, 6):
            g = np.add.outer(np.arange(d), np.arange(d)) % d
            gneg = (d - g) % d
            reach = (np.add.outer(np.arange(d), np.arange(d)) >= d).astype(np.int8)
            size = d**4
            num_a = np.empty(size, np.int16)
            case_a = np.empty(size, np.int8)
            num_b = np.empty(size, np.int16)
            case_b = np.empty(size, np.int8)
            _accel._fill_numpy(d, g, gneg, reach, _accel.CASE_CODE, num_a, case_a, 0, d)
            _accel._fill_loops(d, g, gneg, reach, _accel.CASE_CODE, num_b, case_b, 0, d)
            assert np.array_equal(num_a, num_b)
            assert np.array_equal(case_a, case_b)

    def test_dispatcher_matches_direct_values(self):
        d = 4
        g = np.add.outer(np.arange(d), np.arange(d)) % d
        num = np.empty(d**4, np.int16)
        case = np.empty(d**4, np.int8)
        _accel.fill_strategy_arrays(d, g, num, case, 0, d)
        for idx, s in enumerate(all_strategies(d)):
            expect = bl.strategy_bell_value(s, d).exact
            assert F(2 * int(num[idx]), d - 1) == expect


class TestStrategyReport:
    def test_report_fields(self):
        r = lhv.StrategyReport.build((2, 0, 0, 2), 3)
        assert r.case == "Case1ii"
        assert r.value.exact == -4
        assert r.sums == (2, 4, 0, 2)
        assert not r.degenerate

    def test_degenerate_flag_for_two_outcomes(self):
        assert lhv.StrategyReport.build((0, 1, 0, 1), 2).degenerate


class TestWorkerCount:
    def test_explicit_argument_wins(self):
        assert lhv.worker_count(3) >= 1

    def test_env_default(self, monkeypatch):
        import os

        monkeypatch.delenv("BELL_LAB_THREADS", raising=False)
        assert lhv.worker_count() == 1
        monkeypatch.setenv("BELL_LAB_THREADS", "2")
        assert lhv.worker_count() == min(2, os.cpu_count() or 1)
        monkeypatch.setenv("BELL_LAB_THREADS", "0")
        assert lhv.worker_count() == 1
        monkeypatch.setenv("BELL_LAB_THREADS", "soup")
        with pytest.raises(ValueError):
            lhv.worker_count()

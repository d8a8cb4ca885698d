import math

import numpy as np
import pytest

from presmon.cost_model import (
    AttributeProportional,
    Constant,
    CostSpec,
    ExponentialTimeGrowth,
    LinearPrefixDecay,
    LinearPrefixGrowth,
    PrefixRemainderRatio,
    compile_cost_model,
    component_from_config,
    cost_spec_from_config,
    cost_spec_to_config,
    scenario_preset,
)
from presmon.eventlog.model import Event, EventLog, Trace
from presmon.exceptions import CostEvaluationError, CostSpecError

from conftest import make_trace


def _amount_trace(case_id, amounts, outcome=True, case_attrs=None):
    events = tuple(
        Event(case_id, "a", 100.0 + i, {}, {"amount": float(v)}) for i, v in enumerate(amounts)
    )
    return Trace(case_id, events, dict(case_attrs or {}), outcome)


def test_rq_style_constant_ratio_model():
    spec = CostSpec(Constant(1.0), Constant(20.0), Constant(0.0), LinearPrefixDecay(1.0))
    model = compile_cost_model(spec)
    trace = make_trace("c", list("abcd"))
    assert model.c_out(trace) == 20.0
    assert model.c_in(2, trace) == 1.0
    assert model.c_com(trace) == 0.0
    assert model.eff(2, trace) == 0.5  # 1 - 2/4


def test_eff_constant_one_everywhere():
    model = compile_cost_model(CostSpec(Constant(0.0), Constant(1.0), Constant(0.0), Constant(1.0)))
    trace = make_trace("c", list("abcde"))
    assert all(model.eff(k, trace) == 1.0 for k in range(1, 6))


def test_linear_decay_non_increasing_in_k():
    model = compile_cost_model(CostSpec(Constant(0.0), Constant(1.0), Constant(0.0),
                                        LinearPrefixDecay(1.0)))
    trace = make_trace("c", list("abcdef"))
    values = [model.eff(k, trace) for k in range(1, 7)]
    assert all(a >= b for a, b in zip(values, values[1:]))
    assert values[-1] == 0.0  # k = len


def test_linear_growth_endpoints():
    spec = CostSpec(LinearPrefixGrowth(2.0, 10.0), Constant(1.0), Constant(0.0), Constant(1.0))
    model = compile_cost_model(spec)
    trace = make_trace("c", list("abcde"))
    assert model.c_in(1, trace) == 2.0
    assert model.c_in(5, trace) == 10.0
    values = [model.c_in(k, trace) for k in range(1, 6)]
    assert all(a <= b for a, b in zip(values, values[1:]))


def test_exponential_growth_normalized_and_monotone():
    spec = CostSpec(ExponentialTimeGrowth(2.0, 3.0), Constant(1.0), Constant(0.0), Constant(1.0))
    model = compile_cost_model(spec)
    trace = make_trace("c", list("abcd"), t0=0.0, gap=100.0)  # times 0,100,200,300
    assert model.c_in(1, trace) == pytest.approx(2.0 * 3.0 * math.exp(0.0))
    assert model.c_in(4, trace) == pytest.approx(2.0 * 3.0 * math.exp(1.0))
    values = [model.c_in(k, trace) for k in range(1, 5)]
    assert all(a <= b for a, b in zip(values, values[1:]))
    # degenerate time axis: everything at normalized time 0
    flat = make_trace("c2", list("ab"), gap=0.0)
    assert model.c_in(2, flat) == pytest.approx(6.0)


class TestRemainderRatio:
    def test_ratio_by_hand(self):
        trace = _amount_trace("c", [10, 20, 30, 40])
        model = compile_cost_model(CostSpec(Constant(0.0), Constant(1.0), Constant(0.0),
                                            PrefixRemainderRatio("amount")))
        assert model.eff(1, trace) == pytest.approx((100 - 10) / 100)
        assert model.eff(2, trace) == pytest.approx((100 - 30) / 100)
        assert model.eff(4, trace) == 0.0

    def test_zero_total_flagged(self):
        trace = _amount_trace("c", [0, 0])
        model = compile_cost_model(CostSpec(Constant(0.0), Constant(1.0), Constant(0.0),
                                            PrefixRemainderRatio("amount")))
        assert model.eff(1, trace) == 0.0
        assert model.diagnostics["remainder_zero_total"] == 1

    def test_negative_values_clamped_with_diagnostic(self):
        trace = _amount_trace("c", [-5.0, 10.0])
        model = compile_cost_model(CostSpec(Constant(0.0), Constant(1.0), Constant(0.0),
                                            PrefixRemainderRatio("amount")))
        value = model.eff(1, trace)  # raw ratio (5 - (-5)) / 5 = 2 -> clamped
        assert value == 1.0
        assert model.diagnostics["eff_clamped"] == 1


class TestPresets:
    def test_railway_compensation_zero(self):
        model = compile_cost_model(scenario_preset("railway"))
        trace = make_trace("c", ["a", "b"], case_attrs={"disruption_cost": 100.0})
        assert model.c_com(trace) == 0.0
        assert model.eff(1, trace) == 1.0
        assert model.c_out(trace) == 100.0

    def test_unemployment_compensation_zero(self):
        model = compile_cost_model(scenario_preset("unemployment"))
        trace = _amount_trace("c", [1, 2], case_attrs={"intervention_cost": 3.0})
        assert model.c_com(trace) == 0.0
        assert model.c_in(1, trace) == 3.0

    def test_unemployment_outcome_and_eff_use_same_amount(self):
        spec = scenario_preset("unemployment", benefit_attr="amount")
        model = compile_cost_model(spec)
        trace = _amount_trace("c", [10, 30], case_attrs={"amount": 40.0, "intervention_cost": 1.0})
        assert model.c_out(trace) == 40.0
        assert model.eff(1, trace) == pytest.approx(0.75)

    def test_financial_zero_switch_fraction(self):
        model = compile_cost_model(scenario_preset("financial", switch_fraction=0.0))
        trace = _amount_trace("c", [5], case_attrs={"value": 5.0, "asset": 1e6})
        assert model.c_com(trace) == 0.0
        assert model.c_in(1, trace) == 1.0  # default post cost

    def test_unknown_scenario(self):
        with pytest.raises(CostSpecError):
            scenario_preset("warehouse")

    def test_unknown_override(self):
        with pytest.raises(CostSpecError):
            scenario_preset("railway", post_cost=2.0)


class TestValidation:
    @pytest.mark.parametrize("component, role", [
        (Constant(-1.0), "c_in"),
        (Constant(1.5), "eff"),
        (LinearPrefixDecay(-0.5), "eff"),
        (LinearPrefixGrowth(5.0, 2.0), "c_in"),
        (ExponentialTimeGrowth(1.0, 0.0), "c_in"),
        (AttributeProportional("x", -1.0), "c_out"),
        (PrefixRemainderRatio(""), "eff"),
    ])
    def test_bad_parameters(self, component, role):
        base = {"c_in": Constant(1.0), "c_out": Constant(1.0),
                "c_com": Constant(0.0), "eff": Constant(1.0)}
        base[role] = component
        with pytest.raises(CostSpecError):
            compile_cost_model(CostSpec(**base))

    def test_position_dependent_form_rejected_for_case_costs(self):
        spec = CostSpec(Constant(1.0), LinearPrefixDecay(1.0), Constant(0.0), Constant(1.0))
        with pytest.raises(CostSpecError, match="c_out"):
            compile_cost_model(spec)

    def test_missing_attribute_raises_with_case(self):
        model = compile_cost_model(CostSpec(Constant(1.0), AttributeProportional("unt"),
                                            Constant(0.0), Constant(1.0)))
        trace = make_trace("case77", ["a"])
        with pytest.raises(CostEvaluationError, match="case77"):
            model.c_out(trace)


def test_compile_deterministic_across_instances(rng):
    spec = CostSpec(LinearPrefixGrowth(1.0, 4.0), Constant(7.0), Constant(2.0),
                    LinearPrefixDecay(0.9))
    m1, m2 = compile_cost_model(spec), compile_cost_model(spec)
    for _ in range(20):
        n = int(rng.integers(2, 8))
        trace = make_trace("c", ["a"] * n)
        k = int(rng.integers(1, n + 1))
        assert m1.c_in(k, trace) == m2.c_in(k, trace)
        assert m1.eff(k, trace) == m2.eff(k, trace)
        assert m1.c_out(trace) == m2.c_out(trace)


def test_config_roundtrip():
    spec = CostSpec(Constant(1.0), AttributeProportional("unt", 2.0), Constant(0.0),
                    PrefixRemainderRatio("unt"))
    assert cost_spec_from_config(cost_spec_to_config(spec)) == spec


def test_component_from_config_errors():
    with pytest.raises(CostSpecError):
        component_from_config({"value": 1})
    with pytest.raises(CostSpecError):
        component_from_config({"form": "nope"})
    with pytest.raises(CostSpecError):
        component_from_config({"form": "constant", "bogus": 1})

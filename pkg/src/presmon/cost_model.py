"""Declarative alarm cost models and their compilation to evaluable functions.

A cost model is the tuple (c_in, c_out, c_com, eff): intervention cost and
mitigation effectiveness depend on how many events were seen when the alarm
fired, outcome and compensation costs only on the case. Each component is
declared as one of a few parametric forms and compiled into a callable; the
signatures keep the full (k, trace, log) generality even though no built-in
form reads cross-case information from the log.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .eventlog.model import EventLog, Trace
from .exceptions import CostEvaluationError, CostSpecError


@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class LinearPrefixDecay:
    """base * (1 - k / len(trace)); shrinks as the case progresses."""

    base: float


@dataclass(frozen=True)
class LinearPrefixGrowth:
    """Rises linearly from ``base`` at the first event to ``max_value`` at the last."""

    base: float
    max_value: float


@dataclass(frozen=True)
class ExponentialTimeGrowth:
    """minimum * beta * exp(t) with t the event time normalized to [0, 1]
    within the trace. Normalization keeps the magnitude scale-free; raw epoch
    timestamps would overflow the exponential."""

    minimum: float
    beta: float


@dataclass(frozen=True)
class AttributeProportional:
    """coeff times a per-case numeric attribute (e.g. an exposure amount)."""

    attr: str
    coeff: float = 1.0


@dataclass(frozen=True)
class PrefixRemainderRatio:
    """Share of a cumulative per-event numeric attribute still ahead after k
    events: (total - sum of first k) / total; 0 when the total is 0."""

    attr: str


ComponentSpec = Union[
    Constant, LinearPrefixDecay, LinearPrefixGrowth,
    ExponentialTimeGrowth, AttributeProportional, PrefixRemainderRatio,
]

_K_DEPENDENT = (LinearPrefixDecay, LinearPrefixGrowth, ExponentialTimeGrowth, PrefixRemainderRatio)

_FORM_NAMES = {
    "constant": Constant,
    "linear_prefix_decay": LinearPrefixDecay,
    "linear_prefix_growth": LinearPrefixGrowth,
    "exponential_time_growth": ExponentialTimeGrowth,
    "attribute_proportional": AttributeProportional,
    "prefix_remainder_ratio": PrefixRemainderRatio,
}


@dataclass(frozen=True)
class CostSpec:
    c_in: ComponentSpec
    c_out: ComponentSpec
    c_com: ComponentSpec
    eff: ComponentSpec


def component_from_config(raw: dict) -> ComponentSpec:
    """Build a component from a config mapping like {"form": "constant", "value": 2}."""
    if not isinstance(raw, dict) or "form" not in raw:
        raise CostSpecError(f"cost component must be a mapping with a 'form' key, got {raw!r}")
    form = raw["form"]
    if form not in _FORM_NAMES:
        raise CostSpecError(f"unknown cost form {form!r}; known: {sorted(_FORM_NAMES)}")
    kwargs = {k: v for k, v in raw.items() if k != "form"}
    try:
        return _FORM_NAMES[form](**kwargs)
    except TypeError as exc:
        raise CostSpecError(f"bad parameters for form {form!r}: {exc}") from exc


def component_to_config(spec: ComponentSpec) -> dict:
    name = next(n for n, cls in _FORM_NAMES.items() if isinstance(spec, cls))
    out = {"form": name}
    out.update({k: v for k, v in spec.__dict__.items()})
    return out


def cost_spec_from_config(raw: dict) -> CostSpec:
    missing = [k for k in ("c_in", "c_out", "c_com", "eff") if k not in raw]
    if missing:
        raise CostSpecError(f"cost model config missing components: {missing}")
    return CostSpec(**{k: component_from_config(raw[k]) for k in ("c_in", "c_out", "c_com", "eff")})


def cost_spec_to_config(spec: CostSpec) -> dict:
    return {k: component_to_config(getattr(spec, k)) for k in ("c_in", "c_out", "c_com", "eff")}


def _validate_component(spec: ComponentSpec, role: str) -> None:
    if isinstance(spec, Constant):
        if not math.isfinite(spec.value) or spec.value < 0:
            raise CostSpecError(f"{role}: constant must be finite and >= 0, got {spec.value}")
        if role == "eff" and spec.value > 1:
            raise CostSpecError(f"eff constant must be in [0, 1], got {spec.value}")
    elif isinstance(spec, LinearPrefixDecay):
        if spec.base < 0:
            raise CostSpecError(f"{role}: decay base must be >= 0, got {spec.base}")
        if role == "eff" and spec.base > 1:
            raise CostSpecError(f"eff decay base must be in [0, 1], got {spec.base}")
    elif isinstance(spec, LinearPrefixGrowth):
        if spec.base < 0 or spec.max_value < spec.base:
            raise CostSpecError(
                f"{role}: growth needs 0 <= base <= max_value, got {spec.base}, {spec.max_value}"
            )
    elif isinstance(spec, ExponentialTimeGrowth):
        if spec.minimum < 0:
            raise CostSpecError(f"{role}: minimum must be >= 0, got {spec.minimum}")
        if spec.beta <= 0:
            raise CostSpecError(f"{role}: beta must be > 0, got {spec.beta}")
    elif isinstance(spec, AttributeProportional):
        if spec.coeff < 0:
            raise CostSpecError(f"{role}: coeff must be >= 0, got {spec.coeff}")
        if not spec.attr:
            raise CostSpecError(f"{role}: attribute name must be non-empty")
    elif isinstance(spec, PrefixRemainderRatio):
        if not spec.attr:
            raise CostSpecError(f"{role}: attribute name must be non-empty")
    else:
        raise CostSpecError(f"{role}: unknown component {spec!r}")
    if role in ("c_out", "c_com") and isinstance(spec, _K_DEPENDENT):
        raise CostSpecError(f"{role} cannot use the position-dependent form {type(spec).__name__}")


class CostModel:
    """Compiled, evaluable cost model.

    ``eff`` results are clamped to [0, 1] after evaluation; the
    ``diagnostics`` counters record how often clamping or a zero-total
    remainder ratio fired.
    """

    def __init__(self, spec: CostSpec):
        self.spec = spec
        self.diagnostics = {"eff_clamped": 0, "remainder_zero_total": 0}

    def c_in(self, k: int, trace: Trace, log: EventLog | None = None) -> float:
        return self._eval(self.spec.c_in, k, trace)

    def c_out(self, trace: Trace, log: EventLog | None = None) -> float:
        return self._eval(self.spec.c_out, None, trace)

    def c_com(self, trace: Trace, log: EventLog | None = None) -> float:
        return self._eval(self.spec.c_com, None, trace)

    def eff(self, k: int, trace: Trace, log: EventLog | None = None) -> float:
        value = self._eval(self.spec.eff, k, trace)
        if value < 0.0 or value > 1.0:
            self.diagnostics["eff_clamped"] += 1
            value = min(1.0, max(0.0, value))
        return value

    def _eval(self, spec: ComponentSpec, k: int | None, trace: Trace) -> float:
        if isinstance(spec, Constant):
            return spec.value
        if isinstance(spec, LinearPrefixDecay):
            return spec.base * (1.0 - k / len(trace))
        if isinstance(spec, LinearPrefixGrowth):
            n = len(trace)
            if n == 1:
                return spec.base
            return spec.base + (spec.max_value - spec.base) * (k - 1) / (n - 1)
        if isinstance(spec, ExponentialTimeGrowth):
            first, last = trace.start_time, trace.end_time
            span = last - first
            t = (trace.events[k - 1].timestamp - first) / span if span > 0 else 0.0
            return spec.minimum * spec.beta * math.exp(t)
        if isinstance(spec, AttributeProportional):
            if spec.coeff == 0.0:
                return 0.0
            value = trace.case_attrs.get(spec.attr)
            if value is None or isinstance(value, str):
                raise CostEvaluationError(
                    f"case {trace.case_id!r}: numeric case attribute {spec.attr!r} not available"
                )
            result = spec.coeff * float(value)
            if result < 0:
                raise CostEvaluationError(
                    f"case {trace.case_id!r}: attribute {spec.attr!r} yields negative cost {result}"
                )
            return result
        if isinstance(spec, PrefixRemainderRatio):
            values = [ev.num.get(spec.attr, 0.0) for ev in trace.events]
            total = sum(values)
            if total == 0.0:
                self.diagnostics["remainder_zero_total"] += 1
                return 0.0
            head = sum(values[:k])
            return (total - head) / total
        raise CostEvaluationError(f"unsupported component {spec!r}")


def compile_cost_model(spec: CostSpec) -> CostModel:
    """Validate a declarative cost spec and return an evaluable model."""
    for role in ("c_in", "c_out", "c_com", "eff"):
        _validate_component(getattr(spec, role), role)
    return CostModel(spec)


def constant_cost_spec(c_in: float, c_out: float, c_com: float = 0.0, eff: float = 1.0) -> CostSpec:
    """Convenience for the all-constant regimes used in sweeps and audits."""
    return CostSpec(
        c_in=Constant(c_in), c_out=Constant(c_out), c_com=Constant(c_com), eff=Constant(eff)
    )


_PRESET_DEFAULTS = {
    # Benefits overpayment monitoring: stopping payments mitigates whatever
    # has not been paid out yet; the payer has no competitor to lose the
    # client to, so false alarms only cost the handling work.
    "unemployment": {
        "benefit_attr": "unt",
        "intervention_cost_attr": "intervention_cost",
    },
    # Card fraud blocking: a blocked card costs a fixed reissue fee; a share
    # of wrongly blocked customers walks away with their asset value.
    "financial": {
        "post_cost": 1.0,
        "switch_fraction": 0.2,
        "value_attr": "value",
        "asset_attr": "asset",
    },
    # Infrastructure maintenance: acting early is cheap, acting late is
    # expensive, and a timely fix fully avoids the breakdown cost.
    "railway": {
        "min_cost": 1.0,
        "beta": 1.0,
        "outcome_cost_attr": "disruption_cost",
    },
}


def scenario_preset(name: str, **overrides) -> CostSpec:
    """Named cost-model skeletons for the three reference scenarios.

    Data-dependent terms (amounts, asset values, per-case intervention effort)
    are read from log attributes whose names can be overridden; those
    attributes must exist in the data at evaluation time.
    """
    if name not in _PRESET_DEFAULTS:
        raise CostSpecError(f"unknown scenario {name!r}; known: {sorted(_PRESET_DEFAULTS)}")
    params = dict(_PRESET_DEFAULTS[name])
    unknown = set(overrides) - set(params)
    if unknown:
        raise CostSpecError(f"unknown parameters for scenario {name!r}: {sorted(unknown)}")
    params.update(overrides)

    if name == "unemployment":
        spec = CostSpec(
            c_in=AttributeProportional(params["intervention_cost_attr"], 1.0),
            c_out=AttributeProportional(params["benefit_attr"], 1.0),
            c_com=Constant(0.0),
            eff=PrefixRemainderRatio(params["benefit_attr"]),
        )
    elif name == "financial":
        spec = CostSpec(
            c_in=Constant(params["post_cost"]),
            c_out=AttributeProportional(params["value_attr"], 1.0),
            c_com=AttributeProportional(params["asset_attr"], params["switch_fraction"]),
            eff=PrefixRemainderRatio(params["value_attr"]),
        )
    else:
        spec = CostSpec(
            c_in=ExponentialTimeGrowth(params["min_cost"], params["beta"]),
            c_out=AttributeProportional(params["outcome_cost_attr"], 1.0),
            c_com=Constant(0.0),
            eff=Constant(1.0),
        )
    for role in ("c_in", "c_out", "c_com", "eff"):
        _validate_component(getattr(spec, role), role)
    return spec

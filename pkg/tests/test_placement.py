import itertools
import math
import random
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from fogplace.catalog import Layer
from fogplace.errors import ConfigError, InfeasibleError, OverloadError
from fogplace.placement import evaluate, evaluate_uniform, optimize_joint, optimize_uniform
from fogplace.scenario import Scenario, default_scenario
from fogplace.topology import REPLICATE, Topology

from oracle import hand_total

ACCESS, METRO, CLOUD = Layer.ACCESS, Layer.METRO, Layer.CLOUD

# Frozen from tests/oracle.py (hand calculation over the device tables).
FROZEN = [
    ([1.0], ACCESS, 3, 15.736466666666667),
    ([1.0], METRO, 3, 516.8790491938997),
    ([1.0], CLOUD, 3, 3537.8543514814814),
    ([1.0] * 5, ACCESS, 3, 38.68233333333333),
    ([1.0] * 5, METRO, 3, 520.395245969499),
    ([1.0] * 5, CLOUD, 3, 3541.271757407407),
    ([0.0], ACCESS, 3, 9.34),
    ([0.0], METRO, 3, 459.34),
    ([0.0], CLOUD, 3, 3459.34),
    ([2.4], ACCESS, 3, 21.89152),
    ([0.48] * 5, ACCESS, 3, 23.25152),
    ([0.3, 1.7], METRO, 3, 517.7580983877996),
    ([1.0], CLOUD, 1, 1537.8468514814815),
]


def scenario_with(rates, **topo):
    return replace(default_scenario(rates), topology=Topology(**topo))


@pytest.mark.parametrize("rates,layer,hops,expected", FROZEN)
def test_frozen_values_match_oracle(rates, layer, hops, expected):
    assert hand_total(layer.short, rates, core_hops=hops) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("rates,layer,hops,expected", FROZEN)
def test_evaluate_uniform_exact(rates, layer, hops, expected):
    total = evaluate_uniform(scenario_with(rates, core_hops=hops), layer).total
    assert math.isclose(total, expected, rel_tol=1e-9)


def test_single_demand_ordering():
    s = default_scenario([1.0])
    a, m, c = (evaluate_uniform(s, l).total for l in (ACCESS, METRO, CLOUD))
    assert a < m < c


def test_access_breakdown_components():
    bd = evaluate_uniform(default_scenario([1.0]), ACCESS)
    assert bd.entry("IoT (Wi-Fi)").total == pytest.approx(0.3414666666666667, rel=1e-12)
    assert bd.entry("ONU (Wi-Fi)").total == pytest.approx(9.02, rel=1e-12)
    rpi = bd.entry("RPi 3")
    assert (rpi.instances, rpi.idle, rpi.load) == (1, 2.0, 4.375)
    assert bd.processing == 6.375
    assert bd.network + bd.processing == pytest.approx(bd.total, rel=1e-12)


def test_zero_load_counts_no_servers():
    for layer in (ACCESS, METRO, CLOUD):
        bd = evaluate_uniform(default_scenario([0.0]), layer)
        assert bd.processing == 0.0
        assert bd.load == 0.0
        assert all(e.kind == "network" for e in bd.entries)


def test_five_demands_use_three_rpi():
    bd = evaluate_uniform(default_scenario([1.0] * 5), ACCESS)
    rpi = bd.entry("RPi 3")
    assert (rpi.instances, rpi.idle, rpi.load) == (3, 6.0, 21.875)
    assert bd.entry("ONU (Wi-Fi)").total == pytest.approx(9.1)
    assert bd.entry("IoT (Wi-Fi)").instances == 5


def test_mixed_assignment():
    s = default_scenario([1.0, 1.0])
    bd = evaluate(s, {"d1": ACCESS, "d2": CLOUD})
    expected = (
        2 * (0.34 + 0.22 / 150)
        + (9 + 6 * 2 / 300)
        + (423 + 47 / 600000)
        + (27 + 3 / 40000)
        + 3 * (1000 + 150 / 40000)
        + (2 + 10.5 * 1000 / 2400)
        + (78 + 52 * 1000 / 108000)
    )
    assert math.isclose(bd.total, expected, rel_tol=1e-9)


def test_devices_per_onu_groups_access_networks():
    s = scenario_with([1.0] * 5, devices_per_onu=2)
    bd = evaluate_uniform(s, ACCESS)
    # three ONUs; each access site runs its own RPi 3
    expected = 5 * (0.34 + 0.22 / 150) + (3 * 9 + 6 * 5 / 300) + (3 * 2 + 10.5 * 5000 / 2400)
    assert bd.entry("ONU (Wi-Fi)").instances == 3
    assert bd.entry("RPi 3").instances == 3
    assert math.isclose(bd.total, expected, rel_tol=1e-9)


def test_metro_port_multiplicity():
    s = scenario_with([1.0], metro_router_ports_metro_placement=2)
    assert math.isclose(evaluate_uniform(s, METRO).total, 516.8790491938997 + 27 + 3 / 40000, rel_tol=1e-9)


def test_onu_overload_error():
    s = default_scenario([70.0] * 5)
    with pytest.raises(OverloadError) as err:
        evaluate_uniform(s, ACCESS)
    assert err.value.device == "ONU (Wi-Fi)"
    assert (err.value.offered, err.value.capacity) == (350.0, 300.0)


def test_onu_replicate_policy():
    s = scenario_with([70.0] * 5, onu_overload_policy=REPLICATE)
    bd = evaluate_uniform(s, ACCESS)
    assert bd.entry("ONU (Wi-Fi)").instances == 2
    expected = 5 * (0.34 + 0.22 * 70 / 150) + (2 * 9 + 6 * 350 / 300) + (146 * 2 + 10.5 * 350000 / 2400)
    assert math.isclose(bd.total, expected, rel_tol=1e-9)


def test_proportional_idle():
    s = replace(default_scenario([1.0]), idle_attribution="proportional")
    bd = evaluate_uniform(s, ACCESS)
    expected = (0.34 + 0.22 / 150) + (9 / 300 + 6 / 300) + 6.375
    assert math.isclose(bd.total, expected, rel_tol=1e-9)


class TestIoTLayer:
    def test_disabled_by_default(self):
        with pytest.raises(ConfigError, match="allow_iot_layer"):
            evaluate_uniform(default_scenario([1.0]), Layer.IOT)

    def test_on_device_processing(self):
        s = replace(default_scenario([0.5, 1.0]), allow_iot_layer=True)
        bd = evaluate_uniform(s, Layer.IOT)
        # one RPi Zero W per device, no network traversal
        expected = 2 * 0.5 + 3.46 * 1500 / 1000
        assert bd.entry("RPi Zero W").instances == 2
        assert math.isclose(bd.total, expected, rel_tol=1e-9)

    def test_on_device_overload(self):
        s = replace(default_scenario([1.5]), allow_iot_layer=True)
        with pytest.raises(OverloadError, match="RPi Zero W"):
            evaluate_uniform(s, Layer.IOT)


class TestEvaluateErrors:
    def test_incomplete_assignment(self):
        with pytest.raises(ConfigError, match="not assigned"):
            evaluate(default_scenario([1.0, 1.0]), {"d1": ACCESS})

    def test_unknown_demand(self):
        with pytest.raises(ConfigError, match="unknown"):
            evaluate(default_scenario([1.0]), {"d1": ACCESS, "zz": METRO})

    def test_empty_scenario(self):
        with pytest.raises(ConfigError):
            evaluate_uniform(Scenario(), ACCESS)


class TestOptimizeUniform:
    def test_single_request_access(self):
        assert optimize_uniform(default_scenario([1.0])).layer == ACCESS

    def test_five_requests_access(self):
        for rate in (0.1, 0.5, 1.0):
            assert optimize_uniform(default_scenario([rate] * 5)).layer == ACCESS

    def test_skips_infeasible_layer(self):
        s = replace(default_scenario([1.5]), allow_iot_layer=True)
        result = optimize_uniform(s)
        assert result.layer == ACCESS
        assert Layer.IOT in result.skipped

    def test_iot_preferred_when_feasible(self):
        s = replace(default_scenario([0.5]), allow_iot_layer=True)
        assert optimize_uniform(s).layer == Layer.IOT

    def test_all_infeasible(self):
        with pytest.raises(InfeasibleError):
            optimize_uniform(default_scenario([70.0] * 5))

    def test_tie_goes_to_lower_layer(self):
        # identical device tables make every layer cost the same
        s = default_scenario([0.0])
        cat = s.catalog
        flat_net = {k: replace(v, p_idle=0.0, p_max=0.0) for k, v in cat.network.items()}
        flat = replace(cat, network=flat_net)
        assert optimize_uniform(replace(s, catalog=flat)).layer == ACCESS


def brute_force(scenario):
    best = None
    for combo in itertools.product(scenario.layers, repeat=len(scenario.demands)):
        try:
            total = evaluate(scenario, dict(zip((d.id for d in scenario.demands), combo))).total
        except OverloadError:
            continue
        if best is None or total < best:
            best = total
    return best


class TestOptimizeJoint:
    def test_single_matches_uniform(self):
        s = default_scenario([1.0])
        joint = optimize_joint(s)
        uni = optimize_uniform(s)
        assert joint.assignment == uni.assignment
        assert joint.total == uni.total

    def test_five_demands_brute_force(self):
        s = default_scenario([1.0] * 5)
        result = optimize_joint(s)
        assert not result.heuristic
        assert math.isclose(result.total, brute_force(s), rel_tol=1e-9)

    def test_identical_demands_symmetric(self):
        s = default_scenario([1.0, 1.0])
        result = optimize_joint(s)
        swapped = {"d1": result.assignment["d2"], "d2": result.assignment["d1"]}
        assert math.isclose(evaluate(s, swapped).total, result.total, rel_tol=1e-12)

    def test_deterministic(self):
        s = default_scenario([0.7, 2.2, 1.1, 0.4])
        a, b = optimize_joint(s), optimize_joint(s)
        assert a == b

    def test_greedy_above_limit(self):
        rng = random.Random(7)
        s = default_scenario([round(rng.uniform(0.1, 3.0), 3) for _ in range(9)])
        greedy = optimize_joint(s)
        exact = optimize_joint(s, exhaustive_limit=9)
        assert greedy.heuristic and not exact.heuristic
        assert greedy.total >= exact.total * (1 - 1e-12)
        assert set(greedy.assignment) == {d.id for d in s.demands}

    def test_infeasible(self):
        with pytest.raises(InfeasibleError):
            optimize_joint(default_scenario([70.0] * 5))
        with pytest.raises(InfeasibleError):
            optimize_joint(default_scenario([70.0] * 9))

    def test_never_worse_than_uniform(self):
        s = default_scenario([0.3, 2.0, 4.5])
        assert optimize_joint(s).total <= optimize_uniform(s).total * (1 + 1e-12)


rates = st.floats(0, 5, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(st.lists(rates, min_size=1, max_size=4), rates, st.sampled_from(["full", "proportional"]))
def test_adding_demand_never_lowers_optimum(rs, extra, idle):
    s = replace(default_scenario(rs), idle_attribution=idle)
    bigger = replace(s, demands=s.demands + (s.demand(extra, id="extra"),))
    assert optimize_joint(bigger).total >= optimize_joint(s).total * (1 - 1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(rates, min_size=1, max_size=5), st.sampled_from([ACCESS, METRO, CLOUD]))
def test_total_is_sum_of_entries(rs, layer):
    bd = evaluate_uniform(default_scenario(rs), layer)
    assert math.isclose(bd.total, sum(e.idle + e.load for e in bd.entries), rel_tol=1e-12)
    assert math.isclose(bd.network + bd.processing, bd.total, rel_tol=1e-12)
    assert math.isclose(bd.total, hand_total(layer.short, rs), rel_tol=1e-9)

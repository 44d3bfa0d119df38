"""Smoke tests for the compiled syncdrive extension."""

import math

import pytest

import syncdrive as sd


def test_step_state_basics():
    s = sd.VehicleState(position_m=0.0, speed_mps=10.0)
    n = sd.step_state(s, 0.0, 0.2)
    assert n.speed_mps == pytest.approx(10.0)
    assert n.position_m == pytest.approx(2.0)
    assert n.timestamp_s == pytest.approx(0.2)


def test_standstill_clamp():
    s = sd.VehicleState(speed_mps=0.0)
    n = sd.step_state(s, -1.0, 0.2)
    assert n.speed_mps == 0.0
    assert n.accel_mps2 == 0.0


def test_solve_closed_form():
    cfg = sd.MpcConfig()
    cfg.c_v = 1.0
    cfg.c_a = 1.0
    cfg.c_u = 0.0
    cfg.t_s = 0.2
    cfg.horizon = 1
    res = sd.solve(0.0, sd.ReferenceState(v_ref_mps=1.0), sd.ControlSequence([0.0]), cfg)
    assert res.converged
    assert res.sequence.u[0] == pytest.approx(0.2 / 1.04, abs=1e-9)
    assert sd.apply_first(res.sequence, cfg) == pytest.approx(0.19231, abs=1e-5)


def test_invalid_config_raises_value_error():
    cfg = sd.MpcConfig()
    cfg.horizon = 0
    with pytest.raises(ValueError):
        cfg.validate()


def test_cam_round_trip():
    cam = sd.CamMessage()
    cam.station_id = 7
    cam.generation_time_ms = 123
    cam.speed_mps = 13.5
    cam.heading_rad = 1.25
    payload = sd.encode_cam(cam)
    back = sd.decode_cam(payload)
    assert back == cam
    assert sd.cam_topic(7) == "vehicles/7/cam"
    assert sd.station_from_topic("vehicles/7/cam") == 7
    assert sd.topic_matches("vehicles/+/cam", "vehicles/9/cam")


def test_supervision_override_priority():
    inputs = sd.SupervisionInputs()
    inputs.now_s = 5.0
    inputs.last_cam_rx_s = 5.0
    inputs.last_control_s = 5.0
    inputs.manual_input = {sd.Channel.Longitudinal}
    res = sd.supervision_step(sd.SupervisionState(), inputs, sd.SupervisionConfig())
    assert res.state.mode == sd.Mode.ManualOverride
    gated = sd.gate_command(res.gate, 1.5)
    assert gated.accel_mps2 == 0.0
    assert not gated.actuation_on


def test_run_scenario_equilibrium():
    sc = sd.Scenario()
    sc.duration_s = 5.0
    sc.network.base_latency_ms = 0.0
    sc.network.jitter_ms = 0.0
    sc.network.loss_prob = 0.0
    result = sd.run_scenario(sc)
    assert result.metrics.rms_speed_error_mps <= 1e-6
    assert result.metrics.final_mode == sd.Mode.Nominal
    assert len(result.trace.rows) == 250
    assert result.metrics.messages_sent == result.metrics.messages_delivered


def test_run_scenario_with_network_noise():
    sc = sd.Scenario()
    sc.duration_s = 20.0
    sc.lead_profile.kind = sd.LeadProfileKind.Sine
    sc.lead_profile.amplitude_mps2 = 0.5
    sc.lead_profile.period_s = 30.0
    sc.network.base_latency_ms = 40.0
    sc.network.jitter_ms = 10.0
    sc.network.loss_prob = 0.01
    sc.seed = 3
    result = sd.run_scenario(sc)
    assert result.metrics.rms_speed_error_mps < 0.2
    assert result.metrics.mean_latency_ms > 30.0
    stats = result.latency.stats()
    assert stats.count == result.metrics.latency_samples
    assert not math.isnan(stats.p95_ms)


def test_simulated_broker_bindings():
    net = sd.NetworkModel()
    net.base_latency_ms = 50.0
    broker = sd.SimulatedBroker(net)
    sub = broker.subscribe("vehicles/1/cam", 0.0)
    broker.publish("vehicles/1/cam", b"payload", 1.0)
    assert broker.poll_deliveries(sub, 1.04) == []
    due = broker.poll_deliveries(sub, 1.05)
    assert len(due) == 1
    assert due[0].payload == b"payload"

from __future__ import annotations

import json

import numpy as np
import pytest

from qlattice import Cell, DisplayChannel, GridSpec
from qlattice.measure import MeasurementOutcome
from qlattice.session import FrameStats
from qlattice.state import Marginal2D
from qlattice.wire import (
    CellPayload,
    ClickMessage,
    ErrorMessage,
    FrameMessage,
    GridPayload,
    InitMessage,
    MeasurementMessage,
    ParticlePayload,
    PauseMessage,
    ReadyMessage,
    ResetMessage,
    ResumeMessage,
    SetSpeedMessage,
    StatsPayload,
    WireError,
    decode_message,
    encode_frame,
    encode_measurement,
    encode_message,
)


def sample_messages():
    return [
        InitMessage(config={"grid": {"m": 4, "n": 4}}),
        InitMessage(),
        ClickMessage(ax=2, ay=3),
        PauseMessage(),
        ResumeMessage(),
        ResetMessage(),
        SetSpeedMessage(steps_per_frame=5),
        ReadyMessage(
            grid=GridPayload(m=8, n=8, dx=1.0, dy=1.0),
            particles=[
                ParticlePayload(index=0, mass=1.0, spring_k=0.1, display_channel=DisplayChannel.RED)
            ],
            steps_per_frame=20,
            dt=0.001,
        ),
        FrameMessage(
            seq=7,
            t=0.35,
            stats=StatsPayload(
                frame=7,
                pre_norm=1.000001,
                total_energy=2.5,
                kinetic=[1.0, 0.5],
                expected_pos=[(1.0, 2.0), (3.0, 4.0)],
                cm=(2.0, 3.0),
            ),
            marginals=[[0.25, 0.75], [0.5, 0.5]],
        ),
        MeasurementMessage(cell=CellPayload(ax=1, ay=1), probs=[0.2, 0.3], detected=1),
        MeasurementMessage(cell=CellPayload(ax=0, ay=0), probs=[0.0], detected=None),
        ErrorMessage(code="bad_message", message="nope"),
    ]


def test_round_trip_every_message_type():
    for msg in sample_messages():
        assert decode_message(encode_message(msg)) == msg


def test_unknown_type_rejected():
    with pytest.raises(WireError) as exc_info:
        decode_message(json.dumps({"type": "warp", "factor": 9}))
    assert exc_info.value.code == "bad_message"


def test_malformed_json_rejected():
    with pytest.raises(WireError):
        decode_message("{oops")


def test_extra_fields_rejected():
    with pytest.raises(WireError):
        decode_message(json.dumps({"type": "pause", "bogus": 1}))


def test_missing_fields_rejected():
    with pytest.raises(WireError):
        decode_message(json.dumps({"type": "click", "ax": 1}))


def test_encode_frame_payload_shape():
    grid = GridSpec(m=8, n=8)
    rng = np.random.default_rng(0)
    marginals = []
    for _ in range(3):
        v = rng.random((8, 8))
        marginals.append(Marginal2D(grid, v / v.sum()))
    stats = FrameStats(
        frame=3,
        t=0.1,
        pre_norm=1.0,
        total_energy=1.0,
        kinetic=[0.3, 0.3, 0.4],
        expected_pos=[(1, 1), (2, 2), (3, 3)],
        cm=(2.0, 2.0),
    )
    msg = encode_frame(stats, marginals)
    assert msg.seq == 3
    assert len(msg.marginals) == 3
    assert all(len(m) == 64 for m in msg.marginals)


def test_frame_marginal_order_matches_csv():
    grid = GridSpec(m=3, n=2)
    values = np.zeros((3, 2))
    values[2, 1] = 1.0
    stats = FrameStats(
        frame=1, t=0.0, pre_norm=1.0, total_energy=0.0,
        kinetic=[0.0], expected_pos=[(0, 0)], cm=(0, 0),
    )
    msg = encode_frame(stats, [Marginal2D(grid, values)])
    # ay outer, ax inner: (ax=2, ay=1) -> 1*3 + 2 = 5.
    assert msg.marginals[0][5] == 1.0


def test_frame_marginals_survive_json_round_trip():
    grid = GridSpec(m=8, n=8)
    rng = np.random.default_rng(5)
    v = rng.random((8, 8))
    marg = Marginal2D(grid, v / v.sum())
    stats = FrameStats(
        frame=1, t=0.0, pre_norm=1.0, total_energy=0.0,
        kinetic=[0.0], expected_pos=[(0, 0)], cm=(0, 0),
    )
    text = encode_message(encode_frame(stats, [marg]))
    back = decode_message(text)
    assert abs(sum(back.marginals[0]) - 1.0) < 1e-6


def test_encode_frame_rejects_non_finite():
    grid = GridSpec(m=2, n=2)
    marg = Marginal2D(grid, np.full((2, 2), 0.25))
    stats = FrameStats(
        frame=1, t=0.0, pre_norm=float("nan"), total_energy=0.0,
        kinetic=[0.0], expected_pos=[(0, 0)], cm=(0, 0),
    )
    with pytest.raises(Exception, match="non-finite"):
        encode_frame(stats, [marg])


def test_encode_measurement():
    outcome = MeasurementOutcome(cell=Cell(2, 1), probs=(0.5, 0.25), detected=0)
    msg = encode_measurement(outcome)
    assert msg.cell == CellPayload(ax=2, ay=1)
    assert msg.detected == 0
    payload = json.loads(encode_message(msg))
    assert payload["type"] == "measurement"
    none_msg = encode_measurement(MeasurementOutcome(cell=Cell(0, 0), probs=(0.0,), detected=None))
    assert json.loads(encode_message(none_msg))["detected"] is None

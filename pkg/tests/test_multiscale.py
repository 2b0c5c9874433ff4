import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracle
from dyntok.errors import ValidationError
from dyntok.multiscale import (
    Projection,
    apply_projection,
    load_projection,
    multiscale_image,
    multiscale_video,
    step_labels,
    validate_steps,
)
from dyntok.synth import phased_video
from dyntok.temporal import FrameSequence
from dyntok.tensor_io import TensorFile, TokenMeta, write_tensor

META_16 = TokenMeta(16, 16, 0, 8)


def rand_image(seed, L=256, dim=8):
    return np.random.default_rng(seed).standard_normal((L, dim)).astype(np.float32)


@pytest.mark.parametrize("steps,total", [((64, 32, 16), 112), ((16, 8, 4), 28),
                                         ((32, 16, 8), 56), ((128, 64, 32), 224)])
def test_image_budget(steps, total):
    rep = multiscale_image(rand_image(0), META_16, steps)
    assert rep.num_tokens == total
    assert rep.step_spans == [[(0, steps[0]), (steps[0], steps[1]), (steps[0] + steps[1], steps[2])]]
    assert rep.event_spans == []


def test_tiny_image_chain():
    x = np.array([[0.0, 1.0], [0.5, 1.0], [4.0, 0.0], [4.0, 0.5]], np.float32)
    rep = multiscale_image(x, TokenMeta(2, 2, 0, 2), (4, 2, 1))
    assert rep.num_tokens == 7
    np.testing.assert_array_equal(rep.tokens[:4], x)
    step2 = rep.tokens[4:6].astype(np.float64)
    np.testing.assert_allclose(rep.tokens[6], step2.mean(0), rtol=1e-6)
    assert rep.provenance[6] == frozenset({(0, 0), (0, 1), (0, 2), (0, 3)})


@pytest.mark.parametrize("steps", [(), (4, 4), (2, 3), (3, 0)])
def test_bad_steps(steps):
    with pytest.raises(ValidationError):
        validate_steps(steps)


def test_step_containment_and_labels():
    rep = multiscale_image(rand_image(4, L=64), TokenMeta(8, 8, 0, 8), (20, 9, 3))
    (spans,) = rep.step_spans
    for (s0, n0), (s1, n1) in zip(spans, spans[1:]):
        finer = rep.provenance[s0 : s0 + n0]
        for region in rep.provenance[s1 : s1 + n1]:
            parts = [r for r in finer if r <= region]
            assert frozenset().union(*parts) == region
    for lab, (_, n) in zip(step_labels(rep, 0), spans):
        assert lab.shape == (1, 8, 8) and set(lab.ravel()) == set(range(n))


def test_single_frame_video_equals_image():
    x = rand_image(5)
    img = multiscale_image(x, META_16)
    vid = multiscale_video(FrameSequence.from_array(x[None], 16, 16))
    assert vid.tokens.tobytes() == img.tokens.tobytes()
    assert vid.event_spans == [(0, 112)]
    assert vid.step_spans == img.step_spans


def test_video_64_frames():
    x = phased_video(np.random.default_rng(0), 64, 16, 16, 4, phases=4)
    rep = multiscale_video(FrameSequence.from_array(x, 16, 16))
    assert rep.events.num_events == 4
    assert rep.num_tokens == 448
    assert rep.event_spans == [(0, 112), (112, 112), (224, 112), (336, 112)]
    assert rep.spans_json()["steps"][1] == [
        {"start": 112, "len": 64}, {"start": 176, "len": 32}, {"start": 208, "len": 16}]


def test_longer_video_more_tokens():
    rng = np.random.default_rng(1)
    short = multiscale_video(FrameSequence.from_array(phased_video(rng, 32, 4, 4, 4), 4, 4), steps=(8, 4, 2))
    long = multiscale_video(FrameSequence.from_array(phased_video(rng, 64, 4, 4, 4), 4, 4), steps=(8, 4, 2))
    assert (short.events.num_events, long.events.num_events) == (2, 4)
    assert short.num_tokens < long.num_tokens


def test_video_event_partition_and_order():
    x = np.random.default_rng(2).standard_normal((12, 9, 3)).astype(np.float32)
    rep = multiscale_video(FrameSequence.from_array(x, 3, 3), "1/4", (6, 3, 1))
    for ev, spans in zip(rep.events.events, rep.step_spans):
        space = {(m, i) for m in ev for i in range(9)}
        for start, n in spans:
            origins = [o for p in rep.provenance[start : start + n] for o in p]
            assert len(origins) == len(space) and set(origins) == space
    firsts = [s for s, _ in rep.event_spans]
    assert firsts == sorted(firsts)
    assert sum(n for _, n in rep.event_spans) == rep.num_tokens


@given(st.integers(0, 2**32 - 1))
def test_video_tokens_nondecreasing_in_length(seed):
    rng = np.random.default_rng(seed)
    base = rng.standard_normal((48, 16, 3)).astype(np.float32)
    totals = [multiscale_video(FrameSequence.from_array(base[:m], 4, 4), "1/8", (8, 4, 2)).num_tokens
              for m in (4, 8, 16, 24, 32, 48)]
    assert totals == sorted(totals)


def test_projection_identity():
    rep = multiscale_image(rand_image(6, L=16, dim=4), TokenMeta(4, 4, 0, 4), (8, 4, 2))
    out = apply_projection(rep, Projection(np.eye(4), np.zeros(4)))
    assert out.tobytes() == rep.tokens.tobytes()


def test_projection_ones():
    out = apply_projection(np.array([[1.0, 3.0]], np.float32), Projection(np.ones((2, 1))))
    assert out.tolist() == [[4.0]]


def test_projection_random_vs_naive():
    rng = np.random.default_rng(7)
    a = rng.standard_normal((5, 3)).astype(np.float32)
    w = rng.standard_normal((3, 2)).astype(np.float32)
    b = rng.standard_normal(2).astype(np.float32)
    expected = [[v + float(b[j]) for j, v in enumerate(row)] for row in oracle.naive_matmul(a.tolist(), w.tolist())]
    np.testing.assert_allclose(apply_projection(a, Projection(w, b)), expected, rtol=1e-5, atol=1e-6)


@given(st.floats(-10, 10), st.integers(0, 2**32 - 1))
def test_projection_linear(scale, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((6, 4)).astype(np.float32)
    p = Projection(rng.standard_normal((4, 3)))
    lhs = apply_projection((np.float32(scale) * x).astype(np.float32), p)
    np.testing.assert_allclose(lhs, scale * apply_projection(x, p), rtol=1e-5, atol=1e-5)


def test_projection_shape_errors():
    with pytest.raises(ValidationError):
        apply_projection(np.zeros((2, 3), np.float32), Projection(np.zeros((4, 2))))
    with pytest.raises(ValidationError):
        Projection(np.zeros((4, 2)), np.zeros(3))


def test_load_projection(tmp_path):
    w = np.arange(6, dtype=np.float32).reshape(3, 2)
    write_tensor(TensorFile.from_array(w), tmp_path / "w.npy")
    write_tensor(TensorFile.from_array(np.array([1.0, -1.0], np.float32)), tmp_path / "b.npy")
    p = load_projection(tmp_path / "w.npy", tmp_path / "b.npy")
    assert apply_projection(np.array([[1, 0, 1]], np.float32), p).tolist() == [[5.0, 5.0]]
    assert load_projection(tmp_path / "w.npy").bias is None

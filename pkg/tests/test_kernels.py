"""Kernel backend parity: numba and pure-Python paths must agree bit for bit."""

import os
import random
import subprocess
import sys
from collections import Counter

import numpy as np
import pytest

from bmn import _kernels
from bmn._rng import MASK64, SplitMix64, fmix64, stream_state
from bmn.engine import PLAYER_A, PLAYER_B, GameState, Terminated, play_match
from conftest import random_playable_state

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA,
                                 reason="numba backend not active")


def test_backend_name():
    assert _kernels.backend() in ("numba", "python")


def test_env_flag_forces_python_backend():
    env = dict(os.environ, BMN_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from bmn import _kernels; print(_kernels.backend())"],
        capture_output=True, text=True, env=env)
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip() == "python"


# ---------------------------------------------------------------------------
# RNG
# ---------------------------------------------------------------------------


def test_fmix64_is_stable():
    # fixed points of the reference implementation
    assert fmix64(0) == 0
    assert fmix64(1) == 0x5692161D100B05E5
    assert fmix64((1 << 64) - 1) == fmix64(-1)  # masked to 64 bits


def test_below_is_in_range_and_exhaustive():
    rng = SplitMix64(123)
    seen = Counter(rng.below(6) for _ in range(6000))
    assert set(seen) == set(range(6))
    assert min(seen.values()) > 800  # roughly uniform


def test_shuffle_is_a_permutation():
    rng = SplitMix64(99)
    items = list(range(40))
    shuffled = items.copy()
    rng.shuffle(shuffled)
    assert sorted(shuffled) == items
    assert shuffled != items


def test_stream_states_differ_by_index():
    states = {stream_state(7, i) for i in range(1000)}
    assert len(states) == 1000


@needs_numba
def test_jit_rng_matches_python():
    state_py = SplitMix64(stream_state(42, 17))
    state = stream_state(42, 17)
    for n in (2, 3, 13, 40, 52, 1):
        # returns cross the python boundary as plain ints: re-wrap to uint64
        state, j = _kernels._jit_below(np.uint64(state), n)
        assert int(j) == state_py.below(n)
        assert int(state) == state_py.state


# ---------------------------------------------------------------------------
# Match kernel vs engine
# ---------------------------------------------------------------------------


def test_py_match_agrees_with_engine_stepping():
    rng = random.Random(5)
    for _ in range(200):
        s = random_playable_state(rng, max_cards=20, max_rank=3)
        code = 0 if s.leader == PLAYER_A else 1
        status, winner, tricks = _kernels._py_match(s.deck_a, s.deck_b, code, 2000)
        outcome = play_match(s, 2000, detect_loops=False)
        if isinstance(outcome, Terminated):
            assert status == 0
            assert tricks == outcome.tricks
            assert (PLAYER_A if winner == 0 else PLAYER_B) == outcome.winner
        else:
            assert status == 2 and tricks == 2000


@needs_numba
def test_jit_match_agrees_with_py_match():
    rng = random.Random(6)
    for _ in range(200):
        s = random_playable_state(rng, max_cards=24, max_rank=4)
        expected = _kernels._py_match(s.deck_a, s.deck_b, 0, 2000)
        got = _kernels.play_match_raw(s.deck_a, s.deck_b, 0, 2000)
        assert got == expected


# ---------------------------------------------------------------------------
# Batch kernels
# ---------------------------------------------------------------------------


def _run_batch(fn, n, n_total, max_rank, seed, cap):
    durations = np.empty(n, dtype=np.int32)
    winners = np.empty(n, dtype=np.int8)
    fn(0, n, n_total, max_rank, seed, cap, durations, winners)
    return durations, winners


@needs_numba
@pytest.mark.parametrize("setting", [(12, 1), (40, 3)])
def test_batch_backends_bit_identical(setting):
    n_total, max_rank = setting
    n = 2000
    seed_u = np.uint64(12345)
    d_py, w_py = _run_batch(_kernels._py_batch, n, n_total, max_rank, 12345, 100_000)
    d_jit, w_jit = _run_batch(_kernels._jit_batch, n, n_total, max_rank, seed_u, 100_000)
    d_par, w_par = _run_batch(_kernels._jit_batch_par, n, n_total, max_rank, seed_u, 100_000)
    assert np.array_equal(d_py, d_jit) and np.array_equal(w_py, w_jit)
    assert np.array_equal(d_py, d_par) and np.array_equal(w_py, w_par)


def test_simulate_batch_is_index_sliced():
    # the same match index yields the same outcome regardless of batch bounds
    d1, w1 = _kernels.simulate_batch(50, 12, 1, 7, 100_000)
    d2, w2 = _kernels.simulate_batch(30, 12, 1, 7, 100_000)
    assert np.array_equal(d1[:30], d2) and np.array_equal(w1[:30], w2)


def test_simulate_batch_rejects_huge_budget():
    with pytest.raises(ValueError):
        _kernels.simulate_batch(1, 12, 1, 0, 2 ** 31)

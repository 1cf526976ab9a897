import math
import random

import pytest

from semnav.core.episode_runner import EpisodeResult, Termination
from semnav.core.metrics import compute_metrics, episode_spl


def _result(success, oracle, agent):
    return EpisodeResult(
        success=success,
        steps=10,
        agent_path_length=agent,
        oracle_shortest=oracle,
        termination=Termination.STOP if success else Termination.MAX_STEPS,
    )


FIXTURE = [
    _result(True, 10.0, 10.0),   # 1.0
    _result(True, 10.0, 20.0),   # 0.5
    _result(False, 4.0, 3.0),    # 0.0
    _result(True, 6.0, 4.5),     # p < l counts as l: 1.0
    _result(True, 3.0, 12.0),    # 0.25
]


def test_five_episode_fixture():
    metrics = compute_metrics(FIXTURE)
    assert metrics.sr == pytest.approx(80.0, abs=1e-9)
    assert metrics.spl == pytest.approx(100.0 * 2.75 / 5, abs=1e-9)


def test_single_episode_examples():
    assert compute_metrics([_result(True, 7.5, 7.5)]) == (100.0, 100.0)
    assert compute_metrics([_result(False, 7.5, 7.5)]) == (0.0, 0.0)
    assert episode_spl(True, 10.0, 20.0) == 0.5


def test_unreachable_oracle_counts_as_failure():
    assert compute_metrics([_result(False, math.inf, 2.0)]) == (0.0, 0.0)


def test_empty_batch_is_rejected():
    with pytest.raises(ValueError):
        compute_metrics([])


@pytest.mark.parametrize("seed", range(10))
def test_spl_bounded_by_sr_and_order_free(seed):
    rng = random.Random(seed)
    results = [
        _result(rng.random() < 0.6, rng.uniform(0.5, 10.0), rng.uniform(0.0, 20.0))
        for _ in range(rng.randint(1, 30))
    ]
    metrics = compute_metrics(results)
    assert 0.0 <= metrics.spl <= metrics.sr <= 100.0

    shuffled = results[:]
    rng.shuffle(shuffled)
    assert compute_metrics(shuffled) == metrics

"""
Success Rate and Success weighted by Path Length over a batch of episodes
"""

import math
from typing import Iterable, List, NamedTuple


class BatchMetrics(NamedTuple):
    sr: float    # percent
    spl: float   # percent


def episode_spl(success: bool, oracle_length: float, agent_length: float) -> float:
    """
    success * l / max(p, l)

    Example:
        >>> episode_spl(True, 10.0, 20.0)
        0.5
    """
    if not success:
        return 0.0
    return oracle_length / max(agent_length, oracle_length)


def compute_metrics(results: Iterable) -> BatchMetrics:
    """
    SR and SPL in percent

    Args:
        results: EpisodeResult-like objects with success, oracle_shortest and agent_path_length

    Returns:
        BatchMetrics(sr, spl)
    """
    results: List = list(results)
    if not results:
        raise ValueError("compute_metrics needs at least one episode")

    n = len(results)
    sr = 100.0 * math.fsum(1.0 for r in results if r.success) / n
    spl = 100.0 * math.fsum(
        episode_spl(r.success, r.oracle_shortest, r.agent_path_length) for r in results
    ) / n
    return BatchMetrics(sr=sr, spl=spl)

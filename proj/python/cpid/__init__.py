"""Causal identification and policy learning for decision processes."""

import json as _json

from . import _core
from ._core import CpidError, m_separated, simulate, version

__all__ = [
    "CpidError",
    "evaluate",
    "find_states",
    "identify",
    "learn",
    "m_separated",
    "reproduce_table1",
    "simulate",
    "version",
]


def identify(graph, process, state=None):
    """Verdicts for a graph (text) and process annotation (JSON text or dict)."""
    if not isinstance(process, str):
        process = _json.dumps(process)
    return _json.loads(_core.identify(graph, process, state))


def find_states(template, rewards, max_lag=2, max_size=3):
    return _json.loads(_core.find_states(template, list(rewards), max_lag, max_size))


def learn(spec, state, episodes=2000, horizon=100, seed=1, actions=None, reward="R", latent=None, gamma=0.99):
    return _json.loads(_core.learn(spec, state, episodes, horizon, seed, actions, reward, latent, gamma))


def evaluate(spec, policy=None, episodes=2000, horizon=100, seed=2):
    if policy is not None and not isinstance(policy, str):
        policy = _json.dumps(policy)
    return _json.loads(_core.evaluate(spec, policy, episodes, horizon, seed))


def reproduce_table1(fixture_dir, scenarios=None, episodes=2000, horizon=100):
    return _json.loads(_core.reproduce_table1(fixture_dir, scenarios, episodes, horizon))

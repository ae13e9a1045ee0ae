"""Label-noise robustness toolkit: noise models, exact oracles, bounds and training."""

import json as _json

from . import _nll
from ._nll import *  # noqa: F401,F403


def _loads(fn):
    def wrapper(*args, **kwargs):
        return _json.loads(fn(*args, **kwargs))

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _dumps(config):
    return config if isinstance(config, str) else _json.dumps(config or {})


enumerate_best = _loads(_nll.enumerate_best)
audit_validation_bound = _loads(_nll.audit_validation_bound)
run_tabular_demo = _loads(_nll.run_tabular_demo)
run_bound_audit_suite = _loads(_nll.run_bound_audit_suite)


def train_mlp(train, config=None, val=None, test=None):
    """Returns (model, {"checkpoints": [...], "model": params})."""
    model, record = _nll.train_mlp(train, _dumps(config), val, test)
    return model, _json.loads(record)


def run_nts(train, val, config=None, test=None):
    return _json.loads(_nll.run_nts(train, val, _dumps(config), test))


def run_regime_sweep(config=None):
    return _json.loads(_nll.run_regime_sweep(_dumps(config)))

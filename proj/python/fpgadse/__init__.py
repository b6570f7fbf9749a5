"""Python bindings for the fpgadse design-space exploration core."""

import json
from fractions import Fraction

from . import _core
from ._core import FpgadseError, NoFeasibleCandidate, SpaceTooLarge, __version__

__all__ = [
    "FpgadseError",
    "NoFeasibleCandidate",
    "SpaceTooLarge",
    "__version__",
    "load_catalog",
    "estimate",
    "simulate",
    "explore",
    "precision_sweep",
    "efficiency_ratio",
    "latency_reduction_pct",
    "reference_activation",
    "pareto_frontier",
]


def _exact(text):
    return Fraction(text)


def load_catalog(path):
    return json.loads(_core.load_catalog(str(path)))


def estimate(catalog, model, device, appspec=None, assign="", clock=None, strategy="idle"):
    return json.loads(_core.estimate(str(catalog), str(model), str(device),
                                     None if appspec is None else str(appspec),
                                     assign, None if clock is None else str(clock), strategy))


def simulate(catalog, model, device, workload, requests=100, assign="", clock=None,
             strategy="idle", deadline=None):
    return json.loads(_core.simulate(str(catalog), str(model), str(device), workload, requests,
                                     assign, None if clock is None else str(clock), strategy,
                                     None if deadline is None else str(deadline)))


def explore(catalog, model, device, appspec, algo="exhaustive", top=5, clocks=None,
            strategies=None, jobs=1, cap=1_000_000):
    return json.loads(_core.explore(str(catalog), str(model), str(device), str(appspec), algo, top,
                                    None if clocks is None else [str(c) for c in clocks],
                                    strategies, jobs, cap))


def precision_sweep(catalog, variant, reference="fixed"):
    stats = _core.precision_sweep(str(catalog), variant, reference)
    return {
        "max_abs_error": _exact(stats["max_abs_error"]),
        "mean_abs_error": _exact(stats["mean_abs_error"]),
        "inputs": stats["inputs"],
    }


def efficiency_ratio(a, b):
    return _exact(_core.efficiency_ratio(str(a), str(b)))


def latency_reduction_pct(before, after):
    return _exact(_core.latency_reduction_pct(str(before), str(after)))


def reference_activation(fn, x):
    return _core.reference_activation(fn, float(x))


def pareto_frontier(points):
    """points: iterable of (energy_per_item, t_inf, lut); returns frontier indices."""
    return _core.pareto_frontier([(str(e), str(t), int(l)) for e, t, l in points])

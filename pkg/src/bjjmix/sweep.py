"""Grid sweeps for phase diagrams. Nodes are independent; order is row-major."""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .classify import classify_lenient
from .equilibria import Mode, normal_mode_frequencies
from .integrate import PoleApproach, StepFailure, integrate
from .io import RunConfig
from .model import DomainError, State

THREADS_ENV = "BJJMIX_THREADS"


@dataclass(frozen=True)
class NodeResult:
    values: tuple[float, ...]
    zero_stable: bool
    pi_stable: bool
    label: str


def _stability_label(zero: bool, pi: bool) -> str:
    if zero and pi:
        return "zero_and_pi"
    return "zero" if zero else "pi" if pi else "MQST"


def node_inputs(cfg: RunConfig, values):
    p, s = cfg.model, cfg.initial
    sw = cfg.sweep
    model_kw, state_kw = {}, {}
    for axis, v in zip(sw.axes, values):
        if axis.name == "Lambda":
            model_kw.update(Lambda_a=v, Lambda_b=v)
            if sw.ratio is not None:
                model_kw["Lambda_ab"] = sw.ratio * v
        elif axis.name in State.__dataclass_fields__:
            state_kw[axis.name] = v
        else:
            model_kw[axis.name] = v
    if sw.R is not None:
        model_kw["K_a"] = sw.R * model_kw.get("K_b", p.K_b)
    return replace(p, **model_kw), replace(s, **state_kw)


def evaluate_node(cfg: RunConfig, values) -> NodeResult:
    p, s0 = node_inputs(cfg, values)
    zero = normal_mode_frequencies(p, Mode.ZERO).stable
    pi = normal_mode_frequencies(p, Mode.PI).stable
    if cfg.sweep.classify:
        try:
            label = classify_lenient(integrate(p, s0, cfg.integrator), cfg.classifier)[0].trapping.value
        except (PoleApproach, DomainError):
            label = "PoleApproach"
        except StepFailure:
            label = "StepFailure"
    else:
        label = _stability_label(zero, pi)
    return NodeResult(tuple(values), zero, pi, label)


def grid_nodes(cfg: RunConfig) -> list[tuple[float, ...]]:
    return list(itertools.product(*(a.values() for a in cfg.sweep.axes)))


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def run_sweep(cfg: RunConfig, workers: int | None = None) -> list[NodeResult]:
    """All nodes in row-major order; results do not depend on the worker count."""
    nodes = grid_nodes(cfg)
    workers = thread_count() if workers is None else workers
    if workers <= 1 or len(nodes) < 2:
        return [evaluate_node(cfg, v) for v in nodes]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(evaluate_node, itertools.repeat(cfg), nodes, chunksize=max(1, len(nodes) // (4 * workers))))

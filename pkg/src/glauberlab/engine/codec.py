"""Compilation of (system, kernel, laziness) triples into flat engine models.

An engine model is a numeric description of the per-event update rule that
both backends (compiled and pure Python) interpret identically: a code, the
CSR adjacency, and a table of precomputed probabilities.  The table is built
once here, so the two backends consume bit-identical floats.

Systems without a fast path return ``None`` and run through the generic
Python event loop instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..kernels import (FlipKernel, HeatBathKernel, MetropolisKernel,
                       NeighborDifferenceKernel)
from ..systems import (ColoringSystem, CycleBlockSystem, HardCoreSystem,
                       IsingSystem, ProductCoinSystem)

CODE_UNIFORM = 0
CODE_FLIP = 1
CODE_ISING_HB = 2
CODE_ISING_MET = 3
CODE_HC_HB = 4
CODE_HC_MET = 5
CODE_COL_HB = 6
CODE_COL_MET = 7
CODE_BLOCK_RULE = 8


@dataclass
class EngineModel:
    code: int
    q: int
    n: int
    indptr: np.ndarray
    indices: np.ndarray
    table: np.ndarray
    dmax: int
    laziness: float

    def py_arrays(self):
        """Adjacency and table as plain lists (cached) for the Python backend."""
        cache = getattr(self, "_py_cache", None)
        if cache is None:
            cache = (self.indptr.tolist(), self.indices.tolist(), self.table.tolist())
            object.__setattr__(self, "_py_cache", cache)
        return cache


def _ising_tables(system, metropolis):
    if float(np.ptp(system.field)) != 0.0:
        return None  # per-site fields take the generic path
    h = float(system.field[0])
    beta = system.beta
    dmax = system.graph.max_degree
    span = np.arange(-dmax, dmax + 1, dtype=float)
    if not metropolis:
        # probability of spin 1 (minus) given the signed neighbor sum
        p_plus = 1.0 / (1.0 + np.exp(-2.0 * beta * (span + h)))
        return (1.0 - p_plus), dmax
    acc = np.empty(2 * (2 * dmax + 1))
    for i, s_nb in enumerate(span):
        acc[2 * i] = min(1.0, math.exp(-2.0 * beta * (s_nb + h)))      # to minus
        acc[2 * i + 1] = min(1.0, math.exp(2.0 * beta * (s_nb + h)))   # to plus
    return acc, dmax


def compile_model(dynamics):
    """Engine model for a Dynamics, or None when only the generic loop applies."""
    system = dynamics.system
    kernel = dynamics.kernel
    g = dynamics.graph
    base = dict(q=system.q, n=g.n, indptr=g.indptr, indices=g.indices,
                dmax=g.max_degree, laziness=float(dynamics.laziness))
    empty = np.empty(0)
    if isinstance(kernel, HeatBathKernel):
        if isinstance(system, ProductCoinSystem):
            return EngineModel(code=CODE_UNIFORM, table=empty, **base)
        if isinstance(system, IsingSystem):
            tables = _ising_tables(system, metropolis=False)
            if tables is None:
                return None
            return EngineModel(code=CODE_ISING_HB, table=np.ascontiguousarray(tables[0]), **base)
        if isinstance(system, HardCoreSystem):
            table = np.array([1.0 / (1.0 + system.lam)])
            return EngineModel(code=CODE_HC_HB, table=table, **base)
        if isinstance(system, ColoringSystem):
            return EngineModel(code=CODE_COL_HB, table=empty, **base)
        return None
    if isinstance(kernel, MetropolisKernel):
        if isinstance(system, IsingSystem):
            tables = _ising_tables(system, metropolis=True)
            if tables is None:
                return None
            return EngineModel(code=CODE_ISING_MET, table=np.ascontiguousarray(tables[0]), **base)
        if isinstance(system, HardCoreSystem):
            table = np.array([min(1.0, system.lam), min(1.0, 1.0 / system.lam)])
            return EngineModel(code=CODE_HC_MET, table=table, **base)
        if isinstance(system, ColoringSystem):
            return EngineModel(code=CODE_COL_MET, table=empty, **base)
        if isinstance(system, ProductCoinSystem):
            # uniform conditional: every proposal is accepted
            return EngineModel(code=CODE_UNIFORM, table=empty, **base)
        return None
    if isinstance(kernel, FlipKernel) and system.q == 2:
        return EngineModel(code=CODE_FLIP, table=np.array([kernel.flip_prob]), **base)
    if isinstance(kernel, NeighborDifferenceKernel) and isinstance(system, CycleBlockSystem):
        return EngineModel(code=CODE_BLOCK_RULE, table=empty, **base)
    return None

"""Event-loop backends.

The compiled extension is preferred when importable; the pure-Python
interpreter is a drop-in replacement with bit-identical output.  Set the
environment variable ``GLAUBER_ENGINE=python`` (or call ``set_backend``)
to force the fallback, e.g. for benchmarking.
"""

from __future__ import annotations

import os

import numpy as np

from . import pybackend
from .codec import EngineModel, compile_model

_IMPLS = {"python": pybackend}
try:  # pragma: no cover - depends on the build environment
    from . import _ckernels

    _IMPLS["compiled"] = _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None

_active = os.environ.get("GLAUBER_ENGINE", "")
if _active not in _IMPLS:
    _active = "compiled" if "compiled" in _IMPLS else "python"


def available_backends():
    return sorted(_IMPLS)


def active_backend():
    return _active


def set_backend(name):
    global _active
    if name not in _IMPLS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    _active = name


def _as_engine_arrays(sites, uniforms):
    sites = np.ascontiguousarray(sites, dtype=np.int64)
    uniforms = np.ascontiguousarray(uniforms, dtype=np.float64)
    return sites, uniforms


def run_single(spins, sites, uniforms, model: EngineModel):
    """Apply the pre-drawn events to ``spins`` in place."""
    sites, uniforms = _as_engine_arrays(sites, uniforms)
    impl = _IMPLS[_active]
    if impl is pybackend:
        indptr, indices, table = model.py_arrays()
        work = spins.tolist()
        pybackend.run_single(work, sites.tolist(), uniforms.tolist(),
                             model.code, model.q, model.laziness,
                             indptr, indices, table, model.dmax)
        spins[:] = work
    else:
        impl.run_single(spins, sites, uniforms, model.code, model.q,
                        model.laziness, model.indptr, model.indices,
                        model.table, model.dmax)


def run_coupled(x, y, sites, uniforms, model_x: EngineModel, model_y: EngineModel):
    """Apply pre-drawn events to the coupled pair (x, y) in place."""
    if model_x.q != model_y.q or model_x.n != model_y.n:
        raise ValueError("coupled chains need matching graph and spin space")
    if model_x.laziness != model_y.laziness:
        raise ValueError("coupled chains need matching laziness")
    sites, uniforms = _as_engine_arrays(sites, uniforms)
    impl = _IMPLS[_active]
    if impl is pybackend:
        indptr, indices, table_x = model_x.py_arrays()
        table_y = model_y.py_arrays()[2]
        wx, wy = x.tolist(), y.tolist()
        pybackend.run_coupled(wx, wy, sites.tolist(), uniforms.tolist(),
                              model_x.code, model_y.code, model_x.q,
                              model_x.laziness, indptr, indices,
                              table_x, table_y, model_x.dmax)
        x[:] = wx
        y[:] = wy
    else:
        impl.run_coupled(x, y, sites, uniforms, model_x.code, model_y.code,
                         model_x.q, model_x.laziness, model_x.indptr,
                         model_x.indices, model_x.table, model_y.table,
                         model_x.dmax)


__all__ = [
    "EngineModel",
    "compile_model",
    "available_backends",
    "active_backend",
    "set_backend",
    "run_single",
    "run_coupled",
]

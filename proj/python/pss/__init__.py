"""Pseudospherical surfaces toolkit (Python bindings)."""

import json as _json

from ._pss import (  # noqa: F401
    Family,
    JetPoint,
    __version__,
    eval_expression,
    gauss_residual,
    h1_norm,
    helmholtz_invert,
    kink,
    preset_names,
    run_cli,
    solve_mol,
    solve_triple,
)
from . import _pss


def verify(family, samples=1000, seed=None, tol=1e-8):
    kw = {"samples": samples, "tol": tol}
    if seed is not None:
        kw["seed"] = seed
    return _json.loads(_pss.verify(family, **kw))


def reconstruct_kink(eta=1.0, n=40, half_width=3.0, substeps=4):
    return _json.loads(_pss.reconstruct_kink(eta, n, half_width, substeps))

"""Mirror inversion in engineered XY spin chains.

Thin Python layer over the compiled ``_core`` module. Structured results are
returned as plain dicts; operators are complex numpy arrays in the qubit
index basis (site 1 is the most significant bit).
"""

import json

import numpy as np

from . import _core
from ._core import (
    DecompositionError,
    DimensionError,
    DomainError,
    Error,
    MetricError,
    ParseError,
    PreconditionError,
    ResourceError,
    StallError,
    ValidationError,
    engineered_couplings,
    mirror_unitary,
    pauli_matrix,
    pauli_product,
    sector_phases,
    unitary_fidelity,
)

__all__ = [
    "Error", "DimensionError", "ResourceError", "ValidationError", "DomainError",
    "PreconditionError", "StallError", "DecompositionError", "MetricError", "ParseError",
    "pauli_matrix", "pauli_product", "engineered_couplings", "mirror_unitary",
    "engineered_chain", "chain_propagator", "spectrum", "sector_phases",
    "closed_form", "decompose", "reconstruct", "unitary_fidelity",
    "transfer_bell", "transfer_site", "grape",
]


def engineered_chain(n):
    """Chain spec dict with couplings sqrt(i (n - i)) and zero fields."""
    return {"n": n, "couplings": list(engineered_couplings(n)), "fields": [0.0] * n}


def _spec_text(spec):
    if isinstance(spec, int):
        spec = engineered_chain(spec)
    return json.dumps(spec)


def chain_propagator(spec, t):
    """exp(-i H t) for a chain spec dict (or an int for the engineered chain)."""
    return _core.chain_propagator_json(_spec_text(spec), float(t))


def spectrum(spec, tau=np.pi / 2):
    """Single-excitation spectrum and the mirror-condition verdict."""
    return json.loads(_core.spectrum_json(_spec_text(spec), float(tau)))


def closed_form(n):
    return json.loads(_core.closed_form_json(n))


def decompose(u):
    """Greedy subgroup-peeling decomposition of a unitary."""
    return json.loads(_core.decompose_json(np.asarray(u, dtype=complex)))


def reconstruct(decomposition):
    return _core.reconstruct_json(json.dumps(decomposition))


def transfer_bell(spec, pair=(1, 2), kind="phi+", mode="pure"):
    return json.loads(_core.transfer_bell_json(_spec_text(spec), pair[0], pair[1], kind, mode))


def transfer_site(spec, site, state="1"):
    return json.loads(_core.transfer_site_json(_spec_text(spec), site, state))


def grape(system, target, steps=20, dt=1e-3, cap=1000.0, max_iterations=200,
          rf_scales=(0.95, 1.0, 1.05), seed=1):
    """Optimise a pulse; returns (summary dict, amp_x, amp_y) with amplitudes in Hz."""
    text, ax, ay = _core.grape_json(json.dumps(system), np.asarray(target, dtype=complex), steps, dt,
                                    cap, max_iterations, list(rf_scales), seed)
    return json.loads(text), ax, ay

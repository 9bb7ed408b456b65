"""Python access to the hslab core."""

import json

from ._hslab import (  # noqa: F401
    ConfigError,
    DomainError,
    NumericalError,
    classify,
    cli,
    in_A,
    in_A0,
    level_set_measure,
    mu,
    phase,
    phase_floor,
    phi1u,
    phi2u,
    phiv,
    real_roots,
    simulate,
)
from . import _hslab


def fre_scan(form, a, k, s, ladder=(100.0, 1000.0, 10000.0)):
    return json.loads(_hslab.fre_scan_json(form, a, k, s, list(ladder)))


def ladder(lemma, Ns=()):
    return json.loads(_hslab.ladder_json(lemma, list(Ns)))

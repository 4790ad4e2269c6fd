"""Python bindings for the ecstab library."""

import json
import os
from fractions import Fraction

from . import _ecstab
from ._ecstab import (
    InputError,
    count_points,
    count_tp,
    delaunay_proportion,
    euler_characteristic_valuation,
    frobenius_image,
    height,
    is_minimal,
    kida_lambda,
    lower_bound_density,
    reduction_type,
    run_command,
    sl2_trace_count,
    zeta_tail,
)

_PACKAGED_RECORDS = os.path.join(os.path.dirname(__file__), "data", "curves.jsonl")


def default_records():
    """Records file shipped with the package, or "" to use the build default."""
    return os.environ.get("ECSTAB_RECORDS") or (_PACKAGED_RECORDS if os.path.exists(_PACKAGED_RECORDS) else "")


def s_density(p, n=1):
    num, den = _ecstab.s_density(p, n)
    return Fraction(int(num), int(den))


def build_split_extension(sigma, primes, p, n=1):
    return json.loads(_ecstab.build_split_extension(list(sigma), list(primes), p, n))


def character_value(chi, q):
    return frobenius_image(json.dumps(chi), q)


def certify(p, n=1, split=(), label="", a=0, b=0, records="", growth=False):
    """Certificate as a dict. Pass a record label or both coefficients."""
    records = records or default_records()
    return json.loads(_ecstab.certify(p, n, list(split), label, a, b, records, growth))


def verify_certificate(cert):
    text = cert if isinstance(cert, str) else json.dumps(cert)
    return _ecstab.verify_certificate(text)


__all__ = [
    "InputError",
    "build_split_extension",
    "certify",
    "character_value",
    "count_points",
    "count_tp",
    "default_records",
    "delaunay_proportion",
    "euler_characteristic_valuation",
    "height",
    "is_minimal",
    "kida_lambda",
    "lower_bound_density",
    "reduction_type",
    "run_command",
    "s_density",
    "sl2_trace_count",
    "verify_certificate",
    "zeta_tail",
]

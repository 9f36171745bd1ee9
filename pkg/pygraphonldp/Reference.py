from __future__ import annotations
import os
import logging

import numpy as np

from .General import ValidationError, ConfigError
from .Graphon import Graphon


QUADRATURE_ORDER = 5


def cell_averages(func, m, order=QUADRATURE_ORDER) -> np.ndarray:
    """Average of func over each cell [i/m, (i+1)/m) by Gauss-Legendre quadrature.

    Exact for polynomials of degree <= 2*order - 1.
    """
    nodes, weights = np.polynomial.legendre.leggauss(order)
    left = np.arange(m)[:, None] / m
    x = left + (nodes[None, :] + 1.0) / (2.0 * m)
    return (func(x) * weights[None, :]).sum(axis=1) / 2.0


def constant_reference(m, p) -> Graphon:
    if not 0.0 <= p <= 1.0:
        raise ValidationError("constant reference needs p in [0,1], got {} error @constant_reference".format(p))
    return Graphon.constant(m, p, name="const:{}".format(p))


def rank1_reference(m, coefficients) -> Graphon:
    """r(x,y) = nu(x) nu(y) with nu(x) = sum_i c_i x^i; cells hold exact averages."""
    coefficients = [float(c) for c in coefficients]
    if len(coefficients) == 0:
        raise ValidationError("rank1 reference needs at least one coefficient error @rank1_reference")
    nu = np.polynomial.polynomial.Polynomial(coefficients)
    avg = cell_averages(nu, m)
    if avg.min() < 0.0 or avg.max() > 1.0:
        raise ValidationError(
            "nu cell averages leave [0,1] (range [{}, {}]) error @rank1_reference".format(avg.min(), avg.max())
        )
    name = "rank1:{}".format(",".join(repr(c) for c in coefficients))
    return Graphon(np.outer(avg, avg), name=name)


def parse_reference(spec, m) -> Graphon:
    """builtin:const:<p> | builtin:rank1:<c0,c1,...> | path to a graphon matrix file.

    Built-in families are discretized at resolution m; a file keeps its own resolution.
    """
    if spec is None or len(str(spec)) == 0:
        raise ConfigError("missing reference specification error @parse_reference")
    spec = str(spec)
    if spec.startswith("builtin:"):
        body = spec[len("builtin:"):]
        family, _, params = body.partition(":")
        try:
            if family == "const":
                return constant_reference(m, float(params))
            if family == "rank1":
                return rank1_reference(m, [float(c) for c in params.split(",") if len(c.strip()) > 0])
        except ValueError:
            raise ConfigError("cannot parse parameters of '{}' error @parse_reference".format(spec))
        raise ConfigError("unknown builtin family '{}' error @parse_reference".format(family))
    if not os.path.exists(spec):
        raise ConfigError("graphon file not found: {} error @parse_reference".format(spec))
    h = Graphon.loadFromFile(spec)
    if h.m != m:
        logging.debug("graphon file {} has m={} (requested m={})".format(spec, h.m, m))
    return h

from __future__ import annotations
import math
import logging

import numpy as np

from .General import (
    ValidationError,
    ResolutionMismatchError,
    check_same_resolution,
    overlap_weights,
    grid_point_cells,
    lp_norm,
)


SYMMETRY_TOL = 1e-12
RANGE_TOL = 1e-12


class Graphon:
    """Symmetric step function on the uniform m x m grid with values in [0, 1].

    values[i, j] is the constant value on B(i, j, m) = [i/m, (i+1)/m) x [j/m, (j+1)/m)
    (0-based). The constructor checks symmetry and range within 1e-12, symmetrizes by
    averaging, clips rounding noise into [0, 1] and freezes the array.
    """

    def __init__(self, values, name=None):
        values = np.array(values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] < 1:
            raise ValidationError(
                "graphon values must be a nonempty square matrix, got shape {} error @Graphon".format(
                    values.shape
                )
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError("graphon values must be finite error @Graphon")
        asym = float(np.abs(values - values.T).max())
        if asym > SYMMETRY_TOL:
            raise ValidationError(
                "graphon values not symmetric (max deviation {}) error @Graphon".format(asym),
                deviation=asym,
            )
        values = (values + values.T) / 2.0
        if values.min() < -RANGE_TOL or values.max() > 1.0 + RANGE_TOL:
            raise ValidationError(
                "graphon values must lie in [0,1], got [{}, {}] error @Graphon".format(
                    values.min(), values.max()
                )
            )
        values = np.clip(values, 0.0, 1.0)
        values.setflags(write=False)
        self.values = values
        self.name = name

    @property
    def m(self) -> int:
        return self.values.shape[0]

    def getValues(self):
        return self.values

    def getName(self):
        return self.name if self.name is not None else "graphon(m={})".format(self.m)

    @classmethod
    def constant(cls, m, p, name=None):
        return cls(np.full((m, m), float(p)), name=name)

    @classmethod
    def loadFromText(cls, text, name=None):
        lines = [l.strip() for l in text.splitlines() if len(l.strip()) > 0]
        if len(lines) == 0:
            raise ValidationError("empty graphon file error @Graphon.loadFromText")
        try:
            m = int(lines[0])
        except ValueError:
            raise ValidationError("first line must be the grid size m error @Graphon.loadFromText")
        if m < 1 or len(lines) != m + 1:
            raise ValidationError(
                "expected {} value rows after m={}, got {} error @Graphon.loadFromText".format(
                    m, m, len(lines) - 1
                )
            )
        try:
            rows = [[float(v) for v in l.split()] for l in lines[1:]]
        except ValueError as e:
            raise ValidationError("bad value in graphon file: {} error @Graphon.loadFromText".format(e))
        if any(len(row) != m for row in rows):
            raise ValidationError("every row must hold m={} values error @Graphon.loadFromText".format(m))
        return cls(rows, name=name)

    @classmethod
    def loadFromFile(cls, filePath):
        with open(filePath, "r", encoding="utf-8") as f:
            return cls.loadFromText(f.read(), name=filePath)

    def toText(self) -> str:
        lines = [str(self.m)]
        for row in self.values:
            lines.append(" ".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"

    def writeToFile(self, filePath):
        with open(filePath, "w", encoding="utf-8") as f:
            f.write(self.toText())

    def __repr__(self) -> str:
        return "Graphon({},m={})".format(self.getName(), self.m)


class GridPermutation:
    """Bijection on the m grid blocks, 0-based: block i is sent to block perm[i]."""

    def __init__(self, perm):
        perm = np.array(perm, dtype=int)
        m = perm.shape[0] if perm.ndim == 1 else 0
        if m < 1 or not np.array_equal(np.sort(perm), np.arange(m)):
            raise ValidationError("perm must be a bijection on 0..m-1, got {} error @GridPermutation".format(perm))
        perm.setflags(write=False)
        self.perm = perm

    @property
    def m(self) -> int:
        return self.perm.shape[0]

    @classmethod
    def identity(cls, m):
        return cls(np.arange(m))

    @classmethod
    def fromOneBased(cls, perm):
        return cls(np.asarray(perm, dtype=int) - 1)

    def inverse(self):
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.m)
        return GridPermutation(inv)

    def compose(self, other):
        # (self o other)(i) = self(other(i))
        if other.m != self.m:
            raise ResolutionMismatchError("permutation sizes differ error @GridPermutation.compose")
        return GridPermutation(self.perm[other.perm])

    def __repr__(self) -> str:
        return "GridPermutation({})".format(list(self.perm + 1))


def empirical_graphon(g) -> Graphon:
    return Graphon(g.adjacency.astype(float), name="empirical(n={})".format(g.n))


def level_k_approximant(h: Graphon, k: int) -> Graphon:
    """Block graphon of the exact averages of h over the cells of the k-grid."""
    if k < 1:
        raise ValidationError("k must be a positive integer error @level_k_approximant")
    if k == h.m:
        return h
    W = overlap_weights(k, h.m)
    return Graphon(W @ h.values @ W.T, name="level{}({})".format(k, h.getName()))


def refine(h: Graphon, n: int) -> Graphon:
    if n < 1 or n % h.m != 0:
        raise ResolutionMismatchError(
            "cannot refine m={} to n={}: n must be a multiple of m error @refine".format(h.m, n)
        )
    f = n // h.m
    if f == 1:
        return h
    return Graphon(h.values.repeat(f, axis=0).repeat(f, axis=1), name=h.name)


def common_refinement(h1: Graphon, h2: Graphon):
    L = h1.m * h2.m // math.gcd(h1.m, h2.m)
    if L != h1.m or L != h2.m:
        logging.debug("refining m={} and m={} to common resolution {}".format(h1.m, h2.m, L))
    return refine(h1, L), refine(h2, L)


def sample_grid(h: Graphon, n: int) -> Graphon:
    """Values of h at the grid points (u/n, v/n), u, v = 0..n-1, as an n x n graphon.

    These are the edge probabilities of the n-vertex random graph drawn from h; when m
    divides n this equals refine(h, n).
    """
    if n < 1:
        raise ValidationError("n must be positive error @sample_grid")
    idx = grid_point_cells(n, h.m)
    return Graphon(h.values[np.ix_(idx, idx)], name=h.name)


def apply_permutation(h: Graphon, phi: GridPermutation) -> Graphon:
    if phi.m != h.m:
        raise ResolutionMismatchError(
            "permutation size {} does not match graphon resolution {} error @apply_permutation".format(
                phi.m, h.m
            )
        )
    p = phi.perm
    return Graphon(h.values[np.ix_(p, p)], name=h.name)


def l1_distance(h1: Graphon, h2: Graphon) -> float:
    check_same_resolution(h1, h2, "l1_distance")
    return lp_norm(h1.values - h2.values, 1)


def l2_distance(h1: Graphon, h2: Graphon) -> float:
    check_same_resolution(h1, h2, "l2_distance")
    return lp_norm(h1.values - h2.values, 2)

import logging

import numpy as np

from .General import ValidationError, ResolutionMismatchError


class Graph:
    """Simple undirected graph on vertices 0..n-1 (1-based in the text format)."""

    def __init__(self, adjacency):
        A = np.array(adjacency, dtype=bool)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
            raise ValidationError("adjacency must be a nonempty square matrix error @Graph")
        if np.any(np.diag(A)):
            raise ValidationError("graph has self-loops error @Graph")
        if not np.array_equal(A, A.T):
            raise ValidationError("adjacency not symmetric error @Graph")
        A.setflags(write=False)
        self.adjacency = A

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @classmethod
    def fromEdges(cls, n, edges):
        A = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError("edge ({},{}) out of range for n={} error @Graph.fromEdges".format(u, v, n))
            if u == v:
                raise ValidationError("self-loop at vertex {} error @Graph.fromEdges".format(u))
            A[u, v] = A[v, u] = True
        return cls(A)

    @classmethod
    def complete(cls, n):
        return cls(~np.eye(n, dtype=bool))

    @classmethod
    def empty(cls, n):
        return cls(np.zeros((n, n), dtype=bool))

    @classmethod
    def path(cls, n):
        return cls.fromEdges(n, [(i, i + 1) for i in range(n - 1)])

    def edges(self) -> list:
        iu, ju = np.nonzero(np.triu(self.adjacency, k=1))
        return list(zip(iu.tolist(), ju.tolist()))

    def getEdgeCount(self) -> int:
        return int(np.triu(self.adjacency, k=1).sum())

    def relabel(self, phi):
        # new vertex i plays the role of old vertex phi(i); the empirical graphon
        # transforms exactly like apply_permutation
        if phi.m != self.n:
            raise ResolutionMismatchError("permutation size {} vs n={} error @Graph.relabel".format(phi.m, self.n))
        p = phi.perm
        return Graph(self.adjacency[np.ix_(p, p)])

    @classmethod
    def loadFromText(cls, text):
        lines = [l.strip() for l in text.splitlines() if len(l.strip()) > 0]
        if len(lines) == 0:
            raise ValidationError("empty graph file error @Graph.loadFromText")
        try:
            n = int(lines[0])
            edges = []
            for l in lines[1:]:
                u, v = l.split()
                edges.append((int(u) - 1, int(v) - 1))
        except ValueError:
            raise ValidationError("graph file lines must be 'u v' integer pairs error @Graph.loadFromText")
        if n < 1:
            raise ValidationError("graph needs n >= 1 error @Graph.loadFromText")
        return cls.fromEdges(n, edges)

    @classmethod
    def loadFromFile(cls, filePath):
        with open(filePath, "r", encoding="utf-8") as f:
            return cls.loadFromText(f.read())

    def toText(self) -> str:
        lines = [str(self.n)]
        for u, v in self.edges():
            lines.append("{} {}".format(u + 1, v + 1))
        return "\n".join(lines) + "\n"

    def writeToFile(self, filePath):
        logging.debug("writing graph n={} edges={} to {}".format(self.n, self.getEdgeCount(), filePath))
        with open(filePath, "w", encoding="utf-8") as f:
            f.write(self.toText())

    def __repr__(self) -> str:
        return "Graph(n={},edges={})".format(self.n, self.getEdgeCount())

"""Shared fixture graphs and frozen golden values for the test suite."""

import os
import warnings

import numpy as np

from bimodal import (
    Edge,
    LabeledGraph,
    adjacency_pair,
    power,
    validate_graph,
)
from bimodal.construct import rll_graph
from bimodal.io import parse_graph_file

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def load(name):
    with open(os.path.join(FIXTURES, name)) as fh:
        return parse_graph_file(fh.read())


def two_state():
    """Two-state graph, strict split {a,b} / {c,d}."""
    return load("twostate.cg")


def two_state_alt():
    """Same graph, alternative split {a} / {b,c,d}."""
    return validate_graph(
        ["alpha", "beta"],
        [("alpha", "a", "alpha"), ("alpha", "b", "beta"),
         ("alpha", "c", "beta"), ("beta", "d", "alpha")],
        ["a"], ["b", "c", "d"])


def quad():
    """Out-degree (2,2) encoder shape on two states."""
    return load("quad.cg")


def mixed():
    return load("mixed.cg")


def trisplit():
    return load("trisplit.cg")


def hexchain():
    return load("hexchain.cg")


def rll_16():
    """16th power of the (2,10) run-length limited graph."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return power(rll_graph(2, 10), 16)


# 11x11 per-class adjacency matrices of the 16-bit run-length graph,
# frozen as goldens (independently recomputed by rll_16 in the tests)
RLL16_A0 = np.array([
    [42, 28, 19, 12,  8,  6,  5,  4,  3,  2,  1],
    [62, 42, 28, 19, 12,  8,  6,  5,  4,  3,  2],
    [90, 62, 42, 28, 19, 12,  8,  6,  5,  4,  3],
    [89, 61, 41, 27, 18, 12,  8,  6,  5,  4,  3],
    [88, 60, 40, 26, 17, 11,  8,  6,  5,  4,  3],
    [86, 59, 39, 25, 16, 10,  7,  6,  5,  4,  3],
    [82, 57, 38, 24, 15,  9,  6,  5,  5,  4,  3],
    [75, 53, 36, 23, 14,  8,  5,  4,  4,  4,  3],
    [65, 46, 32, 21, 13,  7,  4,  3,  3,  3,  3],
    [50, 36, 25, 17, 11,  6,  3,  2,  2,  2,  2],
    [29, 21, 15, 10,  7,  4,  2,  1,  1,  1,  1],
], dtype=np.int64)

RLL16_A1 = np.array([
    [41, 29, 21, 15, 10,  7,  4,  2,  1,  1,  1],
    [60, 41, 29, 21, 15, 10,  7,  4,  2,  1,  1],
    [87, 60, 41, 29, 21, 15, 10,  7,  4,  2,  1],
    [85, 59, 41, 29, 21, 15, 10,  6,  4,  2,  1],
    [82, 57, 40, 29, 21, 15, 10,  6,  3,  2,  1],
    [78, 54, 38, 28, 21, 15, 10,  6,  3,  1,  1],
    [73, 50, 35, 26, 20, 15, 10,  6,  3,  1,  0],
    [67, 45, 31, 23, 18, 14, 10,  6,  3,  1,  0],
    [59, 39, 26, 19, 15, 12,  9,  6,  3,  1,  0],
    [47, 31, 20, 14, 11,  9,  7,  5,  3,  1,  0],
    [28, 19, 12,  8,  6,  5,  4,  3,  2,  1,  0],
], dtype=np.int64)

RLL16_X = (1, 1, 2, 2, 2, 2, 1, 1, 1, 1, 0)

MERGED_A0 = np.array([
    [42, 28, 45, 14],
    [62, 42, 67, 18],
    [86, 59, 90, 22],
    [50, 36, 59, 9],
], dtype=np.int64)

MERGED_A1 = np.array([
    [41, 29, 53, 8],
    [60, 41, 75, 14],
    [78, 54, 102, 20],
    [47, 31, 54, 16],
], dtype=np.int64)

MERGED_X = (1, 1, 2, 1)

HEX_X = (1, 2, 3, 3)


def _hex_split(edges):
    g = hexchain()
    states = ["qa@0", "qb@0", "qb@1",
              "qc@0", "qc@1", "qc@2", "qd@0", "qd@1", "qd@2"]
    return LabeledGraph(states, [Edge(*e) for e in edges], g.parity)


def hex_split_0():
    """Class-0 split graph of the hex fixture, out-degree 2, unit weights."""
    return _hex_split([
        ("qa@0", "0", "qb@0"), ("qa@0", "0", "qb@1"),
        ("qb@0", "2", "qa@0"), ("qb@0", "4", "qc@0"),
        ("qb@1", "4", "qc@1"), ("qb@1", "4", "qc@2"),
        ("qc@0", "6", "qd@0"), ("qc@0", "8", "qd@0"),
        ("qc@1", "6", "qd@1"), ("qc@1", "6", "qd@2"),
        ("qc@2", "8", "qd@1"), ("qc@2", "8", "qd@2"),
        ("qd@0", "c", "qb@0"), ("qd@0", "c", "qb@1"),
        ("qd@1", "a", "qd@1"), ("qd@1", "a", "qd@2"),
        ("qd@2", "a", "qd@0"), ("qd@2", "e", "qa@0"),
    ])


def hex_split_1():
    """Class-1 split graph of the hex fixture (roles of qc, qd swapped)."""
    return _hex_split([
        ("qa@0", "1", "qb@0"), ("qa@0", "1", "qb@1"),
        ("qb@0", "3", "qa@0"), ("qb@0", "5", "qd@0"),
        ("qb@1", "5", "qd@1"), ("qb@1", "5", "qd@2"),
        ("qd@0", "7", "qc@0"), ("qd@0", "9", "qc@0"),
        ("qd@1", "7", "qc@1"), ("qd@1", "7", "qc@2"),
        ("qd@2", "9", "qc@1"), ("qd@2", "9", "qc@2"),
        ("qc@0", "d", "qb@0"), ("qc@0", "d", "qb@1"),
        ("qc@1", "b", "qc@1"), ("qc@1", "b", "qc@2"),
        ("qc@2", "b", "qc@0"), ("qc@2", "f", "qa@0"),
    ])


def random_graph(rng, max_states=4, strict=True, max_out=3):
    """Small random labeled graph with every state having an out-edge."""
    n = rng.integers(1, max_states + 1)
    states = ["n%d" % i for i in range(n)]
    syms = list("abcdef")
    k0 = rng.integers(1, 4)
    k1 = rng.integers(1, 3)
    p0 = syms[:k0]
    p1 = syms[k0:k0 + k1] if strict else syms[k0 - 1:k0 + k1]
    alphabet = sorted(set(p0) | set(p1))
    edges = set()
    for s in states:
        for _ in range(rng.integers(1, max_out + 1)):
            edges.add((s, alphabet[rng.integers(len(alphabet))],
                       states[rng.integers(n)]))
    return validate_graph(states, sorted(edges), p0, p1)


def random_matrix(rng, max_n=4, max_entry=3):
    n = rng.integers(1, max_n + 1)
    return rng.integers(0, max_entry + 1, size=(n, n)).astype(np.int64)

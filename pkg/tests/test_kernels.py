import numpy as np
import pytest

from echochamber import kernels
from echochamber.bipartite import BipartiteGraph, project
from echochamber.community import label_propagation, multilevel

from conftest import random_graph

IMPLS = kernels.implementations()
needs_ext = pytest.mark.skipif("cython" not in IMPLS, reason="compiled extension not built")


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")
    assert "python" in IMPLS


def _hub_csr(rng, n, hubs):
    m = rng.random((n, hubs)) < 0.3
    indptr = np.zeros(hubs + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(m.sum(axis=0))
    indices = np.concatenate([np.nonzero(m[:, h])[0] for h in range(hubs)]).astype(np.int64)
    return m, indptr, indices


@needs_ext
def test_cooccurrence_backends_agree(rng):
    for n, hubs in [(1, 3), (10, 40), (60, 200)]:
        _, indptr, indices = _hub_csr(rng, n, hubs)
        a = IMPLS["python"].cooccurrence(indptr, indices, n)
        b = IMPLS["cython"].cooccurrence(indptr, indices, n)
        for x, y in zip(a, b):
            assert np.array_equal(np.asarray(x), np.asarray(y))


def test_cooccurrence_matches_dense(rng):
    m, indptr, indices = _hub_csr(rng, 12, 30)
    for impl in IMPLS.values():
        rows, cols, counts = impl.cooccurrence(indptr, indices, 12)
        dense = np.zeros((12, 12))
        dense[rows, cols] = counts
        ref = np.triu(m.astype(int) @ m.T.astype(int), 1)
        assert np.array_equal(dense, ref)


def _run_with(impl, fn, *args):
    saved = {k: getattr(kernels, k) for k in ("cooccurrence", "louvain_local_moves", "label_propagation_sweep",
                                              "label_propagation_stable")}
    try:
        for k in saved:
            setattr(kernels, k, getattr(impl, k))
        return fn(*args)
    finally:
        for k, v in saved.items():
            setattr(kernels, k, v)


@needs_ext
@pytest.mark.parametrize("fn", [multilevel, label_propagation])
def test_community_kernels_agree(fn, rng):
    for seed in range(5):
        g = random_graph(rng, 40, 0.1)
        a = _run_with(IMPLS["python"], fn, g, seed)
        b = _run_with(IMPLS["cython"], fn, g, seed)
        assert np.array_equal(a.labels, b.labels) and a.modularity == b.modularity


@needs_ext
def test_projection_backends_agree(rng):
    b = BipartiteGraph.from_incidence(rng.random((30, 300)) < 0.2)
    assert _run_with(IMPLS["python"], project, b) == _run_with(IMPLS["cython"], project, b)


def test_pure_python_selected_by_environment():
    import os
    import subprocess
    import sys
    env = dict(os.environ, ECHOCHAMBER_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from echochamber import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"

import math

import numpy as np
import pytest

from fractv.graph import Graph, build_knn_graph


def haversine_km(p, q):
    """Great-circle distance written independently of the package kernels."""
    lat1, lon1 = map(math.radians, p)
    lat2, lon2 = map(math.radians, q)
    h = math.sin((lat2 - lat1) / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
    return 2 * 6371.0 * math.asin(math.sqrt(min(1.0, h)))


def random_coords(rng, n):
    return np.column_stack([rng.uniform(0, 30, n), rng.uniform(110, 170, n)])


def random_graph(rng, n, k=5):
    return build_knn_graph(random_coords(rng, n), min(k, n - 1))


def path_graph(n):
    A = np.zeros((n, n))
    for i in range(n - 1):
        A[i, i + 1] = A[i + 1, i] = 1.0
    return Graph(A)


def cycle_graph(n):
    A = np.zeros((n, n))
    for i in range(n):
        A[i, (i + 1) % n] = A[(i + 1) % n, i] = 1.0
    return Graph(A)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])

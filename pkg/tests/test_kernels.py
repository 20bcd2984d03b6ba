import os
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

from mufpairs import _pykernels, kernels
from mufpairs.search import SearchConfig, multistart_search

needs_ext = pytest.mark.skipif("cython" not in kernels.BACKENDS, reason="extension not built")


@needs_ext
class TestAgreement:
    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_general(self, rng, d):
        c = kernels.get_backend("cython")
        for t in (0.0, 0.1, -1 / (d * d - 1)):
            x = rng.standard_normal(4 * d**3)
            lp, gp = _pykernels.general_loss_grad(x, d, t)
            lc, gc = c.general_loss_grad(x, d, t)
            assert lc == pytest.approx(lp, rel=1e-12, abs=1e-15)
            assert_allclose(gc, gp, rtol=1e-10, atol=1e-13)

    @pytest.mark.parametrize("d", [2, 3, 4, 5, 7])
    def test_covariant(self, rng, d):
        c = kernels.get_backend("cython")
        x = rng.standard_normal(4 * d)
        lp, gp = _pykernels.covariant_loss_grad(x, d, 0.1)
        lc, gc = c.covariant_loss_grad(x, d, 0.1)
        assert lc == pytest.approx(lp, rel=1e-12)
        assert_allclose(gc, gp, rtol=1e-10, atol=1e-13)

    def test_search_same_outcome(self):
        cfg = SearchConfig(2, 0.2, restarts=3, master_seed=4)
        prev = kernels.set_backend("python")
        try:
            a = multistart_search(cfg, workers=1)
        finally:
            kernels.set_backend(prev)
        b = multistart_search(cfg, workers=1)
        assert a.found and b.found and a.restart_index == b.restart_index


class TestSelection:
    def test_unknown(self):
        with pytest.raises(ValueError):
            kernels.get_backend("fortran")

    def test_set_backend_roundtrip(self):
        prev = kernels.set_backend("python")
        assert kernels.BACKEND == "python"
        kernels.set_backend(prev)
        assert kernels.BACKEND == prev

    def test_env_fallback(self):
        env = dict(os.environ, MUF_PURE_PYTHON="1")
        out = subprocess.run([sys.executable, "-c", "from mufpairs import kernels; print(kernels.BACKEND)"],
                             env=env, capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "python"

    @needs_ext
    def test_default_is_compiled(self):
        env = {k: v for k, v in os.environ.items() if k != "MUF_PURE_PYTHON"}
        out = subprocess.run([sys.executable, "-c", "from mufpairs import kernels; print(kernels.BACKEND)"],
                             env=env, capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "cython"


@pytest.mark.parametrize("name", sorted(kernels.BACKENDS))
def test_zero_norm(name):
    impl = kernels.get_backend(name)
    with pytest.raises(ZeroDivisionError):
        impl.general_loss_grad(np.zeros(32), 2, 0.1)
    with pytest.raises(ZeroDivisionError):
        impl.covariant_loss_grad(np.zeros(8), 2, 0.1)

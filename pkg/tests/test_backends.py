"""The compiled kernels and the pure-Python fallback agree."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from edgeheat import _backend, _pykernels

ck = pytest.importorskip("edgeheat._ckernels")

orders = st.floats(0.0, 0.99)
args = st.floats(1e-4, 200.0)


def _close(a, b, rel=1e-12, abs_=1e-300):
    a, b = np.asarray(a, float), np.asarray(b, float)
    assert np.all(np.abs(a - b) <= rel * np.maximum(np.abs(a), np.abs(b)) + abs_)


@given(orders, args)
def test_i_and_k(nu, x):
    _close(ck.bessel_i_scaled(nu, x), _pykernels.bessel_i_scaled(nu, x))
    _close(ck.bessel_k_scaled(nu, x), _pykernels.bessel_k_scaled(nu, x))


@given(orders, args)
def test_jy(nu, x):
    _close(ck.bessel_jy(nu, x), _pykernels.bessel_jy(nu, x), rel=1e-11, abs_=1e-15)


@given(st.floats(-0.99, 0.99), args)
def test_j_any(v, x):
    _close(ck.bessel_j_any(v, x), _pykernels.bessel_j_any(v, x), rel=1e-11, abs_=1e-15)


@given(st.floats(-0.99, 0.99), st.integers(1, 300))
def test_zeros(v, n):
    _close(ck.bessel_j_zero(v, n), _pykernels.bessel_j_zero(v, n), rel=1e-14)


def test_kernel_arrays():
    rng = np.random.default_rng(3)
    t, x, xt = rng.uniform(0.01, 5, (3, 500))
    _close(ck.friedrichs_kernel_array(0.3, t, x, xt), _pykernels.friedrichs_kernel_array(0.3, t, x, xt))
    xs = np.geomspace(0.01, 90, 300)
    _close(ck.bessel_j_array(-0.4, xs), _pykernels.bessel_j_array(-0.4, xs), rel=1e-11, abs_=1e-15)


def test_default_backend_is_compiled():
    assert _backend.BACKEND == "cython"


def test_env_var_forces_fallback():
    env = dict(os.environ, EDGEHEAT_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c",
                          "from edgeheat._backend import BACKEND; from edgeheat.specfun import bessel_j;"
                          "print(BACKEND, repr(bessel_j(0.5, 1.0)))"],
                         env=env, capture_output=True, text=True, check=True)
    backend, value = out.stdout.split()
    assert backend == "python"
    assert float(value) == pytest.approx(float(np.sqrt(2 / np.pi) * np.sin(1.0)), rel=1e-13)

import numpy as np
import pytest

from rbte.kernels import _fallback

try:
    from rbte.kernels import _native
except ImportError:
    _native = None


@pytest.fixture(params=["native", "fallback"])
def kernel_backend(request):
    """Run a test against both kernel backends."""
    if request.param == "native":
        if _native is None:
            pytest.skip("compiled kernels not available")
        return _native
    return _fallback


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)

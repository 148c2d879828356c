import math

import numpy as np
import pytest

from isiecc import ChannelParams, slot_probs


@pytest.fixture(scope="session")
def params_03():
    return ChannelParams(D=79.4, r=5.0, r0=10.0, ts=0.3, L=40, M=300, sigma_n2=0.0)


@pytest.fixture(scope="session")
def profile_03(params_03):
    return slot_probs(params_03)


def enumerate_weight_class(m: int, i: int) -> np.ndarray:
    """Independent oracle: filter all m-bit values by weight, sort decreasing."""
    vals = sorted((v for v in range(1 << m) if bin(v).count("1") == i), reverse=True)
    return np.array(
        [[(v >> (m - 1 - j)) & 1 for j in range(m)] for v in vals], dtype=np.uint8
    )


def isi_brute(word, i: int, p) -> float:
    """Independent oracle: direct summation of c_l * p_{i-l+1}."""
    return math.fsum(float(word[l - 1]) * float(p[i - l]) for l in range(1, i))

import os

import numpy as np
import pytest

from impulsivenoise.waveform import ArCoefficients, EnvelopeParams, ImpulseConfig
from impulsivenoise.field import FieldConfig

# Short impulses: the envelope peaks near t = 11 and has decayed long before 512 samples.
SHORT_ENVELOPE = dict(theta0=1.0, mu_t=3.0, sigma_t=0.75)
SHORT_LENGTH = 512

SMALL_CONFIG = """\
seed: 7
field:
  lambda-r: 5.0
  lambda-t: 40.0
  mean-energy: 10.0
  gamma-ratio: 0.1
  trace-length: 65536
  unit-length: 65536
impulse:
  phi1: 1.2
  phi2: -0.3
  theta0: 1.0
  mu-t: 3.0
  sigma-t: 0.75
  length: 512
analysis:
  bins: 100
  segment: 1024
"""


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def low_pass():
    return ArCoefficients(1.2, -0.3)


@pytest.fixture
def resonant():
    return ArCoefficients(1.0, -0.5)


@pytest.fixture
def short_impulse(low_pass):
    return ImpulseConfig(ar=low_pass, envelope=EnvelopeParams(**SHORT_ENVELOPE), length=SHORT_LENGTH)


@pytest.fixture
def small_field(short_impulse):
    # 200 impulses expected over 65536 samples
    return FieldConfig(lambda_r=5.0, lambda_t=40.0, mean_energy=10.0, gamma_ratio=0.1, trace_length=65536, impulse=short_impulse, seed=7, unit_length=65536)


@pytest.fixture
def small_config(tmp_path):
    filename = os.path.join(tmp_path, "small.yaml")
    with open(filename, "w") as fp:
        fp.write(SMALL_CONFIG)
    return filename


@pytest.fixture
def write_file(tmp_path):
    def _write(name: str, content: str) -> str:
        filename = os.path.join(tmp_path, name)
        with open(filename, "w") as fp:
            fp.write(content)
        return filename

    return _write

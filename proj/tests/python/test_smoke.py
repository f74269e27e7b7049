"""Smoke tests for the _thinfilm extension module (and the CLI binary)."""

import json
import math
import os
import subprocess

import pytest

import _thinfilm as tf

N = 64


def test_derivative_of_sin_is_cos():
    theta = tf.nodes(N)
    d = tf.derivative([math.sin(t) for t in theta], 1)
    assert max(abs(d[j] - math.cos(theta[j])) for j in range(N)) < 1e-12


def test_integrate_and_mass():
    theta = tf.nodes(N)
    h = [2.0 + math.cos(3 * t) for t in theta]
    assert tf.integrate(h) == pytest.approx(4.0 * math.pi, abs=1e-12)
    assert tf.mass(h) == pytest.approx(4.0 * math.pi, abs=1e-12)


def test_fourier_coefficient():
    theta = tf.nodes(N)
    c = tf.fourier_coefficient([math.sin(t) for t in theta], 1)
    assert abs(c - (-0.5j)) < 1e-14


def test_steady_state_is_equilibrium():
    h = tf.steady_state(N, 1.0, 0.1, 0.0)
    r = tf.rhs(h, 2.0, 1e-3)
    assert max(abs(x) for x in r) < 1e-12
    assert tf.energy_E(h) == pytest.approx(0.0, abs=1e-12)
    assert tf.dissipation_J(h, 2.0, 1e-3) == 0.0


def test_energy_forms_agree():
    theta = tf.nodes(N)
    h = [1.0 + 0.1 * math.cos(2 * t) for t in theta]
    E, e = tf.energy_E(h), tf.energy_e(h)
    assert E == pytest.approx(e + math.pi, rel=1e-12)
    assert E == pytest.approx(1.5 * math.pi * 0.01, rel=1e-10)


def test_beta_table():
    t = tf.beta_table(2.0, 10)
    assert t["steps_to_fixed_point"] == 2
    assert t["betas"][1] == pytest.approx(10.0 / 9.0, abs=1e-15)
    assert t["fixed_point"] == pytest.approx(4.0 / 3.0, abs=1e-15)
    assert t["linear_limit"] == pytest.approx(10.0 / 3.0, abs=1e-14)
    with pytest.raises(ValueError):
        tf.beta_table(1.0, 10)


def test_run_config_conserves_mass():
    rep = tf.run_config(
        """
        n_points = 32
        alpha = 2.0
        sigma = 1e-3
        epsilon = 0.05
        t_end = 2.0
        output_interval = 0.25
        init.modes = 2:cos:1.0
        """
    )
    assert rep["status"] == "completed"
    assert len(rep["t"]) == 9
    m0 = rep["mass"][0]
    assert m0 == pytest.approx(2.0 * math.pi, rel=1e-12)
    assert max(abs(m - m0) for m in rep["mass"]) < 1e-12 * m0
    assert rep["E"][-1] <= rep["E"][0]
    assert min(rep["h_min"]) > 0.0


def test_rejects_bad_config():
    with pytest.raises(ValueError):
        tf.run_config("alpha = 0.5\nt_end = 1.0")


def test_cli_beta_table():
    cli = os.environ.get("THINFILM_CLI")
    if not cli:
        pytest.skip("THINFILM_CLI not set")
    out = subprocess.run(
        [cli, "beta-table", "--alpha", "2", "--json"],
        check=True,
        capture_output=True,
        text=True,
    )
    table = json.loads(out.stdout)
    assert table["steps_to_fixed_point"] == 2

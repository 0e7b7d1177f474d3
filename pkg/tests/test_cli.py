#!/usr/bin/env python3
"""
Command line: configuration files, overrides, state bundles, exit codes and
the CSV artifacts of each command.
"""

import io
from dataclasses import replace
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from rich.console import Console

from cli import Command, RunConfig, load_run_config, main, parse_run_config
from cli.artifacts import load_state_bundle, save_state_bundle
from cli.battery import state_checks
from cli.reproduce import coverage_check, run_claims, summary_frame
from core.exceptions import ConfigFileError, ConfigurationError, ConsistencyError
from core.models import MotionMode
from core.potentials import PotentialKind


def quiet() -> Console:
    return Console(file=io.StringIO(), width=200)


def write_config(path: Path, text: str) -> Path:
    path.write_text(text.strip() + "\n", encoding="utf-8")
    return path


class TestConfigFile:
    def test_defaults(self):
        config = RunConfig()
        assert config.potential.kind is PotentialKind.BOX
        assert config.run.command is None
        assert config.central.state == (2, 1, 1)

    def test_sections_and_values(self):
        config = parse_run_config(
            "[run]\ncommand = solve-central\nseed = 4\n"
            "[potential]\nkind = coulomb\nz = 2  # nuclear charge\n"
            "[central]\nn_max = 3\nstate = 3, 2, 1\nmode = circulating\n"
        )
        assert config.run.command is Command.SOLVE_CENTRAL
        assert config.run.seed == 4
        assert config.potential.is_central
        assert config.potential.z == 2.0
        assert config.central.state == (3, 2, 1)
        assert config.central.mode is MotionMode.CIRCULATING

    @pytest.mark.parametrize("text, line", [
        ("[grid]\nn_points = 2001\nn_polar = 2\n", 3),
        ("[grid]\n\nbogus = 1\n", 3),
        ("[units]\nhbar = 1\n[shooting]\ne_lo = 1\n", 3),
        ("[potential]\nkind = tabulated\n", 1),
        ("[central]\nn_max = 2\nstate = 3, 0, 0\n", 1),
        ("kind = box\n", 1),
    ])
    def test_errors_carry_the_line(self, text, line):
        with pytest.raises(ConfigFileError) as info:
            parse_run_config(text, "run.ini")
        assert info.value.line == line
        assert info.value.message.startswith(f"run.ini:{line}:")
        assert info.value.exit_code == 1

    def test_unknown_section(self):
        with pytest.raises(ConfigFileError) as info:
            parse_run_config("[run]\nseed = 1\n[output]\ndir = x\n")
        assert info.value.line == 3

    def test_overrides(self, tmp_path):
        config = RunConfig().with_overrides(hbar=2.0, tol=1e-8, seed=3, classical=True, out=tmp_path)
        assert config.units.build().hbar == 2.0
        assert config.shooting.build().bisection_tol == 1e-8
        assert config.run.seed == 3 and config.run.classical
        assert config.run.out == tmp_path
        with pytest.raises(ConfigurationError):
            RunConfig().with_overrides(mass=-1.0)

    @pytest.mark.parametrize("name", ["box.ini", "harmonic.ini", "hydrogen.ini"])
    def test_shipped_configs_parse(self, name):
        config = load_run_config(Path(__file__).resolve().parent.parent / "config" / name)
        assert config.run.command is not None

    @pytest.mark.parametrize("text, r_max, n_radial", [
        ("[potential]\nkind = coulomb\n[central]\nn_max = 3\n", 360.0, 36000),
        ("[potential]\nkind = coulomb\nz = 2\n[central]\nn_max = 3\n", 180.0, 36000),
        ("[potential]\nkind = coulomb\n[central]\nn_max = 2\n", 160.0, 16000),
        ("[potential]\nkind = coulomb\n[grid]\nr_max = 50\nn_radial = 500\n", 50.0, 500),
        ("[potential]\nkind = harmonic3d\n[central]\nn_max = 4\n", 24.0, 2400),
    ])
    def test_radial_lattice_follows_the_potential(self, text, r_max, n_radial):
        config = parse_run_config(text)
        grid = config.grid.radial_grid(config.potential.build_central(), config.central.n_max, config.units.build())
        assert grid.r_max == pytest.approx(r_max)
        assert grid.n_points == n_radial

    def test_central_potential_is_not_one_dimensional(self):
        spec = parse_run_config("[potential]\nkind = coulomb\n").potential
        with pytest.raises(ConfigurationError):
            spec.build_1d()

    def test_tabulated_potential_from_csv(self, tmp_path):
        x = np.linspace(-5.0, 5.0, 101)
        pd.DataFrame({"x": x, "V": 0.5 * x ** 2}).to_csv(tmp_path / "v.csv", index=False)
        spec = parse_run_config(f"[potential]\nkind = tabulated\ntable = {tmp_path / 'v.csv'}\n").potential
        assert spec.build_1d().value(1.0) == pytest.approx(0.5, abs=1e-6)


class TestStateBundle:
    def test_round_trip_is_exact(self, hydrogen_211, tmp_path):
        save_state_bundle(hydrogen_211, tmp_path / "state", {"kind": "coulomb", "z": 1.0})
        state, potential = load_state_bundle(tmp_path / "state")
        assert np.array_equal(state.R_r, hydrogen_211.R_r)
        assert np.array_equal(state.R_theta, hydrogen_211.R_theta)
        assert state.energy == hydrogen_211.energy
        assert (state.n, state.l, state.m) == (2, 1, 1)
        assert state.parity is hydrogen_211.parity
        assert potential == {"kind": "coulomb", "z": "1.0"}

    def test_bundle_carries_the_quantum_potential(self, hydrogen_211, coulomb, tmp_path):
        directory = save_state_bundle(hydrogen_211, tmp_path / "state", central=coulomb)
        radial = pd.read_csv(directory / "radial.csv")
        assert list(radial.columns) == ["r [length]", "R_r [length^-3/2]", "Q_r [energy]", "V [energy]",
                                        "Q_r+V_eff-E [energy]"]
        polar = pd.read_csv(directory / "polar.csv")
        assert list(polar.columns) == ["theta [rad]", "R_theta [1]", "Q_theta [energy length^2]"]
        constants = pd.read_csv(directory / "constants.csv")
        assert "Q_phi" in set(constants["quantity"])
        r = radial["r [length]"].to_numpy()
        inner = (r > 0.5) & (r < 30.0)
        residual = radial["Q_r+V_eff-E [energy]"].to_numpy()[inner]
        assert np.nanmax(np.abs(residual)) < 1e-3
        state, _ = load_state_bundle(directory)
        assert np.array_equal(state.R_r, hydrogen_211.R_r)

    def test_bundle_without_potential_has_no_v_column(self, hydrogen_211, tmp_path):
        directory = save_state_bundle(hydrogen_211, tmp_path / "state")
        assert "V [energy]" not in pd.read_csv(directory / "radial.csv").columns

    def test_non_uniform_lattice_is_rejected(self, hydrogen_211, tmp_path):
        directory = save_state_bundle(hydrogen_211, tmp_path / "state")
        polar = pd.read_csv(directory / "polar.csv")
        polar.iloc[10, 0] += 1e-3
        polar.to_csv(directory / "polar.csv", index=False)
        with pytest.raises(ConsistencyError):
            load_state_bundle(directory)

    def test_missing_bundle(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_state_bundle(tmp_path / "nowhere")


class TestExitCodes:
    def test_unknown_command(self):
        assert main(["bogus"], quiet()) == 1

    def test_no_command(self):
        assert main([], quiet()) == 1

    def test_missing_config_file(self, tmp_path):
        assert main(["solve1d", "--config", str(tmp_path / "missing.ini")], quiet()) == 1

    def test_state_flag_outside_verify(self, tmp_path):
        assert main(["solve1d", "--state", str(tmp_path)], quiet()) == 1

    def test_invalid_override(self, tmp_path):
        assert main(["solve1d", "--hbar", "-1", "--out", str(tmp_path)], quiet()) == 1

    def test_corrupt_bundle(self, hydrogen_211, tmp_path):
        directory = save_state_bundle(hydrogen_211, tmp_path / "state")
        (directory / "radial.csv").write_text("r [length]\n", encoding="utf-8")
        assert main(["verify", "--state", str(directory), "--out", str(tmp_path)], quiet()) != 0


class TestCommands:
    def test_solve1d_writes_spectrum_and_states(self, tmp_path):
        config = write_config(tmp_path / "box.ini", f"""
[run]
command = solve1d
out = {tmp_path / 'out'}
[grid]
n_points = 501
[shooting]
max_states = 3
""")
        console = quiet()
        assert main(["--config", str(config)], console) == 0
        spectrum = pd.read_csv(tmp_path / "out" / "spectrum.csv")
        assert list(spectrum.columns) == ["index [1]", "energy [energy]", "nodes [1]", "exact [energy]",
                                          "relative_error [1]"]
        assert len(spectrum) == 3
        assert spectrum["relative_error [1]"].max() < 1e-5
        assert list(spectrum["nodes [1]"]) == [0, 1, 2]
        states = pd.read_csv(tmp_path / "out" / "states.csv")
        assert list(states.columns[:5]) == ["x [length]", "V [energy]", "R_0 [length^-1/2]", "Q_0 [energy]",
                                           "Q+V-E_0 [energy]"]
        assert states.shape == (501, 11)
        for n, energy in enumerate(spectrum["energy [energy]"]):
            deviation = states[f"Q+V-E_{n} [energy]"].to_numpy()
            assert np.isnan(deviation[0]) and np.isnan(deviation[-1])
            assert np.nanmax(np.abs(deviation)) / energy < 1e-3, f"state {n}"
        assert np.allclose(states["Q_0 [energy]"].iloc[1:-1] + states["V [energy]"].iloc[1:-1],
                           spectrum["energy [energy]"][0], rtol=1e-4)
        assert "energy [energy]" in console.file.getvalue()

    @pytest.mark.parametrize("flags, at_rest", [([], True), (["--classical"], False)])
    def test_trajectory_of_a_harmonic_state(self, tmp_path, flags, at_rest):
        config = write_config(tmp_path / "harmonic.ini", """
[potential]
kind = harmonic
[grid]
n_points = 2001
[shooting]
max_states = 2
[trajectory]
state = 1
n_steps = 200
""")
        out = tmp_path / "out"
        assert main(["trajectory", "--config", str(config), "--out", str(out)] + flags, quiet()) == 0
        summary = pd.read_csv(out / "summary.csv")
        assert bool(summary["at_rest"][0]) is at_rest
        trajectory = pd.read_csv(out / "trajectory.csv")
        assert list(trajectory.columns) == ["t [time]", "x [length]", "p_x [momentum]", "H [energy]"]
        assert len(trajectory) == 201

    def test_verify_a_stored_bundle(self, hydrogen_211, tmp_path):
        directory = save_state_bundle(hydrogen_211, tmp_path / "state", {"kind": "coulomb", "z": 1.0})
        config = write_config(tmp_path / "verify.ini", "[trajectory]\nrest_points = 2\n")
        out = tmp_path / "report"
        assert main(["verify", "--config", str(config), "--state", str(directory), "--out", str(out)],
                    quiet()) == 0
        report = pd.read_csv(out / "report.csv")
        assert list(report.columns) == ["check", "value [1]", "tolerance [1]", "passed"]
        assert report["passed"].all()

    def test_battery_flags_a_mislabelled_energy(self, hydrogen_211, coulomb):
        checks = state_checks(hydrogen_211, coulomb, rest=False)
        assert all(c.passed for c in checks), [c.name for c in checks if not c.passed]
        mislabelled = replace(hydrogen_211, energy=-0.5)
        failed = [c.name for c in state_checks(mislabelled, coulomb, rest=False) if not c.passed]
        assert any(name.startswith("(2,1,1) H ratio") for name in failed)

    def test_reproduce_subset(self, tmp_path):
        config = RunConfig().with_overrides(out=tmp_path)
        results = run_claims(config, only=["box_spectrum", "energy_drift"])
        assert [r.key for r in results] == ["box_spectrum", "energy_drift"]
        assert all(r.passed for r in results), [r.failed for r in results]
        summary = summary_frame(results)
        assert list(summary["claim"]) == ["box_spectrum", "energy_drift"]

    def test_classical_orbit_claim(self, tmp_path):
        results = run_claims(RunConfig().with_overrides(out=tmp_path), only=["classical_orbits"])
        assert len(results) == 1
        assert results[0].passed, results[0].failed
        assert len(results[0].checks) == 7

    def test_missing_states_fail_the_coverage_check(self, circulating_spectrum):
        check = coverage_check(circulating_spectrum, "circulating spectrum", n_max=2)
        assert check.passed and check.value == 0
        states = {k: v for k, v in circulating_spectrum.states.items() if k[0] < 2}
        thinned = replace(circulating_spectrum, states=states)
        check = coverage_check(thinned, "circulating spectrum", n_max=2)
        assert not check.passed
        assert check.value == 3
        assert "(2,1,1)" in check.name

import math
import os

import pytest

from oneatom.core.objects import Ordering, SystemParams


def test_config_round_trip():
    from oneatom.experiments.config import ScenarioConfig

    config = ScenarioConfig(r=0.25, ratio=8.0, t_end=0.5, n_points=33, ordering="with", measures=("T", "wigner"))

    assert ScenarioConfig.from_ini(config.to_ini()) == config


def test_config_layering(tmp_path):
    from oneatom.experiments.config import ScenarioConfig

    first = tmp_path / "a.ini"
    first.write_text("[scenario]\nr = 1.0\nratio = 8\n")
    second = tmp_path / "b.ini"
    second.write_text("[scenario]\nratio = 200\noracle = on\n")

    config = ScenarioConfig.load([str(first), str(second)])

    assert config.r == 1.0
    assert config.ratio == 200.0
    assert config.oracle is True
    assert config.with_overrides(r=0.5, dim=None).r == 0.5


def test_config_errors_carry_line_and_field():
    from oneatom.core.errors import ConfigError
    from oneatom.experiments.config import ScenarioConfig

    with pytest.raises(ConfigError) as failure:
        ScenarioConfig.from_ini("[scenario]\nratio = 50\nr = abc\n")
    assert failure.value.field == "r"
    assert failure.value.line == 3
    assert str(failure.value).startswith("line 3, field 'r'")

    with pytest.raises(ConfigError) as failure:
        ScenarioConfig.from_ini("r = 0.5\n")
    assert failure.value.line == 1

    with pytest.raises(ConfigError) as failure:
        ScenarioConfig.from_ini("[scenario]\nspeed = 3\n")
    assert failure.value.field == "speed"


def test_config_validation():
    from oneatom.core.errors import ConfigError
    from oneatom.experiments.config import ScenarioConfig

    with pytest.raises(ConfigError) as failure:
        ScenarioConfig.from_ini("[scenario]\nt_start = 0.5\nt_end = 0.2\n")
    assert failure.value.field == "t_end"
    assert failure.value.line == 3

    for text in (
        "[scenario]\nn_points = 1\n",
        "[scenario]\nordering = sometimes\n",
        "[scenario]\nmeasures = T, X\n",
        "[scenario]\nunits = physical\ng = 1.0\n",
        "[scenario]\ndim = 1\n",
        "[scenario]\nratio = -2\n",
    ):
        with pytest.raises(ConfigError):
            ScenarioConfig.from_ini(text)


def test_physical_units():
    from oneatom.experiments.config import ScenarioConfig

    config = ScenarioConfig.from_ini("[scenario]\nunits = physical\ng = 10\nomega12 = 50\nomega23 = 5\n")
    params = config.params()

    assert params.delta == pytest.approx(1.0)
    assert params.r == pytest.approx(0.5)
    assert params.ratio == pytest.approx(50.0)


def test_dimensionless_flags_in_physical_units_are_reported(caplog):
    from oneatom.experiments.config import ScenarioConfig

    config = ScenarioConfig.from_ini("[scenario]\nunits = physical\ng = 10\nomega12 = 50\nomega23 = 5\n")
    updated = config.with_overrides(r=1.0, ratio=None)

    warnings = [record for record in caplog.records if record.levelname == "WARNING"]
    assert len(warnings) == 1
    assert "ignoring r" in warnings[0].getMessage()
    assert updated.params().r == pytest.approx(0.5)

    caplog.clear()
    config.with_overrides(g=12.0)
    ScenarioConfig().with_overrides(r=1.0, ratio=8.0)
    assert not [record for record in caplog.records if record.levelname == "WARNING"]


def test_default_time_grid():
    from oneatom.experiments.config import ScenarioConfig

    config = ScenarioConfig(t_start=0.4, t_end=0.6)

    assert config.points() == 400
    assert config.time_grid()[0] == 0.4 and config.time_grid()[-1] == pytest.approx(0.6)


def test_critical_report():
    from oneatom.experiments.runner import cmd_critical

    report = cmd_critical()

    assert report.r_c == pytest.approx(0.3162, abs=1e-4)
    assert report.n_odd == pytest.approx(1.0528, abs=1e-3)
    assert report.n_even == pytest.approx(0.15198, abs=1e-3)
    assert report.n_yurke_stoler == pytest.approx(0.4, abs=1e-3)
    assert report.disagreement <= 1e-6
    assert cmd_critical(0.2).r_c == pytest.approx(0.4472, abs=1e-4)


@pytest.mark.parametrize("r,expected", [(0.5, 0.7854), (0.25, 0.1963)])
def test_parity_offset(r, expected):
    from oneatom.experiments.offsets import measure_phase_offset

    report = measure_phase_offset(SystemParams.dimensionless(r, 50), "P")

    assert report.offset == pytest.approx(expected, abs=1e-3)
    assert report.error <= 1e-3
    for value in report.phases_mod_pi:
        assert min(value, math.pi - value) <= 1e-3


def test_yurke_stoler_offset():
    from oneatom.experiments.offsets import measure_phase_offset

    report = measure_phase_offset(SystemParams.dimensionless(0.5, 50), "T_A")

    assert report.offset == pytest.approx(math.pi / 4, abs=1e-3)


def test_yurke_stoler_instants_each_half_turn():
    from oneatom.experiments.offsets import frozen_profile, zero_instants
    from oneatom.model.analytic import phase
    from oneatom.util import phase_distance

    params = SystemParams.dimensionless(0.5, 50)
    half_turn = math.pi / (params.omega12 - 0.25)
    for ordering in Ordering:
        zeros = zero_instants(params, ordering, 0.4 * params.t0, 0.6 * params.t0)
        profile = frozen_profile(params, "T_A", ordering)
        assert len(zeros) >= 38
        assert max(b - a for a, b in zip(zeros, zeros[1:])) < half_turn
        for t in zeros:
            phi = phase(t, params, ordering) % math.pi
            assert min(phase_distance(phi, math.pi / 4, math.pi), phase_distance(phi, 3 * math.pi / 4, math.pi)) <= 1e-3
            assert profile(t) < 1e-8


def test_simulate_rows_and_determinism(tmp_path):
    from oneatom.experiments.config import ScenarioConfig
    from oneatom.experiments.runner import cmd_simulate, write_results

    config = ScenarioConfig(r=0.5, ratio=50, t_end=0.9, n_points=16)
    table = cmd_simulate(config)

    assert len(table) == 16 * 4 - 2
    assert len(table.where(branch="plus")) == 32
    first = str(tmp_path / "one.csv")
    second = str(tmp_path / "two.csv")
    write_results(config, table, first)
    write_results(config, cmd_simulate(config.with_overrides(workers=3)), second)
    with open(first) as a, open(second) as b:
        assert a.read() == b.read()
    assert os.path.exists(str(tmp_path / "one.columns.txt"))
    with open(first) as f:
        header = f.readline().strip().split(",")
    assert header[:3] == ["t_over_t0", "branch", "ordering"]
    assert "oracle_fidelity" not in header


def test_simulate_with_oracle():
    from oneatom.experiments.config import ScenarioConfig
    from oneatom.experiments.runner import cmd_simulate

    config = ScenarioConfig(r=0.5, ratio=50, t_end=0.5, n_points=8, ordering="with", oracle=True, steps_per_period=2000)
    rows = list(cmd_simulate(config))

    assert rows
    for row in rows:
        assert row.oracle_fidelity >= 1.0 - 1e-6


def test_regime_warning(caplog):
    from oneatom.experiments.config import ScenarioConfig
    from oneatom.experiments.runner import cmd_simulate

    cmd_simulate(ScenarioConfig(r=0.25, ratio=8, n_points=4, measures=("q",)))

    assert any(record.levelname == "WARNING" for record in caplog.records)


def test_wigner_sidecars(tmp_path):
    from oneatom.experiments.config import ScenarioConfig
    from oneatom.experiments.runner import cmd_simulate, write_results

    path = str(tmp_path / "cat.csv")
    config = ScenarioConfig(
        r=0.5,
        ratio=50,
        t_end=0.5,
        n_points=3,
        branch="plus",
        ordering="with",
        measures=("P", "wigner"),
        wigner_points=9,
    )
    written = write_results(config, cmd_simulate(config), path)

    assert written[1].endswith("cat.wigner_plus_with.csv")
    with open(written[1]) as f:
        assert len(f.read().strip().splitlines()) == 82


def test_figure_two_trajectory(tmp_path):
    import csv

    from oneatom.experiments.runner import cmd_figure

    (path,) = cmd_figure("fig2", str(tmp_path))
    with open(path) as f:
        rows = list(csv.DictReader(f))

    assert len(rows) == 256
    for row in rows:
        plus = complex(float(row["alpha_plus_re"]), float(row["alpha_plus_im"]))
        minus = complex(float(row["alpha_minus_re"]), float(row["alpha_minus_im"]))
        assert abs(plus + 1.8) == pytest.approx(1.8, abs=1e-9)
        assert abs(minus - 1.8) == pytest.approx(1.8, abs=1e-9)


def test_figure_four_offsets(tmp_path):
    import csv

    from oneatom.experiments.runner import cmd_figure

    written = cmd_figure("fig4", str(tmp_path))

    assert os.path.basename(written[-1]) == "fig4_offsets.csv"
    with open(written[-1]) as f:
        rows = list(csv.DictReader(f))
    assert [float(row["r"]) for row in rows] == [0.25, 0.5]
    for row in rows:
        assert float(row["error"]) <= 1e-3


def test_figure_three_noise_curves(tmp_path):
    import csv

    from oneatom.experiments.runner import cmd_figure

    written = cmd_figure("fig3", str(tmp_path))

    names = sorted(os.path.basename(path) for path in written)
    assert names == ["fig3_r0.25.csv", "fig3_r0.5.csv", "fig3_r1.0.csv"]
    for path in written:
        assert os.path.exists(os.path.splitext(path)[0] + ".columns.txt")
    with open(os.path.join(str(tmp_path), "fig3_r0.25.csv")) as f:
        rows = list(csv.DictReader(f))
    assert {row["branch"] for row in rows} == {"plus", "minus"}
    assert {row["ordering"] for row in rows} == {"with"}
    assert all(row["P"] == "" for row in rows)
    peak = max(float(row["T"]) for row in rows if row["T"])
    assert peak == pytest.approx(1.0, abs=0.1)


def test_figure_five_offsets(tmp_path):
    import csv

    from oneatom.experiments.runner import cmd_figure

    written = cmd_figure("fig5", str(tmp_path))

    names = [os.path.basename(path) for path in written]
    assert names == ["fig5_r0.25.csv", "fig5_r0.5.csv", "fig5_offsets.csv"]
    with open(written[0]) as f:
        rows = list(csv.DictReader(f))
    assert {row["ordering"] for row in rows} == {"with", "without"}
    assert all(row["T_A"] != "" for row in rows)
    assert min(float(row["t_over_t0"]) for row in rows) == pytest.approx(0.4)
    with open(written[-1]) as f:
        offsets = list(csv.DictReader(f))
    assert [row["measure"] for row in offsets] == ["T_A", "T_A"]
    for row in offsets:
        assert float(row["error"]) <= 1e-3


def test_parity_curves_separate_with_r():
    from oneatom.experiments.config import ScenarioConfig
    from oneatom.experiments.runner import cmd_simulate

    spread = []
    for r in (0.25, 0.5):
        config = ScenarioConfig(r=r, ratio=50, t_start=0.4, t_end=0.6, branch="plus", measures=("P",))
        table = cmd_simulate(config)
        ordered = [row.P for row in table.where(ordering="with")]
        plain = [row.P for row in table.where(ordering="without")]
        spread.append(sum(abs(a - b) for a, b in zip(ordered, plain)) / len(ordered))

    assert spread[0] < spread[1]


def test_unknown_figure():
    from oneatom.core.errors import ConfigError
    from oneatom.experiments.runner import cmd_figure

    with pytest.raises(ConfigError):
        cmd_figure("fig9")


def test_sweep():
    from oneatom.experiments.config import ScenarioConfig
    from oneatom.experiments.runner import cmd_sweep

    table = cmd_sweep(ScenarioConfig(), [0.5], [8.0, 50.0])
    rows = sorted(table, key=lambda row: row.ratio)

    assert [row.strong_coupling for row in rows] == [False, True]
    for row in rows:
        assert row.delta_phi_half == pytest.approx(math.pi / 4, abs=1e-12)
        assert row.parity_offset == pytest.approx(math.pi / 4, abs=1e-3)


def test_validate_requires_oracle():
    from oneatom.core.errors import ConfigError
    from oneatom.experiments.config import ScenarioConfig
    from oneatom.experiments.runner import cmd_validate

    with pytest.raises(ConfigError):
        cmd_validate(ScenarioConfig())

import pytest

from cachenet import ConfigError, parse_config
from cachenet.config import (
    Experiment,
    config_to_text,
    default_config,
    describe_keys,
)


class TestParsing:
    def test_empty_text_yields_defaults(self):
        config = parse_config("")
        assert config == default_config()
        assert config.network.theta == 1.0
        assert config.economics.catalog_size == 10_000_000
        assert config.budgets == (1.0, 2.5, 5.0)

    def test_single_override_keeps_defaults_elsewhere(self):
        config = parse_config("theta = 1.0\n")
        assert config == default_config()
        config = parse_config("theta = 2.5\n")
        assert config.network.theta == 2.5
        assert config.network.alpha == 4.0

    def test_comments_and_blank_lines(self):
        config = parse_config(
            "# full-line comment\n\n  alpha = 3.5  # trailing comment\n"
        )
        assert config.network.alpha == 3.5

    def test_unknown_key_rejected_by_name(self):
        with pytest.raises(ConfigError, match="unknown key 'alpa'"):
            parse_config("alpa = 4\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate key 'theta'"):
            parse_config("theta = 1\ntheta = 2\n")

    def test_missing_equals_rejected(self):
        with pytest.raises(ConfigError, match="expected 'key = value'"):
            parse_config("theta 1\n")

    def test_unparseable_value_names_key(self):
        with pytest.raises(ConfigError, match="'theta'"):
            parse_config("theta = fast\n")
        with pytest.raises(ConfigError, match="'trials'"):
            parse_config("trials = 10.5\n")

    def test_invariant_violation_names_constraint(self):
        with pytest.raises(ConfigError, match="alpha"):
            parse_config("alpha = 2\n")
        with pytest.raises(ConfigError, match="beta_bh"):
            parse_config("beta_bh = 0.4\nbeta_ut = 0.5\n")
        with pytest.raises(ConfigError, match="e_miss"):
            parse_config("e_hit = 11\n")

    def test_budget_list(self):
        config = parse_config("budget = 1, 2.5 ,5\n")
        assert config.budgets == (1.0, 2.5, 5.0)
        assert config.economics.budget == 1.0
        with pytest.raises(ConfigError, match="budget"):
            parse_config("budget = 1,-2\n")

    def test_experiment_key(self):
        config = parse_config("experiment = optimize\n")
        assert config.experiment is Experiment.OPTIMIZE
        with pytest.raises(ConfigError, match="experiment"):
            parse_config("experiment = warp\n")

    def test_sweep_keys(self):
        config = parse_config(
            "sweep_start = 0.1\nsweep_stop = 0.9\nsweep_points = 11\nsweep_scale = log\n"
        )
        assert (config.sweep.start, config.sweep.stop) == (0.1, 0.9)
        assert (config.sweep.points, config.sweep.scale) == (11, "log")
        assert parse_config("sweep_points = auto\n").sweep.points is None
        with pytest.raises(ConfigError, match="sweep_scale"):
            parse_config("sweep_scale = cubic\n")
        with pytest.raises(ConfigError, match="sweep_points"):
            parse_config("sweep_points = 1\n")

    def test_simulation_keys(self):
        config = parse_config("trials = 1e4\nseed = 9\ntruncation_fraction = 1e-3\n")
        assert config.trials == 10_000
        assert config.seed == 9
        assert config.truncation_fraction == 1e-3
        with pytest.raises(ConfigError, match="seed"):
            parse_config(f"seed = {1 << 63}\n")
        with pytest.raises(ConfigError, match="truncation_fraction"):
            parse_config("truncation_fraction = 0.5\n")
        with pytest.raises(ConfigError, match="trials"):
            parse_config("trials = 0\n")
        with pytest.raises(ConfigError, match="workers"):
            parse_config("workers = -1\n")


class TestRoundTrip:
    def test_default_round_trip(self):
        config = default_config()
        assert parse_config(config_to_text(config)) == config

    def test_overridden_round_trip(self):
        config = parse_config(
            "lambda = 3.3e-3\ntheta = 0.75\nbudget = 2,4\nexperiment = sweep_hit\n"
            "sweep_points = 17\nout_dir = results\nseed = 123456789\n"
            "catalog_size = 1234567\ns_max = 1000000\nstorage_size = 100.5\n"
        )
        assert parse_config(config_to_text(config)) == config

    def test_cross_field_invariants_checked_at_parse(self):
        with pytest.raises(ConfigError, match="s_max"):
            parse_config("catalog_size = 1234567\n")  # default s_max now exceeds it

    def test_round_trip_preserves_awkward_floats(self):
        config = parse_config("lambda = 0.1\nrho_sc = 0.30000000000000004\n")
        again = parse_config(config_to_text(config))
        assert again.network.rho_sc == config.network.rho_sc
        assert again == config


def test_describe_keys_mentions_units_and_defaults():
    text = describe_keys()
    assert "lambda" in text and "SCs/m^2" in text
    assert "$/file" in text
    assert "0.005" in text  # storage price default
    for key in ("truncation_fraction", "sweep_scale", "out_dir"):
        assert key in text

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filmsim.config import RunConfig, eval_number, format_value, load_config, parse_config
from filmsim.errors import ConfigError
from filmsim.io import (COMPARISON_COLUMNS, GROWTH_COLUMNS, SPECTRUM_COLUMNS, CsvError, emit_csv,
                        format_field, growth_records, read_csv, spectrum_records)
from filmsim.gaptooth import Spectrum
from filmsim.stability import growth_rate_sweep


class TestEvalNumber:
    @pytest.mark.parametrize("text,value", [("15", 15), ("1/6", 1 / 6), ("pi", math.pi),
                                            ("10*pi", 10 * math.pi), ("-2.5e-3", -2.5e-3),
                                            ("2**3", 8)])
    def test_values(self, text, value):
        assert eval_number(text) == pytest.approx(value, rel=1e-15)

    @pytest.mark.parametrize("text", ["__import__('os')", "x", "1 +", "[1]", "'a'"])
    def test_rejects(self, text):
        with pytest.raises(ConfigError):
            eval_number(text)


class TestParseConfig:
    def test_defaults(self):
        cfg = RunConfig().validate()
        assert cfg.model.re == 15 and cfg.model.c_reg == 0.5
        assert cfg.patches.m == 10 and cfg.patches.n == 9
        assert cfg.length == pytest.approx(10 * math.pi)

    def test_overrides_and_comments(self):
        cfg = parse_config("""
            # header comment
            model.re = 1          # inline comment
            patches.r = 1/4
            patches.edge_lift_h2 = yes
            integrator.first_step = none
            run.output_times = 0, 1.5, 3
            run.t_end = 3
        """)
        assert cfg.model.re == 1.0
        assert cfg.patches.r == 0.25
        assert cfg.patches.edge_lift_h2 is True
        assert cfg.integrator.first_step is None
        assert cfg.run.output_times == (0.0, 1.5, 3.0)

    def test_base_is_kept(self):
        base = parse_config("model.re = 3")
        cfg = parse_config("model.c_reg = 0.1", base)
        assert (cfg.model.re, cfg.model.c_reg) == (3.0, 0.1)

    @pytest.mark.parametrize("text", [
        "model.reynolds = 3", "physics.re = 3", "re = 3", "model.re 3", "patches.m = 2.5",
        "patches.edge_lift_h2 = maybe", "grid.L = 5", "init.amplitude = 0.9\ninit.noise = 0.2",
        "init.noise = -1", "run.t_end = 0", "run.output_times = 5, 1", "run.output_times = 0, 40",
        "sweep.dk = 0", "model.re = 1/0",
    ])
    def test_errors(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)

    def test_error_names_line(self):
        with pytest.raises(ConfigError, match="line 2"):
            parse_config("model.re = 2\nmodel.bogus = 1")

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.cfg")

    def test_load(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("model.re = 7\n", encoding="utf-8")
        assert load_config(path).model.re == 7

    def test_items_round_trip(self):
        cfg = parse_config("model.re = 3\npatches.D = pi/2\ngrid.L = 5*pi\nrun.t_end = 4\n"
                           "run.output_times = 0, 4")
        text = "\n".join(f"{k} = {format_value(v)}" for k, v in cfg.items())
        assert parse_config(text) == cfg


class TestCsv:
    def test_header_only(self, tmp_path):
        path = emit_csv([], tmp_path / "empty.csv", SPECTRUM_COLUMNS)
        assert path.read_bytes() == b"re_lambda,im_lambda,class\n"

    def test_spectrum_line_count(self, tmp_path):
        spectrum_ = Spectrum(np.array([0.0, -1 + 2j, -1 - 2j]), ["macroscale", "other", "other"])
        path = emit_csv(spectrum_records(spectrum_), tmp_path / "s.csv", SPECTRUM_COLUMNS)
        assert len(path.read_text().splitlines()) == 4

    def test_lf_and_comments(self, tmp_path):
        path = emit_csv([(1.0, 2.0, "x")], tmp_path / "c.csv", SPECTRUM_COLUMNS, ["a = 1"])
        data = path.read_bytes()
        assert b"\r" not in data
        assert data.startswith(b"# a = 1\nre_lambda,")

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.tuples(st.floats(allow_nan=False), st.floats(allow_nan=False, width=32),
                              st.floats(-1e300, 1e300)), max_size=20))
    def test_round_trip_bit_exact(self, tmp_path_factory, rows):
        path = tmp_path_factory.mktemp("csv") / "r.csv"
        emit_csv(rows, path, ("a", "b", "c"), ["seed = 0"])
        columns, back, comments = read_csv(path)
        assert columns == ("a", "b", "c") and comments == ["seed = 0"]
        assert len(back) == len(rows)
        for r, b in zip(rows, back):
            assert all(x == y and math.copysign(1, x) == math.copysign(1, y) for x, y in zip(r, b))

    def test_growth_records(self, tmp_path):
        rates = growth_rate_sweep(1, 0, 0.0, [0.0, 1.0])
        path = emit_csv(growth_records(rates), tmp_path / "g.csv", GROWTH_COLUMNS)
        columns, rows, _ = read_csv(path)
        assert columns == GROWTH_COLUMNS
        assert rows[1][0] == 1.0
        assert complex(rows[1][1], rows[1][4]) == rates[1].lambdas[0]

    def test_nan_written(self, tmp_path):
        path = emit_csv([(0.0, np.nan, 0.0, 0.0, 0.0, 0.0)], tmp_path / "n.csv", COMPARISON_COLUMNS)
        _, rows, _ = read_csv(path)
        assert math.isnan(rows[0][1])

    def test_wrong_width(self, tmp_path):
        with pytest.raises(ValueError):
            emit_csv([(1.0,)], tmp_path / "w.csv", ("a", "b"))

    def test_delimiter_in_text(self):
        with pytest.raises(ValueError):
            format_field("a,b")

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(CsvError, match="missing"):
            emit_csv([], tmp_path / "missing" / "x.csv", ("a",))

    def test_unreadable_path(self, tmp_path):
        with pytest.raises(CsvError):
            read_csv(tmp_path / "none.csv")

    def test_integer_and_bool_fields(self):
        assert format_field(np.int64(3)) == "3"
        assert format_field(True) == "true"
        assert format_field(0.1) == "0.10000000000000001"

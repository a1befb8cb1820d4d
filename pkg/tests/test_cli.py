from __future__ import annotations

import asyncio
import csv
import io
import json

import numpy as np
import pytest

from rabi.config import Settings
from rabi.main import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main
from rabi.models import Parity
from rabi.services.oracle import labeled_spectrum
from tests.reference import HALF, ISOLATED_REFERENCE, QUARTER, unified


def invoke(argv: list[str]) -> int:
    return asyncio.run(main(argv, settings=Settings()))


def parse_csv(text: str) -> tuple[dict[str, str], list[dict[str, str]]]:
    lines = text.splitlines()
    header = dict(line[2:].split("=", 1) for line in lines if line.startswith("# "))
    body = [line for line in lines if not line.startswith("# ")]
    return header, list(csv.DictReader(io.StringIO("\n".join(body))))


def test_isolated_table_matches_reference(capsys) -> None:
    assert invoke(["isolated", "--k", "1/4", "--M", "1..3"]) == EXIT_OK
    header, rows = parse_csv(capsys.readouterr().out)
    assert header["tool"] == "rabi"
    assert header["command"] == "isolated"
    assert header["k"] == "1/4"

    expected = [(M, g, E) for M, pairs in ISOLATED_REFERENCE[QUARTER].items() for g, E in pairs]
    assert len(rows) == len(expected) == 6
    for row, (M, g, E) in zip(rows, expected):
        assert row["k"] == "1/4"
        assert int(row["M"]) == M
        assert float(row["g"]) == pytest.approx(g, abs=1e-8)
        assert float(row["E"]) == pytest.approx(E, abs=1e-8)


def test_json_output_carries_the_same_values(capsys) -> None:
    assert invoke(["isolated", "--M", "1..2"]) == EXIT_OK
    _, csv_rows = parse_csv(capsys.readouterr().out)

    assert invoke(["isolated", "--M", "1..2", "--format", "json"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert list(payload) == ["header", "columns", "rows"]
    assert payload["columns"] == ["k", "M", "g", "E"]
    assert len(payload["rows"]) == len(csv_rows) == 3
    for row, csv_row in zip(payload["rows"], csv_rows):
        assert row[2] == float(csv_row["g"])
        assert row[3] == float(csv_row["E"])

    first = ISOLATED_REFERENCE[HALF][1][0]
    assert payload["rows"][0][2] == pytest.approx(first[0], abs=1e-8)


def test_isolated_without_solutions_is_not_an_error(capsys) -> None:
    assert invoke(["isolated", "--epsilon", "2.1", "--M", "1"]) == EXIT_OK
    _, rows = parse_csv(capsys.readouterr().out)
    assert rows == []


def test_isolated_in_two_photon_units(capsys) -> None:
    assert invoke(["isolated", "--k", "1/4", "--M", "1", "--realization", "two-photon", "--omega", "0.5"]) == EXIT_OK
    _, rows = parse_csv(capsys.readouterr().out)
    g_ref, E_ref = ISOLATED_REFERENCE[QUARTER][1][0]
    assert float(rows[0]["g"]) == pytest.approx(g_ref / 2, abs=1e-8)
    assert float(rows[0]["E"]) == pytest.approx(E_ref - 0.25, abs=1e-8)


@pytest.mark.parametrize(
    "argv",
    [
        ["isolated", "--M", "3..1"],
        ["isolated", "--bogus"],
        ["isolated", "--k", "abc"],
        ["isolated", "--k", "1/2", "--realization", "two-photon"],
        ["gfun", "--E-range", "0:1"],
        ["coeffs", "--E", "0.5", "--fit", "20:80"],
        ["diag", "--N", "3"],
        ["frobnicate"],
    ],
)
def test_usage_errors(argv: list[str], capsys) -> None:
    assert invoke(argv) == EXIT_USAGE
    assert capsys.readouterr().out == ""


def test_collapse_regime_is_a_numerical_failure(capsys) -> None:
    assert invoke(["coeffs", "--g", "0.6", "--E", "0.5"]) == EXIT_NUMERICAL
    assert capsys.readouterr().out == ""


def test_diag_levels(capsys) -> None:
    assert invoke(["diag", "--N", "300", "--n-lowest", "6"]) == EXIT_OK
    header, rows = parse_csv(capsys.readouterr().out)
    assert header["N_compare"] == "150"
    assert header["converged"] == "true"
    assert [int(row["index"]) for row in rows] == list(range(6))

    expected = labeled_spectrum(unified(0.4, HALF), 300, 6)
    for row, (E, parity) in zip(rows, expected):
        assert float(row["E"]) == pytest.approx(E, abs=1e-12)
        assert row["parity"] == parity.label
        assert float(row["delta"]) < 1e-9


def test_gfun_grid_and_roots(capsys) -> None:
    assert invoke(["gfun", "--E-range=0.0:1.2:241"]) == EXIT_OK
    header, rows = parse_csv(capsys.readouterr().out)
    assert list(rows[0]) == ["E", "G_even", "G_odd", "masked"]
    assert len(rows) == 241

    # baselines 0.3 and 0.9 sit on the grid
    masked = [float(row["E"]) for row in rows if row["masked"] == "true"]
    assert masked == pytest.approx([0.3, 0.9])

    oracle = labeled_spectrum(unified(0.4, HALF), 400, 12)
    found = 0
    for parity in Parity:
        roots = [float(E) for E in header[f"roots_{parity.label}"].split()]
        found += len(roots)
        levels = [E for E, p in oracle if p is parity]
        for root in roots:
            assert min(abs(root - E) for E in levels) < 1e-7
    assert found > 0


def test_gfun_single_parity(capsys) -> None:
    assert invoke(["gfun", "--E-range=0.4:0.8:41", "--parity", "odd"]) == EXIT_OK
    header, rows = parse_csv(capsys.readouterr().out)
    assert list(rows[0]) == ["E", "G_odd", "masked"]
    assert "roots_even" not in header


def test_config_file_reaches_header(tmp_path, capsys) -> None:
    config = tmp_path / "rabi.conf"
    config.write_text("isolated_grid=200\n", encoding="utf-8")
    assert invoke(["isolated", "--M", "1", "--config", str(config)]) == EXIT_OK
    header, rows = parse_csv(capsys.readouterr().out)
    assert header["isolated_grid"] == "200"
    assert len(rows) == 1


def test_missing_config_file(tmp_path, capsys) -> None:
    assert invoke(["isolated", "--config", str(tmp_path / "missing.conf")]) == EXIT_USAGE


def test_output_file(tmp_path, capsys) -> None:
    out = tmp_path / "isolated.json"
    assert invoke(["isolated", "--M", "1", "--format", "json", "--out", str(out)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    payload = json.loads(out.read_text(encoding="utf-8"))
    assert payload["header"]["M"] == "1"
    assert len(payload["rows"]) == 1


def test_spectrum_sweep(capsys) -> None:
    assert invoke(["spectrum", "--g-range", "0.1:0.3:3", "--n-levels", "4"]) == EXIT_OK
    header, rows = parse_csv(capsys.readouterr().out)
    assert header["n_levels"] == "4"

    levels = [row for row in rows if row["source"] != "baseline"]
    couplings = sorted({float(row["g"]) for row in levels})
    assert couplings == pytest.approx([0.1, 0.2, 0.3])
    for g in couplings:
        at_g = [row for row in levels if float(row["g"]) == g]
        assert len(at_g) >= 4
        assert all(row["source"] == "g-root" for row in at_g)
        assert {row["parity"] for row in at_g} == {"even", "odd"}
    assert any(row["source"] == "baseline" and row["parity"] == "" for row in rows)


def test_decay_rate_of_lowest_odd_level(capsys) -> None:
    assert invoke(["coeffs", "--select", "lowest-odd"]) == EXIT_OK
    header, rows = parse_csv(capsys.readouterr().out)
    assert header["recurrence"] == "minimal"
    assert float(header["gamma_reference"]) == pytest.approx(0.2231435513, abs=1e-9)
    assert float(header["gamma_fit"]) == pytest.approx(0.2231435513, rel=0.02)
    assert header["fit_model"] == "a - gamma m + p ln m + q/m"
    assert len(rows) == 61
    assert float(rows[0]["d"]) == 1.0


def test_help_exits_cleanly(capsys) -> None:
    assert invoke(["--help"]) == EXIT_OK
    assert "isolated" in capsys.readouterr().out


def test_worker_pool_output_is_identical(capsys) -> None:
    argv = ["gfun", "--E-range=0.0:1.0:81", "--parity", "even"]
    assert invoke(argv) == EXIT_OK
    serial = capsys.readouterr().out
    assert invoke([*argv, "--jobs", "2"]) == EXIT_OK
    pooled = capsys.readouterr().out
    # only the jobs setting differs
    assert serial.replace("# jobs=1", "# jobs=2") == pooled


def test_plain_line_fit_is_recorded(capsys) -> None:
    assert invoke(["coeffs", "--select", "lowest-odd", "--no-log-correction"]) == EXIT_OK
    header, _ = parse_csv(capsys.readouterr().out)
    assert header["log_correction"] == "false"
    assert header["fit_model"] == "a - gamma m"
    assert float(header["gamma_fit"]) > 0.0


def test_gfun_columns_are_median_normalized(capsys) -> None:
    argv = ["gfun", "--E-range=0.0:1.2:241", "--parity", "even"]
    assert invoke(argv) == EXIT_OK
    header, rows = parse_csv(capsys.readouterr().out)
    assert header["normalize"] == "true"
    scale = float(header["G_scale_even"])
    assert scale > 0.0
    normalized = [float(row["G_even"]) for row in rows if row["masked"] == "false"]
    assert float(np.median(np.abs(normalized))) == pytest.approx(1.0)

    assert invoke([*argv, "--no-normalize"]) == EXIT_OK
    raw_header, raw_rows = parse_csv(capsys.readouterr().out)
    assert raw_header["normalize"] == "false"
    assert "G_scale_even" not in raw_header
    raw = [float(row["G_even"]) for row in raw_rows if row["masked"] == "false"]
    np.testing.assert_allclose(raw, np.array(normalized) * scale, rtol=1e-12)
    assert raw_header["roots_even"] == header["roots_even"]

import json
import re

import pytest

from sccforge.cli import main

from golden import (
    BALANCED_TABLE_N3,
    CODE_FAMILY_R2_N3,
    CODE_FAMILY_R3_N2,
    REQ_FLOOR,
    REQ_FROZEN,
    REQ_TS4_OVERRIDE,
)


def lines_of(capsys):
    return capsys.readouterr().out.splitlines()


def text_rows(pairs):
    return [" ".join(str(x) for x in (a0, *digits)) for a0, digits in pairs]


# -- codes -------------------------------------------------------------------------


def test_codes_lists_the_family(capsys):
    assert main(["codes", "--ratio", "3/8"]) == 0
    assert lines_of(capsys) == text_rows(CODE_FAMILY_R2_N3[3])


def test_codes_other_radix(capsys):
    assert main(["codes", "--ratio", "4/9", "--radix", "3"]) == 0
    assert lines_of(capsys) == text_rows(CODE_FAMILY_R3_N2[4])


def test_codes_balanced_schedule(capsys):
    assert main(["codes", "--ratio", "4/8", "--generator", "balanced"]) == 0
    got = lines_of(capsys)
    assert len(got) == 8
    assert sorted(got) == sorted(text_rows(BALANCED_TABLE_N3[4]))


def test_codes_rejects_an_unreachable_ratio(capsys):
    assert main(["codes", "--ratio", "9/8"]) == 2
    assert "scc-forge codes: error:" in capsys.readouterr().err


def test_codes_cross_check(capsys):
    assert main(["codes", "--ratio", "3/8", "--check"]) == 0
    assert lines_of(capsys) == ["generators agree on 5 codes"]


def test_codes_json(capsys):
    assert main(["codes", "--ratio", "3/8", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["schema"] == "scc-forge/1"
    assert data["ratio"] == "3/8"
    assert data["generator"] == "spawn"
    assert len(data["codes"]) == 5
    assert data["codes"][0] == {"a0": 1, "digits": [-1, 0, -1], "radix": 2}


def test_codes_csv(capsys):
    assert main(["codes", "--ratio", "3/8", "--format", "csv"]) == 0
    got = lines_of(capsys)
    assert got[0] == "a0,d1,d2,d3"
    assert got[1] == "1,-1,0,-1"
    assert len(got) == 6


# -- solve -------------------------------------------------------------------------


def test_solve_names_the_dependent_row(capsys):
    assert main(["solve", "--ratio", "3/8"]) == 0
    assert lines_of(capsys) == ["V1=1/2 V2=1/4 V3=1/8 Vo=3/8; redundant rows: [4]"]


def test_solve_step_up(capsys):
    assert main(["solve", "--ratio", "3/8", "--stepup"]) == 0
    assert lines_of(capsys) == ["V1=4/3 V2=2/3 V3=1/3 Vo=8/3"]


def test_solve_other_radix(capsys):
    # four loops over three unknowns: one row is dependent and gets flagged
    assert main(["solve", "--ratio", "4/9", "--radix", "3"]) == 0
    assert lines_of(capsys) == ["V1=1/3 V2=1/9 Vo=4/9; redundant rows: [4]"]


def test_solve_reduces_degenerate_ratios(capsys):
    assert main(["solve", "--ratio", "4/8"]) == 0
    assert lines_of(capsys) == [
        "note: 4/8 reduces to 1/2; solving the reduced bank",
        "V1=1/2 Vo=1/2; redundant rows: []",
    ]


def test_solve_eliminate(capsys):
    assert main(["solve", "--ratio", "3/8", "--eliminate"]) == 0
    assert lines_of(capsys) == ["V1=1/2 V2=1/4 V3=1/8 Vo=3/8; eliminated rows: [4]"]


def test_solve_json(capsys):
    assert main(["solve", "--ratio", "3/8", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["rank_a"] == 4
    assert data["unique"] is True
    assert data["redundant_row_indices"] == [3]
    assert data["solution"] == {"V1": "1/2", "V2": "1/4", "V3": "1/8", "Vo": "3/8"}


# -- simulate ----------------------------------------------------------------------

SIM_ARGS = [
    "simulate",
    "--ratio",
    "3/8",
    "--vin",
    "8",
    "--caps",
    "4.7u,4.7u,4.7u",
    "--cout",
    "47u",
]


def test_simulate_reports_the_limits(capsys):
    assert main(SIM_ARGS) == 0
    got = lines_of(capsys)
    assert re.fullmatch(r"converged after \d+ periods \(\d+ iterations to adjust\)", got[0])
    match = re.fullmatch(r"limits: (\S+) (\S+) (\S+) \| (\S+) V", got[1])
    assert match
    volts = [float(x) for x in match.groups()]
    for got_v, want in zip(volts, (4.0, 2.0, 1.0, 3.0)):
        assert got_v == pytest.approx(want, abs=1e-4)


def test_simulate_json(capsys):
    assert main(SIM_ARGS + ["--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["converged"] is True
    assert data["output_voltage"] == pytest.approx(3.0, abs=1e-6)
    assert data["adjustment_iterations"] == (data["periods"] - 1) * 5


def test_simulate_csv_is_the_trace(capsys):
    assert main(SIM_ARGS + ["--format", "csv", "--max-periods", "2"]) == 4
    got = capsys.readouterr()
    rows = got.out.splitlines()
    assert rows[0] == "iteration,V1,V2,V3,Vo,Q"
    assert len(rows) == 1 + 2 * 5


def test_simulate_budget_exhaustion(tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    code = main(SIM_ARGS + ["--max-periods", "3", "--trace", str(trace)])
    assert code == 4
    captured = capsys.readouterr()
    assert "did not converge within 3 periods" in captured.err
    assert len(trace.read_text().splitlines()) == 1 + 3 * 5


def test_simulate_writes_locus(tmp_path, capsys):
    locus = tmp_path / "locus.csv"
    assert main(SIM_ARGS + ["--locus", str(locus)]) == 0
    rows = locus.read_text().splitlines()
    assert rows[0] == "angle_rad,abs_charge"
    assert len(rows) > 5


def test_simulate_cap_count_mismatch(capsys):
    assert main(["simulate", "--ratio", "3/8", "--vin", "8", "--caps", "4.7u,4.7u", "--cout", "47u"]) == 2
    assert "need 3 flying capacitances" in capsys.readouterr().err


# -- req ---------------------------------------------------------------------------

REQ_ARGS = ["req", "--fs", "100k", "--c", "4.7u", "--ron", "1.2", "--switches", "4"]


def req_rows(capsys):
    got = lines_of(capsys)
    assert got[0].split() == ["ratio", "slots", "t/Ts", "R_eq[Ohm]", "floor[R]"]
    return [row.split() for row in got[1:]]


def test_req_full_table(capsys):
    assert main(REQ_ARGS) == 0
    rows = req_rows(capsys)
    assert [row[0] for row in rows] == [f"{m}/8" for m in range(1, 8)]
    for m, row in enumerate(rows, start=1):
        assert float(row[3]) == pytest.approx(REQ_FROZEN[m], abs=1e-3)
        assert row[4] == str(REQ_FLOOR[m])


def test_req_single_ratio(capsys):
    assert main(REQ_ARGS + ["--ratio", "3/8"]) == 0
    rows = req_rows(capsys)
    assert len(rows) == 1
    assert rows[0][0] == "3/8"
    assert rows[0][1] == "4"
    assert rows[0][2] == "1/4"
    assert float(rows[0][3]) == pytest.approx(5.4282, abs=1e-3)


def test_req_fixed_slot_override(capsys):
    assert main(REQ_ARGS + ["--slot", "Ts/4"]) == 0
    rows = {row[0]: row for row in req_rows(capsys)}
    assert all(row[2] == "1/4" for row in rows.values())
    assert float(rows["2/8"][3]) == pytest.approx(REQ_TS4_OVERRIDE[2], abs=1e-3)
    assert float(rows["4/8"][3]) == pytest.approx(REQ_TS4_OVERRIDE[4], abs=1e-3)


def test_req_slot_in_seconds(capsys):
    assert main(REQ_ARGS + ["--ratio", "3/8", "--slot", "2u"]) == 0
    rows = req_rows(capsys)
    assert rows[0][2] == "0.2"


def test_req_oversized_slot(capsys):
    assert main(REQ_ARGS + ["--ratio", "1/8", "--slot", "Ts/2"]) == 3
    assert capsys.readouterr().err.startswith("error:")


def test_req_csv(capsys):
    assert main(REQ_ARGS + ["--format", "csv"]) == 0
    got = lines_of(capsys)
    assert got[0] == "ratio,slots,t_over_ts,req_ohm,floor_over_r"
    assert got[3].startswith("3/8,4,1/4,5.4282,")


def test_req_output_is_deterministic(capsys):
    assert main(REQ_ARGS) == 0
    first = capsys.readouterr().out
    assert main(REQ_ARGS) == 0
    assert capsys.readouterr().out == first


# -- dither ------------------------------------------------------------------------


def test_dither_plan_line(capsys):
    assert main(["dither", "--target", "0.4"]) == 0
    assert lines_of(capsys) == ["4x 3/8 + 1x 4/8 = 2/5"]


def test_dither_accepts_fraction_text(capsys):
    assert main(["dither", "--target", "2/5"]) == 0
    assert lines_of(capsys) == ["4x 3/8 + 1x 4/8 = 2/5"]


def test_dither_json(capsys):
    assert main(["dither", "--target", "0.4", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["ratios"] == ["3/8", "4/8"]
    assert data["weights"] == [4, 1]
    assert data["average"] == "2/5"
    assert data["target"] == "2/5"


def test_dither_rejects_targets_outside_unit_interval(capsys):
    assert main(["dither", "--target", "1.2"]) == 2
    assert "strictly between 0 and 1" in capsys.readouterr().err


def test_dither_unreachable_band_is_a_domain_error(capsys):
    assert main(["dither", "--target", "0.05"]) == 3
    assert "outside the reachable band" in capsys.readouterr().err


# -- ldo ---------------------------------------------------------------------------


def test_ldo_line(capsys):
    assert main(["ldo", "--vin", "10", "--vout", "3.3", "--dropout", "0.3"]) == 0
    assert lines_of(capsys) == ["ratio 3/8 step-down, efficiency bound 0.9167"]


def test_ldo_step_up(capsys):
    assert main(["ldo", "--vin", "1.8", "--vout", "3.3", "--dropout", "0.3"]) == 0
    assert lines_of(capsys) == ["ratio 8/4 step-up, efficiency bound 0.9167"]


def test_ldo_step_up_disabled(capsys):
    assert main(["ldo", "--vin", "1.8", "--vout", "3.3", "--dropout", "0.3", "--no-step-up"]) == 3
    assert "without step-up" in capsys.readouterr().err


def test_ldo_json(capsys):
    assert main(["ldo", "--vin", "10", "--vout", "3.3", "--dropout", "0.3", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["ratio"] == "3/8"
    assert data["step_up"] is False
    assert data["gain"] == "3/8"
    assert data["efficiency_bound"] == pytest.approx(3.3 / 3.6)


# -- option plumbing ----------------------------------------------------------------


def test_config_file_supplies_options(tmp_path, capsys):
    cfg = tmp_path / "board.cfg"
    cfg.write_text("# bench setup\nvin = 10\nvout = 3.3\ndropout = 0.3\n")
    assert main(["ldo", "--config", str(cfg)]) == 0
    assert lines_of(capsys) == ["ratio 3/8 step-down, efficiency bound 0.9167"]


def test_flags_override_the_config(tmp_path, capsys):
    cfg = tmp_path / "board.cfg"
    cfg.write_text("vin = 10\nvout = 3.3\ndropout = 0.3\n")
    assert main(["ldo", "--config", str(cfg), "--vin", "8"]) == 0
    assert lines_of(capsys) == ["ratio 4/8 step-down, efficiency bound 0.9167"]


def test_missing_required_option(capsys):
    assert main(["ldo", "--vin", "10"]) == 2
    assert "missing required option --vout" in capsys.readouterr().err


def test_missing_config_file(capsys):
    assert main(["ldo", "--vin", "10", "--vout", "3.3", "--config", "/no/such/file"]) == 2


def test_unknown_command_is_a_usage_error(capsys):
    assert main(["frobnicate"]) == 2


def test_bad_quantity_is_a_usage_error(capsys):
    assert main(["ldo", "--vin", "ten", "--vout", "3.3"]) == 2
    assert "bad value for --vin" in capsys.readouterr().err

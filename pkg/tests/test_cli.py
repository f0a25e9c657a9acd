import json

import pytest

import main
from scenario import BUNDLED_SCENARIO

SCENARIO = ["--scenario", str(BUNDLED_SCENARIO)]


def run(capsys, *argv):
    code = main.main(list(argv))
    return code, capsys.readouterr().out


def test_table3_writes_csv_to_stdout(capsys):
    code, out = run(capsys, "table3", *SCENARIO)
    assert code == 0
    assert out.startswith("label,distance,time,housing,mode,trip_cost,NCF=0,")
    assert len(out.splitlines()) == 11


def test_table3_defaults_to_bundled_scenario(capsys):
    assert run(capsys, "table3")[1] == run(capsys, "table3", *SCENARIO)[1]


def test_budget_example(capsys):
    code, out = run(capsys, "budget", *SCENARIO, "--row", "40mi", "--ncf", "0.8")
    assert code == 0
    assert out == "1600\n"


def test_budget_against_relocation(capsys):
    code, out = run(capsys, "budget", "--row", "40mi", "--ncf", "0.8", "--baseline", "relocation")
    assert (code, out) == (0, "1320\n")


def test_budget_unknown_row_is_a_validation_error(capsys):
    code, out = run(capsys, "budget", "--row", "7mi", "--ncf", "0.8")
    assert code == 1 and out == ""


def test_budget_ncf_out_of_range(capsys):
    assert run(capsys, "budget", "--row", "40mi", "--ncf", "1.5")[0] == 1


def test_unknown_subcommand_exits_1(capsys):
    assert main.main(["teleport"]) == 1
    assert "usage" in capsys.readouterr().err


def test_unknown_flag_exits_1():
    assert main.main(["table3", "--colour", "red"]) == 1


def test_missing_scenario_is_an_io_error(tmp_path):
    assert main.main(["table3", "--scenario", str(tmp_path / "absent.scn")]) == 2


def test_invalid_scenario_is_a_validation_error(tmp_path):
    path = tmp_path / "bad.scn"
    path.write_text("[grid]\nncf = 0.4, 0.2\n", encoding="utf-8")
    assert main.main(["table3", "--scenario", str(path)]) == 1


def test_out_writes_file(tmp_path, capsys):
    target = tmp_path / "grid.csv"
    code, out = run(capsys, "table3", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text(encoding="utf-8").startswith("label,")


def test_unwritable_out_is_an_io_error(tmp_path):
    assert main.main(["table3", "--out", str(tmp_path / "missing-dir" / "grid.csv")]) == 2


def test_curves_emit_svg(capsys):
    code, out = run(capsys, "curves", "--kind", "GainVsDistance")
    assert code == 0
    assert "<svg" in out and out.count("<polyline") == 7


def test_curves_as_csv(capsys):
    code, out = run(capsys, "curves", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "ncf,distance,usd"


def test_csv_commands_reject_svg(capsys):
    assert run(capsys, "table3", "--format", "svg")[0] == 1


def test_optimize(capsys):
    code, out = run(capsys, "optimize")
    assert code == 0
    assert out.splitlines()[0] == "ncf,best,distance,total,settlement_radius,acceptable"
    assert out.splitlines()[-1].startswith("0.95,1000mi,1000,1280,6000,")


def test_gain(capsys):
    code, out = run(capsys, "gain")
    assert code == 0 and len(out.splitlines()) == 71


def test_media_with_flag_override(capsys):
    code, out = run(capsys, "media", "--down", "100")
    assert code == 0
    rows = {line.split(",")[0]: line for line in out.splitlines()[1:]}
    assert rows["Telepresence"].endswith("True,True")
    # best effort tops out at High
    assert rows["RichMultimodal"].endswith("False,True")


def test_tariffs(capsys):
    code, out = run(capsys, "tariffs")
    assert code == 0 and len(out.splitlines()) == 21


def test_simulate_is_deterministic(capsys):
    first = run(capsys, "simulate", "--seed", "42")
    second = run(capsys, "simulate", "--seed", "42")
    assert first[0] == 0
    assert first == second
    assert "seed,,42" in first[1]


def test_simulate_seed_flag_overrides_scenario(capsys):
    assert run(capsys, "simulate", "--seed", "43")[1] != run(capsys, "simulate")[1]


def test_simulate_trace(tmp_path, capsys):
    trace = tmp_path / "trace.jsonl"
    code, _ = run(capsys, "simulate", "--trace", str(trace))
    assert code == 0
    records = [json.loads(line) for line in trace.read_text(encoding="utf-8").splitlines()]
    assert records and {"t", "event", "session", "utilization"} <= set(records[0])


def test_simulate_without_sim_section(tmp_path, capsys):
    path = tmp_path / "econ.scn"
    path.write_text("[grid]\nncf = 0\n[residence]\nlabel = a\ndistance = 1\ntime = 1\n"
                    "housing = 100\nmode = Walk\n", encoding="utf-8")
    assert run(capsys, "simulate", "--scenario", str(path))[0] == 1


def test_compare(capsys):
    code, out = run(capsys, "compare")
    assert code == 0
    assert "CdnBased,platform_count,,1" in out
    assert "WalledGarden,platform_count,,3" in out


def test_deviations(capsys):
    code, out = run(capsys, "deviations")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "reference,paper_value,recomputed_value,note"
    assert len(lines) == 9


@pytest.mark.parametrize("command", ["table3", "gain", "optimize", "deviations"])
def test_outputs_are_stable(capsys, command):
    assert run(capsys, command)[1] == run(capsys, command)[1]

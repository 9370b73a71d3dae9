"""Command-line surface: schemas, round-trips, determinism, exit codes."""

import csv
import io
import json
from contextlib import redirect_stdout
from fractions import Fraction as F

import pytest

from sumlevels import cli


def run_cli(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli.main(argv)
    return code, buf.getvalue()


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def test_measure_exact_golden_row():
    code, out = run_cli(["measure", "--n", "4", "--method", "exact"])
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["n", "method", "exact", "approx"]
    n, method, exact, approx = rows[0]
    assert (n, method, exact) == ("4", "exact", "39/140")
    assert float(approx) == pytest.approx(39 / 140)


def test_measure_range_auto_methods():
    code, out = run_cli(["measure", "--n-range", "24:27", "--method", "auto"])
    assert code == 0
    _, rows = parse_csv(out)
    methods = {int(r[0]): r[1] for r in rows}
    assert methods[24] == methods[25] == "exact"
    assert methods[26] == methods[27] == "compensated"


def test_measure_exact_round_trips():
    code, out = run_cli(["measure", "--n-range", "1:6", "--method", "exact"])
    _, rows = parse_csv(out)
    for n, _, exact, approx in rows:
        num, den = exact.split("/")
        value = F(int(num), int(den))
        assert float(value) == pytest.approx(float(approx))


def test_measure_json_format():
    code, out = run_cli(["--format", "json", "measure", "--n", "3", "--method", "exact"])
    assert code == 0
    payload = json.loads(out)
    assert payload == [{"n": 3, "method": "exact", "exact": "3/10", "approx": 0.3}]


def test_enumerate_with_codes():
    code, out = run_cli(["enumerate", "--n", "2", "--family", "C", "--coding", "farey"])
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["level", "position", "left", "right", "diameter", "code"]
    assert [(r[2], r[3], r[5]) for r in rows] == \
        [("1/3", "1/2", "LR"), ("1/2", "2/3", "RR")]


def test_enumerate_complement():
    code, out = run_cli(["enumerate", "--n", "2", "--family", "complement"])
    _, rows = parse_csv(out)
    assert [(r[2], r[3]) for r in rows] == [("0/1", "1/3"), ("2/3", "1/1")]


def test_codes_listing_level_four():
    code, out = run_cli(["codes", "--n", "4", "--coding", "farey"])
    assert code == 0
    _, rows = parse_csv(out)
    assert [r[2] for r in rows] == \
        ["LLLR", "LLRR", "LRRR", "LRLR", "RRLR", "RRRR", "RLRR", "RLLR"]


def test_codes_cylinder_output():
    code, out = run_cli(["codes", "--n", "3", "--coding", "cylinder"])
    _, rows = parse_csv(out)
    assert [r[2] for r in rows] == ["[3]", "[2,1]", "[1,1,1]", "[1,2]"]


def test_operator_check_command():
    code, out = run_cli(["operator-check", "--n-max", "10", "--grid", "1024"])
    assert code == 0
    _, rows = parse_csv(out)
    assert rows[0][3] == "True"


def test_pressure_command():
    code, out = run_cli(["pressure", "--n", "3", "--t-list", "1", "--family", "C"])
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["n", "t", "family", "log_sum", "estimate"]
    import math
    assert float(rows[0][3]) == pytest.approx(math.log(0.3))


def test_dioph_command_deterministic():
    argv = ["dioph", "--samples", "5", "--seed", "9", "--n-grid", "5,10"]
    code1, out1 = run_cli(argv)
    code2, out2 = run_cli(argv)
    assert code1 == code2 == 0
    assert out1 == out2
    header, rows = parse_csv(out1)
    assert header == ["sample_id", "n", "khintchine", "algebraic", "theta", "ratio"]
    assert len(rows) == 10


def test_out_file(tmp_path):
    target = tmp_path / "table.csv"
    code, out = run_cli(["--out", str(target), "measure", "--n", "1", "--method", "exact"])
    assert code == 0
    assert out == ""
    assert target.read_text().splitlines()[1].startswith("1,exact,1/2,")


def test_exit_code_guard():
    code, _ = run_cli(["measure", "--n", "60", "--method", "exact"])
    assert code == cli.EXIT_GUARD


def test_exit_code_domain():
    code, _ = run_cli(["measure", "--n-range", "5:1", "--method", "exact"])
    assert code == cli.EXIT_USAGE
    code, _ = run_cli(["dioph", "--samples", "0", "--seed", "1"])
    assert code == cli.EXIT_USAGE


def test_exit_code_checkpoint(tmp_path):
    bogus = tmp_path / "bogus.ckpt"
    bogus.write_bytes(b"x" * 64)
    code, _ = run_cli(["measure", "--n", "40", "--method", "operator",
                       "--grid", "4096", "--checkpoint", str(bogus)])
    assert code == cli.EXIT_CHECKPOINT

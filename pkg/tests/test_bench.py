import pytest

from weyl_closure.bench import COLUMNS, bench, format_table, run_instance, suite_instances
from weyl_closure.cli import run_cli


def test_suite_instances():
    assert [i.name for i in suite_instances("x2y3")] == ["x2y3"]
    assert suite_instances("ssw2")[0].reference == 13
    with pytest.raises(ValueError):
        suite_instances("nope")


def test_random_suite_is_seeded():
    a = suite_instances("beukers-style-random", seed=3, count=4)
    b = suite_instances("beukers-style-random", seed=3, count=4)
    assert a == b
    assert len(a) == 4
    assert {i.order for i in a} == {"grevlex", "block(lex(x1,x2,x3),lex(Dx1,Dx2,Dx3))"}


def test_budget_becomes_a_row():
    (instance,) = suite_instances("x2y3")
    row = run_instance(instance, {"max_terms": 4})
    assert row["status"] == "budget-exceeded"
    assert row["size"] is None


def test_x2y3_table():
    df = bench("x2y3")
    assert list(df.columns) == COLUMNS
    assert df.loc[0, "status"] == "completed"
    assert bool(df.loc[0, "holonomic"])
    assert format_table(df, "csv").splitlines()[0] == ",".join(COLUMNS)
    assert "x2y3" in format_table(df)


def test_bench_cli_csv(capsys):
    assert run_cli(["bench", "x2y3", "--format", "csv"]) == 0
    header = capsys.readouterr().out.splitlines()[0]
    assert header == "instance,field,order,time,size,status,holonomic,reference"


@pytest.mark.slow
def test_ssw2_matches_reference():
    df = bench("ssw2")
    assert df.loc[0, "status"] == "completed"
    assert bool(df.loc[0, "holonomic"])

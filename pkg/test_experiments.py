"""
Sweep harness: specs, rows, CSV/JSON output and the command line
"""

import json
import math

import numpy as np
import pytest

from main import main
from trisrsma.core.errors import SweepError
from trisrsma.modules.benchmarks import SchemeId
from trisrsma.modules.experiments import (
    SweepConfig,
    SweepKind,
    SweepManager,
    SweepRow,
    SweepSpec,
    emit_csv,
    format_csv,
    run_point,
    run_sweep,
    summarize,
    summary_path,
    upa_shape,
    write_summary,
)
from trisrsma.modules.optimizer import OptimizerSettings

FAST = OptimizerSettings(max_outer_iters=40)


@pytest.fixture
def small_base(cfg):
    return cfg.with_updates(m_rows=2, m_cols=2, num_cus=2, num_pus=1, rng_seed=11)


def row(value=10.0, scheme="sdma", realization=0, se=1.0, ee=2.0, feasible=True, **kwargs):
    fields = dict(rank_ratio=1.0, iters=3, wall_ms=0.0)
    fields.update(kwargs)
    return SweepRow(sweep_value=value, scheme=scheme, realization=realization, se=se, ee=ee,
                    feasible=feasible, **fields)


@pytest.mark.parametrize("elements,shape", [(1, (1, 1)), (4, (2, 2)), (6, (2, 3)), (7, (1, 7)), (9, (3, 3)), (16, (4, 4))])
def test_upa_shape(elements, shape):
    assert upa_shape(elements) == shape


@pytest.mark.parametrize("elements", [0, -4, 2.5])
def test_upa_shape_rejects(elements):
    with pytest.raises(SweepError):
        upa_shape(elements)


def test_sweep_kind_parse():
    assert SweepKind.parse(" Power ") is SweepKind.POWER
    with pytest.raises(SweepError):
        SweepKind.parse("bandwidth")


@pytest.mark.parametrize("overrides", [
    dict(grid=()),
    dict(grid=(4.0, 4.0)),
    dict(grid=(5.0, 4.0)),
    dict(grid=(4.0, math.nan)),
    dict(grid=(4.0, math.inf)),
    dict(realizations=0),
    dict(workers=0),
    dict(schemes=()),
    dict(kind=SweepKind.ELEMENTS, grid=(4, 6.5)),
])
def test_spec_validation(small_base, overrides):
    fields = dict(kind=SweepKind.POWER, grid=(4.0, 5.0), realizations=1, schemes=("random",), base=small_base)
    fields.update(overrides)
    with pytest.raises(SweepError):
        SweepSpec(**fields)


def test_spec_normalizes_fields(small_base, tmp_path):
    spec = SweepSpec(kind=SweepKind.POWER, grid=[4, 5], realizations=2, schemes=("sdma", "random", "sdma"),
                     base=small_base, output=str(tmp_path / "out.csv"))
    assert spec.grid == (4.0, 5.0)
    assert spec.schemes == (SchemeId.SDMA, SchemeId.RANDOM_PRECODING)
    assert spec.output == tmp_path / "out.csv"
    assert spec.tasks == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_for_study_defaults(cfg):
    elements = SweepSpec.for_study(SweepKind.ELEMENTS, cfg)
    assert elements.grid == tuple(float(v) for v in SweepConfig.ELEMENT_GRID)
    assert elements.realizations == SweepConfig.DEFAULT_REALIZATIONS
    assert elements.base.eta0_fraction == SweepConfig.ELEMENTS_ETA0_FRACTION
    assert elements.base.p_max_watts == pytest.approx(10.0)
    at16 = elements.config_at(16)
    assert (at16.m_rows, at16.m_cols) == (4, 4)

    power = SweepSpec.for_study(SweepKind.POWER, cfg, schemes=("proposed",))
    assert power.grid == tuple(SweepConfig.POWER_GRID_DBW)
    assert (power.base.m_rows, power.base.m_cols) == (3, 3)
    assert power.base.eta0_fraction == SweepConfig.POWER_ETA0_FRACTION
    assert power.config_at(13.0).p_max_watts == pytest.approx(10 ** 1.3)

    pareto = SweepSpec.for_study(SweepKind.PARETO, cfg, grid=[4.0, 13.0], realizations=3)
    assert pareto.grid == (4.0, 13.0)
    assert pareto.realizations == 3
    assert pareto.base.eta0_fraction == SweepConfig.PARETO_ETA0_FRACTION


def test_format_csv_cells():
    text = format_csv([
        row(scheme="sdma", realization=2, se=1.23456789012, ee=3e6, iters=7),
        row(value=4.5, scheme="noma", feasible=False, se=0.0, ee=0.0, rank_ratio=math.nan, iters=0),
    ])
    lines = text.split("\n")
    assert lines[0] == ",".join(SweepConfig.CSV_HEADER)
    assert lines[1] == "10,sdma,2,1.23456789,3000000,true,1,7,0"
    assert lines[2] == "4.5,noma,0,0,0,false,nan,0,0"
    assert lines[3] == ""
    with pytest.raises(SweepError):
        format_csv([])


def test_emit_csv_and_summary_files(tmp_path):
    rows = [row(se=1.0, ee=4.0), row(se=3.0, ee=4.0, realization=1, feasible=False)]
    out = emit_csv(rows, tmp_path / "nested" / "power.csv")
    data = out.read_bytes()
    assert b"\r" not in data
    assert data.decode("utf-8") == format_csv(rows)

    path = summary_path(out)
    assert path == tmp_path / "nested" / "power.summary.json"
    summary = summarize(rows)
    write_summary(summary, path)
    assert json.loads(path.read_text(encoding="utf-8")) == summary


def test_summarize_groups():
    summary = summarize([
        row(value=5.0, scheme="sdma", se=1.0, ee=4.0),
        row(value=5.0, scheme="sdma", se=3.0, ee=4.0, realization=1, feasible=False),
        row(value=4.0, scheme="proposed", se=2.0, ee=8.0),
    ])
    assert [(s["sweep_value"], s["scheme"]) for s in summary] == [(4.0, "proposed"), (5.0, "sdma")]
    single, pair = summary
    assert single["runs"] == 1
    assert single["se_stderr"] == 0.0
    assert pair["se_mean"] == pytest.approx(2.0)
    assert pair["se_stderr"] == pytest.approx(1.0)
    assert pair["ee_stderr"] == 0.0
    assert pair["feasible_fraction"] == 0.5


def test_row_flagging():
    assert not row().flagged
    assert row(feasible=False).flagged
    assert row(error="solver broke down").flagged


def test_one_point_one_realization(small_base):
    spec = SweepSpec(kind=SweepKind.POWER, grid=(10.0,), realizations=1, schemes=("random",),
                     base=small_base, settings=FAST, record_wall_time=False)
    rows = SweepManager(spec).run()
    assert len(rows) == 1
    assert rows[0].wall_ms == 0.0
    assert rows[0].scheme == "random"
    assert len(format_csv(rows).splitlines()) == 2
    assert SweepManager(spec).verify_rows(rows) == []


def test_rerun_is_byte_identical(small_base):
    spec = SweepSpec(kind=SweepKind.POWER, grid=(8.0, 10.0), realizations=2, schemes=("random", "fixed"),
                     base=small_base, settings=FAST, record_wall_time=False)
    first = format_csv(SweepManager(spec).run())
    second = format_csv(run_sweep(spec))
    assert first == second
    assert len(first.splitlines()) == 1 + 2 * 2 * 2


def test_infeasible_rows_are_flagged(small_base):
    spec = SweepSpec(kind=SweepKind.POWER, grid=(10.0,), realizations=1, schemes=("random", "fixed"),
                     base=small_base.with_updates(r_th_bps=1e12), record_wall_time=False)
    rows = run_point(spec, 0, 0)
    assert [r.scheme for r in rows] == ["random", "fixed"]
    assert all(r.flagged and r.se == 0.0 and r.ee == 0.0 for r in rows)
    assert summarize(rows)[0]["feasible_fraction"] == 0.0


def test_cli_sweep_writes_outputs(tmp_path):
    out = tmp_path / "power.csv"
    code = main(["sweep", "--kind", "power", "--grid", "10", "--realizations", "1",
                 "--schemes", "random", "--no-timing", "--out", str(out)])
    assert code in (SweepConfig.EXIT_OK, SweepConfig.EXIT_FLAGGED)
    lines = out.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2
    assert lines[1].startswith("10,random,0,")
    assert lines[1].endswith(",0")
    assert summary_path(out).exists()


def test_cli_errors(tmp_path):
    assert main(["sweep", "--kind", "power", "--grid", "5,4", "--schemes", "random",
                 "--out", str(tmp_path / "x.csv")]) == SweepConfig.EXIT_ERROR
    assert main(["solve", "--config", str(tmp_path / "missing.cfg")]) == SweepConfig.EXIT_ERROR
    bad = tmp_path / "bad.cfg"
    bad.write_text("m_rows: three\n", encoding="utf-8")
    assert main(["solve", "--config", str(bad)]) == SweepConfig.EXIT_ERROR


def test_cli_solve_dumps_tma_frame(tmp_path):
    cfg_file = tmp_path / "small.cfg"
    cfg_file.write_text("m_rows: 2\nm_cols: 2\nnum_cus: 2\nnum_pus: 1\n", encoding="utf-8")
    frame = tmp_path / "frame.csv"
    trace = tmp_path / "trace.csv"
    code = main(["solve", "--config", str(cfg_file), "--scheme", "random",
                 "--dump-tma", str(frame), "--trace", str(trace)])
    assert code in (SweepConfig.EXIT_OK, SweepConfig.EXIT_FLAGGED)
    assert frame.exists()
    assert frame.read_text(encoding="utf-8").splitlines()


@pytest.mark.slow
def test_elements_trend(cfg):
    spec = SweepSpec.for_study(
        SweepKind.ELEMENTS, cfg.with_updates(num_cus=2, num_pus=2), grid=[4, 9, 16],
        realizations=2, schemes=("proposed", "sdma", "no_ris"), settings=FAST, record_wall_time=False,
    )
    summary = {(s["sweep_value"], s["scheme"]): s for s in summarize(SweepManager(spec).run())}
    for value in spec.grid:
        proposed = summary[(value, "proposed")]["se_mean"]
        assert summary[(value, "sdma")]["se_mean"] >= 0.0
        assert proposed >= summary[(value, "sdma")]["se_mean"] * 0.98
        assert proposed >= summary[(value, "no_ris")]["se_mean"]
    means = [summary[(value, "proposed")]["se_mean"] for value in spec.grid]
    assert means[0] < means[1] < means[2]



@pytest.mark.slow
def test_power_trend_beats_random(cfg):
    spec = SweepSpec.for_study(
        SweepKind.POWER, cfg.with_updates(num_cus=2, num_pus=2), grid=[4.0, 8.0, 13.0],
        realizations=3, schemes=("proposed", "random"), settings=FAST, record_wall_time=False,
    )
    rows = SweepManager(spec).run()
    summary = {(s["sweep_value"], s["scheme"]): s for s in summarize(rows)}
    for value in spec.grid:
        assert summary[(value, "proposed")]["ee_mean"] >= summary[(value, "random")]["ee_mean"]
    assert np.all([r.feasible for r in rows if r.scheme == "proposed"])


@pytest.mark.slow
def test_pareto_gap_to_sdma_narrows(cfg):
    spec = SweepSpec.for_study(
        SweepKind.PARETO, cfg.with_updates(m_rows=2, m_cols=2, num_cus=2, num_pus=2), grid=[4.0, 5.0, 12.0, 13.0],
        realizations=2, schemes=("proposed", "sdma"), settings=FAST, record_wall_time=False,
    )
    assert spec.base.eta0_fraction == SweepConfig.PARETO_ETA0_FRACTION
    summary = {(s["sweep_value"], s["scheme"]): s for s in summarize(SweepManager(spec).run())}

    def gap(value):
        sdma = summary[(value, "sdma")]["ee_mean"]
        return abs(summary[(value, "proposed")]["ee_mean"] - sdma) / sdma

    low = (gap(4.0) + gap(5.0)) / 2
    high = (gap(12.0) + gap(13.0)) / 2
    assert high <= low + 0.02
    assert summary[(13.0, "proposed")]["se_mean"] >= summary[(4.0, "proposed")]["se_mean"] * 0.98

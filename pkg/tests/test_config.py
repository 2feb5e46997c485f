import pytest

from kerrwave.config import RunConfig
from kerrwave.errors import ConfigError

SAMPLE = """\
# pulse in a Kerr medium
[run]
scheme = eh
T = 0.4
snapshots = 0.0, 0.2, 0.4

[discretization]
p = 2
k = 1
cells = 40
tau = 0.005

[material]
chi3 = 0.2
"""


def test_parse_sample():
    cfg = RunConfig.from_text(SAMPLE, source="sample.ini")
    assert cfg.scheme == "eh" and cfg.p == 2 and cfg.cells == 40 and cfg.chi3 == 0.2
    assert cfg.snapshots == (0.0, 0.2, 0.4)
    assert cfg.steps == 80
    cfg.validate()


def test_round_trip():
    cfg = RunConfig.from_text(SAMPLE)
    again = RunConfig.from_text(cfg.to_text())
    assert again == cfg
    assert RunConfig.from_text(RunConfig().to_text()) == RunConfig()


def test_file_round_trip(tmp_path):
    cfg = RunConfig(scheme="oracle", ladder_cells=(8, 16), tau=0.004, T=0.8)
    cfg.write(tmp_path / "c.ini")
    assert RunConfig.from_file(tmp_path / "c.ini") == cfg


@pytest.mark.parametrize(
    "text, line",
    [
        ("[run]\nscheme = eh\nbogus = 1\n", 3),
        ("[run]\n\n[nowhere]\n", 3),
        ("scheme = eh\n", 1),
        ("[run]\nT 0.4\n", 2),
        ("[discretization]\np = two\n", 2),
        ("[run\n", 1),
    ],
)
def test_parse_errors_point_at_line(text, line):
    with pytest.raises(ConfigError) as info:
        RunConfig.from_text(text, source="bad.ini")
    assert info.value.line == line
    assert str(info.value).startswith(f"bad.ini:{line}:")


@pytest.mark.parametrize(
    "text, line",
    [
        ("[run]\nscheme = eh\n\n[material]\nchi3 = -0.1\n", 5),
        ("[run]\nT = 0.8\n[discretization]\ntau = 0.3\n", 4),
        ("[run]\nmode = sweep\n", 2),
        ("[run]\nsnapshots = 0.0, 0.0013\n", 2),
        ("[discretization]\np = 0\n", 2),
    ],
)
def test_validation_errors_point_at_line(text, line):
    cfg = RunConfig.from_text(text, source="bad.ini")
    with pytest.raises(ConfigError) as info:
        cfg.validate()
    assert info.value.line == line


def test_validation_without_source():
    with pytest.raises(ConfigError):
        RunConfig(k=-1).validate()


def test_snapshots_beyond_final_time_are_dropped():
    cfg = RunConfig(T=0.4, tau=0.01)
    assert cfg.snapshot_steps() == [0, 20, 40]

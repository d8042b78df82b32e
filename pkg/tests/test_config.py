"""
配置加载、校验与命令行退出码
"""

import pytest
import yaml

from src import cli
from src.config.settings import PROJECT_ROOT, RunConfig, load_config
from src.utils.errors import ConfigError
from src.utils.io import read_json, write_json


def write_config(tmp_path, **overrides):
    data = {
        "field": {"p": 3, "r": 1},
        "extension": {"D": [0, 1]},
        "subgroup": {"kind": "gamma"},
        "tree": {"valence_record": str(tmp_path / "valence_record.json")},
        "output": {"dir": str(tmp_path / "results"), "timestamp": False},
        "logging": {"level": "INFO", "file": str(tmp_path / "logs" / "app.log")},
    }
    for section, values in overrides.items():
        data.setdefault(section, {}).update(values)
    path = tmp_path / "config.yaml"
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(data, f, allow_unicode=True)
    return str(path)


class TestLoadConfig:

    def test_repo_config(self):
        config = load_config(str(PROJECT_ROOT / "config.yaml"))
        assert config.field.p == 3
        spec = config.spec()
        assert spec.is_congruence
        assert config.ideal().contains(config.ext().omega)

    def test_gamma_config(self, tmp_path):
        config = load_config(write_config(tmp_path))
        assert not config.spec().is_congruence
        assert config.ext().d == 1

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(str(tmp_path / "nope.yaml"))

    @pytest.mark.parametrize("section,values", [
        ("field", {"p": 2}),
        ("field", {"p": 9}),
        ("field", {"p": 11}),
        ("field", {"r": 0}),
        ("extension", {"D": [0, 0, 1]}),
        ("extension", {"D": [0, 0, 0, 1]}),
        ("subgroup", {"kind": "congruence", "J": [[[1], []]]}),
        ("subgroup", {"kind": "parahoric"}),
        ("project", {"schema_version": 2}),
        ("tree", {"radius": -1}),
    ])
    def test_rejected(self, tmp_path, section, values):
        with pytest.raises(ConfigError):
            load_config(write_config(tmp_path, **{section: values}))

    def test_env_substitution(self, tmp_path, monkeypatch):
        monkeypatch.setenv("LAB_OUT_DIR", str(tmp_path / "env_out"))
        config = load_config(write_config(tmp_path, output={"dir": "${LAB_OUT_DIR}"}))
        assert config.output.dir == str(tmp_path / "env_out")

    def test_env_default(self, tmp_path, monkeypatch):
        monkeypatch.delenv("LAB_OUT_DIR", raising=False)
        config = load_config(write_config(tmp_path, output={"dir": "${LAB_OUT_DIR:-fallback/results}"}))
        assert config.output.dir == "fallback/results"

    def test_repo_config_reads_env(self, monkeypatch):
        monkeypatch.delenv("LAB_OUTPUT_DIR", raising=False)
        monkeypatch.setenv("LAB_LOG_LEVEL", "DEBUG")
        config = load_config(str(PROJECT_ROOT / "config.yaml"))
        assert config.output.dir == "outputs/results"
        assert config.logging.level == "DEBUG"


class TestRunConfig:

    def test_overrides(self, tmp_path):
        config = load_config(write_config(tmp_path))
        run = RunConfig.from_overrides(config, radius=2, deg_bound=1, out=str(tmp_path / "run"))
        assert run.config.tree.radius == 2
        assert run.config.search.deg_bound == 1
        assert run.out_dir == tmp_path / "run"
        assert config.tree.radius == 4

    def test_negative_radius(self, tmp_path):
        config = load_config(write_config(tmp_path))
        with pytest.raises(ConfigError):
            RunConfig.from_overrides(config, radius=-1)


class TestCli:

    def test_config_error_exit_code(self, tmp_path):
        path = write_config(tmp_path, field={"p": 2})
        assert cli.main(["stabilizer", "--config", path]) == cli.EXIT_CONFIG

    def test_stabilizer(self, tmp_path):
        out = tmp_path / "stab"
        assert cli.main(["stabilizer", "--config", write_config(tmp_path), "--out", str(out)]) == cli.EXIT_OK
        data = read_json(out / "stabilizer.json")
        assert data["stabilizer"]["order"] == 24
        assert data["subgroup"]["kind"] == "gamma"
        assert "timestamp" not in data
        assert (out / "summary.txt").exists()

    def test_class_group(self, tmp_path):
        out = tmp_path / "pic"
        path = write_config(tmp_path, extension={"D": [0, -1, 0, 1]})
        assert cli.main(["class-group", "--config", path, "--out", str(out)]) == cli.EXIT_OK
        data = read_json(out / "class_group.json")
        assert data["curve_point_count"] == 4

    def test_tree_ball(self, tmp_path):
        out = tmp_path / "ball"
        args = ["tree-ball", "--config", write_config(tmp_path), "--out", str(out), "--radius", "2"]
        assert cli.main(args) == cli.EXIT_OK
        data = read_json(out / "tree_ball.json")
        assert data["is_tree"]
        assert len(data["ball"]["vertices"]) == 17

    def test_euler_refused_for_gamma(self, tmp_path):
        out = tmp_path / "euler"
        args = ["euler", "--config", write_config(tmp_path), "--out", str(out), "--radius", "2"]
        assert cli.main(args) == cli.EXIT_CONFIG

    def test_tree_ball_valence_record(self, tmp_path):
        path = write_config(tmp_path)
        record_path = tmp_path / "valence_record.json"
        out = tmp_path / "ball"
        args = ["tree-ball", "--config", path, "--out", str(out), "--radius", "2"]
        assert cli.main(args) == cli.EXIT_OK
        data = read_json(out / "tree_ball.json")
        assert data["ball"]["valence"] == {"0": 4, "1": 4}
        record = read_json(record_path)
        assert list(record.values()) == [{"0": 4, "1": 4}]

        # 第二次运行与记录一致
        assert cli.main(args) == cli.EXIT_OK

        key = next(iter(record))
        write_json(record_path, {key: {"0": 4, "1": 5}}, timestamp=False)
        assert cli.main(args) == cli.EXIT_INVARIANT

    def test_value_error_exit_code(self, tmp_path, monkeypatch):
        def broken(run, args):
            raise ValueError("bad input")

        monkeypatch.setitem(cli.COMMANDS, "stabilizer", broken)
        assert cli.main(["stabilizer", "--config", write_config(tmp_path)]) == cli.EXIT_CONFIG

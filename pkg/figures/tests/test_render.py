"""Renderer and CLI tests: spec validation, figure content, determinism."""

import json
import shutil
from pathlib import Path

import pytest

from shrinklab_figures.cli import main
from shrinklab_figures.render import FigureSpec, figure_spec_from_json, render
from shrinklab_figures.schema import SWEEP_COLUMNS

FIXTURES = Path(__file__).parent / "fixtures"
CONSISTENCY = FIXTURES / "consistency" / "rows.csv"
CONCENTRATION = FIXTURES / "concentration" / "rows.csv"
LEMMA1 = FIXTURES / "lemma1" / "rows.csv"

HEADER = ",".join(SWEEP_COLUMNS)


def _spec(out: Path, kind: str = "consistency", input_csv: Path = CONSISTENCY, **kwargs) -> FigureSpec:
    return FigureSpec(input=str(input_csv), kind=kind, output=str(out), **kwargs)


class TestFigureSpec:
    def test_bad_kind(self, tmp_path):
        with pytest.raises(ValueError, match="kind must be one of"):
            _spec(tmp_path / "x.svg", kind="histogram")

    def test_bad_suffix(self, tmp_path):
        with pytest.raises(ValueError, match="end in .svg or .png"):
            _spec(tmp_path / "x.pdf")

    def test_empty_families(self, tmp_path):
        with pytest.raises(ValueError, match="must not be empty"):
            _spec(tmp_path / "x.svg", families=())

    def test_duplicate_families(self, tmp_path):
        with pytest.raises(ValueError, match="duplicates"):
            _spec(tmp_path / "x.svg", families=("gdp", "gdp"))

    def test_from_json_round(self, tmp_path):
        obj = {
            "input": str(CONSISTENCY),
            "kind": "consistency",
            "output": str(tmp_path / "x.svg"),
            "log_y": False,
            "families": ["laplace", "gdp"],
        }
        spec = figure_spec_from_json(obj)
        assert spec.families == ("laplace", "gdp")
        assert spec.log_y is False
        assert spec.log_x is None

    @pytest.mark.parametrize(
        "patch, message",
        [
            ({"color": "red"}, "unknown figure spec field"),
            ({"output": None}, "missing required figure spec field"),
            ({"log_x": 1}, "log_x must be true or false"),
            ({"families": "laplace"}, "families must be a list of strings"),
        ],
    )
    def test_from_json_rejects(self, tmp_path, patch, message):
        obj = {"input": str(CONSISTENCY), "kind": "consistency", "output": str(tmp_path / "x.svg")}
        obj.update(patch)
        obj = {k: v for k, v in obj.items() if v is not None}
        with pytest.raises(ValueError, match=message):
            figure_spec_from_json(obj)

    def test_from_json_non_object(self):
        with pytest.raises(ValueError, match="JSON object"):
            figure_spec_from_json([1])


class TestRender:
    def test_svg_deterministic(self, tmp_path):
        a = render(_spec(tmp_path / "a.svg"))
        b = render(_spec(tmp_path / "b.svg"))
        first, second = Path(a).read_bytes(), Path(b).read_bytes()
        assert first.startswith(b"<?xml")
        assert first == second

    def test_png_deterministic(self, tmp_path):
        a = render(_spec(tmp_path / "a.png"))
        b = render(_spec(tmp_path / "b.png"))
        first, second = Path(a).read_bytes(), Path(b).read_bytes()
        assert first.startswith(b"\x89PNG")
        assert first == second

    def test_consistency_has_all_family_labels(self, tmp_path):
        text = Path(render(_spec(tmp_path / "a.svg"))).read_text()
        for family in ("laplace", "student_t", "gdp", "horseshoe_like"):
            assert family in text
        assert "C = 1" in text

    def test_family_subset_filters_legend(self, tmp_path):
        text = Path(
            render(_spec(tmp_path / "a.svg", families=("laplace", "gdp")))
        ).read_text()
        assert "laplace" in text and "gdp" in text
        assert "student_t" not in text

    def test_unknown_family_in_subset(self, tmp_path):
        with pytest.raises(ValueError, match="families not in CSV: weibull"):
            render(_spec(tmp_path / "a.svg", families=("weibull",)))

    def test_bound_decay_is_dashed(self, tmp_path):
        text = Path(
            render(_spec(tmp_path / "a.svg", kind="bound-decay", input_csv=CONCENTRATION))
        ).read_text()
        assert "stroke-dasharray" in text
        assert "C = 1" in text

    def test_lemma1_two_curves(self, tmp_path):
        text = Path(render(_spec(tmp_path / "a.svg", kind="lemma1", input_csv=LEMMA1))).read_text()
        assert "type I MC rate" in text
        assert "exponential bound" in text
        assert "stroke-dasharray" in text

    def test_lemma1_on_consistency_csv(self, tmp_path):
        with pytest.raises(ValueError, match="lemma1_type1"):
            render(_spec(tmp_path / "a.svg", kind="lemma1"))

    def test_bound_decay_all_vacuous(self, tmp_path):
        row = "100,5,2,laplace,0.1,,,inf,false,,,1"
        csv_path = tmp_path / "rows.csv"
        csv_path.write_text(HEADER + "\n" + row + "\n")
        with pytest.raises(ValueError, match="no finite neg_log_bound"):
            render(_spec(tmp_path / "a.svg", kind="bound-decay", input_csv=csv_path))

    def test_empty_csv_writes_nothing(self, tmp_path):
        csv_path = tmp_path / "rows.csv"
        csv_path.write_text(HEADER + "\n")
        out = tmp_path / "a.svg"
        with pytest.raises(ValueError, match="no data rows"):
            render(_spec(out, input_csv=csv_path))
        assert not out.exists()

    def test_schema_mismatch_writes_nothing(self, tmp_path):
        csv_path = tmp_path / "rows.csv"
        csv_path.write_text("n,family\n100,laplace\n")
        out = tmp_path / "a.svg"
        with pytest.raises(ValueError, match="header mismatch"):
            render(_spec(out, input_csv=csv_path))
        assert not out.exists()

    def test_output_directory_created(self, tmp_path):
        out = tmp_path / "deep" / "nested" / "fig.svg"
        render(_spec(out))
        assert out.is_file()

    def test_renders_without_manifest(self, tmp_path):
        # same rows, no sibling manifest.json: legend simply loses its title
        csv_path = tmp_path / "rows.csv"
        shutil.copy(CONSISTENCY, csv_path)
        text = Path(render(_spec(tmp_path / "a.svg", input_csv=csv_path))).read_text()
        assert "C = 1" not in text
        assert "laplace" in text

    def test_log_axis_override(self, tmp_path):
        # linear y keeps exact zeros; log default would pin them at a floor
        a = Path(render(_spec(tmp_path / "a.svg", log_y=False))).read_bytes()
        b = Path(render(_spec(tmp_path / "b.svg"))).read_bytes()
        assert a != b


class TestCli:
    def _inline(self, tmp_path, **extra) -> str:
        obj = {"input": str(CONSISTENCY), "kind": "consistency", "output": str(tmp_path / "cli.svg")}
        obj.update(extra)
        return json.dumps(obj)

    def test_render_inline_spec(self, tmp_path, capsys):
        assert main(["render", "--spec", self._inline(tmp_path)]) == 0
        out = capsys.readouterr().out.strip()
        assert out.endswith("cli.svg")
        assert Path(out).is_file()

    def test_render_spec_file(self, tmp_path, capsys):
        spec_path = tmp_path / "fig.json"
        spec_path.write_text(self._inline(tmp_path))
        assert main(["render", "--spec", str(spec_path)]) == 0
        assert (tmp_path / "cli.svg").is_file()

    def test_schema_mismatch_exits_one_with_diff(self, tmp_path, capsys):
        csv_path = tmp_path / "rows.csv"
        csv_path.write_text("n,clan\n1,x\n")
        code = main(["render", "--spec", self._inline(tmp_path, input=str(csv_path))])
        err = capsys.readouterr().err
        assert code == 1
        assert "missing" in err and "unexpected: clan" in err

    def test_invalid_spec_json(self, capsys):
        assert main(["render", "--spec", "{broken"]) == 1
        assert "invalid JSON" in capsys.readouterr().err

    def test_missing_input_file(self, tmp_path, capsys):
        code = main(["render", "--spec", self._inline(tmp_path, input=str(tmp_path / "nope.csv"))])
        assert code == 1

    def test_no_arguments_is_usage_error(self, capsys):
        assert main([]) != 0

    def test_unknown_flag(self, capsys):
        assert main(["render", "--spec", "{}", "--fast"]) != 0

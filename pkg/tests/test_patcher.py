import json
import shutil
from pathlib import Path

import pytest

from voltpick.analyzer import analyze_corpus
from voltpick.errors import OverlapError, StaleSite, TemplateMissing
from voltpick.languages import minilang_profile
from voltpick.patcher import (
    MODE_DRY_RUN,
    MODE_IN_PLACE,
    Patch,
    apply_patches,
    plan_patches,
)
from voltpick.recommend import Recommendation, RecommendationSet
from voltpick.render import render_report
from voltpick.recommend import recommendation_set_from_dict, recommendation_set_to_dict

MINILANG = minilang_profile()


def rec_set(recs):
    out = RecommendationSet("fp", "small")
    out.recommendations = recs
    return out


def change(site_id, current, new):
    return Recommendation(site_id, current, new, 10.0, 5.0, 0.5)


def keep(site_id, current):
    return Recommendation(site_id, current, current, 10.0, 10.0, 0.0)


@pytest.fixture
def corpus(tmp_path):
    path = tmp_path / "app.mini"
    path.write_text("let xs = array_list()\n"
                    "xs.push(1)\n"
                    "let ys = hash_set()\n"
                    "ys.add(2)\n")
    return path


class TestPlanPatches:
    def test_keep_recommendations_produce_no_patches(self, corpus):
        recs = rec_set([keep(f"{corpus}:1:10", "array_list")])
        assert plan_patches(recs, [corpus], MINILANG) == []

    def test_change_produces_token_patch(self, corpus):
        recs = rec_set([change(f"{corpus}:1:10", "array_list", "linked_list")])
        patches = plan_patches(recs, [corpus], MINILANG)
        assert len(patches) == 1
        patch = patches[0]
        assert patch.original_text == "array_list"
        assert patch.replacement_text == "linked_list"
        assert patch.byte_start == 9
        assert patch.byte_end == 19

    def test_moved_site_is_stale(self, corpus):
        recs = rec_set([change(f"{corpus}:1:10", "array_list", "linked_list")])
        corpus.write_text("# new header line\n" + corpus.read_text())
        with pytest.raises(StaleSite):
            plan_patches(recs, [corpus], MINILANG)

    def test_changed_impl_is_stale(self, corpus):
        recs = rec_set([change(f"{corpus}:1:10", "array_list", "linked_list")])
        corpus.write_text(corpus.read_text().replace("array_list", "block_deque"))
        with pytest.raises(StaleSite):
            plan_patches(recs, [corpus], MINILANG)

    def test_missing_template(self, corpus):
        profile = minilang_profile()
        del profile.substitution_template["linked_list"]
        recs = rec_set([change(f"{corpus}:1:10", "array_list", "linked_list")])
        with pytest.raises(TemplateMissing):
            plan_patches(recs, [corpus], profile)


class TestApplyPatches:
    def test_dry_run_emits_diff_and_touches_nothing(self, corpus):
        before = corpus.read_text()
        recs = rec_set([change(f"{corpus}:1:10", "array_list", "linked_list")])
        patches = plan_patches(recs, [corpus], MINILANG)
        diff = apply_patches(patches, MODE_DRY_RUN)
        assert corpus.read_text() == before
        assert f"--- a/{corpus}" in diff
        assert f"+++ b/{corpus}" in diff
        assert "-let xs = array_list()" in diff
        assert "+let xs = linked_list()" in diff
        assert "@@" in diff

    def test_in_place_equals_dry_run_prediction(self, corpus):
        recs = rec_set([
            change(f"{corpus}:1:10", "array_list", "linked_list"),
            change(f"{corpus}:3:10", "hash_set", "avl_tree_set"),
        ])
        patches = plan_patches(recs, [corpus], MINILANG)
        diff = apply_patches(patches, MODE_DRY_RUN)
        predicted = []
        for line in diff.splitlines():
            if line.startswith("+") and not line.startswith("+++"):
                predicted.append(line[1:])
            elif line.startswith(" "):
                predicted.append(line[1:])
        apply_patches(patches, MODE_IN_PLACE)
        assert corpus.read_text().splitlines() == predicted
        assert "linked_list" in corpus.read_text()
        assert "avl_tree_set" in corpus.read_text()

    def test_empty_patch_list_empty_diff(self):
        assert apply_patches([], MODE_DRY_RUN) == ""
        assert apply_patches([], MODE_IN_PLACE) == []

    def test_overlapping_patches_rejected(self, corpus):
        a = Patch(str(corpus), 1, 9, 19, "array_list", "x", "s1")
        b = Patch(str(corpus), 1, 15, 25, "list()", "y", "s2")
        with pytest.raises(OverlapError):
            apply_patches([a, b], MODE_DRY_RUN)

    def test_only_declared_ranges_change(self, corpus):
        original = corpus.read_bytes()
        recs = rec_set([change(f"{corpus}:3:10", "hash_set", "avl_tree_set")])
        patches = plan_patches(recs, [corpus], MINILANG)
        apply_patches(patches, MODE_IN_PLACE)
        patched = corpus.read_bytes()
        start, end = patches[0].byte_start, patches[0].byte_end
        assert patched[:start] == original[:start]
        assert patched[start:start + len(b"avl_tree_set")] == b"avl_tree_set"
        assert patched[start + len(b"avl_tree_set"):] == original[end:]

    def test_drifted_bytes_detected_at_apply_time(self, corpus):
        recs = rec_set([change(f"{corpus}:1:10", "array_list", "linked_list")])
        patches = plan_patches(recs, [corpus], MINILANG)
        corpus.write_text(corpus.read_text().replace("array_list", "block_deque"))
        with pytest.raises(StaleSite):
            apply_patches(patches, MODE_DRY_RUN)


class TestFixtureFixpoint:
    """Patching the fixture corpus converges: a second pass changes nothing."""

    def make_corpus(self, tmp_path):
        fixture = Path(__file__).parent / "fixtures" / "minilang"
        for name in ("inventory.mini", "report.mini"):
            shutil.copy(fixture / name, tmp_path / name)
        return [tmp_path / "inventory.mini", tmp_path / "report.mini"]

    def fixture_profile(self):
        import fixture_profile as tables
        from voltpick import RunPlan, Scenario, builtin_groups, build_profile
        from voltpick.meter import MeterConfig, open_meter

        script = tables.build_script(runs_per_cell=2)
        meter = open_meter(MeterConfig("synthetic", script=script))
        return build_profile(builtin_groups(), Scenario("small", 16, 8),
                             meter, RunPlan(total_runs=2, warmup_discard=0))

    def test_patch_then_recommend_reaches_fixpoint(self, tmp_path, monkeypatch):
        import fixture_profile as tables
        from voltpick.recommend import recommend_program

        monkeypatch.chdir(tmp_path)
        paths = [p.name for p in self.make_corpus(tmp_path)]
        profile = self.fixture_profile()

        report = analyze_corpus(paths, MINILANG)
        first = recommend_program(report, profile)
        changes = {r.site_id: (r.current_impl, r.recommended_impl)
                   for r in first.recommendations if r.is_change}
        assert changes == tables.EXPECTED_CHANGES

        patches = plan_patches(first, paths, MINILANG)
        apply_patches(patches, MODE_IN_PLACE)

        fixture = Path(__file__).parent / "fixtures" / "minilang"
        for name in paths:
            expected = (fixture / "expected_patched" / name).read_text()
            assert Path(name).read_text() == expected

        second = recommend_program(analyze_corpus(paths, MINILANG), profile)
        assert all(not r.is_change for r in second.recommendations)
        assert plan_patches(second, paths, MINILANG) == []

    def test_dry_run_matches_committed_diff(self, tmp_path, monkeypatch):
        from voltpick.recommend import recommend_program

        monkeypatch.chdir(tmp_path)
        paths = [p.name for p in self.make_corpus(tmp_path)]
        profile = self.fixture_profile()
        recs = recommend_program(analyze_corpus(paths, MINILANG), profile)
        diff = apply_patches(plan_patches(recs, paths, MINILANG), MODE_DRY_RUN)
        fixture = Path(__file__).parent / "fixtures" / "minilang"
        assert diff == (fixture / "expected_patch.diff").read_text()


class TestRenderReport:
    def sample_set(self):
        out = RecommendationSet("fp", "small")
        out.recommendations = [Recommendation(
            "s:1:1", "array_list", "linked_list", 100.0, 70.0, 0.30,
            rationale=["insert(end): array_list: 10 x 10 J = 100"])]
        out.aggregate_current_joules = 100.0
        out.aggregate_recommended_joules = 70.0
        return out

    def test_empty_table_has_header_and_zero_aggregate(self):
        text = render_report(RecommendationSet("fp", "small"), "table")
        assert "site" in text.splitlines()[0]
        assert "aggregate: 0 J -> 0 J (savings 0.0%" in text

    def test_savings_percent_formatting(self):
        text = render_report(self.sample_set(), "table")
        assert "30.0%" in text

    def test_csv_stable(self):
        text = render_report(self.sample_set(), "csv")
        lines = text.splitlines()
        assert lines[0].startswith("site_id,current_impl,recommended_impl")
        assert lines[1].split(",")[2] == "linked_list"

    def test_json_round_trips(self):
        original = self.sample_set()
        text = render_report(original, "json")
        back = recommendation_set_from_dict(json.loads(text))
        assert (recommendation_set_to_dict(back)
                == recommendation_set_to_dict(original))

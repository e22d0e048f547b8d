"""Corpus loading, instance construction, mixing, and subsampling."""

import json

import pytest

from gencontrast.data import (CorpusFormatError, NliTriplet, TaskKind,
                              UnlabeledSentence, build_instances, load_nli,
                              load_qa, load_unlabeled, mix_instances,
                              normalize_for_matching, pairs_to_triplets,
                              subsample)
from gencontrast.prompts import PromptKind, render


def write_lines(path, lines, newline="\n"):
    path.write_bytes(newline.join(lines).encode("utf-8"))


class TestLoadNli:
    def test_happy_path(self, tmp_path):
        path = tmp_path / "nli.jsonl"
        write_lines(path, [
            json.dumps({"premise": "p1", "entailment": "e1", "contradiction": "c1"}),
            json.dumps({"premise": "p2", "entailment": "e2", "contradiction": "c2"}),
        ])
        triplets = load_nli(path)
        assert triplets == [NliTriplet("p1", "e1", "c1"), NliTriplet("p2", "e2", "c2")]

    def test_crlf_line_endings(self, tmp_path):
        path = tmp_path / "nli.jsonl"
        write_lines(path, [
            json.dumps({"premise": "p", "entailment": "e", "contradiction": "c"}),
            "",
        ], newline="\r\n")
        assert load_nli(path) == [NliTriplet("p", "e", "c")]

    def test_small_malformed_fraction_skipped(self, tmp_path):
        path = tmp_path / "nli.jsonl"
        rows = [json.dumps({"premise": f"p{i}", "entailment": "e",
                            "contradiction": "c"}) for i in range(19)]
        rows.append("{not json")
        write_lines(path, rows)
        assert len(load_nli(path)) == 19

    def test_large_malformed_fraction_raises(self, tmp_path):
        path = tmp_path / "nli.jsonl"
        write_lines(path, ["junk", "more junk",
                           json.dumps({"premise": "p", "entailment": "e",
                                       "contradiction": "c"})])
        with pytest.raises(CorpusFormatError):
            load_nli(path)

    def test_missing_file_raises(self, tmp_path):
        with pytest.raises(CorpusFormatError):
            load_nli(tmp_path / "nope.jsonl")

    def test_premise_equal_entailment_warns_but_keeps(self, tmp_path, caplog):
        path = tmp_path / "nli.jsonl"
        write_lines(path, [json.dumps({"premise": "same", "entailment": "same",
                                       "contradiction": "c"})])
        with caplog.at_level("WARNING"):
            triplets = load_nli(path)
        assert len(triplets) == 1
        assert any("premise" in r.message for r in caplog.records)


class TestLoadQa:
    def test_happy_path(self, tmp_path):
        path = tmp_path / "qa.jsonl"
        write_lines(path, [json.dumps({"question": "q", "answer": "a"})])
        pairs = load_qa(path)
        assert pairs[0].question == "q" and pairs[0].answer == "a"


class TestLoadUnlabeled:
    def test_source_ids_name_file_and_line(self, tmp_path):
        path = tmp_path / "unlabeled.txt"
        write_lines(path, ["first sentence", "", "third sentence"])
        loaded = load_unlabeled(path)
        assert [u.source_id for u in loaded] == \
            ["unlabeled.txt:1", "unlabeled.txt:3"]

    def test_whitespace_cleanup(self, tmp_path):
        path = tmp_path / "u.txt"
        write_lines(path, ["  the   cat  runs  "])
        assert load_unlabeled(path)[0].text == "the cat runs"

    def test_exclusion_matches_after_normalization(self, tmp_path):
        path = tmp_path / "u.txt"
        write_lines(path, ["The   CAT runs", "the dog walks"])
        loaded = load_unlabeled(path, {"the cat runs"})
        assert [u.text for u in loaded] == ["the dog walks"]

    def test_normalize_for_matching(self):
        assert normalize_for_matching("  The\tCAT  Runs ") == "the cat runs"


class TestBuildInstances:
    def test_exactly_four_with_expected_templates(self):
        triplet = NliTriplet("p", "e", "c")
        instances = build_instances(triplet)
        assert len(instances) == 4
        by_input = {i.input_text: i for i in instances}
        gen_e = render(PromptKind.ENTAILMENT_GEN, ["p"]).text
        gen_c = render(PromptKind.CONTRADICTION_GEN, ["p"]).text
        disc_t = render(PromptKind.DISCRIMINATION, ["p", "e"]).text
        disc_f = render(PromptKind.DISCRIMINATION, ["p", "c"]).text
        assert by_input[gen_e].target_text == "e"
        assert by_input[gen_e].task is TaskKind.GENERATION
        assert by_input[gen_c].target_text == "c"
        assert by_input[disc_t].target_text == "true"
        assert by_input[disc_t].task is TaskKind.DISCRIMINATION
        assert by_input[disc_f].target_text == "false"

    def test_thousand_triplets_scale(self):
        triplets = [NliTriplet(f"p{i}", f"e{i}", f"c{i}") for i in range(100)]
        instances = [inst for t in triplets for inst in build_instances(t)]
        assert len(instances) == 400
        gen = [i for i in instances if i.task is TaskKind.GENERATION]
        disc = [i for i in instances if i.task is TaskKind.DISCRIMINATION]
        assert len(gen) == 200 and len(disc) == 200
        assert {i.target_text for i in disc} == {"true", "false"}


class TestMixInstances:
    def test_seeded_permutation_is_stable(self):
        instances = [inst for i in range(10)
                     for inst in build_instances(NliTriplet(f"p{i}", "e", "c"))]
        a = mix_instances(instances, seed=4)
        b = mix_instances(instances, seed=4)
        assert a == b
        assert a != instances  # 40 items: identity permutation is implausible
        assert sorted(map(repr, a)) == sorted(map(repr, instances))

    def test_input_list_not_mutated(self):
        instances = build_instances(NliTriplet("p", "e", "c"))
        copy = list(instances)
        mix_instances(instances, seed=0)
        assert instances == copy


class TestSubsample:
    def test_fraction_one_keeps_all_in_order(self):
        items = list(range(20))
        assert subsample(items, 1.0, seed=0) == items

    def test_size_is_floor_of_fraction(self):
        items = list(range(10))
        assert len(subsample(items, 0.3, seed=0)) == 3
        assert len(subsample(items, 0.35, seed=0)) == 3
        assert len(subsample(items, 0.5, seed=0)) == 5

    def test_nested_and_order_preserving(self):
        items = list(range(50))
        small = subsample(items, 0.2, seed=7)
        large = subsample(items, 0.6, seed=7)
        assert set(small) <= set(large)
        assert small == sorted(small)
        assert large == sorted(large)

    def test_bad_fraction_rejected(self):
        with pytest.raises(ValueError):
            subsample([1], -0.1, seed=0)
        with pytest.raises(ValueError):
            subsample([1], 1.1, seed=0)


class TestPairsToTriplets:
    def test_first_of_each_kind_wins(self, tmp_path):
        path = tmp_path / "pairs.jsonl"
        write_lines(path, [
            json.dumps({"premise": "p", "hypothesis": "e1", "label": "entailment"}),
            json.dumps({"premise": "p", "hypothesis": "c1", "label": "contradiction"}),
            json.dumps({"premise": "p", "hypothesis": "e2", "label": "entailment"}),
            json.dumps({"premise": "q", "hypothesis": "e", "label": "entailment"}),
        ])
        triplets = pairs_to_triplets(path)
        # q has no contradiction, so only p completes
        assert triplets == [NliTriplet("p", "e1", "c1")]

    def test_neutral_rows_ignored(self, tmp_path):
        path = tmp_path / "pairs.jsonl"
        write_lines(path, [
            json.dumps({"premise": "p", "hypothesis": "n", "label": "neutral"}),
            json.dumps({"premise": "p", "hypothesis": "e", "label": "entailment"}),
            json.dumps({"premise": "p", "hypothesis": "c", "label": "contradiction"}),
        ])
        assert pairs_to_triplets(path) == [NliTriplet("p", "e", "c")]

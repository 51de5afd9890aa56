import json

import pytest

from punforge import cli
from punforge.cli import RunConfig, UsageError, resolve_config
from punforge.corpus import Vocabulary


def _run(tmp_path, argv):
    """Run the CLI with --output routed to a file; return (exit, lines)."""
    out = tmp_path / "out.jsonl"
    code = cli.main(argv + ["--output", str(out)])
    lines = out.read_text(encoding="utf-8").splitlines() if out.exists() else []
    return code, lines


class TestResolveConfig:
    def test_defaults(self):
        assert resolve_config({}, None, env={}) == RunConfig()

    def test_flag_beats_config_beats_env(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"order": 3, "window": 5}))
        env = {"PUNGEN_ORDER": "2", "PUNGEN_WINDOW": "9", "PUNGEN_DIM": "7"}
        cfg = resolve_config({"order": 6}, str(path), env=env)
        assert cfg.order == 6       # flag
        assert cfg.window == 5      # config file
        assert cfg.dim == 7         # environment
        assert cfg.epochs == 15     # default

    def test_env_coercion(self):
        cfg = resolve_config({}, None, env={"PUNGEN_RERANK": "yes",
                                            "PUNGEN_STEP_SIZE": "0.5"})
        assert cfg.rerank is True
        assert cfg.step_size == 0.5

    def test_env_bad_boolean(self):
        with pytest.raises(UsageError, match="rerank"):
            resolve_config({}, None, env={"PUNGEN_RERANK": "maybe"})

    def test_env_bad_number(self):
        with pytest.raises(UsageError, match="order"):
            resolve_config({}, None, env={"PUNGEN_ORDER": "four"})

    def test_config_unknown_key(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"orderr": 3}))
        with pytest.raises(UsageError, match="orderr"):
            resolve_config({}, str(path), env={})

    def test_config_non_scalar_value(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"order": [3]}))
        with pytest.raises(UsageError, match="non-scalar"):
            resolve_config({}, str(path), env={})

    def test_config_not_json(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("order: 3")
        with pytest.raises(UsageError, match="JSON"):
            resolve_config({}, str(path), env={})

    def test_config_not_an_object(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("[1, 2]")
        with pytest.raises(UsageError, match="object"):
            resolve_config({}, str(path), env={})

    def test_config_missing_file(self, tmp_path):
        with pytest.raises(UsageError, match="config"):
            resolve_config({}, str(tmp_path / "absent.json"), env={})

    def test_config_null_clears_optional_value(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"wordnet": None}))
        assert resolve_config({}, str(path), env={}).wordnet is None

    @pytest.mark.parametrize("bad", [
        {"order": 7}, {"order": 1}, {"window": 0}, {"d1": 6, "d2": 5},
        {"d1": 0}, {"epochs": -1}, {"negatives": 0}, {"step_size": 0.0},
        {"min_count": 0}, {"pool": 0}, {"keep": 0}, {"topic_k": 0},
        {"threshold": -0.1}, {"max_outputs": 0}, {"permutations": 0},
        {"clip": 0.0}, {"stage": "POLISH"},
    ])
    def test_out_of_range_values_rejected(self, bad):
        with pytest.raises(UsageError):
            resolve_config(bad, None, env={})


class TestExitCodes:
    def test_no_subcommand_is_usage(self, capsys):
        assert cli.main([]) == 1
        assert "usage" in capsys.readouterr().err

    def test_unknown_flag_is_usage(self):
        with pytest.raises(SystemExit) as err:
            cli.main(["index", "--corpus", "x", "--out", "y", "--what"])
        assert err.value.code == 1

    def test_missing_required_flag_is_usage(self):
        with pytest.raises(SystemExit) as err:
            cli.main(["train-lm", "--out", "y"])
        assert err.value.code == 1

    def test_bad_option_value_is_usage(self, pipeline, tmp_path, capsys):
        code = cli.main(["train-lm", "--corpus", str(pipeline["corpus"]),
                         "--out", str(tmp_path / "m"), "--order", "9"])
        assert code == 1
        assert "order" in capsys.readouterr().err

    def test_missing_input_file_is_data_error(self, tmp_path, capsys):
        code = cli.main(["train-lm", "--corpus", str(tmp_path / "no.pgc"),
                         "--out", str(tmp_path / "m")])
        assert code == 2

    def test_generate_without_pair_is_usage(self, pipeline, capsys):
        code = cli.main(["generate", "--corpus", str(pipeline["corpus"]),
                         "--pun", "hare"])
        assert code == 1
        assert "--alt" in capsys.readouterr().err


class TestIndex:
    def test_writes_corpus_and_vocabulary_sidecar(self, pipeline):
        assert pipeline["corpus"].exists()
        sidecar = pipeline["corpus"].with_name(pipeline["corpus"].name + ".vocab")
        assert sidecar.exists()
        vocab = Vocabulary.load_text(sidecar)
        assert "hare" in vocab and "hair" in vocab


class TestScore:
    def _records(self):
        return [
            {"id": "a", "sentence": "The greyhound got a hare cut downtown.",
             "pun_word": "hare", "alt_word": "hair"},
            {"id": "b",
             "tokens": ["the", "barber", "gave", "the", "man", "a",
                        "hare", "cut", "."],
             "pun_word": "hare", "alt_word": "hair"},
            {"id": "bad", "sentence": "no pun here .",
             "pun_word": "zzzq", "alt_word": "hair"},
        ]

    def _write_input(self, tmp_path):
        path = tmp_path / "in.jsonl"
        path.write_text("".join(json.dumps(r) + "\n" for r in self._records()))
        return path

    def test_scores_and_inline_errors(self, pipeline, tmp_path):
        src = self._write_input(tmp_path)
        code, lines = _run(tmp_path, ["score", "--lm", str(pipeline["lm"]),
                                      "--input", str(src)])
        assert code == 0
        records = [json.loads(line) for line in lines]
        assert [r["id"] for r in records] == ["a", "b", "bad"]
        for rec in records[:2]:
            assert set(rec) >= {"s_local", "s_global", "s_ratio",
                                "unusualness", "degenerate"}
            assert "ambiguity" not in rec
        assert "error" in records[2] and "s_local" not in records[2]

    def test_skipgram_adds_meaning_fields(self, pipeline, tmp_path):
        src = self._write_input(tmp_path)
        code, lines = _run(tmp_path, ["score", "--lm", str(pipeline["lm"]),
                                      "--skipgram", str(pipeline["skipgram"]),
                                      "--input", str(src)])
        assert code == 0
        rec = json.loads(lines[0])
        assert 0.0 <= rec["ambiguity"] <= 0.6931471805599454
        assert rec["distinctiveness"] >= 0.0

    def test_explicit_position_overrides_search(self, pipeline, tmp_path):
        tokens = ["a", "hare", "saw", "a", "hare", "."]
        src = tmp_path / "in.jsonl"
        src.write_text(json.dumps({"id": "x", "tokens": tokens,
                                   "pun_word": "hare", "alt_word": "hair",
                                   "pun_position": 4}) + "\n")
        code, lines = _run(tmp_path, ["score", "--lm", str(pipeline["lm"]),
                                      "--input", str(src)])
        assert code == 0
        assert "error" not in json.loads(lines[0])

    def test_ambiguous_position_is_an_inline_error(self, pipeline, tmp_path):
        src = tmp_path / "in.jsonl"
        src.write_text(json.dumps({"id": "x",
                                   "tokens": ["hare", "and", "hare"],
                                   "pun_word": "hare",
                                   "alt_word": "hair"}) + "\n")
        code, lines = _run(tmp_path, ["score", "--lm", str(pipeline["lm"]),
                                      "--input", str(src)])
        assert code == 0
        assert "pun_position" in json.loads(lines[0])["error"]

    def test_mismatched_model_vocabularies_rejected(self, pipeline, tmp_path,
                                                    capsys):
        other_text = tmp_path / "other.txt"
        other_text.write_text(
            "a completely different corpus with many more words than the"
            " demo corpus has .\n" * 30)
        other_corpus = tmp_path / "other.pgc"
        other_sg = tmp_path / "other.pgsg"
        assert cli.main(["index", "--corpus", str(other_text),
                         "--out", str(other_corpus)]) == 0
        assert cli.main(["train-skipgram", "--corpus", str(other_corpus),
                         "--out", str(other_sg), "--dim", "8",
                         "--epochs", "0"]) == 0
        src = self._write_input(tmp_path)
        code = cli.main(["score", "--lm", str(pipeline["lm"]),
                         "--skipgram", str(other_sg),
                         "--input", str(src), "--output",
                         str(tmp_path / "out.jsonl")])
        assert code == 2
        assert "vocabulary" in capsys.readouterr().err


class TestGenerate:
    def _topic_args(self, pipeline, miniwn_dir):
        return ["generate", "--corpus", str(pipeline["corpus"]),
                "--skipgram", str(pipeline["skipgram"]),
                "--wordnet", str(miniwn_dir),
                "--pun", "hare", "--alt", "hair"]

    def test_topic_stage_end_to_end(self, pipeline, miniwn_dir, tmp_path):
        code, lines = _run(tmp_path, self._topic_args(pipeline, miniwn_dir))
        assert code == 0
        meta = json.loads(lines[0])
        assert meta["record"] == "meta"
        assert meta["failure"] is None
        assert meta["candidates"] == len(lines) - 1
        assert meta["candidates"] >= 1
        for line in lines[1:]:
            cand = json.loads(line)
            assert cand["tokens"].count("hare") == 1
            assert "hair" not in cand["tokens"]
            assert cand["tokens"][cand["pun_position"]] == "hare"

    def test_same_seed_output_is_byte_identical(self, pipeline, miniwn_dir,
                                                tmp_path):
        args = self._topic_args(pipeline, miniwn_dir)
        _, first = _run(tmp_path, args)
        _, second = _run(tmp_path, args)
        assert first == second

    def test_swap_stage_needs_no_topic_resources(self, pipeline, tmp_path):
        code, lines = _run(tmp_path, ["generate",
                                      "--corpus", str(pipeline["corpus"]),
                                      "--pun", "hare", "--alt", "hair",
                                      "--stage", "SWAP"])
        assert code == 0
        assert all(json.loads(line)["stage"] == "SWAP" for line in lines[1:])

    def test_topic_stage_without_skipgram_is_usage(self, pipeline, capsys):
        code = cli.main(["generate", "--corpus", str(pipeline["corpus"]),
                         "--pun", "hare", "--alt", "hair"])
        assert code == 1
        assert "--skipgram" in capsys.readouterr().err

    def test_topic_stage_without_wordnet_is_data_error(self, pipeline,
                                                       tmp_path, capsys,
                                                       monkeypatch):
        monkeypatch.delenv("PUNGEN_WORDNET", raising=False)
        code = cli.main(["generate", "--corpus", str(pipeline["corpus"]),
                         "--skipgram", str(pipeline["skipgram"]),
                         "--pun", "hare", "--alt", "hair",
                         "--output", str(tmp_path / "o.jsonl")])
        assert code == 2
        assert "PUNGEN_WORDNET" in capsys.readouterr().err

    def test_wordnet_from_environment(self, pipeline, miniwn_dir, tmp_path,
                                      monkeypatch):
        monkeypatch.setenv("PUNGEN_WORDNET", str(miniwn_dir))
        code, lines = _run(tmp_path, ["generate",
                                      "--corpus", str(pipeline["corpus"]),
                                      "--skipgram", str(pipeline["skipgram"]),
                                      "--pun", "hare", "--alt", "hair"])
        assert code == 0
        assert json.loads(lines[0])["wordnet"].startswith("miniwn")

    def test_rerank_without_lm_is_usage(self, pipeline, miniwn_dir, capsys):
        code = cli.main(self._topic_args(pipeline, miniwn_dir) + ["--rerank"])
        assert code == 1
        assert "--lm" in capsys.readouterr().err

    def test_rerank_orders_by_surprisal_ratio(self, pipeline, miniwn_dir,
                                              tmp_path):
        args = self._topic_args(pipeline, miniwn_dir) + [
            "--lm", str(pipeline["lm"]), "--rerank"]
        code, lines = _run(tmp_path, args)
        assert code == 0
        ratios = [json.loads(line)["scores"]["s_ratio"] for line in lines[1:]]
        assert len(ratios) >= 2
        assert ratios == sorted(ratios, reverse=True)

    def test_pairs_file(self, pipeline, miniwn_dir, tmp_path):
        pairs = tmp_path / "pairs.tsv"
        pairs.write_text("hare\thair\nflee\tflea\n")
        args = ["generate", "--corpus", str(pipeline["corpus"]),
                "--skipgram", str(pipeline["skipgram"]),
                "--wordnet", str(miniwn_dir), "--pairs", str(pairs)]
        code, lines = _run(tmp_path, args)
        assert code == 0
        metas = [json.loads(line) for line in lines
                 if json.loads(line)["record"] == "meta"]
        assert [(m["pun_word"], m["alt_word"]) for m in metas] == \
            [("hare", "hair"), ("flee", "flea")]

    def test_malformed_pairs_file_is_data_error(self, pipeline, tmp_path):
        pairs = tmp_path / "pairs.tsv"
        pairs.write_text("hare hair\n")
        code = cli.main(["generate", "--corpus", str(pipeline["corpus"]),
                         "--pairs", str(pairs), "--stage", "SWAP",
                         "--output", str(tmp_path / "o.jsonl")])
        assert code == 2


class TestCorrelate:
    def _fixture_files(self, tmp_path, pipeline):
        ratings = tmp_path / "ratings.csv"
        rows = ["item_id,rater_id,score"]
        items = ["a", "b", "c", "d", "e"]
        for idx, item in enumerate(items):
            rows.append(f"{item},r1,{idx + 1}")
            rows.append(f"{item},r2,{idx + 1.5}")
        ratings.write_text("\n".join(rows) + "\n")
        scores = tmp_path / "scores.jsonl"
        with open(scores, "w") as fh:
            for idx, item in enumerate(items):
                fh.write(json.dumps({"id": item, "s_ratio": float(idx),
                                     "unusualness": float(-idx),
                                     "degenerate": False}) + "\n")
        return ratings, scores

    def test_tsv_report(self, pipeline, tmp_path):
        ratings, scores = self._fixture_files(tmp_path, pipeline)
        out = tmp_path / "report.tsv"
        code = cli.main(["correlate", "--ratings", str(ratings),
                         "--scores", str(scores), "--output", str(out),
                         "--permutations", "500", "--seed", "3"])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "metric\tn\tspearman\tp_value"
        table = {line.split("\t")[0]: line.split("\t") for line in lines[1:]}
        assert set(table) == {"s_ratio", "unusualness"}  # booleans skipped
        assert table["s_ratio"][1] == "5"
        assert float(table["s_ratio"][2]) == pytest.approx(1.0)
        assert float(table["unusualness"][2]) == pytest.approx(-1.0)
        assert 0.0 < float(table["s_ratio"][3]) <= 1.0

    def test_deterministic_given_seed(self, pipeline, tmp_path):
        ratings, scores = self._fixture_files(tmp_path, pipeline)
        outputs = []
        for name in ("one.tsv", "two.tsv"):
            out = tmp_path / name
            assert cli.main(["correlate", "--ratings", str(ratings),
                             "--scores", str(scores), "--output", str(out),
                             "--permutations", "200", "--seed", "11"]) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]

    def test_insufficient_overlap_is_data_error(self, pipeline, tmp_path,
                                                capsys):
        ratings, _ = self._fixture_files(tmp_path, pipeline)
        scores = tmp_path / "lonely.jsonl"
        scores.write_text(json.dumps({"id": "a", "s_ratio": 1.0}) + "\n")
        code = cli.main(["correlate", "--ratings", str(ratings),
                         "--scores", str(scores),
                         "--output", str(tmp_path / "o.tsv")])
        assert code == 2

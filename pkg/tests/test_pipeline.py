import json
from dataclasses import asdict

import pytest

from polyreal import cli
from polyreal.core import chirotope_of_points
from polyreal.data import BEK_COORDINATES, bek_sphere, cyclic_sphere, moment_curve, t2766_sphere
from polyreal.pipeline import (
    ClassifyOptions,
    LedgerRecord,
    classify,
    instance_seed,
    read_corpus,
    read_ledger,
    replay,
    run_batch,
)
from polyreal.sphere import sphere_from_facets

from test_sphere import RP2

QUICK = ClassifyOptions(restarts=4, iterations=800)


def strip_timings(records):
    out = []
    for r in records:
        d = asdict(r)
        d.pop("timings")
        out.append(d)
    return out


@pytest.fixture
def small_corpus(tmp_path):
    lines = [
        "# a comment",
        "C6: " + cyclic_sphere(6, 4).to_text(),
        json.dumps({"id": "C7", **cyclic_sphere(7, 4).to_json()}),
        "",
        "RP2 " + sphere_from_facets(RP2).to_text(),
        "broken [0 1 2] [0 1 3]",
        "C6dup " + cyclic_sphere(6, 4).to_text(),
    ]
    path = tmp_path / "corpus.txt"
    path.write_text("\n".join(lines) + "\n")
    return path


class TestClassify:
    def test_cyclic_inscribed(self):
        record = classify(cyclic_sphere(8, 4), QUICK)
        assert record.status == "inscribed" and record.coordinates
        assert replay(record)

    def test_bek_inscribed(self):
        record = classify(bek_sphere(), ClassifyOptions(restarts=10))
        assert record.status == "inscribed" and replay(record)

    def test_t2766_never_realized(self):
        record = classify(t2766_sphere(), ClassifyOptions(restarts=1, iterations=200))
        assert record.status == "nonrealizable"
        assert record.certificate["kind"] == "bfp_on_all_completions"
        assert len(record.certificate["completions"]) == 4
        assert replay(record)

    def test_non_orientable(self):
        record = classify(sphere_from_facets(RP2), QUICK)
        assert record.status == "no_compatible_chirotope"
        assert record.certificate["witness"]["kind"] == "inconsistent_orientation"
        assert replay(record)

    def test_skip_inscribed_gives_realized(self):
        record = classify(cyclic_sphere(7, 4), ClassifyOptions(restarts=4, skip_inscribed=True))
        assert record.status == "realized" and replay(record)

    def test_budget_zero_downgrades(self):
        record = classify(cyclic_sphere(8, 4), ClassifyOptions(time_budget=0.0))
        assert record.status == "undecided"
        assert replay(record)

    def test_record_json_round_trip(self):
        record = classify(cyclic_sphere(6, 4), QUICK, instance_id="c6")
        again = LedgerRecord.from_json(record.to_json())
        assert again == record and again.instance_id == "c6"
        assert again.input_hash == cyclic_sphere(6, 4).digest()


class TestReplay:
    def test_tampered_coordinates(self):
        record = classify(cyclic_sphere(7, 4), QUICK)
        record.coordinates[0] = ["2", "0", "0", "0"]
        assert not replay(record)

    def test_tampered_certificate(self):
        record = classify(t2766_sphere(), ClassifyOptions(restarts=1, iterations=100))
        record.certificate["completions"][0]["certificate"][0]["multiplier"] = "0"
        assert not replay(record)

    def test_wrong_hash(self):
        record = classify(cyclic_sphere(6, 4), QUICK)
        record.input_hash = "0" * 64
        assert not replay(record)

    def test_false_witness(self):
        record = classify(cyclic_sphere(6, 4), QUICK)
        record.status = "no_compatible_chirotope"
        record.certificate = {"kind": "witness", "witness": {"kind": "no_completion"}}
        assert not replay(record)


class TestBatch:
    def test_corpus_reader(self, small_corpus):
        items = read_corpus(small_corpus)
        assert [i for i, _ in items] == ["C6", "C7", "RP2", "broken", "C6dup"]

    def test_empty_corpus(self, tmp_path):
        corpus = tmp_path / "empty.txt"
        corpus.write_text("")
        summary = run_batch(corpus, tmp_path / "ledger.jsonl")
        assert summary["processed"] == 0
        assert all(v == 0 for v in summary["statuses"].values())

    def test_run_and_idempotence(self, small_corpus, tmp_path):
        ledger = tmp_path / "ledger.jsonl"
        summary = run_batch(small_corpus, ledger, seed=5, options=QUICK)
        assert summary["processed"] == 4 and summary["skipped"] == 1
        records = read_ledger(ledger)
        status = {r.instance_id: r.status for r in records}
        assert status == {"C6": "inscribed", "C7": "inscribed", "RP2": "no_compatible_chirotope",
                          "broken": "undecided"}
        assert "error" in next(r for r in records if r.instance_id == "broken").detail
        assert all(replay(r) for r in records)
        assert next(r for r in records if r.instance_id == "C6").seed == instance_seed(5, cyclic_sphere(6, 4).digest())
        again = run_batch(small_corpus, ledger, seed=5, options=QUICK)
        assert again["processed"] == 0
        assert len(read_ledger(ledger)) == 4

    def test_resume_matches_uninterrupted(self, small_corpus, tmp_path):
        full = tmp_path / "full.jsonl"
        run_batch(small_corpus, full, seed=1, options=QUICK)
        part = tmp_path / "part.jsonl"
        lines = full.read_text().splitlines()
        # an interrupted run: two complete records and a torn third line
        part.write_text(lines[0] + "\n" + lines[1] + "\n" + lines[2][:25])
        run_batch(small_corpus, part, seed=1, options=QUICK)
        assert strip_timings(read_ledger(part)) == strip_timings(read_ledger(full))

    def test_parallel_matches_serial(self, small_corpus, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        run_batch(small_corpus, a, jobs=1, seed=2, options=QUICK)
        run_batch(small_corpus, b, jobs=2, seed=2, options=QUICK)
        assert strip_timings(read_ledger(a)) == strip_timings(read_ledger(b))


class TestCli:
    def run(self, capsys, *argv):
        code = cli.main([str(a) for a in argv])
        out = capsys.readouterr()
        return code, (json.loads(out.out) if out.out.strip() else None), out.err

    @pytest.fixture
    def files(self, tmp_path):
        bek = tmp_path / "bek.txt"
        bek.write_text(bek_sphere().to_text())
        coords = tmp_path / "bek.json"
        coords.write_text(json.dumps(BEK_COORDINATES.to_json()))
        c8 = tmp_path / "c8.txt"
        c8.write_text(cyclic_sphere(8, 4).to_text())
        chi = tmp_path / "c7.chi"
        chi.write_text(chirotope_of_points(moment_curve(7, 4)).to_text())
        t = tmp_path / "t2766.txt"
        t.write_text(t2766_sphere().to_text())
        return {"bek": bek, "coords": coords, "c8": c8, "chi": chi, "t2766": t, "dir": tmp_path}

    def test_fvector(self, capsys, files):
        code, out, _ = self.run(capsys, "fvector", files["bek"])
        assert code == 0 and out["f_vector"] == [10, 38, 56, 28]

    def test_verify(self, capsys, files):
        code, out, _ = self.run(capsys, "verify", files["coords"], files["bek"], "--inscribed")
        assert code == 0 and out["positive"] and out["inscribed_ok"]

    def test_chirotope_of_and_facets(self, capsys, files):
        code, out, _ = self.run(capsys, "chirotope-of", files["coords"])
        assert code == 0 and out["uniform"] and len(out["signs"]) == 252
        code, out, _ = self.run(capsys, "facets", files["chi"])
        assert code == 0 and out["neighborly"] and len(out["facets"]) == 14

    def test_partial_propagate_complete(self, capsys, files):
        _, out, _ = self.run(capsys, "partial", files["c8"])
        assert out["known"] == 48
        _, out, _ = self.run(capsys, "propagate", files["c8"])
        assert out["known"] == 56
        _, out, _ = self.run(capsys, "complete", files["c8"])
        assert out["status"] == "completions" and len(out["completions"]) == 1

    def test_bfp(self, capsys, files):
        code, out, _ = self.run(capsys, "bfp", files["chi"])
        assert code == 0 and out["certificate"] is None

    def test_realize_and_inscribe(self, capsys, files):
        code, out, _ = self.run(capsys, "realize", files["chi"], "--seed", "1", "--restarts", "5")
        assert code == 0 and out["status"] == "feasible" and len(out["coordinates"]) == 7
        code, out, _ = self.run(capsys, "inscribe", files["c8"], "--restarts", "5")
        assert code == 0 and out["status"] == "feasible"
        coords = files["dir"] / "c8.json"
        coords.write_text(json.dumps(out["coordinates"]))
        _, report, _ = self.run(capsys, "verify", coords, files["c8"], "--inscribed")
        assert report["positive"]

    def test_certify(self, capsys, files):
        code, out, _ = self.run(capsys, "certify", files["t2766"])
        assert code == 0 and out["verdict"] == "bfp_on_all_completions" and len(out["certificates"]) == 4

    def test_classify_with_ledger(self, capsys, files):
        ledger = files["dir"] / "one.jsonl"
        code, out, _ = self.run(capsys, "classify", files["c8"], "--id", "c8", "--ledger", ledger,
                                "--restarts", "4")
        assert code == 0 and out["status"] == "inscribed"
        assert read_ledger(ledger)[0].instance_id == "c8"

    def test_batch_and_replay(self, capsys, small_corpus, tmp_path):
        ledger = tmp_path / "l.jsonl"
        code, out, _ = self.run(capsys, "batch", small_corpus, "--ledger", ledger, "--restarts", "4", "--seed", "3")
        assert code == 0 and out["processed"] == 4
        code, out, _ = self.run(capsys, "replay", ledger)
        assert out["records"] == 4 and out["failures"] == []

    def test_config_file(self, capsys, files):
        conf = files["dir"] / "opts.json"
        conf.write_text(json.dumps({"restarts": 3, "iterations": 500, "epsilon": 1e-4, "pin_north_pole": True}))
        code, out, _ = self.run(capsys, "inscribe", files["c8"], "--config", conf)
        assert code == 0 and out["status"] == "feasible"
        conf.write_text(json.dumps({"bogus": 1}))
        code, _, err = self.run(capsys, "inscribe", files["c8"], "--config", conf)
        assert code == 2 and "bogus" in err

    def test_errors_are_json(self, capsys, files):
        bad = files["dir"] / "bad.txt"
        bad.write_text("[0 1 2] [0 1 3]")
        code, out, err = self.run(capsys, "fvector", bad)
        assert code == 2 and out is None
        assert json.loads(err)["error"] == "NotPseudoManifold"

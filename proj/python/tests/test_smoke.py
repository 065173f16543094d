import math

import pytest

import qinu


@pytest.fixture(scope="module")
def fx():
    return qinu.generate_fixture(seed=7)


def test_tokenize_and_segment():
    assert qinu.tokenize("This software is FAST!") == ["software", "fast"]
    sents = qinu.segment("Works great. Crashes on load.")
    assert [s["text"] for s in sents] == ["Works great.", "Crashes on load."]
    assert sents[1]["ordinal"] == 1


def test_fixture_shape(fx):
    assert len(fx["reviews"]) == 60
    assert len(fx["gold"]) == 600
    topics = {g["topic"] for g in fx["gold"]}
    assert topics == {"effectiveness", "efficiency", "freedom_from_risk", "other"}


def test_similarity(fx):
    tax = fx["taxonomy"]
    assert qinu.word_similarity("speed", "speed", tax) == 1.0
    assert qinu.word_similarity("speed", "not_a_word", tax) == 0.0
    a, b = ["speed", "slow"], ["memory", "load"]
    assert math.isclose(qinu.sentence_similarity(a, b, tax), qinu.sentence_similarity(b, a, tax), abs_tol=1e-12)


def test_train_predict_roundtrip(fx):
    model = qinu.Model.train("nb", fx["gold"])
    assert model.kind == "nb"
    topic, scores = model.predict(["speed", "memory"])
    assert topic == "efficiency"
    assert set(scores) == {"effectiveness", "efficiency", "freedom_from_risk", "other"}
    again = qinu.Model.from_dict(model.to_dict())
    assert again.predict(["speed", "memory"]) == (topic, scores)
    assert model.predict_many([["issue"], ["interface"]]) == ["freedom_from_risk", "effectiveness"]


def test_cross_validate_and_keywords(fx):
    report = qinu.cross_validate(fx["gold"], "nb", k=3, seed=42)
    assert report["k"] == 3
    assert report["pooled"]["metrics"]["macro_f1"] >= 0.8
    kw = qinu.top_keywords(fx["gold"], 5)
    assert {e["keyword"] for e in kw["efficiency"]} >= {"speed", "slow"}


def test_polarity_and_score(fx):
    lex = qinu.build_lexicon(fx["gold"])
    label, _ = qinu.score_polarity(["not", "fast"], {"scores": {"fast": 1.0}, "negators": ["not"], "intensifiers": {}})
    assert label == "negative"
    assert lex["scores"]
    report = qinu.qinu_score([("efficiency", "positive")] * 3 + [("efficiency", "negative")])
    assert report["characteristics"][1]["score"] == 0.75
    with pytest.raises(qinu.QinuError, match="weights must sum to 1"):
        qinu.qinu_score([], [0.5, 0.5, 0.2])


def test_errors_are_python_exceptions():
    with pytest.raises(qinu.QinuError):
        qinu.Model.train("knn", [])
    with pytest.raises(qinu.QinuError):
        qinu.cross_validate([], "nb")


def test_run_cli(tmp_path):
    code, out, _ = qinu.run_cli(["fixture", "--output", str(tmp_path / "fx")])
    assert code == 0
    assert out.startswith("config ")
    code, _, err = qinu.run_cli(["--project", str(tmp_path / "none"), "segment"])
    assert code == 2
    assert "init" in err

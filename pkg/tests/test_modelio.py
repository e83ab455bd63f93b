import json
import re

import pytest
from hypothesis import given, settings

from cmsbridge.errors import SchemaVersionMismatch, ValidationFailed
from cmsbridge.metamodel import core_model
from cmsbridge.modelio import emit_diagram, load_model, model_to_dict, save_model

from strategies import models


def test_core_model_document():
    doc = json.loads(save_model(core_model()))
    assert doc["version"] == "cmsmodel/1"
    assert len(doc["coreClasses"]) == 16
    assert doc["extensions"] == []
    assert set(doc) == {"version", "siteName", "host", "basePath", "platform", "coreClasses",
                        "extensions"}


def test_canonical_text_form():
    text = save_model(core_model("Site"))
    assert text.endswith("}\n") and "\r" not in text
    assert '\n  "basePath"' in text  # two-space indentation, sorted keys
    keys = list(json.loads(text))
    assert keys == sorted(keys)


def test_round_trip_core():
    assert load_model(save_model(core_model())) == core_model()


def test_journal_document(journal_model):
    doc = json.loads(save_model(journal_model))
    video = next(e for e in doc["extensions"] if e["name"] == "VideoArticle")
    rel = next(r for r in video["relationships"] if r["name"] == "relatedArticles")
    assert rel["target"] == "NewsArticle" and rel["multiplicity"] == "Many"
    assert [e["name"] for e in doc["extensions"]] == sorted(e["name"] for e in doc["extensions"])


def test_journal_round_trip(journal_model):
    assert load_model(save_model(journal_model)) == journal_model


def test_unknown_core_class_rejected():
    doc = model_to_dict(core_model())
    doc["coreClasses"][0] = "Widget"
    with pytest.raises(ValidationFailed) as exc:
        load_model(doc)
    assert exc.value.path == "$.coreClasses[0]"


def test_schema_version_gate():
    doc = model_to_dict(core_model())
    doc["version"] = "cmsmodel/2"
    with pytest.raises(SchemaVersionMismatch):
        load_model(doc)


def test_path_qualified_errors(journal_model):
    doc = model_to_dict(journal_model)
    doc["extensions"][2]["relationships"][0]["multiplicity"] = "Several"
    with pytest.raises(ValidationFailed) as exc:
        load_model(json.dumps(doc))
    assert exc.value.path == "$.extensions[2].relationships[0].multiplicity"

    doc = model_to_dict(journal_model)
    doc["extensions"][0]["attributes"][1]["type"] = 7
    with pytest.raises(ValidationFailed) as exc:
        load_model(doc)
    assert exc.value.path.startswith("$.extensions[0].attributes[1]")


def test_unresolved_target_rejected(journal_model):
    doc = model_to_dict(journal_model)
    doc["extensions"][0]["relationships"] = [
        {"name": "x", "target": "Ghost", "multiplicity": "One", "relatedLinkTemplate": None}]
    with pytest.raises(ValidationFailed):
        load_model(doc)


def test_non_canonical_id_rejected(journal_model):
    doc = model_to_dict(journal_model)
    doc["extensions"][0]["attributes"][0]["type"] = "Integer"
    with pytest.raises(ValidationFailed):
        load_model(doc)


def test_not_json():
    with pytest.raises(ValidationFailed):
        load_model("{nope")


@settings(max_examples=100, deadline=None)
@given(models())
def test_random_round_trip(model):
    text = save_model(model)
    assert load_model(text) == model
    assert save_model(load_model(text)) == text


# -- diagram ----------------------------------------------------------------------

_LINE = re.compile(
    r'^(@startuml|@enduml|title .+|class [A-Za-z_]\w* <<\w+>> \{|  [A-Za-z_]\w* : \w+|\}|'
    r'[A-Za-z_]\w* --\|> [A-Za-z_]\w*|[A-Za-z_]\w* --> "[1*]" [A-Za-z_]\w* : [A-Za-z_]\w*|)$')


def check_plantuml(text):
    lines = text.split("\n")
    assert lines[0] == "@startuml" and lines[-2] == "@enduml" and lines[-1] == ""
    depth = 0
    for line in lines:
        assert _LINE.match(line), line
        if line.endswith("{"):
            depth += 1
            assert depth == 1
        elif line == "}":
            depth -= 1
    assert depth == 0


def test_core_diagram():
    text = emit_diagram(core_model())
    check_plantuml(text)
    assert "Tag --|> Taxonomy" in text
    assert text.count("class ") == 16
    assert emit_diagram(core_model()) == text


def test_journal_diagram(journal_model):
    text = emit_diagram(journal_model)
    check_plantuml(text)
    assert "VideoArticle --|> ContentType" in text
    assert 'VideoArticle --> "*" NewsArticle : relatedArticles' in text
    assert 'VideoArticle --> "1" AgeRating : ageRating' in text


@settings(max_examples=30, deadline=None)
@given(models())
def test_random_diagrams_are_well_formed(model):
    check_plantuml(emit_diagram(model))


def test_diagram_title_is_one_line():
    text = emit_diagram(core_model("a\nb\x00\tc"))
    assert text.split("\n")[1] == "title a b c (Drupal)"

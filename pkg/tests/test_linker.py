import json

import pytest

from structsum.codec import parse
from structsum.errors import FormatError
from structsum.linker import EntityCatalog, Statement, emit_statements, link, load_catalog, read_statements


def catalog_file(tmp_path, rows):
    p = tmp_path / "cat.jsonl"
    p.write_text("".join(json.dumps(r) + "\n" for r in rows))
    return p


def test_load_catalog(tmp_path):
    cat = load_catalog(catalog_file(tmp_path, [{"entity_id": "E1", "label": "Singapore"}]))
    assert cat.size == 1
    cat = load_catalog(catalog_file(tmp_path, [{"entity_id": "E1", "label": "Singapore"}, {"entity_id": "E2", "label": " singapore"}]))
    assert cat.size == 1 and cat.lookup("SINGAPORE") == "E1" and len(cat.warnings) == 1
    (tmp_path / "empty.jsonl").write_text("")
    assert load_catalog(tmp_path / "empty.jsonl").size == 0


def test_load_catalog_malformed(tmp_path):
    p = tmp_path / "bad.jsonl"
    p.write_text('{"entity_id": "E1", "label": "x"}\n{"label": "y"}\n')
    with pytest.raises(FormatError, match=":2"):
        load_catalog(p)


def test_link_entity_and_literal():
    cat = EntityCatalog()
    cat.add("E1", "Singapore")
    sts = link(parse("Study location :: Singapore  | The City of Singapore"), "p1", cat)
    assert sts == [
        Statement("p1", "Study location", "E1", "entity"),
        Statement("p1", "Study location", "The City of Singapore", "literal"),
    ]
    assert link(parse(""), "p1", cat) == []


def test_no_partial_hits():
    cat = EntityCatalog()
    cat.add("E1", "Singapore")
    assert link(parse("A :: Singapor ; B :: Singapore City"), "p", cat)[0].object_kind == "literal"
    assert all(s.object_kind == "literal" for s in link(parse("A :: Singapor ; B :: Singapore City"), "p", cat))


@pytest.mark.parametrize("fmt", ["jsonl", "ntriples_like"])
def test_emit_round_trip(tmp_path, fmt):
    sts = [
        Statement("paper 1", "Study location", "E1", "entity"),
        Statement("paper 1", "Quote \"prop\"", 'say "hi" \\ <x>', "literal"),
    ]
    emit_statements(sts, tmp_path / "out", fmt)
    assert len((tmp_path / "out").read_text().splitlines()) == 2
    assert read_statements(tmp_path / "out", fmt) == sts
    emit_statements([], tmp_path / "empty", fmt)
    assert (tmp_path / "empty").read_text() == ""


def test_literal_quote_escaped_jsonl(tmp_path):
    emit_statements([Statement("p", "q", 'a"b', "literal")], tmp_path / "o.jsonl")
    assert '\\"' in (tmp_path / "o.jsonl").read_text()

from __future__ import annotations

import csv
import io
import json
from datetime import date
from pathlib import Path

import pytest

from tourkg.cli import main, run_lifecycle, Config, load_store, save_store
from tourkg.rdf import QuadStore, parse_nquads, serialize_nquads
from conftest import FIXTURES, build_history_store


def write(path: Path, text: str) -> Path:
    path.write_text(text, "utf-8")
    return path


@pytest.fixture
def clean_doc(tmp_path):
    return write(
        tmp_path / "doc.jsonld",
        json.dumps(
            {
                "@context": "https://schema.org/",
                "@type": "Hotel",
                "name": "Alpenhof",
                "address": {"@type": "PostalAddress", "postalCode": "6020"},
            }
        ),
    )


@pytest.fixture
def hotel_ds_path():
    return Path(__file__).parent.parent / "src" / "tourkg" / "data" / "ds" / "hotel.json"


# -- validate -----------------------------------------------------------------


def test_validate_clean_doc_exits_zero(clean_doc, hotel_ds_path, capsys):
    assert main(["validate", "--ds", str(hotel_ds_path), str(clean_doc)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] == "valid"


def test_validate_invalid_doc_exits_one(tmp_path, hotel_ds_path, capsys):
    doc = write(
        tmp_path / "bad.jsonld",
        '{"@context": "https://schema.org/", "@type": "Hotel", "name": "X"}',
    )
    assert main(["validate", "--ds", str(hotel_ds_path), str(doc)]) == 1
    report = json.loads(capsys.readouterr().out)
    assert report["errors"][0]["code"] == "MissingRequiredProperty"


def test_unknown_subcommand_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err.lower()


# -- map ----------------------------------------------------------------------


def test_map_to_stdout(capsys):
    mapping = FIXTURES / "mapping" / "hotels.mapping.json"
    records = FIXTURES / "mapping" / "hotels.csv"
    assert main(["map", "--mapping", str(mapping), "--records", str(records)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["documents"]) == 5
    assert payload["errors"] == []


def test_map_to_directory(tmp_path, capsys):
    mapping = FIXTURES / "mapping" / "accommodation.mapping.json"
    records = FIXTURES / "mapping" / "accommodation.records.json"
    out_dir = tmp_path / "docs"
    assert (
        main(
            ["map", "--mapping", str(mapping), "--records", str(records), "--out", str(out_dir)]
        )
        == 0
    )
    assert len(list(out_dir.glob("*.jsonld"))) == 2


# -- offers ---------------------------------------------------------------------


def test_offers_materialize(capsys):
    space = FIXTURES / "offers" / "alpenhof.json"
    assert (
        main(
            [
                "offers",
                "materialize",
                "--space",
                str(space),
                "--from",
                "2018-03-01",
                "--to",
                "2018-03-08",
                "-k",
                "3",
                "--strategy",
                "per-room-min",
            ]
        )
        == 0
    )
    docs = json.loads(capsys.readouterr().out)
    assert len(docs) == 3
    assert {d["sku"] for d in docs} == {"double", "single", "suite"}


def test_offers_price(capsys):
    space = FIXTURES / "offers" / "alpenhof.json"
    assert (
        main(
            [
                "offers",
                "price",
                "--space",
                str(space),
                "--room",
                "double",
                "--check-in",
                "2017-12-20",
                "--nights",
                "3",
                "--persons",
                "2",
                "--board",
                "half-board",
            ]
        )
        == 0
    )
    doc = json.loads(capsys.readouterr().out)
    assert doc["price"] == "515.00"


def test_offers_price_out_of_bounds_is_domain_error(capsys):
    space = FIXTURES / "offers" / "alpenhof.json"
    code = main(
        [
            "offers",
            "price",
            "--space",
            str(space),
            "--room",
            "penthouse",
            "--check-in",
            "2018-01-10",
            "--nights",
            "1",
            "--persons",
            "1",
            "--board",
            "breakfast",
        ]
    )
    assert code == 1
    assert "room-id" in capsys.readouterr().err


# -- ingest / export / query ------------------------------------------------------


def test_ingest_export_query_round_trip(tmp_path, clean_doc, capsys):
    store_file = tmp_path / "kg.nq"
    assert (
        main(
            [
                "ingest",
                "--store",
                str(store_file),
                "--source",
                "dmo",
                "--date",
                "2017-12-01",
                str(clean_doc),
            ]
        )
        == 0
    )
    report = json.loads(capsys.readouterr().out)
    assert report["quadsWritten"] == 5
    assert store_file.exists()

    assert main(["export", "--store", str(store_file)]) == 0
    exported = capsys.readouterr().out
    assert len(parse_nquads(exported)) == report["quadsWritten"] + report["inferredAdded"]

    query_file = write(
        tmp_path / "q.txt",
        "SELECT ?h ?name\nPATTERN ?h rdf:type schema:Hotel\nPATTERN ?h schema:name ?name",
    )
    assert main(["query", "--store", str(store_file), str(query_file)]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert rows == [{"h": rows[0]["h"], "name": "Alpenhof"}]

    assert (
        main(["--format", "csv", "query", "--store", str(store_file), str(query_file)]) == 0
    )
    table = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert table[0] == ["h", "name"]
    assert table[1][1] == "Alpenhof"


# -- migrate (lifecycle) -------------------------------------------------------------


def lifecycle_tree(tmp_path, site_url: str | None):
    docs_dir = tmp_path / "docs"
    docs_dir.mkdir()
    write(
        docs_dir / "hotel.jsonld",
        json.dumps(
            {
                "@context": "https://schema.org/",
                "@type": "Hotel",
                "name": "Alpenhof",
                "address": {"@type": "PostalAddress", "postalCode": "6020"},
            }
        ),
    )
    sources = [{"id": "dmo", "kind": "documents", "path": "docs"}]
    if site_url:
        write(tmp_path / "seeds.txt", site_url + "/index.html\n")
        sources.append({"id": "web", "kind": "crawl", "path": "seeds.txt"})
    write(tmp_path / "manifest.json", json.dumps({"sources": sources}))
    return tmp_path / "manifest.json"


def test_migrate_fixture_manifest(tmp_path, site_server, capsys):
    manifest = lifecycle_tree(tmp_path, site_server.base_url)
    store_file = tmp_path / "kg.nq"
    code = main(
        [
            "migrate",
            "--manifest",
            str(manifest),
            "--store",
            str(store_file),
            "--date",
            "2017-12-01",
        ]
    )
    assert code == 0
    reports = json.loads(capsys.readouterr().out)
    assert len(reports) == 2
    assert [r["source"] for r in reports] == ["dmo", "web"]
    assert reports[0]["quadsWritten"] == 5
    assert reports[1]["quadsWritten"] > 0
    assert store_file.exists()
    graphs = {q.graph.value for q in parse_nquads(store_file.read_text())}
    assert "urn:snapshot:dmo:2017-12-01" in graphs
    assert any(g.startswith("urn:crawl:") for g in graphs)


def test_migrate_rerun_writes_zero(tmp_path, site_server, capsys):
    manifest = lifecycle_tree(tmp_path, site_server.base_url)
    store_file = tmp_path / "kg.nq"
    args = ["migrate", "--manifest", str(manifest), "--store", str(store_file), "--date", "2017-12-01"]
    main(args)
    capsys.readouterr()
    assert main(args) == 0
    reports = json.loads(capsys.readouterr().out)
    assert all(r["quadsWritten"] == 0 for r in reports)


def test_migrate_empty_manifest(tmp_path, capsys):
    manifest = write(tmp_path / "manifest.json", '{"sources": []}')
    code = main(
        ["migrate", "--manifest", str(manifest), "--store", str(tmp_path / "kg.nq"), "--date", "2018-01-01"]
    )
    assert code == 0
    assert json.loads(capsys.readouterr().out) == []


def test_migrate_missing_manifest_is_usage_error(tmp_path, capsys):
    code = main(
        ["migrate", "--manifest", str(tmp_path / "absent.json"), "--date", "2018-01-01"]
    )
    assert code == 2


def test_migrate_total_rejection_exits_one(tmp_path, capsys):
    docs_dir = tmp_path / "docs"
    docs_dir.mkdir()
    write(docs_dir / "broken.jsonld", '{"name": "untyped"}')
    manifest = write(
        tmp_path / "manifest.json",
        json.dumps({"sources": [{"id": "bad", "kind": "documents", "path": "docs"}]}),
    )
    code = main(
        ["migrate", "--manifest", str(manifest), "--store", str(tmp_path / "kg.nq"), "--date", "2018-01-01"]
    )
    assert code == 1


def test_lifecycle_with_mapping_offers_and_consolidation(tmp_path, site_server):
    (tmp_path / "docs").mkdir()
    # two documents that consolidate: same name + postal code
    write(
        tmp_path / "docs" / "a.jsonld",
        json.dumps(
            {
                "@context": "https://schema.org/",
                "@type": "Hotel",
                "name": "Alpenhof",
                "address": {"@type": "PostalAddress", "postalCode": "6020"},
                "telephone": "+43 512 1",
            }
        ),
    )
    write(
        tmp_path / "docs" / "b.jsonld",
        json.dumps(
            {
                "@context": "https://schema.org/",
                "@type": "Hotel",
                "name": "ALPENHOF",
                "address": {"@type": "PostalAddress", "postalCode": "6020"},
                "url": "https://alpenhof.example.org",
            }
        ),
    )
    spaces = tmp_path / "spaces"
    spaces.mkdir()
    write(spaces / "alpenhof.json", (FIXTURES / "offers" / "alpenhof.json").read_text("utf-8"))
    mapping_dir = tmp_path / "m"
    mapping_dir.mkdir()
    write(
        mapping_dir / "map.json",
        (FIXTURES / "mapping" / "hotels.mapping.json").read_text("utf-8"),
    )
    write(mapping_dir / "rows.csv", (FIXTURES / "mapping" / "hotels.csv").read_text("utf-8"))
    manifest = write(
        tmp_path / "manifest.json",
        json.dumps(
            {
                "sources": [
                    {
                        "id": "dmo",
                        "kind": "documents",
                        "path": "docs",
                        "mapping": "m/map.json",
                        "records": "m/rows.csv",
                        "offerSpaces": "spaces",
                        "k": 3,
                        "strategy": "per-room-min",
                    }
                ]
            }
        ),
    )
    config = Config(store="kg.nq", manifest="manifest.json", base_dir=tmp_path)
    status, reports = run_lifecycle(config, date(2017, 12, 1))
    assert status == 0
    report = reports[0]
    assert report.documents_received == 2 + 5 + 3  # files + csv rows + offers
    assert report.documents_rejected == 0
    assert report.entities_consolidated == 1  # Alpenhof / ALPENHOF merged
    assert report.inferred_added > 0
    store = load_store(tmp_path / "kg.nq")
    assert store.count_total == len(parse_nquads((tmp_path / "kg.nq").read_text()))


# -- analytics over a persisted store ----------------------------------------------


@pytest.fixture(scope="module")
def history_store_file(tmp_path_factory):
    store = build_history_store()
    path = tmp_path_factory.mktemp("history") / "kg.nq"
    save_store(store, path)
    return path


def test_analyze_price_series_csv_five_rows(history_store_file, capsys):
    code = main(
        [
            "--format",
            "csv",
            "analyze",
            "price-series",
            "--store",
            str(history_store_file),
            "--region",
            "Seefeld",
            "--from",
            "2017-12",
            "--to",
            "2018-04",
        ]
    )
    assert code == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["region", "year", "month", "avg_min", "avg_max", "count"]
    assert len(rows) == 1 + 5  # header + one row per month Dec..Apr
    assert rows[1][0] == "Seefeld"


def test_analyze_compare_regions(history_store_file, capsys):
    code = main(
        [
            "analyze",
            "compare",
            "--store",
            str(history_store_file),
            "--regions",
            "Seefeld,Mayrhofen",
            "--from",
            "2017-12",
            "--to",
            "2018-04",
        ]
    )
    assert code == 0
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) == 10
    seefeld = {(r["year"], r["month"]): r for r in rows if r["region"] == "Seefeld"}
    mayrhofen = {(r["year"], r["month"]): r for r in rows if r["region"] == "Mayrhofen"}
    for ym in seefeld:
        assert float(seefeld[ym]["avg_min"]) > float(mayrhofen[ym]["avg_min"])


def test_global_store_flag(history_store_file, capsys):
    code = main(
        [
            "--store",
            str(history_store_file),
            "analyze",
            "price-series",
            "--region",
            "Mayrhofen",
            "--from",
            "2017-12",
            "--to",
            "2018-04",
        ]
    )
    assert code == 0
    assert len(json.loads(capsys.readouterr().out)) == 5


def test_missing_store_is_usage_error(capsys):
    code = main(["export"])
    assert code == 2
    assert "--store" in capsys.readouterr().err


def test_crawl_subcommand(tmp_path, site_server, capsys):
    seeds = write(tmp_path / "seeds.txt", site_server.base_url + "/index.html\n")
    store_file = tmp_path / "kg.nq"
    code = main(
        [
            "crawl",
            "--seeds",
            str(seeds),
            "--date",
            "2018-03-01",
            "--store",
            str(store_file),
        ]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["blocksExtracted"] == 4
    assert payload["quadsWritten"] > 0
    assert payload["inferredAdded"] > 0
    graphs = {q.graph.value for q in parse_nquads(store_file.read_text())}
    assert all(g.startswith("urn:crawl:") for g in graphs)


def test_serve_rejects_bad_port(tmp_path, capsys):
    store_file = tmp_path / "kg.nq"
    save_store(QuadStore(), store_file)
    assert main(["serve", "--store", str(store_file), "--port", "99999"]) == 2


def test_store_persistence_round_trip(tmp_path):
    store = build_history_store()
    path = tmp_path / "kg.nq"
    save_store(store, path)
    loaded = load_store(path)
    assert serialize_nquads(loaded) == serialize_nquads(store)

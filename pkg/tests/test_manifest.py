from conftest import tiny_params
from xwebbench.codec.manifest import (
    MANIFEST_NAME, RunManifest, document_digests, verify_manifest, write_manifest,
)
from xwebbench.datagen.build import write_warehouse


def _generated(tmp_path):
    gp = tiny_params(seed=12, density=0.0005)
    generated = write_warehouse(gp, tmp_path)
    manifest = RunManifest(
        params=gp.echo(),
        fact_count=generated.fact_count,
        counts=generated.dimension_counts,
        digests=document_digests(tmp_path),
    )
    write_manifest(manifest, tmp_path)
    return manifest


def test_manifest_text_round_trip(tmp_path):
    manifest = _generated(tmp_path)
    text = (tmp_path / MANIFEST_NAME).read_text()
    assert "gen.density=0.0005\n" in text
    assert "count.parts=20\n" in text
    back = RunManifest.from_file(tmp_path / MANIFEST_NAME)
    assert back.fact_count == manifest.fact_count
    assert back.counts == manifest.counts
    assert back.digests == manifest.digests
    assert back.params["seed"] == "12"
    assert back.created_at == manifest.created_at


def test_intact_warehouse(tmp_path):
    _generated(tmp_path)
    assert verify_manifest(tmp_path) == []


def test_edited_and_missing_documents(tmp_path):
    _generated(tmp_path)
    data = (tmp_path / "d_part.xml").read_bytes()
    (tmp_path / "d_part.xml").write_bytes(data.replace(b"Brand#", b"Brand-", 1))
    (tmp_path / "d_supplier.xml").unlink()
    assert sorted(verify_manifest(tmp_path)) == ["d_part.xml", "d_supplier.xml"]


def test_partitioned_write_keeps_every_fact(tmp_path):
    gp = tiny_params(seed=12, density=0.002)
    single = write_warehouse(gp, tmp_path / "one")
    split = write_warehouse(gp, tmp_path / "three", partitions=3)
    assert len(split.stats) == 3
    assert sum(s.candidates for s in split.stats) == single.stats[0].candidates
    assert (tmp_path / "one" / "d_part.xml").read_bytes() == (tmp_path / "three" / "d_part.xml").read_bytes()

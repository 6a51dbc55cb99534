import json
import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aradhati.builder import (
    REFERENCE_SPLIT,
    BuildError,
    SplitSpec,
    _category_quotas,
    augment,
    build_corpus,
    build_manifest,
    export_csv,
    import_csv,
    oversample,
    split,
    write_build,
)
from aradhati.records import Class4, Dataset, InstanceRecord


def rec(i, label, dataset="ASTD", text=None, domain="Tweets"):
    cls = Class4.OBJ if label == 0 else Class4.POS
    return InstanceRecord(f"{dataset}-{i}", text or f"نص رقم {i}", cls, domain, label, Dataset(dataset))


def random_pool(rng, n_obj, n_subj, dup_rate=0.3):
    texts = [f"تغريدة {k}" for k in range(max(1, (n_obj + n_subj) // 2))]
    out = []
    for i in range(n_obj + n_subj):
        label = 0 if i < n_obj else 1
        text = rng.choice(texts) if rng.random() < dup_rate else f"فريد {i}"
        out.append(rec(i, label, text=text))
    return out


def test_oversample_parity_and_provenance():
    base = [rec(i, 0) for i in range(10)] + [rec(100 + i, 1) for i in range(3)]
    out = oversample(base, seed=1)
    labels = Counter(r.label for r in out)
    assert labels[0] == labels[1] == 10
    dups = out[len(base):]
    assert all(d.duplicate_of in {r.id for r in base if r.label == 1} for d in dups)
    assert [d.id.split("#dup")[1] for d in dups] == [str(k) for k in range(7)]
    assert oversample(base, seed=1) == out
    with pytest.raises(BuildError):
        oversample([rec(0, 0)], seed=0)


def test_category_quotas_remainder_to_last():
    pool = [rec(i, 0, "SANAD", domain=c) for i, c in enumerate(["Technology", "Medical", "Sports"] * 5)]
    assert _category_quotas(pool, 32500) == {"Medical": 10833, "Sports": 10833, "Technology": 10834}
    assert _category_quotas(pool, 10) == {"Medical": 3, "Sports": 3, "Technology": 4}


def test_augment_composition():
    sanad = [rec(i, 0, "SANAD", domain=c) for i, c in enumerate(["Medical", "Sports", "Technology"] * 10)]
    labr = [rec(i, 1, "LABR", domain="Book reviews") for i in range(20)]
    hard = [rec(i, 1, "HARD", domain="Hotel reviews") for i in range(20)]
    base = [rec(i, 0) for i in range(4)]
    out = augment(base, sanad, (labr, hard), n=12, seed=3)
    added = out[len(base):]
    assert out[: len(base)] == base
    by_ds = Counter(r.dataset.value for r in added)
    assert by_ds == {"SANAD": 12, "LABR": 6, "HARD": 6}
    assert sum(r.label == 0 for r in added) == sum(r.label == 1 for r in added)
    assert Counter(r.domain for r in added if r.dataset is Dataset.SANAD) == {"Medical": 4, "Sports": 4,
                                                                              "Technology": 4}
    assert len({r.id for r in added}) == len(added)
    with pytest.raises(BuildError):
        augment(base, sanad, (labr, hard), n=7, seed=0)
    with pytest.raises(BuildError):
        augment(base, sanad, (labr, hard), n=60, seed=0)


def _check_partition(records, train, test, fraction):
    ids = [r.id for r in records]
    assert sorted(ids) == sorted(r.id for r in train + test)
    assert not {r.id for r in train} & {r.id for r in test}
    strata = Counter(r.stratum for r in records)
    got = Counter(r.stratum for r in train)
    for key, n in strata.items():
        if n >= 2:
            assert abs(got[key] - fraction * n) <= 1, (key, got[key], n)
        else:
            assert got[key] == n


def test_split_small_strata_go_to_train(caplog):
    records = [rec(0, 0), rec(1, 1, "LABR")] + [rec(10 + i, 0, "SANAD", domain="Sports") for i in range(5)]
    train, test = split(records, SplitSpec(0.8, seed=0))
    assert {r.id for r in train} >= {"ASTD-0", "LABR-1"}
    assert "all go to train" in caplog.text
    _check_partition(records, train, test, 0.8)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 40), st.integers(2, 40), st.sampled_from([0.5, 0.8, 0.9]))
def test_split_properties(seed, n_obj, n_subj, fraction):
    rng = random.Random(seed)
    records = random_pool(rng, n_obj, n_subj)
    train, test = split(records, SplitSpec(fraction, seed=seed))
    _check_partition(records, train, test, fraction)
    s_train, s_test = split(records, SplitSpec(fraction, seed=seed, strict=True))
    assert sorted(r.id for r in s_train + s_test) == sorted(r.id for r in records)
    assert not {r.text for r in s_train} & {r.text for r in s_test}


def test_split_keeps_input_order():
    records = [rec(i, i % 2) for i in range(30)]
    train, test = split(records, SplitSpec(0.8, seed=5))
    pos = {r.id: k for k, r in enumerate(records)}
    assert [pos[r.id] for r in train] == sorted(pos[r.id] for r in train)
    assert [pos[r.id] for r in test] == sorted(pos[r.id] for r in test)


text_field = st.text(st.characters(blacklist_categories=("Cs",), blacklist_characters="\x00"), min_size=1,
                     max_size=30).filter(lambda t: t.strip())


VALID = [(c, Dataset.ASTD) for c in Class4] + [(Class4.OBJ, Dataset.SANAD), (Class4.POS, Dataset.HARD),
                                                (Class4.NEG, Dataset.HARD)] + [(c, Dataset.LABR) for c in
                                                                                (Class4.POS, Class4.NEG, Class4.NEUTRAL)]


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(text_field, st.sampled_from(VALID)), min_size=1, max_size=8))
def test_csv_round_trip(tmp_path_factory, rows):
    records = []
    for i, (text, (cls, ds)) in enumerate(rows):
        label = 0 if cls is Class4.OBJ else 1
        records.append(InstanceRecord(f"x-{i}", text, cls, "Some, domain \"q\"", label, ds))
    path = tmp_path_factory.mktemp("csv") / "c.csv"
    export_csv(records, path)
    back = import_csv(path, id_prefix="x")
    assert not back.errors
    assert [(r.text, r.class4, r.domain, r.label, r.dataset) for r in back] == \
        [(r.text, r.class4, r.domain, r.label, r.dataset) for r in records]


def test_import_counts_bad_rows(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("Text,Class,Domain,Label,Dataset\n"
                 "نص,OBJ,Tweets,0,ASTD\n"
                 "نص,POS,Tweets,0,ASTD\n"      # class/label mismatch
                 "نص,OBJ,Tweets,2,ASTD\n"
                 "نص,OBJ,Tweets\n"
                 "نص آخر,NEG,Book reviews,1,LABR\n", encoding="utf-8")
    res = import_csv(p)
    assert [r.id for r in res] == ["c-0", "c-4"]
    assert [line for line, _ in res.errors] == [3, 4, 5]
    bad = tmp_path / "h.csv"
    bad.write_text("text,label\n", encoding="utf-8")
    with pytest.raises(BuildError):
        import_csv(bad)


def brute_tally(rows):
    counts = {}
    for ds, label in rows:
        counts.setdefault(ds, {}).setdefault(str(label), 0)
        counts[ds][str(label)] += 1
    return counts


@pytest.mark.parametrize("mode", ["paper", "strict"])
def test_build_manifest_matches_csv(tmp_path, ingested, mode):
    result = build_corpus(ingested, augment_n=30, mode=mode, seed=2)
    paths = write_build(result, tmp_path)
    manifest = json.loads(paths["manifest"].read_text(encoding="utf-8"))
    for part in ("train", "test"):
        rows = [(r.dataset.value, r.label) for r in import_csv(paths[part])]
        assert manifest["counts"][part] == brute_tally(rows)
        assert manifest["totals"][part] == len(rows)
    assert manifest["meta"]["n_obj"] == manifest["meta"]["n_subj"] == 30
    assert manifest["meta"]["reference_split"] == REFERENCE_SPLIT
    for name, res in ingested.items():
        assert manifest["meta"]["ingest"][name]["malformed"] == len(res.errors)


def test_strict_build_has_no_leakage(ingested):
    result = build_corpus(ingested, augment_n=30, mode="strict", seed=4)
    assert not {r.text for r in result.train} & {r.text for r in result.test}
    astd_train = [r for r in result.train if r.dataset is Dataset.ASTD]
    assert Counter(r.label for r in astd_train)[0] == Counter(r.label for r in astd_train)[1]
    assert result.manifest.duplicates["test"] == 0


def test_paper_build_counts(ingested):
    result = build_corpus(ingested, augment_n=30, mode="paper", seed=4)
    per = result.manifest.totals["per_dataset"]
    assert per["LABR"] == {"train": 12, "test": 3}
    assert per["HARD"] == {"train": 12, "test": 3}
    assert per["SANAD"] == {"train": 24, "test": 6}


def test_build_is_deterministic(tmp_path, ingested):
    a = write_build(build_corpus(ingested, augment_n=30, seed=9), tmp_path / "a")
    b = write_build(build_corpus(ingested, augment_n=30, seed=9), tmp_path / "b")
    for key in a:
        assert a[key].read_bytes() == b[key].read_bytes()


def test_build_manifest_duplicates():
    train = [rec(0, 0), rec(1, 1)]
    dup = InstanceRecord("ASTD-1#dup0", train[1].text, Class4.POS, "Tweets", 1, Dataset.ASTD, duplicate_of="ASTD-1")
    m = build_manifest(train + [dup], [])
    assert m.duplicates == {"train": 1, "test": 0}
    assert m.counts["train"] == {"ASTD": {"0": 1, "1": 2}}

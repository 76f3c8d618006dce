import pytest

from veristack.corpus import (
    Dataset,
    Record,
    label_distribution,
    load_corpus,
    merge,
    write_corpus,
)
from veristack.errors import FormatError, StateError, ValidationError

from conftest import make_dataset


class TestLoad:
    def test_two_row_file_in_order(self, tiny_corpus_tsv):
        ds = load_corpus(tiny_corpus_tsv)
        assert len(ds) == 2
        assert [r.id for r in ds] == ["1", "2"]
        assert ds.records[0] == Record("1", "a post", "real")
        assert ds.records[1] == Record("2", "b post", "fake")

    def test_csv_with_quoted_fields(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text('id,tweet,label\n1,"a, quoted post",real\n', encoding="utf-8")
        ds = load_corpus(path)
        assert ds.records[0].text == "a, quoted post"

    def test_duplicate_id_names_the_id(self, tmp_path):
        path = tmp_path / "dup.tsv"
        path.write_text("id\ttweet\tlabel\n7\tx\treal\n7\ty\tfake\n", encoding="utf-8")
        with pytest.raises(ValidationError, match="'7'"):
            load_corpus(path)

    def test_missing_tweet_column(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("id\tbody\n1\tx\n", encoding="utf-8")
        with pytest.raises(FormatError, match="tweet"):
            load_corpus(path)

    def test_bad_row_reports_row_number(self, tmp_path):
        path = tmp_path / "ragged.tsv"
        path.write_text("id\ttweet\tlabel\n1\tx\treal\n2\tonly-two\n", encoding="utf-8")
        with pytest.raises(FormatError, match="row 3"):
            load_corpus(path)

    def test_labels_lowercased(self, tmp_path):
        path = tmp_path / "mixed.tsv"
        path.write_text("id\ttweet\tlabel\n1\tx\tReal\n2\ty\tFAKE\n", encoding="utf-8")
        ds = load_corpus(path)
        assert [r.label for r in ds] == ["real", "fake"]

    def test_unlabeled_file_is_first_class(self, tmp_path):
        path = tmp_path / "test.tsv"
        path.write_text("id\ttweet\n1\tx\n2\ty\n", encoding="utf-8")
        ds = load_corpus(path)
        assert not ds.labeled
        with pytest.raises(StateError):
            ds.labels()

    def test_missing_id_column_synthesizes_sequential_ids(self, tmp_path):
        path = tmp_path / "noid.tsv"
        path.write_text("tweet\tlabel\nx\treal\ny\tfake\n", encoding="utf-8")
        ds = load_corpus(path)
        assert ds.ids() == ["1", "2"]
        assert ds.provenance["synthesized_ids"] is True

    def test_empty_text_warns_not_crashes(self, tmp_path):
        path = tmp_path / "empty.tsv"
        path.write_text("id\ttweet\n1\t\n", encoding="utf-8")
        with pytest.warns(UserWarning, match="empty text"):
            ds = load_corpus(path)
        assert ds.records[0].text == ""

    def test_unknown_label_rejected(self, tmp_path):
        path = tmp_path / "weird.tsv"
        path.write_text("id\ttweet\tlabel\n1\tx\tmaybe\n", encoding="utf-8")
        with pytest.raises(ValidationError, match="maybe"):
            load_corpus(path)


class TestRoundTrip:
    @pytest.mark.parametrize("fmt", ["tsv", "csv"])
    def test_load_write_load_identical(self, tmp_path, fmt):
        ds = make_dataset(
            [(1, "plain text", "real"), (2, "covid 19 cases", "fake"), (3, "x", "real")]
        )
        path = tmp_path / f"out.{fmt}"
        write_corpus(ds, path)
        again = load_corpus(path)
        assert again.records == ds.records

    def test_csv_round_trips_commas_and_quotes(self, tmp_path):
        ds = make_dataset([(1, 'he said "hi", loudly', None), (2, "b", None)])
        path = tmp_path / "q.csv"
        write_corpus(ds, path)
        assert load_corpus(path).records == ds.records

    def test_unlabeled_round_trip(self, tmp_path):
        ds = make_dataset([(1, "x", None), (2, "y", None)])
        path = tmp_path / "u.tsv"
        write_corpus(ds, path)
        again = load_corpus(path)
        assert not again.labeled
        assert again.records == ds.records


class TestLabelDistribution:
    def test_single_fake_record(self):
        ds = make_dataset([(1, "x", "fake")])
        dist = label_distribution(ds)
        assert dist.counts == {"fake": 1, "real": 0}
        assert dist.fractions["fake"] == 1.0

    def test_counts_sum_and_fractions_sum(self, tiny_labeled):
        dist = label_distribution(tiny_labeled)
        assert sum(dist.counts.values()) == len(tiny_labeled)
        assert abs(sum(dist.fractions.values()) - 1.0) < 1e-12

    def test_permutation_invariant(self, tiny_labeled):
        shuffled = tiny_labeled.subset([2, 0, 3, 1])
        assert label_distribution(shuffled).counts == label_distribution(tiny_labeled).counts

    def test_unlabeled_raises(self):
        ds = make_dataset([(1, "x", None)])
        with pytest.raises(StateError):
            label_distribution(ds)


class TestMerge:
    def test_concatenation_order_and_name(self):
        a = make_dataset([(1, "a", "real")])
        b = make_dataset([(2, "b", "fake")])
        m = merge(a, b)
        assert m.split_name == "merged"
        assert [r.id for r in m] == ["1", "2"]
        assert len(m) == len(a) + len(b)

    def test_empty_plus_x_is_x(self):
        empty = Dataset((), "derived")
        x = make_dataset([(1, "a", None)])
        assert merge(empty, x).records == x.records

    def test_overlapping_ids_rejected(self):
        a = make_dataset([(3, "a", None)])
        b = make_dataset([(3, "b", None)])
        with pytest.raises(ValidationError, match="3"):
            merge(a, b)


class TestInvariants:
    def test_mixed_labeling_rejected(self):
        with pytest.raises(ValidationError):
            Dataset((Record("1", "x", "real"), Record("2", "y", None)))

    def test_duplicate_ids_rejected_at_construction(self):
        with pytest.raises(ValidationError):
            Dataset((Record("1", "x", None), Record("1", "y", None)))

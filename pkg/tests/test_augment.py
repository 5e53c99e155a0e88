from hypothesis import given
from hypothesis import strategies as st

from morphan import augment
from morphan.corpus import INVALID, VALID, AnalogyQuadruple

words = st.text("abcdef", min_size=1, max_size=5)
quads = st.builds(AnalogyQuadruple, words, words, words, words)


class TestForms:
    def test_fixed_order(self, quad):
        forms = [":".join(f.words) for f in augment.equivalent_forms(quad)]
        assert forms == [
            "cat:cats:dog:dogs", "dog:dogs:cat:cats", "cat:dog:cats:dogs", "cats:cat:dogs:dog",
            "dogs:cats:dog:cat", "dogs:dog:cats:cat", "dog:cat:dogs:cats", "cats:dogs:cat:dog",
        ]

    def test_base_negatives(self, quad):
        assert [f.words for f in augment.negative_forms(quad)] == [
            ("cats", "cat", "dog", "dogs"), ("dog", "cats", "cat", "dogs"), ("cat", "cat", "dog", "dogs")]
        assert all(f.label == INVALID for f in augment.negative_forms(quad))

    def test_generators(self, quad):
        assert augment.symmetry(quad).words == ("dog", "dogs", "cat", "cats")
        assert augment.central_permutation(quad).words == ("cat", "dog", "cats", "dogs")

    @given(quads)
    def test_group_closure(self, q):
        # the forms of any form are the same set
        base = {f.words for f in augment.equivalent_forms(q)}
        for f in augment.equivalent_forms(q):
            assert {g.words for g in augment.equivalent_forms(f)} == base
        assert augment.symmetry(augment.symmetry(q)).words == q.words
        assert augment.central_permutation(augment.central_permutation(q)).words == q.words

    def test_permutations_form_a_group(self):
        perms = set(augment.EQUIVALENT_PERMUTATIONS)
        for p in perms:
            for r in perms:
                assert tuple(p[i] for i in r) in perms


class TestSets:
    def test_training_counts(self, quad):
        s = augment.augment_for_training(quad)
        assert len(s.positives) == 8 and len(s.negatives) == 3
        assert all(p.label == VALID for p in s.positives)
        assert s.examples == s.positives + s.negatives

    def test_round_robin_eight(self, quad):
        s = augment.augment_for_training(quad, neg_forms_per_base=8)
        assert len(s.negatives) == 8
        assert [n.words for n in s.negatives[:3]] == [n.words for n in augment.negative_forms(quad)]
        assert len({n.words for n in s.negatives}) == 8

    def test_eval_counts(self, quad):
        s = augment.augment_for_eval(quad)
        assert len(s.positives) == 8 and len(s.negatives) == 24
        assert all(n.label == INVALID for n in s.negatives)

    def test_conflicts_dropped_on_request(self):
        q = AnalogyQuadruple("a", "a", "a", "a")
        assert len(augment.augment_for_eval(q).negatives) == 24
        assert augment.augment_for_eval(q, dedup_conflicts=True).negatives == []
        assert augment.augment_for_training(q, dedup_conflicts=True).negatives == []

    def test_bad_negative_count(self, quad):
        import pytest

        with pytest.raises(ValueError):
            augment.augment_for_training(quad, neg_forms_per_base=5)

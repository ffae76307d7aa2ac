from collections import Counter

import numpy as np
import pytest

from app.models.cards import Card, Hand
from app.models.classes import SHAPES
from app.services.canonical import (
    SUIT_PERMUTATIONS,
    canonical_codes,
    canonical_key,
    canonicalize,
    class_of,
    class_table,
    enumerate_classes,
    first_use_sequences,
    orbit_size,
    patterns_per_shape,
    shape_of,
)
from app.services.deck import HANDS_TOTAL, all_hands, parse_hand


def _relabel(hand: Hand, perm: tuple[int, ...]) -> Hand:
    return Hand.of(Card(c.denomination, perm[c.suit]) for c in hand)


class TestEnumeration:
    def test_class_count(self):
        assert len(enumerate_classes()) == 134_459
        assert len(class_table()) == 134_459

    def test_orbit_weights_cover_all_hands(self):
        assert int(class_table().orbit.sum()) == HANDS_TOTAL
        assert set(class_table().orbit.tolist()) == {4, 12, 24}

    def test_patterns_per_shape(self):
        assert patterns_per_shape() == {
            "distinct": 51, "one_pair": 20, "two_pairs": 8,
            "trips": 5, "full_house": 2, "quads": 1,
        }

    def test_first_use_sequences(self):
        seqs = first_use_sequences()
        assert len(seqs) == 51
        for seq in seqs:
            assert seq[0] == 1
            assert all(seq[i] <= max(seq[:i]) + 1 for i in range(1, 5))

    def test_shape_order_and_counts(self):
        classes = enumerate_classes()
        shapes = [c.shape for c in classes]
        assert shapes == sorted(shapes, key=SHAPES.index)
        counts = Counter(shapes)
        assert counts["distinct"] == 1287 * 51
        assert counts["quads"] == 156
        assert counts["full_house"] == 156 * 2

    def test_first_and_last(self):
        classes = enumerate_classes()
        assert classes[0].class_index == 1
        assert str(classes[0].hand) == "2c 3c 4c 5c 6c"
        assert classes[0].canonical.pattern == (1, 1, 1, 1, 1)
        assert classes[-1].shape == "quads"
        assert classes[-1].orbit_size == 4

    def test_representatives_are_canonical(self):
        for equiv in enumerate_classes()[::997]:
            assert canonical_key(equiv.hand) == equiv.hand.indices
            assert orbit_size(equiv.canonical) == equiv.orbit_size

    def test_labels_are_first_use(self):
        for equiv in enumerate_classes()[::331]:
            pattern = equiv.canonical.pattern
            assert pattern[0] == 1
            assert all(pattern[i] <= max(pattern[:i]) + 1 for i in range(1, 5))


class TestCanonicalForm:
    @pytest.mark.parametrize("text", ["5c 6d 8h 9s Th", "Tc Jc Qc Kc Ac", "2c 2d 7h 7s Ks", "9c 9d 9h 9s 2c"])
    def test_suit_permutation_invariance(self, text):
        hand = parse_hand(text)
        target = canonicalize(hand)
        for perm in SUIT_PERMUTATIONS:
            assert canonicalize(_relabel(hand, perm)) == target
            assert class_of(_relabel(hand, perm)) == class_of(hand)

    @pytest.mark.parametrize("text, size", [
        ("Tc Jc Qc Kc Ac", 4),
        ("9c 9d 9h 9s 2c", 4),
        ("2c 2d 7h 7s Ks", 12),
        ("5c 6d 8h 9s Th", 24),
    ])
    def test_orbit_size(self, text, size):
        assert orbit_size(parse_hand(text)) == size

    @pytest.mark.parametrize("text, shape", [
        ("5c 6d 8h 9s Th", "distinct"),
        ("5c 5d 8h 9s Th", "one_pair"),
        ("5c 5d 8h 8s Th", "two_pairs"),
        ("5c 5d 5h 9s Th", "trips"),
        ("5c 5d 5h 9s 9h", "full_house"),
        ("5c 5d 5h 5s Th", "quads"),
    ])
    def test_shape_of(self, text, shape):
        assert shape_of(parse_hand(text)) == shape

    def test_canonical_key_of_partial_hands(self):
        assert canonical_key([]) == ()
        assert canonical_key([Card.parse("As")]) == (48,)
        assert canonical_key([Card.parse("Kh"), Card.parse("Ah")]) == (44, 48)

    def test_class_of_membership(self):
        equiv = class_of(parse_hand("Ks Qs Js Ts As"))
        assert str(equiv.hand) == "Tc Jc Qc Kc Ac"


class TestExhaustiveCanonicalisation:
    def test_every_hand_maps_to_an_enumerated_class(self):
        reps = class_table().cards.astype(np.int64)
        rep_codes = reps @ (52 ** np.arange(4, -1, -1, dtype=np.int64))
        assert len(np.unique(rep_codes)) == len(reps)

        hands = all_hands()
        counts = np.zeros(len(reps), dtype=np.int64)
        order = np.argsort(rep_codes)
        for start in range(0, HANDS_TOTAL, 1 << 18):
            codes = canonical_codes(hands[start:start + (1 << 18)])
            pos = np.searchsorted(rep_codes[order], codes)
            assert (rep_codes[order][pos] == codes).all()
            counts += np.bincount(order[pos], minlength=len(reps))
        assert (counts == class_table().orbit).all()

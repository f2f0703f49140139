import io

from django.test import SimpleTestCase

import numpy as np
from numpy.testing import assert_array_equal

from mahnn.constants import PAD_ID, PAD_TOKEN, UNK_ID, UNK_TOKEN
from mahnn.embeddings import (
    EmbeddingTable,
    Vocabulary,
    build_vocabulary,
    encode_and_pad,
    encode_batch,
    init_oov,
    load_word2vec_text,
    max_sequence_length,
)
from mahnn.exceptions import ConfigError, ContractError, ParseError


class VocabularyTest(SimpleTestCase):

    def setUp(self):
        self.vocabulary = build_vocabulary([
            ['a', 'good', 'movie'],
            ['a', 'bad', 'movie', '.'],
        ])

    def test_reserved_ids(self):
        self.assertEqual(self.vocabulary.lookup(PAD_TOKEN), PAD_ID)
        self.assertEqual(self.vocabulary.lookup(UNK_TOKEN), UNK_ID)
        self.assertEqual(self.vocabulary.lookup('unseen'), UNK_ID)

    def test_first_seen_order_and_counts(self):
        self.assertEqual(
            list(self.vocabulary),
            [PAD_TOKEN, UNK_TOKEN, 'a', 'good', 'movie', 'bad', '.']
        )
        self.assertEqual(self.vocabulary.num_words, 5)
        self.assertEqual(self.vocabulary.counts['movie'], 2)
        self.assertTrue(self.vocabulary.is_rare('good', 2))
        self.assertFalse(self.vocabulary.is_rare('movie', 2))

    def test_text_round_trip(self):
        lines = self.vocabulary.to_text().splitlines()
        restored = Vocabulary.from_lines(lines)

        self.assertEqual(list(restored), list(self.vocabulary))

    def test_text_without_reserved_tokens(self):
        with self.assertRaises(ParseError):
            Vocabulary.from_lines(['a', 'b'])


class EncodeAndPadTest(SimpleTestCase):

    def setUp(self):
        self.vocabulary = Vocabulary(['a', 'b', 'c'])

    def test_front_padding(self):
        ids, mask = encode_and_pad(['a', 'b'], 4, self.vocabulary)

        self.assertEqual(ids, [PAD_ID, PAD_ID, 2, 3])
        self.assertEqual(mask, [True, True, False, False])

    def test_truncation_keeps_first_tokens(self):
        ids, mask = encode_and_pad(['c', 'b', 'a'], 2, self.vocabulary)

        self.assertEqual(ids, [4, 3])
        self.assertEqual(mask, [False, False])

    def test_unknown_tokens(self):
        ids, _ = encode_and_pad(['z'], 1, self.vocabulary)

        self.assertEqual(ids, [UNK_ID])

    def test_invalid_length(self):
        with self.assertRaises(ContractError):
            encode_and_pad(['a'], 0, self.vocabulary)

    def test_empty_vocabulary(self):
        with self.assertRaises(ConfigError):
            encode_and_pad(['a'], 3, Vocabulary())

    def test_batch(self):
        ids, masks = encode_batch([['a'], ['a', 'b', 'c']], 3, self.vocabulary)

        assert_array_equal(ids, [[0, 0, 2], [2, 3, 4]])
        assert_array_equal(masks, [[True, True, False], [False] * 3])
        self.assertEqual(max_sequence_length([['a'], ['a', 'b']]), 2)


class Word2VecLoaderTest(SimpleTestCase):

    def setUp(self):
        self.vocabulary = build_vocabulary([['good', 'bad', 'other']])

    def test_matches_vocabulary_words(self):
        source = io.StringIO(
            '3 2\n'
            'good 0.1 0.2\n'
            'bad 0.3 0.4\n'
            'unseen 1.0 1.0\n'
        )
        table, matched = load_word2vec_text(source, self.vocabulary, 2)

        self.assertEqual(matched, 2)
        assert_array_equal(
            table.weight.data[self.vocabulary.lookup('bad')], [0.3, 0.4]
        )
        assert_array_equal(
            table.weight.data[self.vocabulary.lookup('other')], [0.0, 0.0]
        )
        self.assertFalse(table.matched[self.vocabulary.lookup('other')])

    def test_rare_words_keep_random_vectors(self):
        source = io.StringIO('1 2\ngood 0.1 0.2\n')
        _, matched = load_word2vec_text(
            source, self.vocabulary, 2, rare_word_threshold=2
        )

        self.assertEqual(matched, 0)

    def test_dimension_mismatch(self):
        with self.assertRaises(ConfigError):
            load_word2vec_text(
                io.StringIO('1 3\ngood 1 2 3\n'), self.vocabulary, 2
            )

    def test_bad_header(self):
        with self.assertRaises(ParseError) as context:
            load_word2vec_text(io.StringIO('two\n'), self.vocabulary, 2)

        self.assertEqual(context.exception.line_number, 1)

    def test_wrong_value_count(self):
        source = io.StringIO('2 2\ngood 0.1 0.2\nbad 0.3\n')

        with self.assertRaises(ParseError) as context:
            load_word2vec_text(source, self.vocabulary, 2)

        self.assertEqual(context.exception.line_number, 3)

    def test_row_count_mismatch(self):
        with self.assertRaises(ParseError):
            load_word2vec_text(
                io.StringIO('5 2\ngood 0.1 0.2\n'), self.vocabulary, 2
            )


class EmbeddingTableTest(SimpleTestCase):

    def test_init_oov_fills_only_unmatched_rows(self):
        weight = np.zeros((4, 3))
        weight[2] = [1.0, 2.0, 3.0]
        table = EmbeddingTable(weight, matched=[False, False, True, False])

        init_oov(table, np.random.default_rng(0), bound=0.25)

        assert_array_equal(table.weight.data[2], [1.0, 2.0, 3.0])
        others = table.weight.data[[0, 1, 3]]
        self.assertTrue((np.abs(others) <= 0.25).all())
        self.assertTrue((others != 0).all())

    def test_init_oov_draws_from_the_uniform_range(self):
        table = EmbeddingTable.empty(1000, 100)

        init_oov(table, np.random.default_rng(5), bound=0.25)

        values = table.weight.data
        self.assertLessEqual(abs(values.mean()), 0.01)
        self.assertAlmostEqual(values.var(), 0.25 ** 2 / 3, delta=0.002)

    def test_trainable_flag(self):
        table = EmbeddingTable.empty(3, 2)
        self.assertTrue(table.trainable)

        table.trainable = False

        self.assertFalse(table.weight.requires_grad)

    def test_rejects_non_finite_weights(self):
        with self.assertRaises(ContractError):
            EmbeddingTable(np.array([[np.inf, 0.0]]))

    def test_lookup(self):
        table = EmbeddingTable(np.arange(6.0).reshape(3, 2))

        assert_array_equal(table.lookup([[2, 0]]).data, [[[4, 5], [0, 1]]])

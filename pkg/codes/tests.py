import tempfile
from fractions import Fraction
from pathlib import Path
from unittest import mock

import numpy as np
from django.test import SimpleTestCase

from .construction import bundled_bg1, bundled_bg2, expand_base_graph
from .exceptions import CodeIntegrityError, CodeParseError, DimensionError, InvalidExpansionFactor
from .generator import build_generator, encode, gf2_rank, pack_rows, row_reduce
from .io import degree_summary, format_alist, load_code, parse_alist, parse_basegraph, save_alist, save_basegraph
from .models import BaseGraph, ParityCheckMatrix, syndrome

SMALL_ALIST = """\
3 2
2 2
1 2 1
2 2
1 0
1 2
2 0
1 2
2 3
"""


class ExpansionTests(SimpleTestCase):
    def test_single_entry_circulant(self):
        bg = BaseGraph(rows=1, cols=2, entries=((0, 0, 2),))
        h = expand_base_graph(bg, 4)
        self.assertEqual((h.m, h.n, h.nnz), (4, 8, 4))
        edges = sorted(zip(h.edge_check.tolist(), h.edge_var.tolist()))
        self.assertEqual(edges, [(0, 2), (1, 3), (2, 0), (3, 1)])

    def test_shift_reduced_mod_z(self):
        bg = BaseGraph(rows=1, cols=2, entries=((0, 1, 6),))
        h = expand_base_graph(bg, 4)
        self.assertEqual(h.check(0).tolist(), [4 + 2])

    def test_zero_expansion_rejected(self):
        with self.assertRaises(InvalidExpansionFactor):
            expand_base_graph(bundled_bg1(), 0)

    def test_bundled_bg1_shape(self):
        bg = bundled_bg1()
        self.assertEqual((bg.rows, bg.cols, bg.num_entries), (46, 68, 316))
        self.assertTrue(all(0 <= s < 384 for _, _, s in bg.entries))
        self.assertEqual(bg, bundled_bg1())

    def test_bundled_bg2_shape(self):
        bg = bundled_bg2()
        self.assertEqual((bg.rows, bg.cols, bg.num_entries), (42, 52, 197))

    def test_full_lift_dimensions(self):
        h = expand_base_graph(bundled_bg1(), 384)
        self.assertEqual((h.m, h.n, h.nnz), (17664, 26112, 121344))
        self.assertEqual(h.layer_size, 384)

    def test_expansion_preserves_row_degrees(self):
        bg = bundled_bg2()
        for z in (1, 3, 8):
            h = expand_base_graph(bg, z)
            np.testing.assert_array_equal(h.row_degrees, np.repeat(bg.row_degrees(), z))
            self.assertEqual(h.nnz, z * bg.num_entries)

    def test_duplicate_entries_rejected(self):
        with self.assertRaises(CodeIntegrityError):
            BaseGraph(rows=1, cols=3, entries=((0, 1, 0), (0, 1, 5)))


class ParityCheckMatrixTests(SimpleTestCase):
    def test_rows_and_columns_are_transposes(self):
        h = expand_base_graph(bundled_bg1(), 3)
        rebuilt = ParityCheckMatrix.from_coo(
            h.m, h.n,
            np.concatenate(h.cols_adj),
            np.repeat(np.arange(h.n), h.col_degrees),
        )
        self.assertEqual(rebuilt, h)
        self.assertEqual(int(h.row_degrees.sum()), int(h.col_degrees.sum()))

    def test_repeated_index_rejected(self):
        with self.assertRaises(CodeIntegrityError):
            ParityCheckMatrix.from_rows(1, 3, [[0, 0]])

    def test_syndrome_is_linear(self):
        h = expand_base_graph(bundled_bg2(), 4)
        rng = np.random.default_rng(5)
        a = rng.integers(0, 2, size=h.n)
        b = rng.integers(0, 2, size=h.n)
        np.testing.assert_array_equal(syndrome(h, a ^ b), syndrome(h, a) ^ syndrome(h, b))

    def test_syndrome_length_checked(self):
        h = ParityCheckMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
        with self.assertRaises(DimensionError):
            syndrome(h, [0, 1])

    def test_layers_follow_lifting(self):
        h = expand_base_graph(bundled_bg2(), 4)
        layers = h.layers()
        self.assertEqual(len(layers), 42)
        self.assertEqual(layers[1].tolist(), [4, 5, 6, 7])
        unlifted = ParityCheckMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
        self.assertEqual(len(unlifted.layers()), 2)


class GeneratorTests(SimpleTestCase):
    def test_small_example(self):
        h = ParityCheckMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
        generator = build_generator(h)
        np.testing.assert_array_equal(generator.matrix, [[1, 1, 1]])
        np.testing.assert_array_equal(encode(generator, [0]), [0, 0, 0])
        np.testing.assert_array_equal(encode(generator, [1]), [1, 1, 1])

    def test_rank(self):
        self.assertEqual(gf2_rank(np.eye(5, dtype=np.uint8)), 5)
        self.assertEqual(gf2_rank([[1, 1], [1, 1]]), 1)

    def test_generator_is_orthogonal_to_h(self):
        h = expand_base_graph(bundled_bg2(), 4)
        generator = build_generator(h)
        product = (h.to_dense().astype(np.int64) @ generator.matrix.T.astype(np.int64)) & 1
        self.assertFalse(product.any())
        self.assertGreaterEqual(generator.k, h.n - h.m)

    def test_encoded_messages_have_zero_syndrome(self):
        rng = np.random.default_rng(2024)
        cases = [(bundled_bg2(), z) for z in (2, 4, 8, 16)] + [(bundled_bg1(), z) for z in (2, 4, 8, 16, 64)]
        for bg, z in cases:
            with self.subTest(graph=bg.name, z=z):
                h = expand_base_graph(bg, z)
                generator = build_generator(h)
                for _ in range(3):
                    codeword = generator.encode(rng.integers(0, 2, size=generator.k))
                    self.assertTrue(h.is_codeword(codeword))

    def test_message_is_systematic(self):
        h = expand_base_graph(bundled_bg1(), 2)
        generator = build_generator(h)
        message = np.random.default_rng(1).integers(0, 2, size=generator.k).astype(np.uint8)
        codeword = generator.encode(message)
        np.testing.assert_array_equal(generator.extract_message(codeword), message)

    def test_packed_rows_match_dense_packing(self):
        for z in (2, 3, 5):
            with self.subTest(z=z):
                h = expand_base_graph(bundled_bg2(), z)
                np.testing.assert_array_equal(pack_rows(h), np.packbits(h.to_dense(), axis=1))

    def test_generator_never_densifies_h(self):
        h = expand_base_graph(bundled_bg1(), 4)
        reduced, pivots = row_reduce(h.to_dense())
        with mock.patch.object(ParityCheckMatrix, 'to_dense', side_effect=AssertionError('dense H built')):
            generator = build_generator(h)
        self.assertEqual(generator.rank, pivots.shape[0])
        np.testing.assert_array_equal(np.sort(generator.parity_positions), np.sort(pivots))
        free = generator.message_positions
        np.testing.assert_array_equal(generator.matrix[:, pivots], reduced[:, free].T)

    def test_message_length_checked(self):
        generator = build_generator(ParityCheckMatrix.from_dense([[1, 1, 0], [0, 1, 1]]))
        with self.assertRaises(DimensionError):
            encode(generator, [1, 0])


class CodeFileTests(SimpleTestCase):
    def test_parse_small_alist(self):
        h = parse_alist(SMALL_ALIST)
        np.testing.assert_array_equal(h.to_dense(), [[1, 1, 0], [0, 1, 1]])
        self.assertEqual(format_alist(h), SMALL_ALIST)

    def test_alist_round_trip_through_disk(self):
        h = expand_base_graph(bundled_bg1(), 2)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'bg1.alist'
            save_alist(h, path)
            self.assertEqual(load_code(path), h)

    def test_parse_error_reports_line(self):
        with self.assertRaises(CodeParseError) as ctx:
            parse_alist('# header\n3 x\n')
        self.assertEqual(ctx.exception.line, 2)

    def test_truncated_alist(self):
        with self.assertRaises(CodeParseError):
            parse_alist('\n'.join(SMALL_ALIST.splitlines()[:6]))

    def test_declared_degree_disagrees_with_list(self):
        broken = SMALL_ALIST.replace('1 2 1\n', '2 1 1\n', 1)
        with self.assertRaises(CodeIntegrityError):
            parse_alist(broken)

    def test_columns_must_transpose_rows(self):
        broken = SMALL_ALIST.replace('1 0\n1 2\n2 0\n', '2 0\n1 2\n1 0\n', 1)
        with self.assertRaises(CodeIntegrityError):
            parse_alist(broken)

    def test_basegraph_text(self):
        text = '# two protograph rows\n2 4 8\n0 0 1\n\n1 3 0\n0 2 7\n'
        bg = parse_basegraph(text)
        self.assertEqual((bg.rows, bg.cols, bg.z_max), (2, 4, 8))
        self.assertEqual(bg.entries, ((0, 0, 1), (1, 3, 0), (0, 2, 7)))
        self.assertEqual(bg.rate_label, Fraction(1, 2))

    def test_basegraph_out_of_range(self):
        with self.assertRaises(CodeParseError) as ctx:
            parse_basegraph('2 4 8\n0 0 1\n2 0 1\n')
        self.assertEqual(ctx.exception.line, 3)

    def test_basegraph_round_trip(self):
        bg = bundled_bg2()
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'bg2.txt'
            save_basegraph(bg, path)
            loaded = load_code(path)
        self.assertEqual(loaded.entries, bg.entries)
        self.assertEqual((loaded.rows, loaded.cols), (bg.rows, bg.cols))

    def test_unknown_format(self):
        with self.assertRaises(CodeParseError):
            load_code('whatever.txt', fmt='mtx')

    def test_degree_summary(self):
        summary = degree_summary(parse_alist(SMALL_ALIST))
        self.assertEqual(summary, {'m': 2, 'n': 3, 'nnz': 4, 'max_row_degree': 2, 'max_col_degree': 2})

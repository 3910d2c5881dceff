"""
Pruebas unitarias para ingesta, partición, estandarización y generador sintético
"""
import sys
import tempfile
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

import numpy as np

from models.stream import StreamSettings, SyntheticConfig
from src.errors import StreamFormatError
from tools.stream_io import (
    EventStream,
    fit_standardization,
    load_stream,
    parse_labels,
    read_stream_csv,
    split_stream,
    standardize,
    write_stream_csv,
)
from tools.synthetic import burst_start_probability, generate_synthetic


def csv_settings(path, **kwargs) -> StreamSettings:
    return StreamSettings(source=str(path), **kwargs)


class StreamFileTest(unittest.TestCase):
    """Base con directorio temporal"""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def write(self, name: str, text: str) -> Path:
        path = self.tmp / name
        path.write_text(text, encoding="utf-8")
        return path


class TestReadStream(StreamFileTest):
    """Pruebas para read_stream_csv"""

    def ten_rows(self) -> Path:
        lines = ["a,b,label"] + [f"{i},{i * 0.5},{'BENIGN' if i % 3 else 'DoS'}" for i in range(10)]
        return self.write("ten.csv", "\n".join(lines) + "\n")

    def test_split_sizes(self):
        train, validation, test = load_stream(csv_settings(self.ten_rows()))
        self.assertEqual((len(train), len(validation), len(test)), (5, 2, 3))

    def test_split_is_a_partition(self):
        path = self.ten_rows()
        settings = csv_settings(path)
        full = read_stream_csv(path, settings)
        parts = split_stream(full, settings.split_fractions)
        joined = EventStream.concat(parts)
        np.testing.assert_array_equal(joined.features, full.features)
        np.testing.assert_array_equal(joined.labels, full.labels)
        np.testing.assert_array_equal(joined.t, full.t)

    def test_columns_and_labels(self):
        path = self.ten_rows()
        stream = read_stream_csv(path, csv_settings(path))
        self.assertEqual(stream.feature_names, ("a", "b"))
        self.assertEqual(stream.labels.tolist(), [1, 0, 0, 1, 0, 0, 1, 0, 0, 1])
        self.assertEqual(stream.features[4, 1], 2.0)

    def test_explicit_feature_columns(self):
        path = self.ten_rows()
        stream = read_stream_csv(path, csv_settings(path, feature_columns=["b"]))
        self.assertEqual(stream.dimension, 1)

    def test_non_numeric_cell_names_row_and_column(self):
        lines = ["a,b,label"] + [f"{i},{i},0" for i in range(6)] + ["7,abc,0", "8,8,1"]
        path = self.write("bad.csv", "\n".join(lines) + "\n")
        with self.assertRaises(StreamFormatError) as ctx:
            read_stream_csv(path, csv_settings(path))
        self.assertEqual(ctx.exception.row, 7)
        self.assertEqual(ctx.exception.column, "b")
        self.assertIn("fila 7", str(ctx.exception))
        self.assertIn("'b'", str(ctx.exception))

    def test_missing_column(self):
        path = self.write("nolabel.csv", "a,b\n1,2\n")
        with self.assertRaises(StreamFormatError) as ctx:
            read_stream_csv(path, csv_settings(path))
        self.assertEqual(ctx.exception.column, "label")

    def test_empty_file(self):
        path = self.write("empty.csv", "")
        with self.assertRaises(StreamFormatError):
            read_stream_csv(path, csv_settings(path))
        header_only = self.write("header.csv", "a,label\n")
        with self.assertRaises(StreamFormatError):
            read_stream_csv(header_only, csv_settings(header_only))

    def test_empty_label(self):
        path = self.write("blank.csv", "a,label\n1,0\n2, \n")
        with self.assertRaises(StreamFormatError) as ctx:
            read_stream_csv(path, csv_settings(path))
        self.assertEqual(ctx.exception.row, 2)

    def test_timestamp_sort_is_stable(self):
        text = "ts,a,label\n3,30,0\n1,10,0\n2,20,1\n1,11,0\n"
        path = self.write("ts.csv", text)
        stream = read_stream_csv(path, csv_settings(path, timestamp_column="ts"))
        self.assertEqual(stream.features[:, 0].tolist(), [10.0, 11.0, 20.0, 30.0])
        self.assertEqual(stream.labels.tolist(), [0, 0, 1, 0])
        self.assertEqual(stream.feature_names, ("a",))

    def test_datetime_timestamps(self):
        text = "ts,a,label\n2024-01-02 00:00,2,0\n2024-01-01 00:00,1,0\n"
        path = self.write("dt.csv", text)
        stream = read_stream_csv(path, csv_settings(path, timestamp_column="ts"))
        self.assertEqual(stream.features[:, 0].tolist(), [1.0, 2.0])

    def test_arrays_are_read_only(self):
        path = self.ten_rows()
        stream = read_stream_csv(path, csv_settings(path))
        with self.assertRaises(ValueError):
            stream.features[0, 0] = 99.0


class TestParseLabels(unittest.TestCase):
    """Pruebas para la normalización de labels"""

    def test_heterogeneous_values(self):
        values = ["BENIGN", "benign ", "0", "0.0", "Normal", "DoS", "1", "PortScan", "2"]
        labels = parse_labels(values, ["0", "benign", "BENIGN", "normal"])
        self.assertEqual(labels.tolist(), [0, 0, 0, 0, 0, 1, 1, 1, 1])

    def test_custom_benign_values(self):
        labels = parse_labels(["ok", "OK", "alert"], ["ok"])
        self.assertEqual(labels.tolist(), [0, 0, 1])


class TestStandardization(unittest.TestCase):
    """Pruebas para la estandarización sin fugas"""

    def setUp(self):
        rng = np.random.default_rng(0)
        features = np.column_stack([rng.normal(5.0, 2.0, 300), np.full(300, 3.0), rng.normal(-1.0, 0.1, 300)])
        stream = EventStream(np.arange(300), features, np.zeros(300), ("a", "const", "c"))
        self.train, self.validation, self.test = split_stream(stream, (0.5, 0.2, 0.3))

    def test_constant_feature_flagged(self):
        with self.assertLogs("StreamIO", level="WARNING"):
            params = fit_standardization(self.train)
        self.assertEqual(params.flagged_features, ["const"])
        _, (train, test) = standardize(self.train, self.test)
        self.assertTrue(np.all(train.features[:, 1] == 0.0))
        self.assertTrue(np.all(test.features[:, 1] == 0.0))

    def test_train_is_standard(self):
        _, (train,) = standardize(self.train)
        np.testing.assert_allclose(train.features[:, [0, 2]].mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(train.features[:, [0, 2]].std(axis=0), 1.0, rtol=1e-12)

    def test_statistics_come_from_train_only(self):
        shifted = self.test.with_features(self.test.features + np.array([100.0, 0.0, 0.0]))
        params_a, (_, test_a) = standardize(self.train, self.test)
        params_b, (_, test_b) = standardize(self.train, shifted)
        self.assertEqual(params_a, params_b)
        self.assertGreater(test_b.features[:, 0].mean() - test_a.features[:, 0].mean(), 10.0)


class TestSynthetic(StreamFileTest):
    """Pruebas para el generador sintético"""

    def test_no_attacks(self):
        stream = generate_synthetic(SyntheticConfig(length=2000, attack_rate=0.0))
        self.assertEqual(stream.positives, 0)

    def test_deterministic(self):
        config = SyntheticConfig(length=500, dimension=3, seed=7)
        a, b = self.tmp / "a.csv", self.tmp / "b.csv"
        write_stream_csv(generate_synthetic(config), a)
        write_stream_csv(generate_synthetic(config), b)
        self.assertEqual(a.read_bytes(), b.read_bytes())
        other = self.tmp / "c.csv"
        write_stream_csv(generate_synthetic(config.model_copy(update={"seed": 8})), other)
        self.assertNotEqual(a.read_bytes(), other.read_bytes())

    def test_attack_fraction(self):
        stream = generate_synthetic(
            SyntheticConfig(length=100000, attack_rate=0.05, burst_length_mean=5.0, seed=1)
        )
        fraction = stream.positives / len(stream)
        self.assertLess(abs(fraction - 0.05) / 0.05, 0.2)

    def test_burst_start_probability(self):
        self.assertEqual(burst_start_probability(0.0, 20.0), 0.0)
        self.assertAlmostEqual(burst_start_probability(0.5, 1.0), 0.5)
        p = burst_start_probability(0.01, 20.0)
        # Fracción estacionaria L / (L + (1 - p) / p)
        self.assertAlmostEqual(20.0 / (20.0 + (1.0 - p) / p), 0.01, places=12)

    def test_csv_round_trip(self):
        stream = generate_synthetic(SyntheticConfig(length=300, dimension=2, attack_rate=0.1, seed=3))
        path = self.tmp / "synthetic.csv"
        write_stream_csv(stream, path)
        header = path.read_text(encoding="utf-8").splitlines()[0]
        self.assertEqual(header, "t,f0,f1,label")
        back = read_stream_csv(path, csv_settings(path))
        self.assertEqual(back.feature_names, ("f0", "f1"))
        np.testing.assert_array_equal(back.labels, stream.labels)
        # 17 dígitos significativos: a lo sumo un ulp de diferencia al releer
        np.testing.assert_allclose(back.features, stream.features, rtol=1e-15, atol=0.0)


if __name__ == '__main__':
    unittest.main()

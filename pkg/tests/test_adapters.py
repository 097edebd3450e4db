# -*- coding: utf-8 -*-
"""
Adapter tests: signal files, graph sources, traces and dumps
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from adapters.base_adapter import AdapterError, ParseError, SignalData, UnsupportedFormatError, adapter_for_path
from adapters.csv_adapter import CsvSignalAdapter
from adapters.graph_adapter import parse_graph_source, read_edge_list, write_edge_list
from adapters.pgm_adapter import PgmAdapter, read_pgm_header
from adapters.trace_adapter import (
    BENCHMARK_HEADER,
    CsvTraceSink,
    dump_operators,
    load_operator,
    read_benchmark_csv,
    write_benchmark_csv,
)
from core.experiments.benchmark import BenchmarkRecord
from core.graph_model import LatticeSpec, lattice_graph, random_dag
from core.penalties import kronecker_trend_matrix, second_difference_matrix


class TestCsvAdapter:
    """One value per line"""

    def test_round_trip_is_exact(self, tmp_path, rng):
        values = rng.standard_normal(20) * 1e3
        path = tmp_path / "signal.csv"
        adapter = CsvSignalAdapter()
        adapter.write(path, SignalData(values=values))
        assert_array_equal(adapter.read(path).values, values)

    def test_comments_and_blank_lines(self, tmp_path):
        path = tmp_path / "signal.csv"
        path.write_text("# header\n1.5\n\n-2\n3e-1,\n")
        assert_array_equal(CsvSignalAdapter().read(path).values, [1.5, -2.0, 0.3])

    def test_bad_value_reports_line(self, tmp_path):
        path = tmp_path / "signal.csv"
        path.write_text("1.0\n2.0\nabc\n")
        with pytest.raises(ParseError, match=":3:"):
            CsvSignalAdapter().read(path)

    def test_non_finite(self, tmp_path):
        path = tmp_path / "signal.csv"
        path.write_text("1.0\nnan\n")
        with pytest.raises(ParseError):
            CsvSignalAdapter().read(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "signal.csv"
        path.write_text("# nothing\n")
        with pytest.raises(ParseError):
            CsvSignalAdapter().read(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            CsvSignalAdapter().read(tmp_path / "absent.csv")


class TestPgmAdapter:
    """P2 / P5 images through OpenCV"""

    def test_ascii_file(self, tmp_path):
        path = tmp_path / "tiny.pgm"
        path.write_text("P2\n# two rows, three columns\n3 2\n255\n0 51 255\n255 102 0\n")
        data = PgmAdapter().read(path)
        assert data.lattice == LatticeSpec(2, 3)
        assert data.meta == {'format': 'pgm', 'binary': False, 'maxval': 255}
        # column-major: the row index varies fastest
        assert_allclose(data.values, [0.0, 1.0, 0.2, 0.4, 1.0, 0.0])

    @pytest.mark.parametrize("binary", [True, False])
    def test_round_trip_is_bit_exact(self, tmp_path, rng, binary):
        pixels = rng.integers(0, 256, size=(5, 7))
        values = (pixels / 255.0).ravel(order="F")
        path = tmp_path / "image.pgm"
        adapter = PgmAdapter({'binary': binary})
        adapter.write(path, SignalData(values=values, lattice=LatticeSpec(5, 7), meta={'maxval': 255}))

        magic, width, height, maxval = read_pgm_header(path)
        assert magic == ("P5" if binary else "P2")
        assert (width, height, maxval) == (7, 5, 255)

        first = path.read_bytes()
        data = adapter.read(path)
        assert_array_equal(np.rint(data.values * 255), pixels.ravel(order="F"))
        adapter.write(path, data)
        assert path.read_bytes() == first

    def test_sixteen_bit(self, tmp_path):
        values = np.array([0.0, 0.5, 1.0, 0.25])
        path = tmp_path / "wide.pgm"
        PgmAdapter().write(path, SignalData(values=values, lattice=LatticeSpec(2, 2), meta={'maxval': 65535}))
        data = PgmAdapter().read(path)
        assert data.meta['maxval'] == 65535
        assert_allclose(data.values, values, atol=1.0 / 65535)

    @pytest.mark.parametrize("maxval", [100, 1000, 4095])
    @pytest.mark.parametrize("binary", [True, False])
    def test_custom_maxval_round_trip(self, tmp_path, rng, maxval, binary):
        pixels = rng.integers(0, maxval + 1, size=(4, 6))
        path = tmp_path / "deep.pgm"
        adapter = PgmAdapter({'binary': binary})
        adapter.write(path, SignalData(values=(pixels / maxval).ravel(order="F"), lattice=LatticeSpec(4, 6),
                                       meta={'maxval': maxval}))
        assert read_pgm_header(path) == ("P5" if binary else "P2", 6, 4, maxval)

        first = path.read_bytes()
        data = adapter.read(path)
        assert data.meta['maxval'] == maxval
        assert_array_equal(np.rint(data.values * maxval), pixels.ravel(order="F"))
        adapter.write(path, data)
        assert path.read_bytes() == first

    def test_twelve_bit_file(self, tmp_path):
        path = tmp_path / "twelve.pgm"
        path.write_bytes(b"P5\n# 12-bit\n2 1\n4095\n" + np.array([4095, 85], dtype=">u2").tobytes())
        data = PgmAdapter().read(path)
        assert data.lattice == LatticeSpec(1, 2)
        assert_allclose(data.values, [1.0, 85 / 4095])

    def test_short_raster(self, tmp_path):
        path = tmp_path / "short.pgm"
        path.write_bytes(b"P5\n2 2\n1000\n\x00\x01")
        with pytest.raises(ParseError):
            PgmAdapter().read(path)

    def test_invalid_maxval_on_write(self, tmp_path):
        with pytest.raises(AdapterError):
            PgmAdapter().write(tmp_path / "x.pgm", SignalData(values=np.zeros(4), lattice=LatticeSpec(2, 2),
                                                              meta={'maxval': 70000}))

    def test_values_are_clamped(self, tmp_path):
        path = tmp_path / "clamped.pgm"
        PgmAdapter().write(path, SignalData(values=np.array([-0.5, 1.5]), lattice=LatticeSpec(2, 1)))
        assert_array_equal(PgmAdapter().read(path).values, [0.0, 1.0])

    def test_write_needs_lattice(self, tmp_path):
        with pytest.raises(AdapterError):
            PgmAdapter().write(tmp_path / "x.pgm", SignalData(values=np.zeros(4)))

    def test_not_a_pgm(self, tmp_path):
        path = tmp_path / "color.pgm"
        path.write_bytes(b"P6\n1 1\n255\n\x00\x00\x00")
        with pytest.raises(ParseError):
            PgmAdapter().read(path)

    def test_truncated_header(self, tmp_path):
        path = tmp_path / "short.pgm"
        path.write_bytes(b"P5\n4")
        with pytest.raises(ParseError):
            read_pgm_header(path)

    def test_binary_option_type(self):
        with pytest.raises(AdapterError):
            PgmAdapter({'binary': "yes"})


class TestAdapterForPath:
    def test_by_extension(self):
        assert isinstance(adapter_for_path("a.csv"), CsvSignalAdapter)
        assert isinstance(adapter_for_path("b.PGM"), PgmAdapter)

    def test_unknown_extension(self):
        with pytest.raises(UnsupportedFormatError):
            adapter_for_path("c.png")

    def test_adapter_info(self):
        info = adapter_for_path("d.pgm", {'binary': False}).get_adapter_info()
        assert info == {'adapter_name': 'PgmAdapter', 'extensions': list(PgmAdapter.extensions),
                        'config_keys': ['binary']}


class TestGraphSources:
    """chain:n, lattice:AxB and edge lists"""

    def test_chain(self):
        graph, lattice = parse_graph_source("chain:4")
        assert graph.edges == ((0, 1), (1, 2), (2, 3))
        assert lattice == LatticeSpec(4, 1)

    def test_lattice(self):
        graph, lattice = parse_graph_source("lattice:3x4")
        assert lattice == LatticeSpec(3, 4)
        assert graph.n_edges == 17

    @pytest.mark.parametrize("source", ["chain:x", "chain:0", "lattice:3y4"])
    def test_invalid_source(self, source):
        with pytest.raises(ParseError):
            parse_graph_source(source)

    def test_edge_list_round_trip(self, tmp_path, rng):
        graph = random_dag(9, 0.4, rng)
        path = tmp_path / "graph.txt"
        write_edge_list(path, graph)
        loaded = read_edge_list(path)
        assert (loaded.n_vertices, loaded.edges) == (graph.n_vertices, graph.edges)
        _, lattice = parse_graph_source(str(path))
        assert lattice is None

    def test_edge_list_comments(self, tmp_path):
        path = tmp_path / "graph.txt"
        path.write_text("# a chain\n3 2\n0 1  # first\n1 2\n")
        assert read_edge_list(path).edges == ((0, 1), (1, 2))

    @pytest.mark.parametrize("text", ["3 2\n0 1\n", "3 1\n0 5\n", "3 1\n0 x\n", "", "3 1\n0 1 2\n"])
    def test_malformed_edge_list(self, tmp_path, text):
        path = tmp_path / "graph.txt"
        path.write_text(text)
        with pytest.raises(ParseError):
            read_edge_list(path)

    def test_missing_edge_list(self, tmp_path):
        with pytest.raises(ParseError):
            parse_graph_source(str(tmp_path / "absent.txt"))


class TestTraceFiles:
    """Solver traces, benchmark tables and operator dumps"""

    def test_trace_sink(self, tmp_path):
        path = tmp_path / "trace.csv"
        with CsvTraceSink(path) as sink:
            sink.record(1, 0.5, 0.25, 3.0)
            sink.record(2, 0.1, 0.05, 2.5)
        assert sink.rows == 2
        lines = path.read_text().splitlines()
        assert lines[0] == "iter,r_pri,r_dual,objective"
        assert lines[2] == "2,0.10000000000000001,0.050000000000000003,2.5"

    def test_trace_sink_bad_path(self, tmp_path):
        with pytest.raises(AdapterError):
            CsvTraceSink(tmp_path / "missing" / "trace.csv")

    def test_benchmark_csv(self, tmp_path):
        records = [BenchmarkRecord("FGTF-dual", "dual", 8, 0, 1.5, 2.5, 0.01, 12),
                   BenchmarkRecord("FKTF-admm-cg", "admm-cg", 8, 0, 1.5, 2.5, 0.02, 40)]
        path = tmp_path / "bench.csv"
        assert write_benchmark_csv(path, records) == 2
        rows = read_benchmark_csv(path)
        assert [r["estimator"] for r in rows] == ["FGTF-dual", "FKTF-admm-cg"]
        assert rows[1]["iterations"] == "40"
        assert list(rows[0]) == BENCHMARK_HEADER

    def test_benchmark_csv_header_checked(self, tmp_path):
        path = tmp_path / "bench.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ParseError):
            read_benchmark_csv(path)

    def test_operator_dump(self, tmp_path):
        spec = LatticeSpec(3, 4)
        operators = {"K": kronecker_trend_matrix(spec), "D2": second_difference_matrix(5)}
        paths = dump_operators(tmp_path / "ops", operators)
        assert sorted(p.name for p in paths) == ["D2.txt", "K.txt"]
        assert load_operator(tmp_path / "ops" / "K.txt") == operators["K"]
        assert (tmp_path / "ops" / "D2.txt").read_text().startswith("# 3 5\n")

    def test_operator_dump_keeps_empty_columns(self, tmp_path):
        graph = lattice_graph(LatticeSpec(2, 2))
        empty_k = kronecker_trend_matrix(LatticeSpec(2, 2))
        dump_operators(tmp_path, {"K": empty_k})
        loaded = load_operator(tmp_path / "K.txt")
        assert loaded.shape == (0, graph.n_vertices)

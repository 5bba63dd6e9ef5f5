import numpy as np
import pytest

from mrmlink.errors import DataParseError, InvalidArgumentError
from mrmlink.link import spectral_gains
from mrmlink.measured import (MeasuredSpectrum, common_grid,
                              ingest_spectrum_csv, summed_curve)
from mrmlink.metrics import fs_window, inl


def write_csv(path, rows, header="wavelength_nm,power_mw"):
    lines = [header] + [f"{l!r},{p!r}" for l, p in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def synthetic_rows(cfg, n, lo=1309.0, hi=1311.0, v=1.0):
    lam = np.linspace(lo, hi, n)
    thru, drop = spectral_gains(cfg, lam, v)
    thru_rows = [(float(l), float(p)) for l, p in zip(lam, thru)]
    drop_rows = [(float(l), float(p)) for l, p in zip(lam, drop)]
    return thru_rows, drop_rows


class TestIngest:
    def test_round_trip_values(self, tmp_path, canonical_cfg):
        thru_rows, _ = synthetic_rows(canonical_cfg, 64)
        spec = ingest_spectrum_csv(write_csv(tmp_path / "t.csv", thru_rows), "thru")
        assert spec.wavelength_nm.size == 64
        assert spec.power_mw[0] == thru_rows[0][1]

    def test_too_few_rows(self, tmp_path):
        rows = [(1309.0 + 0.01 * i, 0.5) for i in range(15)]
        with pytest.raises(DataParseError, match="15 data rows"):
            ingest_spectrum_csv(write_csv(tmp_path / "few.csv", rows), "thru")

    def test_bad_header(self, tmp_path):
        rows = [(1309.0 + 0.01 * i, 0.5) for i in range(20)]
        path = write_csv(tmp_path / "hdr.csv", rows, header="lambda,power")
        with pytest.raises(DataParseError, match="row 1"):
            ingest_spectrum_csv(path, "thru")

    def test_duplicate_wavelength_names_row(self, tmp_path):
        rows = [(1309.0 + 0.01 * i, 0.5) for i in range(20)]
        rows[5] = rows[4]
        with pytest.raises(DataParseError, match="row 7: duplicate"):
            ingest_spectrum_csv(write_csv(tmp_path / "dup.csv", rows), "thru")

    def test_non_monotone_names_row(self, tmp_path):
        rows = [(1309.0 + 0.01 * i, 0.5) for i in range(20)]
        rows[10] = (1308.0, 0.5)
        with pytest.raises(DataParseError, match="row 12: non-monotone"):
            ingest_spectrum_csv(write_csv(tmp_path / "mono.csv", rows), "thru")

    def test_non_numeric_names_row(self, tmp_path):
        path = tmp_path / "nan.csv"
        rows = [f"{1309.0 + 0.01 * i!r},0.5" for i in range(20)]
        rows[2] = "1309.02,oops"
        path.write_text("wavelength_nm,power_mw\n" + "\n".join(rows) + "\n",
                        encoding="utf-8")
        with pytest.raises(DataParseError, match="row 4: non-numeric"):
            ingest_spectrum_csv(path, "thru")

    def test_negative_power_rejected(self, tmp_path):
        rows = [(1309.0 + 0.01 * i, 0.5) for i in range(20)]
        rows[3] = (rows[3][0], -0.1)
        with pytest.raises(DataParseError, match="row 5: negative"):
            ingest_spectrum_csv(write_csv(tmp_path / "neg.csv", rows), "thru")

    def test_bad_port(self):
        with pytest.raises(InvalidArgumentError):
            MeasuredSpectrum(np.linspace(0, 1, 16), np.ones(16), "add")


class TestCommonGrid:
    def test_overlap_and_density(self):
        thru = MeasuredSpectrum(np.linspace(1309.0, 1311.0, 64), np.ones(64), "thru")
        drop = MeasuredSpectrum(np.linspace(1309.5, 1311.5, 128), np.ones(128), "drop")
        grid = common_grid(thru, drop)
        assert grid[0] == 1309.5 and grid[-1] == 1311.0
        assert grid.size == 128

    def test_disjoint_rejected(self):
        thru = MeasuredSpectrum(np.linspace(1309.0, 1310.0, 32), np.ones(32), "thru")
        drop = MeasuredSpectrum(np.linspace(1311.0, 1312.0, 32), np.ones(32), "drop")
        with pytest.raises(InvalidArgumentError):
            common_grid(thru, drop)


class TestSummedCurve:
    def test_matches_direct_simulation(self, tmp_path, canonical_cfg):
        """Exporting simulated spectra and re-ingesting reproduces the INL."""
        n = 257
        thru_rows, drop_rows = synthetic_rows(canonical_cfg, n)
        thru = ingest_spectrum_csv(write_csv(tmp_path / "t.csv", thru_rows), "thru")
        drop = ingest_spectrum_csv(write_csv(tmp_path / "d.csv", drop_rows), "drop")
        curve = summed_curve(thru, drop)

        lam = np.linspace(1309.0, 1311.0, n)
        t, d = spectral_gains(canonical_cfg, lam, 1.0)
        total = t + d
        direct = (total - total.min()) / (total.max() - total.min())
        assert np.max(np.abs(curve.gain_norm - direct)) <= 1e-6

        got = inl(fs_window(curve)).inl_pp
        from mrmlink.metrics import TransferCurve
        ref_curve = TransferCurve((lam - lam[0]) / (lam[-1] - lam[0]), direct,
                                  lam, total)
        want = inl(fs_window(ref_curve)).inl_pp
        assert got == pytest.approx(want, abs=1e-6)

    def test_grid_density_symmetry(self, tmp_path, canonical_cfg):
        """Swapping which port has the denser sweep barely moves the INL."""
        thru_dense, drop_dense = synthetic_rows(canonical_cfg, 1025)
        thru_sparse, drop_sparse = synthetic_rows(canonical_cfg, 257)

        def inl_of(thru_rows, drop_rows, tag):
            thru = ingest_spectrum_csv(
                write_csv(tmp_path / f"t{tag}.csv", thru_rows), "thru")
            drop = ingest_spectrum_csv(
                write_csv(tmp_path / f"d{tag}.csv", drop_rows), "drop")
            return inl(fs_window(summed_curve(thru, drop))).inl_pp

        a = inl_of(thru_dense, drop_sparse, "a")
        b = inl_of(thru_sparse, drop_dense, "b")
        assert a == pytest.approx(b, rel=0.01)

    def test_port_order_enforced(self):
        s = MeasuredSpectrum(np.linspace(1309.0, 1311.0, 32), np.ones(32), "thru")
        with pytest.raises(InvalidArgumentError):
            summed_curve(s, s)

    def test_flat_sum_rejected(self):
        thru = MeasuredSpectrum(np.linspace(1309.0, 1311.0, 32), np.ones(32), "thru")
        drop = MeasuredSpectrum(np.linspace(1309.0, 1311.0, 32), np.ones(32), "drop")
        with pytest.raises(InvalidArgumentError):
            summed_curve(thru, drop)

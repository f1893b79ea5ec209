import csv
import json
import math

import numpy as np
import pytest

from focalfreq.cli import bundled_fixture, main
from focalfreq.io import read_model, read_pnm, read_spectrum, write_pnm


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    doc = json.loads(out.out) if code == 0 else None
    return code, doc, out.err


def lfd_fixture(rng, size=64):
    """Integer-valued 3-channel pair whose per-channel MSE is 255^2 * 10^-2.0044."""
    target = 255.0**2 * 10 ** (-2.0044)
    n = size * size
    # errors of magnitude 25 or 26 only: 625 + 51 k / n = target
    k = int(round((target - 625.0) * n / 51.0))
    real = rng.integers(40, 215, (size, size, 3)).astype(float)
    fake = real.copy()
    for c in range(3):
        mags = np.full(n, 25.0)
        mags[rng.permutation(n)[:k]] = 26.0
        signs = np.where(rng.random(n) < 0.5, -1.0, 1.0)
        fake[:, :, c] += (mags * signs).reshape(size, size)
    return real, fake


@pytest.fixture
def pair(tmp_path, rng):
    real, fake = lfd_fixture(rng)
    write_pnm(tmp_path / "real.ppm", real)
    write_pnm(tmp_path / "fake.ppm", fake)
    return tmp_path / "real.ppm", tmp_path / "fake.ppm"


def test_eval_same_file(capsys, pair):
    code, doc, _ = run(capsys, "eval", pair[0], pair[0])
    assert code == 0
    row = doc["pairs"][0]
    assert row["lfd"] == 0 and row["psnr"] == "inf" and row["ffl"] == 0
    assert row["ssim"] == pytest.approx(1.0)


def test_eval_lfd_cross_check(capsys, pair):
    code, doc, _ = run(capsys, "eval", *pair)
    assert code == 0
    row = doc["pairs"][0]
    assert abs(row["lfd"] - 14.785) <= 0.01
    assert abs(row["psnr"] - 20.044) <= 0.01
    assert doc["loss_config"]["distance"] == "full"


def test_eval_directory_and_csv(capsys, tmp_path, rng):
    (tmp_path / "r").mkdir()
    (tmp_path / "f").mkdir()
    for i in range(3):
        img = rng.integers(0, 256, (12, 12)).astype(float)
        write_pnm(tmp_path / "r" / f"{i}.pgm", img)
        write_pnm(tmp_path / "f" / f"{i}.pgm", np.clip(img + rng.normal(0, 9, img.shape), 0, 255))
    code, doc, _ = run(capsys, "eval", tmp_path / "r", tmp_path / "f", "--csv", tmp_path / "m.csv", "--ave-spectrum")
    assert code == 0
    assert [p["real"] for p in doc["pairs"]] == ["0.pgm", "1.pgm", "2.pgm"]
    assert doc["mean"]["lfd"] == pytest.approx(np.mean([p["lfd"] for p in doc["pairs"]]))
    rows = list(csv.DictReader(open(tmp_path / "m.csv")))
    assert len(rows) == 4 and rows[-1]["real"] == "mean"


def test_eval_errors(capsys, tmp_path, pair):
    write_pnm(tmp_path / "small.ppm", np.zeros((8, 8, 3)))
    assert run(capsys, "eval", pair[0], tmp_path / "small.ppm")[0] == 2
    assert run(capsys, "eval", pair[0], tmp_path / "missing.ppm")[0] == 2
    (tmp_path / "junk.pgm").write_bytes(b"hello")
    assert run(capsys, "eval", tmp_path / "junk.pgm", tmp_path / "junk.pgm")[0] == 2
    assert run(capsys, "eval", pair[0], pair[1], "--patch-factor", "5")[0] == 3
    assert run(capsys, "eval", pair[0], pair[1], "--alpha", "-1")[0] == 3


def test_spectrum_constant_image(capsys, tmp_path):
    write_pnm(tmp_path / "c.pgm", np.full((8, 8), 77.0))
    code, doc, _ = run(capsys, "spectrum", tmp_path / "c.pgm", "-o", tmp_path / "out" / "c")
    assert code == 0
    view = read_pnm(doc["view"])[:, :, 0]
    assert view[4, 4] == 255 and np.count_nonzero(view) == 1
    spec = read_spectrum(doc["spectrum"])
    assert spec.values[0, 0, 0] == pytest.approx(77.0 * 8, rel=1e-6)


def test_spectrum_average(capsys, tmp_path, rng):
    img = rng.integers(0, 256, (6, 6, 3)).astype(float)
    (tmp_path / "d").mkdir()
    write_pnm(tmp_path / "d" / "a.ppm", img)
    write_pnm(tmp_path / "d" / "b.ppm", img)
    write_pnm(tmp_path / "one.ppm", img)
    code, doc, _ = run(capsys, "spectrum", tmp_path / "d", "--average", "-o", tmp_path / "avg")
    assert code == 0 and doc["images"] == 2
    code, single, _ = run(capsys, "spectrum", tmp_path / "one.ppm", "-o", tmp_path / "one")
    np.testing.assert_allclose(read_spectrum(doc["spectrum"]).values, read_spectrum(single["spectrum"]).values)
    assert run(capsys, "spectrum", tmp_path / "one.ppm", "--average", "-o", tmp_path / "x")[0] == 2


def test_filter_lowpass_keeps_everything_with_huge_radius(capsys, tmp_path, rng):
    img = rng.integers(0, 256, (16, 16)).astype(float)
    write_pnm(tmp_path / "i.pgm", img)
    code, doc, _ = run(capsys, "filter", tmp_path / "i.pgm", "--kind", "lowpass", "--radius", "9999", "-o", tmp_path / "o")
    assert code == 0
    np.testing.assert_array_equal(read_pnm(doc["filtered"])[:, :, 0], img)
    assert doc["energy_after"] == pytest.approx(doc["energy_before"])


def test_filter_notch_dc_constant_is_black(capsys, tmp_path):
    write_pnm(tmp_path / "c.pgm", np.full((10, 10), 180.0))
    code, doc, _ = run(capsys, "filter", tmp_path / "c.pgm", "--kind", "notch-dc", "-o", tmp_path / "o")
    assert code == 0
    assert np.all(read_pnm(doc["filtered"]) == 0)
    assert doc["energy_after"] < 1e-18


def test_filter_bandstop_and_errors(capsys, tmp_path, rng):
    write_pnm(tmp_path / "i.pgm", rng.integers(0, 256, (32, 32)).astype(float))
    code, doc, _ = run(capsys, "filter", tmp_path / "i.pgm", "--kind", "bandstop", "-o", tmp_path / "o")
    assert code == 0 and (doc["inner"], doc["outer"]) == (4, 8)
    mask = read_pnm(doc["mask"])[:, :, 0]
    assert mask[16, 16] == 255 and mask[16, 22] == 0
    assert run(capsys, "filter", tmp_path / "i.pgm", "--kind", "bandstop", "--inner", "6", "--outer", "3", "-o", tmp_path / "o")[0] == 3
    assert run(capsys, "filter", tmp_path / "i.pgm", "--kind", "notch", "--point", "40,1", "-o", tmp_path / "o")[0] == 3
    assert run(capsys, "filter", tmp_path / "i.pgm", "--kind", "notch", "--point", "x", "-o", tmp_path / "o")[0] == 3


def test_recon_commands(capsys, tmp_path, monkeypatch):
    target = read_pnm(bundled_fixture())[:16, :16]
    write_pnm(tmp_path / "t.ppm", target)
    code, zero, _ = run(capsys, "recon", tmp_path / "t.ppm", "--steps", "0", "--seed", "5", "-o", tmp_path / "z")
    assert code == 0 and zero["initial_loss"] == zero["final_loss"]
    init = np.random.default_rng(5).uniform(-0.5, 0.5, (16, 16, 3))
    np.testing.assert_array_equal(np.load(tmp_path / "z" / "final.npy"), init)

    args = ["--steps", "300", "--lr", "0.02", "--snapshot-every", "150"]
    code, full, _ = run(capsys, "recon", tmp_path / "t.ppm", *args, "-o", tmp_path / "f")
    assert code == 0 and full["final_mse"] < 1e-3
    assert (tmp_path / "f" / "step_000150.ppm").exists()
    assert len(list(csv.DictReader(open(tmp_path / "f" / "trace.csv")))) == 301
    code, amp, _ = run(capsys, "recon", tmp_path / "t.ppm", *args, "--distance", "amplitude", "-o", tmp_path / "a")
    assert amp["final_mse"] > 10 * full["final_mse"]

    monkeypatch.setenv("FFL_SEED", "5")
    code, env, _ = run(capsys, "recon", tmp_path / "t.ppm", "--steps", "0", "-o", tmp_path / "e")
    assert env["seed"] == 5
    monkeypatch.setenv("FFL_SEED", "five")
    assert run(capsys, "recon", tmp_path / "t.ppm", "--steps", "0", "-o", tmp_path / "e")[0] == 3
    monkeypatch.delenv("FFL_SEED")
    assert run(capsys, "recon", tmp_path / "t.ppm", "--lr", "0", "-o", tmp_path / "e")[0] == 3


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_recon_divergence_exit_code(capsys, tmp_path):
    write_pnm(tmp_path / "t.pgm", np.arange(64.0).reshape(8, 8))
    assert run(capsys, "recon", tmp_path / "t.pgm", "--steps", "20", "--lr", "1e308", "-o", tmp_path / "d")[0] == 4


CONFIG = {
    "corpus": {"kind": "gratings", "count": 40, "size": 8, "seed": 3},
    "train": {"epochs": 3, "batch_size": 8, "ffl_weight": 1.0},
    "loss": {"alpha": 1.0},
}


def test_train_outputs_byte_identical(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(CONFIG))
    code, doc, _ = run(capsys, "train", cfg, "-o", tmp_path / "a")
    assert code == 0
    assert run(capsys, "train", cfg, "-o", tmp_path / "b")[0] == 0
    for name in ("model.bin", "traces.csv", "metrics.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    arrays, meta = read_model(tmp_path / "a" / "model.bin")
    assert arrays["enc_w"].shape == (256, 64)
    assert meta["config"] == CONFIG
    assert math.isfinite(doc["held_out"]["lfd"])


@pytest.mark.parametrize(
    "text,pointer",
    [
        ('{"train": {"epochs": 3,}}', "line 1"),
        ('{"train": {"epoch": 3}}', "/train/epoch"),
        ('{"loss": {"alpha": -1}}', "/loss/alpha"),
        ('{"corpus": {"kind": "faces"}}', "/corpus/kind"),
        ('{"corpus": {"count": 20}, "train": {"batch_size": 16}}', "/train/batch_size"),
    ],
)
def test_train_config_errors(capsys, tmp_path, text, pointer):
    cfg = tmp_path / "c.json"
    cfg.write_text(text)
    code, _, err = run(capsys, "train", cfg, "-o", tmp_path / "o")
    assert code == 3
    assert pointer in err


def test_train_seed_override(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(CONFIG))
    monkeypatch.setenv("FFL_SEED", "11")
    assert run(capsys, "train", cfg, "-o", tmp_path / "a")[0] == 0
    _, meta = read_model(tmp_path / "a" / "model.bin")
    assert meta["seeds"] == {"corpus": 11, "train": 11}

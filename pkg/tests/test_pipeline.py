import json

import numpy as np
import pytest
from PIL import Image

from skyblur.classify import ClassifierConfig, LabeledManifest, ManifestEntry
from skyblur.errors import (
    ConfigInvalid,
    ConfigParseError,
    DirectoryNotFound,
    DuplicatePath,
    ManifestParseError,
)
from skyblur.imaging import RoiRect
from skyblur.metrics import FftParams, MetricKind
from skyblur.pipeline import (
    find_images,
    load_config,
    load_manifest,
    parse_config,
    parse_report,
    report_to_csv,
    report_to_json,
    run_batch,
    save_config,
    save_manifest,
)


def _write_png(path, array):
    Image.fromarray(np.asarray(array, dtype=np.uint8)).save(path)


def _strip_times(report):
    d = report.to_dict()
    d.pop("started")
    d.pop("finished")
    return d


@pytest.fixture
def image_dir(tmp_path):
    rng = np.random.default_rng(5)
    _write_png(tmp_path / "b_sharp.png", rng.integers(0, 256, (12, 12)))
    _write_png(tmp_path / "a_flat.PNG", np.full((12, 12), 90))
    Image.fromarray(np.full((12, 12, 3), 128, dtype=np.uint8)).save(tmp_path / "c_gray.jpg", quality=95)
    (tmp_path / "notes.txt").write_text("not an image")
    (tmp_path / "sub").mkdir()
    _write_png(tmp_path / "sub" / "d.png", rng.integers(0, 256, (8, 8)))
    return tmp_path


# ---------------------------------------------------------------- config


def test_config_round_trip(tmp_path):
    cfg = ClassifierConfig(MetricKind.FFT, -3.25, RoiRect(1, 2, 30, 40), FftParams(0.2))
    save_config(cfg, tmp_path / "c.json")
    assert load_config(tmp_path / "c.json") == cfg


def test_config_round_trip_without_roi(tmp_path):
    cfg = ClassifierConfig(MetricKind.LAPLACIAN, 12.0)
    save_config(cfg, tmp_path / "c.json")
    assert "roi" not in json.loads((tmp_path / "c.json").read_text())
    assert load_config(tmp_path / "c.json") == cfg


def test_config_missing_roi_is_whole_image():
    cfg = parse_config('{"metric": "laplacian", "threshold": 12}')
    assert cfg.roi is None
    assert cfg.fft_params == FftParams(0.125)


def test_config_bad_threshold_names_field():
    text = '{\n  "metric": "laplacian",\n  "threshold": "abc"\n}'
    with pytest.raises(ConfigParseError) as info:
        parse_config(text)
    assert info.value.field == "threshold"
    assert info.value.line == 3
    assert "threshold" in str(info.value)


@pytest.mark.parametrize(
    "text, field",
    [
        ('{"metric": "laplacian", "treshold": 5}', "treshold"),
        ('{"metric": "sobel"}', "metric"),
        ('{"threshold": 5}', "metric"),
        ('{"metric": "fft", "roi": {"x": 0, "y": 0, "w": 5, "h": 5}}', "roi"),
        ('{"metric": "fft", "roi": {"x": 0, "y": 0, "width": 2, "height": 5}}', "roi"),
        ('{"metric": "fft", "roi": {"x": 0.5, "y": 0, "width": 5, "height": 5}}', "roi"),
        ('{"metric": "fft", "roi": [0, 0, 5, 5]}', "roi"),
        ('{"metric": "fft", "fft_low_freq_fraction": 0.7}', "fft_low_freq_fraction"),
        ('{"metric": "fft", "threshold": true}', "threshold"),
    ],
)
def test_config_strict_fields(text, field):
    with pytest.raises(ConfigParseError) as info:
        parse_config(text)
    assert info.value.field == field


def test_config_syntax_error_has_line():
    with pytest.raises(ConfigParseError) as info:
        parse_config('{\n"metric": "fft",\n oops}')
    assert info.value.line == 3


def test_config_default_threshold():
    assert parse_config('{"metric": "fft"}').threshold == -4.0


# ---------------------------------------------------------------- manifest


def test_manifest_parse(tmp_path):
    (tmp_path / "m.csv").write_text("img_0001.png,true\nimg_0002.png,false\n")
    m = load_manifest(tmp_path / "m.csv")
    assert m.entries == (ManifestEntry("img_0001.png", True), ManifestEntry("img_0002.png", False))


def test_manifest_duplicate(tmp_path):
    (tmp_path / "m.csv").write_text("a.png,true\na.png,false\n")
    with pytest.raises(DuplicatePath):
        load_manifest(tmp_path / "m.csv")


def test_manifest_empty(tmp_path):
    (tmp_path / "m.csv").write_text("")
    assert len(load_manifest(tmp_path / "m.csv")) == 0


@pytest.mark.parametrize("text", ["a.png,maybe\n", "a.png\n", "a.png,true,extra\n", ",true\n"])
def test_manifest_malformed(tmp_path, text):
    (tmp_path / "m.csv").write_text(text)
    with pytest.raises(ManifestParseError):
        load_manifest(tmp_path / "m.csv")


def test_manifest_round_trip(tmp_path):
    m = LabeledManifest(
        [ManifestEntry("x/with,comma.png", True), ManifestEntry("y.jpg", False), ManifestEntry("z z.png", True)]
    )
    save_manifest(m, tmp_path / "m.csv")
    assert load_manifest(tmp_path / "m.csv") == m


# ---------------------------------------------------------------- run_batch


def test_find_images(image_dir):
    assert find_images(image_dir) == ["a_flat.PNG", "b_sharp.png", "c_gray.jpg", "sub/d.png"]


def test_empty_directory(tmp_path):
    report = run_batch(tmp_path, ClassifierConfig())
    assert report.records == []


def test_missing_directory(tmp_path):
    with pytest.raises(DirectoryNotFound):
        run_batch(tmp_path / "nope", ClassifierConfig())


def test_bad_config_and_parallelism(tmp_path):
    with pytest.raises(ConfigInvalid):
        run_batch(tmp_path, {"metric": "laplacian"})
    with pytest.raises(ConfigInvalid):
        run_batch(tmp_path, ClassifierConfig(), parallelism=0)


def test_batch_verdicts(image_dir):
    report = run_batch(image_dir, ClassifierConfig(MetricKind.LAPLACIAN, 12.0))
    by_path = {r.path: r for r in report.records}
    assert list(by_path) == ["a_flat.PNG", "b_sharp.png", "c_gray.jpg", "sub/d.png"]
    assert by_path["a_flat.PNG"].blurred is True
    assert by_path["a_flat.PNG"].score == 0.0
    assert by_path["b_sharp.png"].blurred is False
    assert all(r.ok for r in report.records)


def test_partial_failure(tmp_path):
    (tmp_path / "broken.png").write_bytes(b"\x89PNG\r\n\x1a\nthis is not a png")
    _write_png(tmp_path / "ok.png", np.full((10, 10), 50))
    report = run_batch(tmp_path, ClassifierConfig())
    assert len(report.records) == 2
    broken, ok = report.records
    assert broken.error.startswith("MalformedImage")
    assert broken.blurred is None and broken.score is None
    assert ok.ok and ok.blurred is True
    assert report.summary == {"classified": 2, "blurred": 1, "errors": 1}


def test_roi_out_of_bounds_is_record_error(tmp_path):
    _write_png(tmp_path / "small.png", np.zeros((5, 5)))
    _write_png(tmp_path / "big.png", np.zeros((40, 40)))
    report = run_batch(tmp_path, ClassifierConfig(roi=RoiRect(10, 10, 20, 20)))
    big, small = report.records
    assert big.ok
    assert small.error.startswith("RoiOutOfBounds")


def test_too_small_is_record_error(tmp_path):
    _write_png(tmp_path / "tiny.png", np.zeros((3, 3)))
    report = run_batch(tmp_path, ClassifierConfig(metric=MetricKind.FFT))
    assert report.records[0].error.startswith("ImageTooSmall")


def test_parallelism_does_not_change_report(image_dir):
    (image_dir / "zz_broken.jpg").write_bytes(b"\xff\xd8\xff garbage")
    cfg = ClassifierConfig(MetricKind.FFT, -4.0)
    serial = run_batch(image_dir, cfg, parallelism=1)
    parallel = run_batch(image_dir, cfg, parallelism=4)
    assert _strip_times(serial) == _strip_times(parallel)
    assert len(serial.records) == 5


def test_timestamps_are_utc_iso(tmp_path):
    report = run_batch(tmp_path, ClassifierConfig())
    assert report.started.endswith("+00:00")
    assert report.finished >= report.started


# ---------------------------------------------------------------- report formats


def test_report_json_and_csv_agree(image_dir):
    (image_dir / "zz_broken.png").write_bytes(b"\x89PNG\r\n\x1a\n")
    report = run_batch(image_dir, ClassifierConfig())
    from_json = parse_report(report_to_json(report))
    from_csv = parse_report(report_to_csv(report))
    assert from_json == from_csv
    assert [r["path"] for r in from_json] == [r.path for r in report.records]
    assert from_json[-1]["blurred"] is None and from_json[-1]["error"]


def test_report_json_echoes_config(tmp_path):
    cfg = ClassifierConfig(MetricKind.FFT, -2.0, RoiRect(0, 0, 4, 4))
    d = json.loads(report_to_json(run_batch(tmp_path, cfg)))
    assert d["config"] == {
        "metric": "fft",
        "threshold": -2.0,
        "roi": {"x": 0, "y": 0, "width": 4, "height": 4},
        "fft_low_freq_fraction": 0.125,
    }
    assert set(d) == {"config", "started", "finished", "records"}


def test_report_csv_header(tmp_path):
    text = report_to_csv(run_batch(tmp_path, ClassifierConfig()))
    assert text == "path,score,verdict,error\n"

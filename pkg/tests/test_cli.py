import numpy as np
import pytest

from dctfuse import cli, harness, pgm


@pytest.fixture
def dataset_dir(tmp_path):
    src = tmp_path / "pristine"
    src.mkdir()
    for i in range(2):
        pgm.write_image(harness.synthetic_image(64, 64, seed=i), src / f"img{i}.pgm")
    out = tmp_path / "ds"
    code = cli.main(
        ["gen-dataset", "--images", str(src), "--radii", "2", "--out", str(out)]
    )
    assert code == 0
    return out


def test_gen_dataset_writes_triples(dataset_dir):
    names = sorted(p.name for p in dataset_dir.iterdir())
    assert names == [
        "img0_r2_A.pgm",
        "img0_r2_B.pgm",
        "img0_r2_truth.pgm",
        "img1_r2_A.pgm",
        "img1_r2_B.pgm",
        "img1_r2_truth.pgm",
    ]


def test_gen_dataset_synthetic_count(tmp_path):
    out = tmp_path / "ds"
    code = cli.main(
        ["gen-dataset", "--synthetic", "1", "--radii", "2,3", "--out", str(out)]
    )
    assert code == 0
    assert len(list(out.glob("*_truth.pgm"))) == 2
    assert len(list(out.iterdir())) == 6


def test_gen_dataset_requires_inputs(tmp_path, capsys):
    empty = tmp_path / "empty"
    empty.mkdir()
    code = cli.main(["gen-dataset", "--images", str(empty), "--out", str(tmp_path / "o")])
    assert code == 2
    assert capsys.readouterr().err.startswith("error:")


def test_fuse_defaults_write_output(dataset_dir, tmp_path):
    out = tmp_path / "fused.pgm"
    code = cli.main(
        [
            "fuse",
            "--inputs",
            str(dataset_dir / "img0_r2_A.pgm"),
            str(dataset_dir / "img0_r2_B.pgm"),
            "--output",
            str(out),
        ]
    )
    assert code == 0
    fused = pgm.read_image(out)
    truth = pgm.read_image(dataset_dir / "img0_r2_truth.pgm")
    assert np.array_equal(fused, truth)


def test_fuse_reruns_are_byte_identical(dataset_dir, tmp_path):
    args = [
        "fuse",
        "--inputs",
        str(dataset_dir / "img0_r2_A.pgm"),
        str(dataset_dir / "img0_r2_B.pgm"),
        "--output",
    ]
    out1 = tmp_path / "one.pgm"
    out2 = tmp_path / "two.pgm"
    assert cli.main(args + [str(out1)]) == 0
    assert cli.main(args + [str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_fuse_dump_maps(dataset_dir, tmp_path):
    maps = tmp_path / "maps"
    code = cli.main(
        [
            "fuse",
            "--inputs",
            str(dataset_dir / "img0_r2_A.pgm"),
            str(dataset_dir / "img0_r2_B.pgm"),
            "--output",
            str(tmp_path / "f.pgm"),
            "--no-cv",
            "--dump-maps",
            str(maps),
        ]
    )
    assert code == 0
    decision = (maps / "decision_map.txt").read_text().strip().split("\n")
    assert len(decision) == 8  # 64/8 block rows
    values = {v for line in decision for v in line.split(" ")}
    assert values <= {"-1", "0", "1"}
    refined = (maps / "refined_map.txt").read_text()
    assert refined == (maps / "decision_map.txt").read_text()  # --no-cv: S = M


def test_fuse_three_inputs(dataset_dir, tmp_path):
    maps = tmp_path / "maps3"
    code = cli.main(
        [
            "fuse",
            "--inputs",
            str(dataset_dir / "img0_r2_A.pgm"),
            str(dataset_dir / "img0_r2_B.pgm"),
            str(dataset_dir / "img0_r2_truth.pgm"),
            "--output",
            str(tmp_path / "f3.pgm"),
            "--dump-maps",
            str(maps),
        ]
    )
    assert code == 0
    assert (tmp_path / "f3.pgm").exists()
    assert (maps / "decision_map.txt").exists()
    assert not (maps / "refined_map.txt").exists()


def test_fuse_single_input_is_usage_error(dataset_dir, capsys):
    code = cli.main(
        [
            "fuse",
            "--inputs",
            str(dataset_dir / "img0_r2_A.pgm"),
            "--output",
            "/tmp/x.pgm",
        ]
    )
    assert code == 2
    assert capsys.readouterr().err.startswith("error:")


def test_fuse_unaligned_input_names_file(tmp_path, capsys):
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P5\n100 100\n255\n" + b"\x00" * 10000)
    good = tmp_path / "good.pgm"
    pgm.write_image(harness.synthetic_image(64, 64, seed=0), good)
    code = cli.main(
        ["fuse", "--inputs", str(good), str(bad), "--output", str(tmp_path / "o.pgm")]
    )
    assert code == 4
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert "bad.pgm" in err


def test_fuse_mismatched_inputs(tmp_path, capsys):
    one = tmp_path / "one.pgm"
    two = tmp_path / "two.pgm"
    pgm.write_image(harness.synthetic_image(64, 64, seed=0), one)
    pgm.write_image(harness.synthetic_image(32, 64, seed=0), two)
    code = cli.main(
        ["fuse", "--inputs", str(one), str(two), "--output", str(tmp_path / "o.pgm")]
    )
    assert code == 4


def test_fuse_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as err:
        cli.main(["fuse", "--inputs", "a", "b", "--output", "o", "--frobnicate"])
    assert err.value.code == 2
    assert capsys.readouterr().err.startswith("error:")


def test_eval_identity_reports_unit_ssim(dataset_dir, capsys):
    truth = str(dataset_dir / "img0_r2_truth.pgm")
    code = cli.main(["eval", "--fused", truth, "--ref", truth])
    assert code == 0
    out = capsys.readouterr().out.strip()
    assert out == "ssim,1.000000"


def test_eval_sources_report_mi_and_qabf(dataset_dir, capsys):
    code = cli.main(
        [
            "eval",
            "--fused",
            str(dataset_dir / "img0_r2_truth.pgm"),
            "--sources",
            str(dataset_dir / "img0_r2_A.pgm"),
            str(dataset_dir / "img0_r2_B.pgm"),
        ]
    )
    assert code == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0].startswith("mi,")
    assert lines[1].startswith("qabf,")
    assert float(lines[0].split(",")[1]) > 0
    assert 0.0 <= float(lines[1].split(",")[1]) <= 1.0


def test_eval_requires_ref_or_sources(dataset_dir, capsys):
    code = cli.main(["eval", "--fused", str(dataset_dir / "img0_r2_truth.pgm")])
    assert code == 2


def test_eval_missing_file_is_io_error(capsys):
    code = cli.main(["eval", "--fused", "/nonexistent/f.pgm", "--ref", "/tmp/x.pgm"])
    assert code == 3
    assert capsys.readouterr().err.startswith("error:")


def test_bench_csv_and_ranking(dataset_dir, capsys):
    code = cli.main(
        [
            "bench",
            "--dataset",
            str(dataset_dir),
            "--methods",
            "variance-dct,variance-dct+cv,sml-dct+cv",
            "--repeat",
            "2",
        ]
    )
    assert code == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "image,radius,method,ssim,us_per_block"
    body = [l.split(",") for l in lines[1:] if not l.startswith("mean,")]
    means = {l.split(",")[2]: float(l.split(",")[3]) for l in lines[1:] if l.startswith("mean,")}
    assert len(body) == 2 * 3  # two triples x three methods
    assert means["sml-dct+cv"] >= means["variance-dct"]
    assert means["variance-dct+cv"] >= means["variance-dct"]
    for row in body:
        assert float(row[4]) > 0


def test_bench_writes_figures(dataset_dir, tmp_path, capsys):
    figs = tmp_path / "figs"
    code = cli.main(
        [
            "bench",
            "--dataset",
            str(dataset_dir),
            "--methods",
            "sml-dct+cv",
            "--repeat",
            "1",
            "--figures",
            str(figs),
        ]
    )
    assert code == 0
    capsys.readouterr()
    names = sorted(p.name for p in figs.iterdir())
    assert names == [
        "runtime_per_block.png",
        "ssim_by_method.png",
        "ssim_by_radius.png",
    ]
    assert all((figs / n).stat().st_size > 0 for n in names)


def test_bench_rejects_bad_method(dataset_dir, capsys):
    code = cli.main(["bench", "--dataset", str(dataset_dir), "--methods", "wavelet"])
    assert code == 2


def test_bench_rejects_bad_repeat(dataset_dir, capsys):
    code = cli.main(["bench", "--dataset", str(dataset_dir), "--repeat", "0"])
    assert code == 2


def test_bench_empty_dataset(tmp_path, capsys):
    empty = tmp_path / "none"
    empty.mkdir()
    code = cli.main(["bench", "--dataset", str(empty)])
    assert code == 2

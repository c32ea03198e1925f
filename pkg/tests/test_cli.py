"""CLI: exit codes, output determinism, worker independence."""

import json

import numpy.polynomial.polynomial as P
import pytest

from shearedge.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, main

DISK_SCENE = {"regions": {"disk": {"type": "disk", "center": [0.0, 0.0],
                                   "radius": 1.0}}}


@pytest.fixture
def scene(tmp_path):
    path = tmp_path / "scene.json"
    path.write_text(json.dumps(DISK_SCENE))
    return str(path)


def _read(tmp_path, name):
    return (tmp_path / name).read_text()


class TestExitCodes:
    def test_malformed_scene_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        rc = main(["transform", "--scene", str(bad), "--points", "1,0"])
        assert rc == EXIT_CONFIG

    def test_missing_scene_file(self):
        rc = main(["transform", "--scene", "/nonexistent/scene.json",
                   "--points", "1,0"])
        assert rc == EXIT_CONFIG

    def test_missing_points(self, scene):
        assert main(["transform", "--scene", scene]) == EXIT_CONFIG

    def test_empty_points(self, scene):
        assert main(["transform", "--scene", scene,
                     "--points", " ; "]) == EXIT_CONFIG

    def test_dimension_mismatch(self, scene):
        assert main(["transform", "--scene", scene,
                     "--points", "1,0,0"]) == EXIT_CONFIG

    def test_unknown_region_name(self, scene):
        assert main(["transform", "--scene", scene, "--region", "cube",
                     "--points", "1,0"]) == EXIT_CONFIG

    def test_bad_generator_config(self, scene, tmp_path):
        gen = tmp_path / "gen.json"
        gen.write_text(json.dumps({"preset": "nope"}))
        rc = main(["transform", "--scene", scene, "--generator", str(gen),
                   "--points", "1,0"])
        assert rc == EXIT_CONFIG

    def test_non_admissible_generator_is_numeric_error(self, tmp_path):
        # valid config (mean-zero wavelet) with one vanishing moment:
        # the 3D admissibility integral diverges during `frame`
        theta = [1.0]
        for _ in range(6):
            theta = P.polymul(theta, [1.0, 0.0, -1.0]).tolist()
        coeffs = P.polyder(theta, 1).tolist()
        gen = tmp_path / "lowmoment.json"
        gen.write_text(json.dumps({
            "dimension": 3,
            "wavelet": {"coeffs": coeffs, "support": [-1.0, 1.0],
                        "shift": 0.16, "moments": 1},
            "bump": {"r": 0.21},
        }))
        assert main(["frame", "--generator", str(gen)]) == EXIT_NUMERIC

    def test_curvature_range_is_numeric_error(self, tmp_path):
        # tiny disk: wedge curvature outside the tabulated range
        path = tmp_path / "small.json"
        path.write_text(json.dumps(
            {"regions": {"small": {"type": "disk", "center": [0.0, 0.0],
                                   "radius": 0.2}}}))
        rc = main(["curvature", "--scene", str(path),
                   "--points", "0.2,0", "--shear", "0"])
        assert rc == EXIT_NUMERIC


class TestTransformOutputs:
    def test_half_plane_csv_values(self, tmp_path):
        # the aligned flat-boundary profile obeys the exact a^{3/4} law
        path = tmp_path / "hp.json"
        path.write_text(json.dumps(
            {"regions": {"hp": {"type": "half_plane", "normal": [1.0, 0.0],
                                "offset": 0.0}}}))
        out = tmp_path / "out"
        rc = main(["transform", "--scene", str(path), "--points", "0,0",
                   "--scales", "4:6", "--out", str(out)])
        assert rc == EXIT_OK
        lines = _read(out, "transform.csv").strip().split("\n")
        assert lines[0] == "px,py,policy,cone,a,s,coeff,converged,grid_n"
        assert len(lines) == 4
        coeffs = [float(ln.split(",")[6]) for ln in lines[1:]]
        scales = [float(ln.split(",")[4]) for ln in lines[1:]]
        ratios = [c / a ** 0.75 for c, a in zip(coeffs, scales)]
        assert max(ratios) - min(ratios) < 1e-6 * abs(ratios[0])

    def test_json_format(self, scene, tmp_path):
        out = tmp_path / "out"
        rc = main(["transform", "--scene", scene, "--points", "1,0",
                   "--scales", "5:6", "--format", "json",
                   "--out", str(out)])
        assert rc == EXIT_OK
        doc = json.loads(_read(out, "transform.json"))
        assert len(doc) == 2
        assert doc[0]["px"] == "1" and "coeff" in doc[0]

    def test_byte_determinism_and_worker_independence(self, scene, tmp_path):
        texts = []
        for i, workers in enumerate(("1", "1", "2")):
            out = tmp_path / ("out%d" % i)
            rc = main(["classify", "--scene", scene,
                       "--points", "1,0;0,0;0.980067,0.198669",
                       "--workers", workers, "--out", str(out)])
            assert rc == EXIT_OK
            texts.append(_read(out, "classify.csv"))
        assert texts[0] == texts[1] == texts[2]

    def test_classify_csv_content(self, scene, tmp_path):
        out = tmp_path / "out"
        rc = main(["classify", "--scene", scene, "--points", "1,0;0,0",
                   "--out", str(out)])
        assert rc == EXIT_OK
        lines = _read(out, "classify.csv").strip().split("\n")
        assert lines[0].startswith("px,py,verdict")
        assert "RegularAligned" in lines[1]
        assert "OffBoundary" in lines[2]

    def test_curvature_csv(self, scene, tmp_path):
        out = tmp_path / "out"
        rc = main(["curvature", "--scene", scene, "--points", "1,0",
                   "--shear", "0", "--out", str(out)])
        assert rc == EXIT_OK
        line = _read(out, "curvature.csv").strip().split("\n")[1]
        kappa = float(line.split(",")[3])
        assert abs(kappa - 1.0) < 0.01


class TestFrameCommand:
    def test_report_and_ray(self, tmp_path):
        out = tmp_path / "out"
        rc = main(["frame", "--ray", "1,0.2,0.2", "--out", str(out)])
        assert rc == EXIT_OK
        report = json.loads(_read(out, "frame.json"))
        assert report["dimension"] == 3
        assert report["admissibility_rel_gap"] <= 0.02
        assert report["frame_lower"] > 0.0
        assert report["random_check"]["negative_delta"] == 0
        assert report["random_check"]["nonzero_outside_pyramid"] == 0
        assert report["warnings"] == []
        ray = _read(out, "frame_ray.csv").strip().split("\n")
        assert ray[0] == "t,xi1,xi2,xi3,delta,window"
        assert len(ray) == 26

    def test_frame_2d_generator(self, tmp_path):
        gen = tmp_path / "gen2d.json"
        gen.write_text(json.dumps({"preset": "default2d"}))
        out = tmp_path / "out"
        rc = main(["frame", "--generator", str(gen), "--out", str(out)])
        assert rc == EXIT_OK
        report = json.loads(_read(out, "frame.json"))
        assert report["dimension"] == 2 and report["admissibility"] > 0


class TestDemo:
    def test_demo_covers_all_verdicts(self, tmp_path):
        out = tmp_path / "out"
        assert main(["demo", "--out", str(out)]) == EXIT_OK
        text = _read(out, "demo.csv")
        for verdict in ("RegularAligned", "CornerFirstAligned",
                        "CornerSecond", "OffBoundary"):
            assert verdict in text

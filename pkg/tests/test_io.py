import json

import numpy as np
import pytest

from mubkit.construct import build_family
from mubkit.io import (
    FORMAT_VERSION,
    FamilyDocument,
    file_sha256,
    load_family,
    report_payload,
    save_family,
)
from mubkit.reconstruct import reconstruct_all
from mubkit.search import SearchConfig, run_search
from mubkit.verify import verify_family


def write_doc(path, mutate=None):
    """Save a d=2 family, optionally rewriting the JSON payload first."""
    family = build_family(2)
    save_family(family, str(path))
    if mutate is not None:
        payload = json.loads(path.read_text())
        mutate(payload)
        path.write_text(json.dumps(payload))
    return family


class TestRoundTrip:
    @pytest.mark.parametrize("d", [2, 3, 5, 7])
    def test_constructed_family_bit_exact(self, tmp_path, d):
        family = build_family(d)
        path = tmp_path / f"family{d}.json"
        save_family(family, str(path))
        loaded = load_family(str(path))
        assert np.array_equal(loaded.projectors, family.projectors)

    def test_search_family_bit_exact(self, tmp_path):
        result = run_search(SearchConfig(dim=2, num_bases=3, seed=42))
        path = tmp_path / "searched.json"
        save_family(result.best_family, str(path))
        loaded = load_family(str(path))
        assert np.array_equal(loaded.projectors, result.best_family.projectors)

    def test_states_and_metadata_survive(self, tmp_path):
        family = build_family(3)
        states = reconstruct_all(family)
        path = tmp_path / "with_states.json"
        save_family(family, str(path), states=states, metadata={"note": "round trip"})
        payload = json.loads(path.read_text())
        doc = FamilyDocument.from_payload(payload)
        assert doc.metadata["note"] == "round trip"
        assert doc.states is not None
        flat = np.array(
            [
                [complex(re, im) for re, im in vec["amplitudes"]]
                for group in doc.states
                for vec in group["vectors"]
            ]
        )
        assert np.array_equal(flat.reshape(states.shape), states)

    def test_loaded_family_verifies(self, tmp_path):
        family = build_family(5)
        path = tmp_path / "f5.json"
        save_family(family, str(path))
        assert verify_family(load_family(str(path))).passed


class TestRejection:
    def test_truncated_file(self, tmp_path):
        path = tmp_path / "family.json"
        write_doc(path)
        path.write_text(path.read_text()[:40])
        with pytest.raises(ValueError, match="not valid JSON"):
            load_family(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError, match="could not read"):
            load_family(str(tmp_path / "absent.json"))

    def test_root_not_object(self, tmp_path):
        path = tmp_path / "family.json"
        path.write_text("[1, 2, 3]")
        with pytest.raises(ValueError, match="JSON object"):
            load_family(str(path))

    def test_bad_format_version(self, tmp_path):
        path = tmp_path / "family.json"
        write_doc(path, lambda p: p.update(format_version="999"))
        with pytest.raises(ValueError, match="format_version"):
            load_family(str(path))

    def test_missing_bases(self, tmp_path):
        path = tmp_path / "family.json"
        write_doc(path, lambda p: p.pop("bases"))
        with pytest.raises(ValueError, match="'bases'"):
            load_family(str(path))

    def test_non_hermitian_entry_is_located(self, tmp_path):
        path = tmp_path / "family.json"

        def mutate(p):
            p["bases"][1]["projectors"][0]["matrix"][0][1] = [0.9, 0.0]

        write_doc(path, mutate)
        with pytest.raises(ValueError, match=r"basis 1, vector 0, entry \(0, 1\)"):
            load_family(str(path))

    def test_trace_violation_reported(self, tmp_path):
        path = tmp_path / "family.json"

        def mutate(p):
            p["bases"][0]["projectors"][1]["matrix"][0][0] = [0.75, 0.0]

        write_doc(path, mutate)
        with pytest.raises(ValueError, match="trace deviates"):
            load_family(str(path))

    def test_indefinite_matrix_rejected(self, tmp_path):
        path = tmp_path / "family.json"

        def mutate(p):
            # Hermitian, unit trace, but eigenvalues 1.5 and -0.5.
            p["bases"][0]["projectors"][0]["matrix"] = [
                [[1.5, 0.0], [0.0, 0.0]],
                [[0.0, 0.0], [-0.5, 0.0]],
            ]

        write_doc(path, mutate)
        with pytest.raises(ValueError, match="not positive-semidefinite"):
            load_family(str(path))

    def test_duplicate_alpha(self, tmp_path):
        path = tmp_path / "family.json"

        def mutate(p):
            p["bases"][0]["projectors"][1]["alpha"] = 0

        write_doc(path, mutate)
        with pytest.raises(ValueError, match="duplicated"):
            load_family(str(path))

    def test_wrong_projector_count(self, tmp_path):
        path = tmp_path / "family.json"
        write_doc(path, lambda p: p["bases"][0]["projectors"].pop())
        with pytest.raises(ValueError, match="expected 2 projectors"):
            load_family(str(path))

    def test_basis_index_gap(self, tmp_path):
        path = tmp_path / "family.json"
        write_doc(path, lambda p: p["bases"][2].update(basis_index=7))
        with pytest.raises(ValueError, match="cover 0..2"):
            load_family(str(path))

    def test_malformed_entry_pair(self, tmp_path):
        path = tmp_path / "family.json"

        def mutate(p):
            p["bases"][0]["projectors"][0]["matrix"][1][1] = [0.5]

        write_doc(path, mutate)
        with pytest.raises(ValueError, match=r"\[re, im\] pair"):
            load_family(str(path))

    def test_non_finite_entry(self, tmp_path):
        path = tmp_path / "family.json"

        def mutate(p):
            p["bases"][0]["projectors"][0]["matrix"][0][0] = [1e400, 0.0]

        write_doc(path, mutate)
        with pytest.raises(ValueError, match="finite"):
            load_family(str(path))

    def test_unwritable_path(self, tmp_path):
        family = build_family(2)
        with pytest.raises(OSError, match="could not write"):
            save_family(family, str(tmp_path / "no" / "such" / "dir.json"))


class TestLoadTolerance:
    def test_tiny_defect_loads(self, tmp_path):
        path = tmp_path / "family.json"

        def mutate(p):
            p["bases"][0]["projectors"][0]["matrix"][0][1][0] += 1e-10

        write_doc(path, mutate)
        load_family(str(path))

    def test_defect_beyond_tolerance_rejected(self, tmp_path):
        path = tmp_path / "family.json"

        def mutate(p):
            p["bases"][0]["projectors"][0]["matrix"][0][1][0] += 1e-8

        write_doc(path, mutate)
        with pytest.raises(ValueError, match="Hermitian symmetry"):
            load_family(str(path))
        # A looser explicit tolerance accepts the same file.
        load_family(str(path), tolerance=1e-6)


class TestHashingAndReports:
    def test_sha256_is_stable_and_content_sensitive(self, tmp_path):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        a.write_text("payload")
        b.write_text("payload")
        assert file_sha256(str(a)) == file_sha256(str(b))
        b.write_text("payload!")
        assert file_sha256(str(a)) != file_sha256(str(b))

    def test_report_payload_fields(self, tmp_path):
        family = build_family(2)
        path = tmp_path / "family.json"
        save_family(family, str(path))
        report = verify_family(family, keep_gram=True)
        payload = report_payload(report, tool_version="0.1.0", source_path=str(path))
        assert payload["tool_version"] == "0.1.0"
        assert payload["input_sha256"] == file_sha256(str(path))
        assert payload["passed"] is True
        assert payload["dim"] == 2
        assert len(payload["gram"]) == 6

    def test_format_version_recorded(self, tmp_path):
        path = tmp_path / "family.json"
        write_doc(path)
        assert json.loads(path.read_text())["format_version"] == FORMAT_VERSION

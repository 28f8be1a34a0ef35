"""JSON persistence for families, reconstructed states, and certificates.

The interchange document stores every complex entry as an [re, im] pair.
Numbers are written in Python's shortest round-trippable decimal form, so a
save followed by a load reproduces each float bit for bit.  The loader
validates everything it reads at a fixed tolerance and names the offending
(basis, vector, entry) when a matrix fails; a document is never trusted
just because this package wrote it.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algebra import MubFamily
from .reconstruct import eigen_hermitian
from .verify import VerificationReport

__all__ = [
    "FORMAT_VERSION",
    "LOAD_TOLERANCE",
    "FamilyDocument",
    "file_sha256",
    "load_family",
    "report_payload",
    "save_family",
    "write_json",
]

FORMAT_VERSION = "1"

# Looser than construction tolerances: serialized third-party families may
# carry a few more ulps of noise than freshly built ones.
LOAD_TOLERANCE = 1e-9


def _pair(z: complex) -> list:
    return [float(z.real), float(z.imag)]


def _matrix_pairs(m: np.ndarray) -> list:
    return [[_pair(m[p, q]) for q in range(m.shape[1])] for p in range(m.shape[0])]


@dataclass(frozen=True)
class FamilyDocument:
    """In-memory form of the interchange JSON for a projector family.

    ``bases`` is the raw JSON-shaped list: one dict per basis with its
    ``basis_index`` and a ``projectors`` list of {alpha, matrix} dicts.
    ``states`` optionally mirrors that structure with amplitude vectors.
    ``metadata`` is free-form (generator, seed, timestamp and the like).
    """

    format_version: str
    dimension: int
    bases: list
    states: Optional[list] = None
    metadata: dict = field(default_factory=dict)

    @classmethod
    def from_family(
        cls,
        family: MubFamily,
        states=None,
        metadata: Optional[dict] = None,
    ) -> "FamilyDocument":
        """Build a document from a family, optionally with its state vectors."""
        bases = [
            {
                "basis_index": a,
                "projectors": [
                    {"alpha": alpha, "matrix": _matrix_pairs(family.projector(a, alpha))}
                    for alpha in range(family.dim)
                ],
            }
            for a in range(family.num_bases)
        ]
        states_doc = None
        if states is not None:
            arr = np.asarray(states, dtype=complex)
            if arr.shape != (family.num_bases, family.dim, family.dim):
                raise ValueError(
                    f"states shaped {arr.shape} do not match the family "
                    f"({family.num_bases} bases, dim {family.dim})"
                )
            states_doc = [
                {
                    "basis_index": a,
                    "vectors": [
                        {"alpha": alpha, "amplitudes": [_pair(z) for z in arr[a, alpha]]}
                        for alpha in range(family.dim)
                    ],
                }
                for a in range(family.num_bases)
            ]
        return cls(
            format_version=FORMAT_VERSION,
            dimension=family.dim,
            bases=bases,
            states=states_doc,
            metadata=dict(metadata or {}),
        )

    def to_payload(self) -> dict:
        payload = {
            "format_version": self.format_version,
            "dimension": self.dimension,
            "bases": self.bases,
        }
        if self.states is not None:
            payload["states"] = self.states
        payload["metadata"] = self.metadata
        return payload

    @classmethod
    def from_payload(cls, payload) -> "FamilyDocument":
        if not isinstance(payload, dict):
            raise ValueError("document root must be a JSON object")
        version = payload.get("format_version")
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported format_version {version!r}, expected {FORMAT_VERSION!r}")
        dimension = payload.get("dimension")
        if not isinstance(dimension, int) or dimension < 1:
            raise ValueError(f"dimension must be a positive integer, got {dimension!r}")
        bases = payload.get("bases")
        if not isinstance(bases, list) or not bases:
            raise ValueError("document must contain a nonempty 'bases' list")
        metadata = payload.get("metadata", {})
        if not isinstance(metadata, dict):
            raise ValueError("metadata must be a JSON object")
        states = payload.get("states")
        if states is not None and not isinstance(states, list):
            raise ValueError("'states', when present, must be a list")
        return cls(
            format_version=version,
            dimension=dimension,
            bases=bases,
            states=states,
            metadata=metadata,
        )

    def _parse_matrix(self, raw, where: str) -> np.ndarray:
        d = self.dimension
        if not isinstance(raw, list) or len(raw) != d:
            raise ValueError(f"{where}: matrix must have {d} rows")
        out = np.zeros((d, d), dtype=complex)
        for p, row in enumerate(raw):
            if not isinstance(row, list) or len(row) != d:
                raise ValueError(f"{where}: row {p} must have {d} entries")
            for q, pair in enumerate(row):
                if (
                    not isinstance(pair, list)
                    or len(pair) != 2
                    or not all(isinstance(x, (int, float)) for x in pair)
                ):
                    raise ValueError(f"{where}, entry ({p}, {q}): expected an [re, im] pair")
                out[p, q] = complex(pair[0], pair[1])
        if not np.all(np.isfinite(out.view(float))):
            raise ValueError(f"{where}: matrix entries must be finite")
        return out

    def to_family(self, tolerance: float = LOAD_TOLERANCE) -> MubFamily:
        """Validate the document and return its projector family.

        Checks structure (index completeness, matrix shapes) and then the
        projector invariants per matrix at ``tolerance``: Hermitian
        symmetry (worst entry named), unit trace, and no eigenvalue below
        ``-tolerance``.
        """
        d = self.dimension
        indexed = {}
        for item in self.bases:
            if not isinstance(item, dict) or "basis_index" not in item:
                raise ValueError("each basis must be an object with a 'basis_index'")
            a = item["basis_index"]
            if not isinstance(a, int) or a in indexed:
                raise ValueError(f"basis_index {a!r} is invalid or duplicated")
            indexed[a] = item
        n = len(indexed)
        if sorted(indexed) != list(range(n)):
            raise ValueError(f"basis_index values must cover 0..{n - 1}, got {sorted(indexed)}")

        mats = np.zeros((n, d, d, d), dtype=complex)
        for a in range(n):
            projectors = indexed[a].get("projectors")
            if not isinstance(projectors, list) or len(projectors) != d:
                raise ValueError(f"basis {a}: expected {d} projectors")
            seen = set()
            for entry in projectors:
                if not isinstance(entry, dict) or "alpha" not in entry:
                    raise ValueError(f"basis {a}: each projector needs an 'alpha'")
                alpha = entry["alpha"]
                if not isinstance(alpha, int) or not 0 <= alpha < d or alpha in seen:
                    raise ValueError(f"basis {a}: alpha {alpha!r} is invalid or duplicated")
                seen.add(alpha)
                where = f"basis {a}, vector {alpha}"
                m = self._parse_matrix(entry.get("matrix"), where)

                defect = np.abs(m - m.conj().T)
                worst = float(defect.max())
                if worst > tolerance:
                    p, q = np.unravel_index(int(defect.argmax()), defect.shape)
                    raise ValueError(
                        f"{where}, entry ({p}, {q}): Hermitian symmetry violated "
                        f"by {worst:.3e} (tolerance {tolerance:.1e})"
                    )
                trace_defect = abs(complex(np.trace(m)) - 1.0)
                if trace_defect > tolerance:
                    raise ValueError(
                        f"{where}: trace deviates from 1 by {trace_defect:.3e} "
                        f"(tolerance {tolerance:.1e})"
                    )
                decomp = eigen_hermitian(m, hermiticity_tol=tolerance)
                low = float(decomp.eigenvalues[-1])
                if low < -tolerance:
                    raise ValueError(
                        f"{where}: eigenvalue {low:.3e} below -{tolerance:.1e}; not positive-semidefinite"
                    )
                mats[a, alpha] = m
        return MubFamily(mats)


def write_json(payload: dict, path: str) -> None:
    """Serialize a payload to a JSON file with full-precision floats."""
    try:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=1)
            handle.write("\n")
    except OSError as exc:
        raise OSError(f"could not write {path!r}: {exc}") from exc


def save_family(
    family: MubFamily,
    path: str,
    states=None,
    metadata: Optional[dict] = None,
) -> None:
    """Write a family (optionally with its states) to a JSON document.

    The save/load round trip reproduces every projector entry bit-exactly.
    Filesystem problems surface as errors carrying the path.
    """
    doc = FamilyDocument.from_family(family, states=states, metadata=metadata)
    write_json(doc.to_payload(), path)


def load_family(path: str, tolerance: float = LOAD_TOLERANCE) -> MubFamily:
    """Read and validate a family document; returns its projectors.

    Raises on unreadable files, malformed JSON, structural inconsistencies,
    and projector-invariant violations (named per basis, vector, entry).
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except OSError as exc:
        raise OSError(f"could not read {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path!r} is not valid JSON: {exc}") from exc
    return FamilyDocument.from_payload(payload).to_family(tolerance)


def file_sha256(path: str) -> str:
    """Hex digest of a file's contents, for report provenance."""
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def report_payload(
    report: VerificationReport,
    tool_version: str,
    source_path: Optional[str] = None,
) -> dict:
    """JSON payload for a verification certificate, with provenance fields."""
    payload = {
        "tool_version": tool_version,
        "dim": report.dim,
        "num_bases": report.num_bases,
        "tolerance": report.tolerance,
        "max_self_residual": report.max_self_residual,
        "max_cross_residual": report.max_cross_residual,
        "trace_residual": report.trace_residual,
        "hermiticity_residual": report.hermiticity_residual,
        "psd_min_eigenvalue": report.psd_min_eigenvalue,
        "angle_check": report.angle_check,
        "passed": report.passed,
    }
    if source_path is not None:
        payload["input_path"] = source_path
        payload["input_sha256"] = file_sha256(source_path)
    if report.gram is not None:
        payload["gram"] = [[float(x) for x in row] for row in report.gram]
    return payload

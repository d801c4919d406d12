"""Versioned binary serialization for trained models.

Layout: magic "CFKL", format version u32, u32 JSON header length, JSON header
(model kind, scalar fields, ordered array descriptors), then the arrays as
row-major little-endian float64 in descriptor order.  Writing is
deterministic: the header is serialized with sorted keys.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from facekit.errors import SchemaViolation
from facekit.learn.lasso import LassoModel
from facekit.learn.lda import LdaModel
from facekit.learn.pca import PcaBasis

_MAGIC = b"CFKL"
_VERSION = 1


def _pack(arrays: list[tuple[str, np.ndarray]], meta: dict) -> bytes:
    header = dict(meta)
    header["arrays"] = [
        {"name": name, "shape": list(arr.shape)} for name, arr in arrays
    ]
    hjson = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    out = _MAGIC + struct.pack("<II", _VERSION, len(hjson)) + hjson
    for _, arr in arrays:
        out += np.ascontiguousarray(arr, dtype="<f8").tobytes()
    return out


def _unpack(blob: bytes, path: str) -> tuple[dict, dict[str, np.ndarray]]:
    if blob[:4] != _MAGIC:
        raise SchemaViolation("magic", path, "not a model file")
    version, hlen = struct.unpack_from("<II", blob, 4)
    if version != _VERSION:
        raise SchemaViolation("version", path, f"unsupported version {version}")
    header = json.loads(blob[12:12 + hlen].decode("utf-8"))
    off = 12 + hlen
    arrays = {}
    for desc in header["arrays"]:
        count = int(np.prod(desc["shape"])) if desc["shape"] else 1
        vals = np.frombuffer(blob, dtype="<f8", count=count, offset=off)
        arrays[desc["name"]] = vals.reshape(desc["shape"]).copy()
        off += count * 8
    return header, arrays


def save_model(path, pca: PcaBasis, model: LdaModel | LassoModel,
               meta: dict | None = None) -> None:
    arrays = [
        ("pca_mean", pca.mean),
        ("pca_components", pca.components),
        ("pca_ratio", pca.explained_variance_ratio),
    ]
    header: dict = dict(meta or {})
    header["pca_retained"] = pca.retained
    if isinstance(model, LdaModel):
        header["kind"] = "lda"
        header["bias"] = model.bias
        arrays += [
            ("weights", model.weights),
            ("class_priors", model.class_priors),
            ("class_means", model.class_means),
        ]
    elif isinstance(model, LassoModel):
        header["kind"] = "lasso"
        header["intercept"] = model.intercept
        header["lam"] = model.lam
        arrays.append(("beta", model.beta))
    else:
        raise SchemaViolation("model", str(type(model)), "unsupported model type")
    Path(path).write_bytes(_pack(arrays, header))


def load_model(path) -> tuple[PcaBasis, LdaModel | LassoModel, dict]:
    path = Path(path)
    header, arrays = _unpack(path.read_bytes(), str(path))
    pca = PcaBasis(
        mean=arrays["pca_mean"],
        components=arrays["pca_components"],
        explained_variance_ratio=arrays["pca_ratio"],
        retained=int(header["pca_retained"]),
    )
    if header["kind"] == "lda":
        model: LdaModel | LassoModel = LdaModel(
            weights=arrays["weights"],
            bias=float(header["bias"]),
            class_priors=arrays["class_priors"],
            class_means=arrays["class_means"],
        )
    elif header["kind"] == "lasso":
        model = LassoModel(
            beta=arrays["beta"],
            intercept=float(header["intercept"]),
            lam=float(header["lam"]),
            lambda_grid=None,
            cv_mse=None,
            n_sweeps=0,
        )
    else:
        raise SchemaViolation("kind", str(path), f"unknown model kind {header['kind']!r}")
    extra = {
        k: v for k, v in header.items()
        if k not in ("kind", "bias", "intercept", "lam", "pca_retained", "arrays")
    }
    return pca, model, extra

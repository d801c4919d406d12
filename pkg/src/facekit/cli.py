"""Pipeline driver: one subcommand per stage, files in, files out.

Every command reads and writes under a single --out directory, derives all
randomness from the global --seed, and is idempotent: rerunning with the
same inputs and seed rewrites byte-identical artifacts.  Logs go to stderr;
data only ever goes to files.  Failures exit nonzero with one structured
JSON error line on stderr.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from PIL import Image

from facekit.dataset import (
    DatasetManifest,
    FaceRecord,
    from_cnsifd_dir,
    load_manifest,
    save_manifest,
)
from facekit.errors import FacekitError, MissingFile, SchemaViolation
from facekit.features.extract import EXTRACTABLE, extract_family
from facekit.features.vector import export_csv, load_matrix, save_matrix, stack_vectors
from facekit.learn.cv import cross_validate, predict_human_accuracy
from facekit.learn.io import save_model
from facekit.learn.lasso import lasso_fit
from facekit.learn.lda import lda_fit
from facekit.learn.pca import pca_fit
from facekit.occlusion import (
    analyze_occlusion,
    apply_band,
    build_design,
    design_from_json,
    design_to_json,
    make_band,
)
from facekit.preprocess import equalize_face, normalize_geometry
from facekit.records import read_jsonl
from facekit.report import write_report, write_table
from facekit.stats.accuracy import accuracy_vector, mean_accuracy, per_face_accuracy
from facekit.stats.reliability import split_half_reliability
from facekit.synthetic import generate_synthetic


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _record_run(out: Path, command: str, args: dict, outputs: list[Path]) -> None:
    """Keep a machine-readable ledger of what each command produced."""
    path = out / "run_manifest.json"
    doc = json.loads(path.read_text()) if path.exists() else {"version": 1, "runs": {}}
    doc["runs"][command] = {
        "args": {k: v for k, v in sorted(args.items())},
        "outputs": {
            str(p.relative_to(out)): _sha256(p) for p in sorted(outputs)
        },
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True))


def _pmap(fn, items, jobs: int) -> list:
    """Ordered map; worker count never changes results, only wall time."""
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _load_gray(path) -> np.ndarray:
    p = Path(path)
    if not p.exists():
        raise MissingFile(str(p))
    return np.asarray(Image.open(p).convert("L"), dtype=np.uint8)


def _save_gray(image: np.ndarray, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.asarray(image, dtype=np.uint8), mode="L").save(path)


def _pipeline_manifest(out: Path, explicit: str | None) -> DatasetManifest:
    """The manifest later stages should read: normalized when present."""
    if explicit:
        return load_manifest(explicit)
    for candidate in (out / "normalized" / "manifest.json", out / "manifest.json"):
        if candidate.exists():
            return load_manifest(candidate)
    raise MissingFile(
        f"no manifest under {out}; run ingest (and preprocess) first or pass --manifest"
    )


def _task_labels(manifest: DatasetManifest, task: str) -> tuple[list[str], dict[str, int]]:
    """Face ids with a usable label for the task, plus the label coding."""
    if task == "race":
        faces = manifest.race_task_faces()
        coding = {"North": 0, "South": 1}
        return [f.face_id for f in faces], {
            f.face_id: coding[f.labels.race] for f in faces
        }
    if task == "gender":
        faces = [f for f in manifest.faces if f.labels.gender in ("Male", "Female")]
        coding = {"Female": 0, "Male": 1}
        return [f.face_id for f in faces], {
            f.face_id: coding[f.labels.gender] for f in faces
        }
    raise SchemaViolation("task", task, "must be race or gender")


# -- subcommands ------------------------------------------------------------


def cmd_synth(args) -> int:
    out = Path(args.out)
    data_dir = out / "dataset"
    manifest = generate_synthetic(
        args.n_per_class, args.effect, args.seed, data_dir, sigma=args.sigma
    )
    outputs = [data_dir / "manifest.json"]
    outputs += sorted((data_dir / "images").glob("*.png"))
    _log(f"synth: {len(manifest.faces)} faces, effect {args.effect}, -> {data_dir}")
    _record_run(out, "synth", {
        "n_per_class": args.n_per_class, "effect": args.effect,
        "sigma": args.sigma, "seed": args.seed,
    }, outputs)
    return 0


def cmd_ingest(args) -> int:
    out = Path(args.out)
    src = Path(args.data)
    if args.cnsifd:
        manifest = from_cnsifd_dir(src)
    else:
        manifest = load_manifest(src if src.is_file() else src / "manifest.json")
    out.mkdir(parents=True, exist_ok=True)
    save_manifest(manifest, out / "manifest.json")
    report = {
        "n_faces": len(manifest.faces),
        "reference_face_id": manifest.reference_face_id,
        "label_counts": manifest.label_counts(),
    }
    (out / "ingest_report.json").write_text(json.dumps(report, indent=2, sort_keys=True))
    _log(f"ingest: {report['n_faces']} faces validated")
    _record_run(out, "ingest", {"data": str(src), "cnsifd": args.cnsifd},
                [out / "manifest.json", out / "ingest_report.json"])
    return 0


def cmd_preprocess(args) -> int:
    out = Path(args.out)
    manifest = load_manifest(args.manifest) if args.manifest else load_manifest(out / "manifest.json")
    norm_dir = out / "normalized"
    img_dir = norm_dir / "images"
    img_dir.mkdir(parents=True, exist_ok=True)

    def normalize(face: FaceRecord):
        return normalize_geometry(_load_gray(face.image_path), face.landmarks)

    normalized = _pmap(normalize, manifest.faces, args.jobs)
    by_id = dict(zip((f.face_id for f in manifest.faces), normalized))
    reference = by_id[manifest.reference_face_id]

    records = []
    outputs = []
    for face, norm in zip(manifest.faces, normalized):
        final = norm if face.face_id == manifest.reference_face_id else equalize_face(norm, reference)
        path = img_dir / f"{face.face_id}.png"
        _save_gray(final.image, path)
        outputs.append(path)
        records.append(FaceRecord(
            face_id=face.face_id,
            image_path=path,
            landmarks=final.landmarks,
            labels=face.labels,
            set_tag=face.set_tag,
        ))
    norm_manifest = DatasetManifest(
        faces=tuple(records),
        reference_face_id=manifest.reference_face_id,
        part_index_map=dict(manifest.part_index_map),
        delaunay_subset=manifest.delaunay_subset,
    )
    save_manifest(norm_manifest, norm_dir / "manifest.json")
    outputs.append(norm_dir / "manifest.json")
    _log(f"preprocess: {len(records)} faces normalized and equalized -> {norm_dir}")
    _record_run(out, "preprocess", {"manifest": args.manifest or ""}, outputs)
    return 0


def cmd_extract(args) -> int:
    out = Path(args.out)
    manifest = _pipeline_manifest(out, args.manifest)
    families = [f.strip() for batch in args.family for f in batch.split(",") if f.strip()]
    for fam in families:
        if fam not in EXTRACTABLE:
            raise SchemaViolation("family", fam, f"not extractable; choose from {EXTRACTABLE}")
    feat_dir = out / "features"
    feat_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    for fam in families:
        def one(face: FaceRecord):
            image = _load_gray(face.image_path)
            return extract_family(fam, image, face.landmarks)

        vectors = _pmap(one, manifest.faces, args.jobs)
        matrix = stack_vectors(fam, [f.face_id for f in manifest.faces], vectors)
        bin_path = feat_dir / f"{fam}.cfkm"
        csv_path = feat_dir / f"{fam}.csv"
        save_matrix(matrix, bin_path)
        export_csv(matrix, csv_path)
        outputs += [bin_path, csv_path]
        _log(f"extract: {fam} -> {matrix.n_faces} x {matrix.dim}")
    _record_run(out, "extract", {"family": families, "manifest": args.manifest or ""}, outputs)
    return 0


def cmd_train(args) -> int:
    out = Path(args.out)
    manifest = _pipeline_manifest(out, args.manifest)
    matrix_path = out / "features" / f"{args.family}.cfkm"
    if not matrix_path.exists():
        raise MissingFile(f"{matrix_path}; run extract --family {args.family} first")
    matrix = load_matrix(matrix_path)
    ids, coding = _task_labels(manifest, args.task)
    keep = [i for i, fid in enumerate(matrix.face_ids) if fid in coding]
    if len(keep) < 2 * args.folds:
        raise SchemaViolation("task", args.task, f"only {len(keep)} labeled faces")
    X = matrix.values[keep]
    y = np.array([coding[matrix.face_ids[i]] for i in keep])

    result = cross_validate(X, y, task="classify", k=args.folds,
                            repeats=args.repeats, seed=(args.seed, 101))
    res_dir = out / "results"
    res_dir.mkdir(parents=True, exist_ok=True)
    split_rows = [
        {"split": r, "accuracy": repr(float(v))}
        for r, v in enumerate(result.per_split_metric)
    ]
    folds_path = res_dir / f"cv_{args.task}_{args.family}.csv"
    write_table(folds_path, split_rows, ["split", "accuracy"])
    summary_path = res_dir / f"train_{args.task}_{args.family}.csv"
    write_table(summary_path, [{
        "task": args.task, "family": args.family, "dim": matrix.dim,
        "n_faces": len(keep), "folds": args.folds, "repeats": args.repeats,
        "mean_accuracy": repr(result.mean), "sd_accuracy": repr(result.std),
    }], ["task", "family", "dim", "n_faces", "folds", "repeats",
         "mean_accuracy", "sd_accuracy"])

    basis = pca_fit(X, 0.95)
    model = lda_fit(basis.transform(X), y)
    model_dir = out / "models"
    model_dir.mkdir(parents=True, exist_ok=True)
    model_path = model_dir / f"{args.task}_{args.family}.cfkl"
    save_model(model_path, basis, model,
               meta={"task": args.task, "family": args.family,
                     "coding": {str(v): k for k, v in
                                ({"North": 0, "South": 1} if args.task == "race"
                                 else {"Female": 0, "Male": 1}).items()}})
    _log(f"train: {args.task}/{args.family} accuracy "
         f"{100 * result.mean:.1f}% +- {100 * result.std:.1f}% "
         f"({args.repeats}x{args.folds}-fold, n={len(keep)})")
    _record_run(out, f"train_{args.task}_{args.family}", {
        "task": args.task, "family": args.family, "folds": args.folds,
        "repeats": args.repeats, "seed": args.seed,
    }, [folds_path, summary_path, model_path])
    return 0


def cmd_regress(args) -> int:
    out = Path(args.out)
    manifest = _pipeline_manifest(out, args.manifest)
    matrix_path = out / "features" / f"{args.family}.cfkm"
    if not matrix_path.exists():
        raise MissingFile(f"{matrix_path}; run extract --family {args.family} first")
    matrix = load_matrix(matrix_path)
    res_dir = out / "results"
    res_dir.mkdir(parents=True, exist_ok=True)

    if args.attribute == "human-accuracy":
        if not args.responses:
            raise MissingFile("--responses is required for human-accuracy")
        table, warn = per_face_accuracy(read_jsonl(args.responses))
        for w in warn:
            _log(f"regress: {w}")
        ids = [fid for fid in matrix.face_ids if fid in table]
        if len(ids) < 3 * args.folds:
            raise SchemaViolation("responses", args.responses,
                                  f"only {len(ids)} faces with human accuracy")
        rows = [matrix.face_ids.index(fid) for fid in ids]
        X = matrix.values[rows]
        acc = accuracy_vector(table, ids)
        race_of = {f.face_id: f.labels.race for f in manifest.race_task_faces()}
        cls = np.array([race_of.get(fid, "Unknown") for fid in ids])
        pred, r = predict_human_accuracy(X, acc, cls, k=args.folds,
                                         seed=(args.seed, 202))
        ana_dir = out / "analysis"
        ana_dir.mkdir(parents=True, exist_ok=True)
        mh_path = ana_dir / "model_human.csv"
        write_table(mh_path, [
            {"face_id": fid, "human_accuracy": repr(float(a)),
             "model_score": repr(float(p))}
            for fid, a, p in zip(ids, acc, pred)
        ], ["face_id", "human_accuracy", "model_score"])
        summary_path = res_dir / f"regress_human-accuracy_{args.family}.csv"
        write_table(summary_path, [{
            "attribute": "human-accuracy", "family": args.family,
            "n": len(ids), "r": repr(float(r)),
        }], ["attribute", "family", "n", "r"])
        _log(f"regress: human-accuracy/{args.family} r={r:.3f} (n={len(ids)})")
        _record_run(out, f"regress_human-accuracy_{args.family}", {
            "attribute": args.attribute, "family": args.family,
            "responses": args.responses, "seed": args.seed,
        }, [mh_path, summary_path])
        return 0

    values = {}
    for f in manifest.faces:
        v = getattr(f.labels, args.attribute)
        if v is not None:
            values[f.face_id] = float(v)
    ids = [fid for fid in matrix.face_ids if fid in values]
    if len(ids) < 2 * args.folds:
        raise SchemaViolation("attribute", args.attribute,
                              f"only {len(ids)} faces carry {args.attribute}")
    rows = [matrix.face_ids.index(fid) for fid in ids]
    X = matrix.values[rows]
    y = np.array([values[fid] for fid in ids])
    result = cross_validate(X, y, task="regress", k=args.folds,
                            repeats=args.repeats, seed=(args.seed, 303))
    basis = pca_fit(X, 0.95)
    model = lasso_fit(basis.transform(X), y, seed=(args.seed, 304))
    model_dir = out / "models"
    model_dir.mkdir(parents=True, exist_ok=True)
    model_path = model_dir / f"{args.attribute}_{args.family}.cfkl"
    save_model(model_path, basis, model,
               meta={"attribute": args.attribute, "family": args.family})
    summary_path = res_dir / f"regress_{args.attribute}_{args.family}.csv"
    write_table(summary_path, [{
        "attribute": args.attribute, "family": args.family, "n": len(ids),
        "mean_r": repr(result.mean), "sd_r": repr(result.std),
    }], ["attribute", "family", "n", "mean_r", "sd_r"])
    _log(f"regress: {args.attribute}/{args.family} r={result.mean:.3f} "
         f"+- {result.std:.3f} (n={len(ids)})")
    _record_run(out, f"regress_{args.attribute}_{args.family}", {
        "attribute": args.attribute, "family": args.family,
        "folds": args.folds, "repeats": args.repeats, "seed": args.seed,
    }, [summary_path, model_path])
    return 0


def cmd_analyze(args) -> int:
    out = Path(args.out)
    responses = read_jsonl(args.responses)
    if not responses:
        raise MissingFile(f"{args.responses} holds no response records")
    ana_dir = out / "analysis"
    ana_dir.mkdir(parents=True, exist_ok=True)
    outputs = []

    table, warn = per_face_accuracy(responses)
    for w in warn:
        _log(f"analyze: {w}")
    acc_path = ana_dir / "accuracy.csv"
    write_table(acc_path, [
        {"face_id": fid, "n_responses": fa.n_responses,
         "n_correct": fa.n_correct, "accuracy": repr(fa.accuracy)}
        for fid, fa in table.items()
    ], ["face_id", "n_responses", "n_correct", "accuracy"])
    outputs.append(acc_path)
    _log(f"analyze: {len(table)} faces, mean accuracy {100 * mean_accuracy(table):.1f}%")

    subjects = {r.session_id for r in responses}
    if len(subjects) >= 2:
        rows = []
        for scheme in ("even_odd", "random"):
            rel = split_half_reliability(responses, scheme=scheme,
                                         n_draws=args.draws, seed=(args.seed, 404))
            rows.append({
                "method": scheme, "r": repr(rel.r), "corrected": repr(rel.rc),
                "n_faces": rel.n_faces, "n_draws": rel.n_draws,
            })
        rel_path = ana_dir / "reliability.csv"
        write_table(rel_path, rows, ["method", "r", "corrected", "n_faces", "n_draws"])
        outputs.append(rel_path)
    else:
        _log("analyze: <2 subjects, skipping split-half reliability")

    if any(r.condition != "none" for r in responses):
        design_path = out / "occlusion" / "design.json"
        design = design_from_json(design_path.read_text()) if design_path.exists() else None
        summary = analyze_occlusion(responses, design)
        occ_path = ana_dir / "occlusion_summary.json"
        occ_path.write_text(json.dumps(summary, indent=2, sort_keys=True))
        outputs.append(occ_path)
        _log(f"analyze: occlusion conditions {sorted(summary['conditions'])}")

    _record_run(out, "analyze", {
        "responses": args.responses, "draws": args.draws, "seed": args.seed,
    }, outputs)
    return 0


def cmd_occlude(args) -> int:
    out = Path(args.out)
    manifest = _pipeline_manifest(out, args.manifest)
    if args.accuracy:
        with open(args.accuracy, newline="") as fh:
            acc = {row["face_id"]: float(row["accuracy"])
                   for row in csv.DictReader(fh)}
    elif args.responses:
        table, _ = per_face_accuracy(read_jsonl(args.responses))
        acc = {fid: fa.accuracy for fid, fa in table.items()}
    else:
        raise MissingFile("occlude needs --accuracy CSV or --responses JSONL")

    race_of = {f.face_id: f.labels.race for f in manifest.race_task_faces()}
    acc = {fid: a for fid, a in acc.items() if fid in race_of}
    labels = {fid: race_of[fid] for fid in acc}
    design = build_design(acc, seed=args.seed, labels=labels,
                          target=args.target, tol=args.tol)
    occ_dir = out / "occlusion"
    occ_dir.mkdir(parents=True, exist_ok=True)
    design_path = occ_dir / "design.json"
    design_path.write_text(design_to_json(design))
    outputs = [design_path]

    faces = {f.face_id: f for f in manifest.faces}
    for cond in ("none", "eye", "nose", "mouth"):
        cond_dir = occ_dir / "stimuli" / cond

        def render(fid: str, cond=cond, cond_dir=cond_dir):
            face = faces[fid]
            image = _load_gray(face.image_path)
            if cond != "none":
                image = apply_band(image, make_band(face.landmarks, cond))
            path = cond_dir / f"{fid}.png"
            _save_gray(image, path)
            return path

        outputs += _pmap(render, design.faces_for(cond), args.jobs)
    _log(f"occlude: design target {design.target:.3f}, condition means "
         + ", ".join(f"{c}={m:.3f}" for c, m in sorted(design.condition_means.items()))
         + f"; {sum(1 for p in outputs if p.suffix == '.png')} stimuli")
    _record_run(out, "occlude", {
        "accuracy": args.accuracy or "", "responses": args.responses or "",
        "target": args.target, "tol": args.tol, "seed": args.seed,
    }, outputs)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from facekit.service.app import create_app
    from facekit.service.store import SessionStore

    out = Path(args.out)
    manifest = _pipeline_manifest(out, args.manifest)
    labels = {f.face_id: f.labels.race for f in manifest.race_task_faces()}
    design_path = out / "occlusion" / "design.json"
    design = design_from_json(design_path.read_text()) if design_path.exists() else None
    stimuli = Path(args.stimuli) if args.stimuli else out / "occlusion" / "stimuli"
    store = SessionStore(out / "service", labels, occlusion_design=design,
                         schedule_size=args.schedule_size)
    app = create_app(store, stimuli=stimuli if stimuli.is_dir() else None,
                     token=args.token)
    _log(f"serve: {len(labels)} faces, occlusion design "
         f"{'loaded' if design else 'absent'}, listening on {args.host}:{args.port}")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_report(args) -> int:
    out = Path(args.out)
    written = write_report(out)
    for p in written:
        _log(f"report: wrote {p.relative_to(out)}")
    _record_run(out, "report", {}, written)
    return 0


# -- argument wiring --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="facekit",
        description="Face classification pipeline: data, features, models, "
                    "experiments, reports.",
    )
    parser.add_argument("--out", default="runs", help="artifact directory (default: runs)")
    parser.add_argument("--seed", type=int, default=0, help="master seed (default: 0)")
    parser.add_argument("--jobs", type=int, default=1, help="worker threads (default: 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic labeled dataset")
    p.add_argument("--n-per-class", type=int, default=100)
    p.add_argument("--effect", type=float, default=2.0,
                   help="class separation in landmark-noise SD units")
    p.add_argument("--sigma", type=float, default=1.5)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest", help="validate a dataset and write the canonical manifest")
    p.add_argument("--data", required=True, help="manifest.json, its directory, or a raw dataset dir")
    p.add_argument("--cnsifd", action="store_true",
                   help="treat --data as an images/landmarks/labels.csv directory")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("preprocess", help="normalize geometry and equalize intensities")
    p.add_argument("--manifest", default=None)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("extract", help="extract feature families to matrix files")
    p.add_argument("--family", action="append", required=True,
                   help="family name; repeat or comma-separate for several")
    p.add_argument("--manifest", default=None)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="cross-validate and fit a classifier")
    p.add_argument("--task", choices=("race", "gender"), required=True)
    p.add_argument("--family", required=True)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--manifest", default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("regress", help="predict a continuous attribute from features")
    p.add_argument("--attribute", required=True,
                   choices=("age", "height", "weight", "human-accuracy"))
    p.add_argument("--family", required=True)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--responses", default=None, help="JSONL, for human-accuracy")
    p.add_argument("--manifest", default=None)
    p.set_defaults(func=cmd_regress)

    p = sub.add_parser("analyze", help="accuracy, reliability, and occlusion stats from responses")
    p.add_argument("--responses", required=True, help="JSONL response log")
    p.add_argument("--draws", type=int, default=1000,
                   help="random split-half draws (default: 1000)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("occlude", help="build the 4-condition design and render stimuli")
    p.add_argument("--accuracy", default=None, help="CSV with face_id,accuracy")
    p.add_argument("--responses", default=None, help="JSONL to derive accuracy from")
    p.add_argument("--target", type=float, default=None,
                   help="intact accuracy target (default: pool mean)")
    p.add_argument("--tol", type=float, default=0.01)
    p.add_argument("--manifest", default=None)
    p.set_defaults(func=cmd_occlude)

    p = sub.add_parser("serve", help="run the experiment HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--token", default=None, help="bearer token guarding export")
    p.add_argument("--stimuli", default=None)
    p.add_argument("--schedule-size", type=int, default=None)
    p.add_argument("--manifest", default=None)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("report", help="summarize run artifacts as Markdown + figures")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FacekitError as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}),
              file=sys.stderr)
        return 2
    except OSError as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Occlusion stimuli and the four-condition experiment design.

A band is a horizontal black rectangle spanning the face hull.  All three
occluding conditions on a face share one height: the largest of the three
target regions' vertical extents (eyes, lower half of the nose, mouth) plus
a margin on each side.  The nose band targets only the nose's lower half, so
the eye band is allowed to cross the upper nose bridge; each band must cover
its own target landmarks completely and none of the other two targets'.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from facekit.errors import InfeasibleBalance, PartsOverlap
from facekit.landmarks import LandmarkSet
from facekit.records import CONDITIONS, ResponseRecord
from facekit.stats.ranktests import rank_sum_test

BAND_MARGIN = 4.0  # px at the canonical 250 px face scale
OCCLUDING = ("eye", "nose", "mouth")
DESIGN_TOTAL = 544
N_COMMON = 108
N_UNIQUE = 109


@dataclass(frozen=True)
class OcclusionBand:
    condition: str
    y_top: float
    height: float
    x_left: float
    x_right: float
    fill: int = 0

    @property
    def empty(self) -> bool:
        return self.height <= 0.0

    def covers(self, points: np.ndarray) -> np.ndarray:
        """Boolean per point: inside the band rectangle."""
        pts = np.asarray(points, dtype=float)
        return (
            (pts[:, 1] >= self.y_top)
            & (pts[:, 1] <= self.y_top + self.height)
            & (pts[:, 0] >= self.x_left)
            & (pts[:, 0] <= self.x_right)
        )


def _target_points(landmarks: LandmarkSet, condition: str) -> np.ndarray:
    if condition == "eye":
        return np.vstack([landmarks.part("left_eye"), landmarks.part("right_eye")])
    if condition == "mouth":
        return landmarks.part("mouth")
    if condition == "nose":
        nose = landmarks.part("nose")
        mid = (nose[:, 1].min() + nose[:, 1].max()) / 2.0
        return nose[nose[:, 1] >= mid]
    raise ValueError(f"no target region for condition {condition!r}")


def band_height(landmarks: LandmarkSet, margin: float = BAND_MARGIN) -> float:
    """The shared height: max target extent plus a margin on both sides."""
    extents = []
    for cond in OCCLUDING:
        pts = _target_points(landmarks, cond)
        extents.append(pts[:, 1].max() - pts[:, 1].min())
    return float(max(extents) + 2.0 * margin)


def make_band(landmarks: LandmarkSet, condition: str,
              margin: float = BAND_MARGIN) -> OcclusionBand:
    """Build the occluding band for one condition.

    The band centers vertically on its target region, spans the hull
    horizontally, and uses the face's shared band height.  Raises
    PartsOverlap if, at that height, the band would cover a landmark
    belonging to another condition's target.
    """
    if condition == "none":
        return OcclusionBand("none", 0.0, 0.0, 0.0, 0.0)
    if condition not in OCCLUDING:
        raise ValueError(f"unknown condition {condition!r}")
    h = band_height(landmarks, margin)
    target = _target_points(landmarks, condition)
    center = (target[:, 1].min() + target[:, 1].max()) / 2.0
    band = OcclusionBand(
        condition=condition,
        y_top=center - h / 2.0,
        height=h,
        x_left=float(landmarks.points[:, 0].min()),
        x_right=float(landmarks.points[:, 0].max()),
    )
    if not band.covers(target).all():
        raise PartsOverlap(f"{condition} band fails to cover its own target")
    for other in OCCLUDING:
        if other == condition:
            continue
        hit = band.covers(_target_points(landmarks, other))
        if hit.any():
            raise PartsOverlap(
                f"{condition} band would cover {int(hit.sum())} {other} landmarks"
            )
    return band


def apply_band(image: np.ndarray, band: OcclusionBand) -> np.ndarray:
    """Stimulus image with the band filled in; untouched pixels are bitwise
    identical to the input."""
    out = np.asarray(image).copy()
    if band.empty:
        return out
    h, w = out.shape
    r0 = max(0, int(np.floor(band.y_top)))
    r1 = min(h, int(np.ceil(band.y_top + band.height)) + 1)
    c0 = max(0, int(np.floor(band.x_left)))
    c1 = min(w, int(np.ceil(band.x_right)) + 1)
    out[r0:r1, c0:c1] = band.fill
    return out


@dataclass(frozen=True)
class ConditionDesign:
    common: tuple[str, ...]
    unique: dict[str, tuple[str, ...]]  # condition -> face ids
    target: float
    condition_means: dict[str, float]
    seed: int

    def faces_for(self, condition: str) -> tuple[str, ...]:
        return self.common + self.unique[condition]


def design_to_json(design: ConditionDesign) -> str:
    doc = {
        "common": list(design.common),
        "unique": {c: list(v) for c, v in design.unique.items()},
        "target": design.target,
        "condition_means": design.condition_means,
        "seed": design.seed,
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def design_from_json(text: str) -> ConditionDesign:
    doc = json.loads(text)
    return ConditionDesign(
        common=tuple(doc["common"]),
        unique={c: tuple(v) for c, v in doc["unique"].items()},
        target=float(doc["target"]),
        condition_means={c: float(v) for c, v in doc["condition_means"].items()},
        seed=int(doc["seed"]),
    )


def _deal_balanced(ids: list[str], accuracy: dict[str, float], n_bins: int,
                   cap: int, rng: np.random.Generator) -> list[list[str]]:
    """Greedy anti-sorted dealing: highest-accuracy faces go first, each to
    the emptiest bin, ties to the bin with the lowest running sum."""
    order = sorted(ids, key=lambda f: (-accuracy[f], f))
    bins: list[list[str]] = [[] for _ in range(n_bins)]
    sums = np.zeros(n_bins)
    start = int(rng.integers(n_bins))
    for pos, fid in enumerate(order):
        open_bins = [b for b in range(n_bins) if len(bins[b]) < cap]
        sizes = np.array([len(bins[b]) for b in open_bins])
        candidates = [b for b, s in zip(open_bins, sizes) if s == sizes.min()]
        b = min(candidates, key=lambda b: (sums[b], (b - start - pos) % n_bins))
        bins[b].append(fid)
        sums[b] += accuracy[fid]
    return bins


def build_design(accuracy: dict[str, float], seed: int,
                 labels: dict[str, str] | None = None,
                 target: float | None = None, tol: float = 0.01,
                 restarts: int = 1000) -> ConditionDesign:
    """Assign 544 faces to four conditions of 217 (108 common + 109 unique).

    Every condition's intact-face mean accuracy must land within ``tol`` of
    the target (default: the pool mean).  With labels given, the pool and the
    common set are class-balanced.  Assignment is greedy dealing with random
    restarts; deterministic for a given seed.
    """
    rng = np.random.default_rng(seed)
    pool = sorted(accuracy)
    if len(pool) < DESIGN_TOTAL:
        raise InfeasibleBalance(
            f"need {DESIGN_TOTAL} candidate faces, got {len(pool)}"
        )
    if labels is not None:
        by_class: dict[str, list[str]] = {}
        for fid in pool:
            by_class.setdefault(labels[fid], []).append(fid)
        if len(by_class) != 2:
            raise InfeasibleBalance(f"need 2 classes, got {sorted(by_class)}")
        per_class = DESIGN_TOTAL // 2
        chosen = []
        for cls in sorted(by_class):
            members = by_class[cls]
            if len(members) < per_class:
                raise InfeasibleBalance(
                    f"class {cls}: {len(members)} faces, need {per_class}"
                )
            take = rng.choice(len(members), size=per_class, replace=False)
            chosen.extend(members[i] for i in sorted(take))
        pool = sorted(chosen)
    elif len(pool) > DESIGN_TOTAL:
        take = rng.choice(len(pool), size=DESIGN_TOTAL, replace=False)
        pool = sorted(pool[i] for i in sorted(take))

    if target is None:
        target = float(np.mean([accuracy[f] for f in pool]))

    classes = sorted({labels[f] for f in pool}) if labels else [None]
    for _ in range(restarts):
        common: list[str] = []
        rest: list[str] = []
        for cls in classes:
            members = [f for f in pool if labels is None or labels[f] == cls]
            perm = rng.permutation(len(members))
            n_c = N_COMMON // len(classes)
            common.extend(members[i] for i in perm[:n_c])
            rest.extend(members[i] for i in perm[n_c:])
        if len(common) < N_COMMON:  # odd split without labels
            extra = [f for f in rest[: N_COMMON - len(common)]]
            common.extend(extra)
            rest = rest[N_COMMON - len(common):]

        if labels is None:
            bins = _deal_balanced(rest, accuracy, 4, N_UNIQUE, rng)
        else:
            bins = [[] for _ in range(4)]
            for cls in classes:
                cls_rest = [f for f in rest if labels[f] == cls]
                cap = int(np.ceil(len(cls_rest) / 4))
                dealt = _deal_balanced(cls_rest, accuracy, 4, cap, rng)
                order = rng.permutation(4)
                for b, d in zip(order, dealt):
                    bins[b].extend(d)
            if any(len(b) != N_UNIQUE for b in bins):
                continue

        means = {}
        ok = True
        for cond, b in zip(CONDITIONS, bins):
            faces = common + b
            m = float(np.mean([accuracy[f] for f in faces]))
            means[cond] = m
            if abs(m - target) > tol:
                ok = False
        if ok:
            return ConditionDesign(
                common=tuple(sorted(common)),
                unique={c: tuple(sorted(b)) for c, b in zip(CONDITIONS, bins)},
                target=target,
                condition_means=means,
                seed=seed,
            )
    raise InfeasibleBalance(
        f"no assignment within {tol:+.2%} of target {target:.2%} "
        f"after {restarts} restarts"
    )


def analyze_occlusion(responses: list[ResponseRecord],
                      design: ConditionDesign | None = None) -> dict:
    """Per-condition accuracy and reaction-time summary with pairwise
    rank-sum tests on the concatenated binary correctness vectors."""
    by_cond: dict[str, list[ResponseRecord]] = {c: [] for c in CONDITIONS}
    for r in responses:
        if r.answered and r.condition in by_cond:
            by_cond[r.condition].append(r)
    summary: dict = {"conditions": {}, "pairwise": {}}
    correct_vecs = {}
    for cond, recs in by_cond.items():
        if not recs:
            continue
        correct = np.array([int(bool(r.correct)) for r in recs])
        rts = np.array([r.rt_ms for r in recs], dtype=float)
        correct_vecs[cond] = correct
        entry = {
            "n": len(recs),
            "accuracy": float(correct.mean()),
            "rt_mean": float(rts.mean()),
            "rt_median": float(np.median(rts)),
        }
        if design is not None:
            common = set(design.common)
            c_mask = np.array([r.face_id in common for r in recs])
            if c_mask.any():
                entry["accuracy_common"] = float(correct[c_mask].mean())
            if (~c_mask).any():
                entry["accuracy_unique"] = float(correct[~c_mask].mean())
        summary["conditions"][cond] = entry
    for a, b in combinations(sorted(correct_vecs), 2):
        stat, p = rank_sum_test(correct_vecs[a], correct_vecs[b])
        summary["pairwise"][f"{a}_vs_{b}"] = {"U": stat, "p": p}
    return summary

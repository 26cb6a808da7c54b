"""Two-stage asset retrieval scoring.

Stage one recalls the ``recall_k`` catalog entries most semantically
similar to the query; stage two re-ranks those survivors by a weighted
fusion of semantic, visual and size scores.  Embedding inference
happens out of process: records carry either raw vectors or
precomputed similarities, never model handles.

The size score compares aspect ratios, not absolute sizes: each dims
triple is normalized by its own largest entry, and the score decays
exponentially with the mean absolute difference of the normalized
triples.  Identical proportions at any scale give exactly 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "AssetRecord",
    "RankWeights",
    "RankedCandidate",
    "RankingError",
    "size_score",
    "final_score",
    "semantic_similarity",
    "visual_similarity",
    "rank",
]


class RankingError(ValueError):
    """Catalog or query data that cannot be scored."""


@dataclass(frozen=True)
class AssetRecord:
    """One catalog entry.

    Either ``semantic`` (an embedding vector) or ``s_sbert`` (a
    precomputed query similarity) must be present, and likewise either
    ``views`` (per-viewpoint visual similarities) or ``s_clip``.
    """

    id: str
    dims: tuple[float, float, float]
    description: str = ""
    semantic: tuple[float, ...] | None = None
    s_sbert: float | None = None
    views: tuple[float, ...] | None = None
    s_clip: float | None = None

    def __post_init__(self) -> None:
        if len(self.dims) != 3 or any(v <= 0 for v in self.dims):
            raise RankingError(f"asset {self.id!r}: dims must be three positive numbers")


@dataclass(frozen=True)
class RankWeights:
    """Fusion weights, size sensitivity and stage-one recall count."""

    w_semantic: float = 5.0
    w_visual: float = 85.0
    w_size: float = 10.0
    k: float = 10.0
    recall_k: int = 60

    def __post_init__(self) -> None:
        if min(self.w_semantic, self.w_visual, self.w_size, self.k) < 0:
            raise RankingError("weights and k must be non-negative")
        if self.recall_k < 1:
            raise RankingError("recall_k must be >= 1")


@dataclass(frozen=True)
class RankedCandidate:
    id: str
    s_sbert: float
    s_clip: float
    s_size: float
    score: float


def size_score(
    target_dims: tuple[float, float, float],
    asset_dims: tuple[float, float, float],
    k: float = 10.0,
) -> float:
    """Aspect-ratio similarity in (0, 1], scale-invariant in each argument."""
    if len(target_dims) != len(asset_dims):
        raise RankingError("dims triples must have equal length")
    if any(v <= 0 for v in target_dims) or any(v <= 0 for v in asset_dims):
        raise RankingError("dims must be positive")
    tm = max(target_dims)
    am = max(asset_dims)
    diff = 0.0
    for t, a in zip(target_dims, asset_dims):
        diff += abs(t / tm - a / am)
    return math.exp(-k * diff / len(target_dims))


def final_score(s_sbert: float, s_clip: float, s_size: float, weights: RankWeights) -> float:
    return weights.w_semantic * s_sbert + weights.w_visual * s_clip + weights.w_size * s_size


def semantic_similarity(query_vec: tuple[float, ...], asset: AssetRecord) -> float:
    """Stage-one similarity: precomputed if present, else mapped from L2.

    The distance-to-similarity map is 1 / (1 + d^2); any strictly
    decreasing map yields the same stage-one survivor set.
    """
    if asset.s_sbert is not None:
        return float(asset.s_sbert)
    if asset.semantic is None:
        raise RankingError(f"asset {asset.id!r} has neither a vector nor s_sbert")
    if query_vec is None:
        raise RankingError("query has no semantic vector but catalog needs one")
    if len(query_vec) != len(asset.semantic):
        raise RankingError(
            f"asset {asset.id!r}: vector length {len(asset.semantic)} != query {len(query_vec)}"
        )
    d2 = 0.0
    for q, a in zip(query_vec, asset.semantic):
        d2 += (q - a) * (q - a)
    return 1.0 / (1.0 + d2)


def visual_similarity(asset: AssetRecord) -> float:
    """Best per-view similarity, so orientation differences do not punish."""
    if asset.s_clip is not None:
        return float(asset.s_clip)
    if not asset.views:
        raise RankingError(f"asset {asset.id!r} has neither views nor s_clip")
    return float(max(asset.views))


def rank(
    target_dims: tuple[float, float, float],
    catalog: list[AssetRecord],
    weights: RankWeights | None = None,
    query_vec: tuple[float, ...] | None = None,
) -> list[RankedCandidate]:
    """Score a catalog against one query; ties break by ascending id.

    Returns every stage-one survivor (at most ``recall_k``) ordered by
    descending fused score.
    """
    if weights is None:
        weights = RankWeights()
    if not catalog:
        raise RankingError("catalog is empty")
    sems = [(semantic_similarity(query_vec, a), a) for a in catalog]
    sems.sort(key=lambda t: (-t[0], t[1].id))
    survivors = sems[: weights.recall_k]
    out = []
    for s_sem, a in survivors:
        s_vis = visual_similarity(a)
        s_sz = size_score(target_dims, a.dims, weights.k)
        out.append(
            RankedCandidate(
                id=a.id,
                s_sbert=s_sem,
                s_clip=s_vis,
                s_size=s_sz,
                score=final_score(s_sem, s_vis, s_sz, weights),
            )
        )
    out.sort(key=lambda c: (-c.score, c.id))
    return out


# Catalog / query serialization -------------------------------------------


def asset_from_dict(doc: dict) -> AssetRecord:
    try:
        dims = tuple(float(v) for v in doc["dims"])
        return AssetRecord(
            id=str(doc["id"]),
            dims=dims,  # type: ignore[arg-type]
            description=str(doc.get("description", "")),
            semantic=(
                tuple(float(v) for v in doc["semantic"]) if "semantic" in doc else None
            ),
            s_sbert=(float(doc["s_sbert"]) if "s_sbert" in doc else None),
            views=(tuple(float(v) for v in doc["views"]) if "views" in doc else None),
            s_clip=(float(doc["s_clip"]) if "s_clip" in doc else None),
        )
    except (KeyError, TypeError) as exc:
        raise RankingError(f"bad asset record: {exc}") from exc


def catalog_from_dict(doc: dict) -> list[AssetRecord]:
    if "assets" not in doc or not isinstance(doc["assets"], list):
        raise RankingError("catalog file needs an 'assets' list")
    records = [asset_from_dict(a) for a in doc["assets"]]
    seen: set[str] = set()
    for r in records:
        if r.id in seen:
            raise RankingError(f"duplicate asset id {r.id!r}")
        seen.add(r.id)
    return records

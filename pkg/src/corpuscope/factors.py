"""Exploratory factor analysis of the feature matrix.

Pipeline: z-score the per-sentence features (column-mean imputation),
correlate, extract factors by iterated principal axis, rotate with
varimax, then label factors by which feature group they load on. Scores
are Thurstone regression scores aggregated per document.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericError

# Feature groups the five factors are expected to load on; used only for
# naming fitted factors, never for fitting.
FACTOR_GROUPS = {
    "valence": ("aap_all", "aap_nouns", "aap_verbs", "ims_valence", "pnr"),
    "arousal": ("arousal", "anger", "disgust", "fear", "sadness"),
    "concreteness": ("concreteness", "imageability"),
    "word_complexity": ("word_length", "syllables", "odc", "sonority"),
    "sentence_complexity": ("sentence_length", "n_content_words", "phrase_density",
                            "ssi", "content_word_overlap", "sentence_similarity"),
}

NAMING_THRESHOLD = 0.5


def zscore(matrix: np.ndarray, names: tuple[str, ...] | None = None):
    """Standardize columns to mean 0 and sample sd 1.

    Missing cells are imputed with the column mean before scaling.
    Constant columns are dropped with a warning; a column with no
    observed value at all is an error.

    Returns (z, kept_names, means, sds, kept_index).
    """
    X = np.array(matrix, dtype=float)
    if X.ndim != 2:
        raise ValueError("expected a 2d matrix")
    n, p = X.shape
    if names is None:
        names = tuple(f"x{i}" for i in range(p))
    kept: list[int] = []
    means = []
    sds = []
    for j in range(p):
        col = X[:, j]
        observed = col[~np.isnan(col)]
        if observed.size == 0:
            raise ConfigError(f"column {names[j]!r} has no observed values")
        mean = float(np.mean(observed))
        col = np.where(np.isnan(col), mean, col)
        sd = float(np.std(col, ddof=1)) if n > 1 else 0.0
        if sd == 0.0:
            warnings.warn(f"dropping constant column {names[j]!r}")
            continue
        X[:, j] = (col - mean) / sd
        kept.append(j)
        means.append(mean)
        sds.append(sd)
    z = X[:, kept]
    kept_names = tuple(names[j] for j in kept)
    return z, kept_names, np.array(means), np.array(sds), kept


def _smc(corr: np.ndarray) -> np.ndarray:
    """Squared multiple correlations as initial communality estimates."""
    try:
        inv = np.linalg.inv(corr)
    except np.linalg.LinAlgError:
        inv = np.linalg.pinv(corr)
    diag = np.diag(inv)
    with np.errstate(divide="ignore", invalid="ignore"):
        smc = 1.0 - 1.0 / diag
    smc = np.where(np.isfinite(smc), smc, 0.0)
    return np.clip(smc, 0.0, 1.0)


def _orient_columns(loadings: np.ndarray) -> np.ndarray:
    """Sign vector flipping each column so its largest-|entry| is positive."""
    idx = np.argmax(np.abs(loadings), axis=0)
    signs = np.sign(loadings[idx, np.arange(loadings.shape[1])])
    signs[signs == 0] = 1.0
    return signs


def principal_axis(corr: np.ndarray, k: int, max_iter: int = 200,
                   tol: float = 1e-6):
    """Iterated principal-axis factoring of a correlation matrix.

    Communalities start at the squared multiple correlations, are placed
    on the diagonal, and are refined from the row sums of squared
    loadings of the top-k eigenpairs until they change by less than
    `tol`. Non-convergence keeps the best iterate and warns.

    Returns (loadings, communalities, converged).
    """
    R = np.asarray(corr, dtype=float)
    p = R.shape[0]
    if R.shape != (p, p):
        raise ValueError(f"correlation matrix must be square, got {R.shape}")
    if k < 1:
        raise ConfigError(f"factor count must be >= 1, got {k}")
    if k > p:
        raise ConfigError(f"cannot extract {k} factors from {p} features")
    R = (R + R.T) / 2.0
    communalities = _smc(R)
    loadings = np.zeros((p, k))
    converged = False
    for _ in range(max_iter):
        reduced = R.copy()
        np.fill_diagonal(reduced, communalities)
        eigvals, eigvecs = np.linalg.eigh(reduced)
        order = np.argsort(eigvals)[::-1][:k]
        vals = np.clip(eigvals[order], 0.0, None)
        loadings = eigvecs[:, order] * np.sqrt(vals)
        updated = np.clip(np.sum(loadings**2, axis=1), 0.0, 1.0)
        delta = float(np.max(np.abs(updated - communalities)))
        communalities = updated
        if delta < tol:
            converged = True
            break
    if not converged:
        warnings.warn(f"principal axis did not converge within {max_iter} iterations")
    loadings = loadings * _orient_columns(loadings)
    return loadings, communalities, converged


def varimax_criterion(loadings: np.ndarray, kaiser: bool = True) -> float:
    """Sum over factors of the variance of squared (row-normalized) loadings."""
    L = np.asarray(loadings, dtype=float)
    if kaiser:
        L = L / _kaiser_scale(L)[:, None]
    sq = L**2
    return float(np.sum(np.mean(sq**2, axis=0) - np.mean(sq, axis=0) ** 2))


def _kaiser_scale(loadings: np.ndarray) -> np.ndarray:
    h = np.sqrt(np.sum(loadings**2, axis=1))
    return np.where(h > 1e-12, h, 1.0)


def varimax(loadings: np.ndarray, tol: float = 1e-8, max_iter: int = 100,
            kaiser: bool = True):
    """Varimax rotation by pairwise planar rotations.

    Rows are Kaiser-normalized during rotation and rescaled afterwards.
    Sweeps over all factor pairs repeat until the criterion gain drops
    below `tol`.

    Returns (rotated_loadings, rotation) with rotated = loadings @ rotation.
    """
    L = np.array(loadings, dtype=float)
    if L.ndim != 2:
        raise ValueError("loadings must be a 2d matrix")
    p, k = L.shape
    rotation = np.eye(k)
    if k < 2:
        return L, rotation
    scale = _kaiser_scale(L) if kaiser else np.ones(p)
    Ln = L / scale[:, None]
    criterion = varimax_criterion(Ln, kaiser=False)
    for _ in range(max_iter):
        for i in range(k - 1):
            for j in range(i + 1, k):
                x = Ln[:, i]
                y = Ln[:, j]
                u = x * x - y * y
                v = 2.0 * x * y
                A = float(np.sum(u))
                B = float(np.sum(v))
                C = float(np.sum(u * u - v * v))
                D = float(np.sum(2.0 * u * v))
                num = D - 2.0 * A * B / p
                den = C - (A * A - B * B) / p
                angle = 0.25 * np.arctan2(num, den)
                if abs(angle) < 1e-14:
                    continue
                c = np.cos(angle)
                s = np.sin(angle)
                G = np.array([[c, -s], [s, c]])
                Ln[:, [i, j]] = Ln[:, [i, j]] @ G
                rotation[:, [i, j]] = rotation[:, [i, j]] @ G
        updated = varimax_criterion(Ln, kaiser=False)
        if updated - criterion < tol:
            break
        criterion = updated
    rotated = Ln * scale[:, None]
    return rotated, rotation


@dataclass(slots=True)
class FactorModel:
    feature_names: tuple[str, ...]
    factor_names: tuple[str, ...]
    loadings: np.ndarray
    communalities: np.ndarray
    rotation: np.ndarray
    explained_variance: dict
    means: np.ndarray
    sds: np.ndarray
    corr: np.ndarray
    converged: bool = True

    def to_json(self) -> dict:
        return {
            "feature_names": list(self.feature_names),
            "factor_names": list(self.factor_names),
            "loadings": self.loadings.tolist(),
            "communalities": self.communalities.tolist(),
            "rotation": self.rotation.tolist(),
            "explained_variance": self.explained_variance,
            "means": self.means.tolist(),
            "sds": self.sds.tolist(),
            "corr": self.corr.tolist(),
            "converged": self.converged,
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "FactorModel":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls(
            feature_names=tuple(raw["feature_names"]),
            factor_names=tuple(raw["factor_names"]),
            loadings=np.array(raw["loadings"], dtype=float),
            communalities=np.array(raw["communalities"], dtype=float),
            rotation=np.array(raw["rotation"], dtype=float),
            explained_variance=raw["explained_variance"],
            means=np.array(raw["means"], dtype=float),
            sds=np.array(raw["sds"], dtype=float),
            corr=np.array(raw["corr"], dtype=float),
            converged=bool(raw.get("converged", True)),
        )


@dataclass(slots=True)
class FactorScores:
    factor_names: tuple[str, ...]
    rows: list[tuple[str, int]]
    values: np.ndarray
    per_document: dict[str, np.ndarray] = field(default_factory=dict)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["doc_id", *self.factor_names])
            for doc_id, vector in self.per_document.items():
                writer.writerow([doc_id, *(repr(float(v)) for v in vector)])


def _name_factors(loadings: np.ndarray, feature_names: tuple[str, ...]) -> tuple[str, ...]:
    """Assign group names to factors by their strongest loading pattern.

    A factor earns a group name when some group feature loads above the
    threshold on it; groups are assigned greedily by mean |loading| so
    each name is used at most once.
    """
    k = loadings.shape[1]
    index = {name: i for i, name in enumerate(feature_names)}
    candidates = []
    for group, members in FACTOR_GROUPS.items():
        member_rows = [index[m] for m in members if m in index]
        if not member_rows:
            continue
        block = np.abs(loadings[member_rows, :])
        for j in range(k):
            if float(np.max(block[:, j])) >= NAMING_THRESHOLD:
                candidates.append((float(np.mean(block[:, j])), group, j))
    names: dict[int, str] = {}
    used: set[str] = set()
    for _, group, j in sorted(candidates, key=lambda c: -c[0]):
        if j in names or group in used:
            continue
        names[j] = group
        used.add(group)
    return tuple(names.get(j, f"factor_{j + 1}") for j in range(k))


def fit_factor_model(matrix, feature_names: tuple[str, ...] | None = None,
                     k: int = 5) -> FactorModel:
    """Fit the k-factor principal-axis + varimax model on sentence rows.

    `matrix` is a FeatureMatrix or a raw rows-by-features array with
    `feature_names`. Columns with no observed value are dropped up front;
    factors are ordered by explained variance and oriented so the largest
    loading per factor is positive.
    """
    if hasattr(matrix, "values") and hasattr(matrix, "names"):
        X = matrix.values
        feature_names = matrix.names
    else:
        X = np.asarray(matrix, dtype=float)
        if feature_names is None:
            feature_names = tuple(f"x{i}" for i in range(X.shape[1]))
    observed = ~np.all(np.isnan(X), axis=0)
    if not np.all(observed):
        dropped = [n for n, keep in zip(feature_names, observed) if not keep]
        warnings.warn(f"dropping feature(s) with no observed values: {', '.join(dropped)}")
        X = X[:, observed]
        feature_names = tuple(n for n, keep in zip(feature_names, observed) if keep)
    if X.shape[0] < 2 * k:
        warnings.warn(f"only {X.shape[0]} rows for {k} factors; estimates will be unstable")

    z, kept_names, means, sds, _ = zscore(X, feature_names)
    corr = np.corrcoef(z, rowvar=False)
    unrotated, communalities, converged = principal_axis(corr, k)
    rotated, rotation = varimax(unrotated)

    # Order factors by explained variance, then orient signs.
    ssq = np.sum(rotated**2, axis=0)
    order = np.argsort(-ssq)
    rotated = rotated[:, order]
    rotation = rotation[:, order]
    signs = _orient_columns(rotated)
    rotated = rotated * signs
    rotation = rotation * signs

    p = len(kept_names)
    factor_names = _name_factors(rotated, kept_names)
    explained = {
        "per_factor": {name: float(np.sum(rotated[:, j] ** 2) / p)
                       for j, name in enumerate(factor_names)},
        "total": float(np.sum(communalities) / p),
    }

    return FactorModel(
        feature_names=kept_names,
        factor_names=factor_names,
        loadings=rotated,
        communalities=communalities,
        rotation=rotation,
        explained_variance=explained,
        means=means,
        sds=sds,
        corr=corr,
        converged=converged,
    )


def factor_scores(model: FactorModel, matrix, rows=None) -> FactorScores:
    """Thurstone regression scores: z-features @ corr^-1 @ loadings.

    Accepts a FeatureMatrix (rows come along) or a raw array plus `rows`
    of (doc_id, sentence_index) labels. Missing cells score as the
    column mean (z = 0). Singular correlation falls back to a ridge
    inverse with a warning.
    """
    if hasattr(matrix, "values") and hasattr(matrix, "names"):
        X = matrix.values
        names = matrix.names
        rows = matrix.rows
    else:
        X = np.asarray(matrix, dtype=float)
        names = model.feature_names
        if rows is None:
            rows = [("all", i) for i in range(X.shape[0])]
    columns = []
    for name in model.feature_names:
        if name not in names:
            raise ConfigError(f"scoring data lacks fitted feature {name!r}")
        columns.append(list(names).index(name))
    X = X[:, columns]
    Z = (np.where(np.isnan(X), model.means, X) - model.means) / model.sds

    try:
        weights = np.linalg.solve(model.corr, model.loadings)
    except np.linalg.LinAlgError:
        warnings.warn("singular correlation matrix; using ridge-regularized inverse")
        ridge = model.corr + 1e-6 * np.eye(model.corr.shape[0])
        try:
            weights = np.linalg.solve(ridge, model.loadings)
        except np.linalg.LinAlgError as exc:
            raise NumericError("correlation matrix not invertible even with ridge") from exc
    values = Z @ weights

    per_document: dict[str, np.ndarray] = {}
    for doc_id in dict.fromkeys(r[0] for r in rows):
        mask = np.array([r[0] == doc_id for r in rows])
        per_document[doc_id] = values[mask].mean(axis=0)
    return FactorScores(factor_names=model.factor_names, rows=list(rows),
                        values=values, per_document=per_document)

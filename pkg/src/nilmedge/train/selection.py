"""Hyperparameter search, permutation importance, and the feature-count sweep.

The sweep walks the ranked feature vector one prefix at a time, re-tunes
each point (or reuses fixed hyperparameters in fast mode), evaluates it on
the held-out split, attaches the MCU cost report, and picks the smallest
feature count that stays within the accuracy drop tolerance while fitting
the hardware budget.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product

import numpy as np

from ..cost import CostProfile, CostReport, cost_report
from ..models.base import classify_matrix
from .dataset import Dataset
from .metrics import evaluate
from .trainers import MODEL_KINDS, train_model


def derive_seed(*parts: int) -> int:
    """Stable child seed from (master seed, coordinates); order-independent
    across parallel evaluation because every cell owns its stream."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])


# --- grid search -------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    knn_k: tuple[int, ...] = (1, 3, 5, 9)
    svm_c: tuple[float, ...] = (1.0, 10.0)
    svm_gamma: tuple[float, ...] = (0.01, 0.1)
    svm_kernel: tuple[str, ...] = ("rbf",)
    mlp_hidden: tuple[tuple[int, ...], ...] = ((800, 100),)
    mlp_lr: tuple[float, ...] = (0.05,)
    mlp_epochs: int = 200
    rf_trees: tuple[int, ...] = (100,)
    rf_depth: tuple[int | None, ...] = (None, 12)

    def __post_init__(self):
        for name in ("knn_k", "svm_c", "svm_gamma", "svm_kernel",
                     "mlp_hidden", "mlp_lr", "rf_trees", "rf_depth"):
            if not getattr(self, name):
                raise ValueError(f"grid axis {name} must be non-empty")
        if any(k < 1 for k in self.knn_k) or any(t < 1 for t in self.rf_trees):
            raise ValueError("grid values must be positive")
        if any(c <= 0 for c in self.svm_c) or any(g <= 0 for g in self.svm_gamma):
            raise ValueError("grid values must be positive")

    def cells(self, kind: str) -> list[dict]:
        if kind == "knn":
            return [{"k": k} for k in self.knn_k]
        if kind == "svm":
            return [
                {"c": c, "gamma": g, "kernel": kr}
                for c, g, kr in product(self.svm_c, self.svm_gamma, self.svm_kernel)
            ]
        if kind == "mlp":
            return [
                {"hidden": h, "lr": lr, "epochs": self.mlp_epochs}
                for h, lr in product(self.mlp_hidden, self.mlp_lr)
            ]
        if kind == "rf":
            return [
                {"n_trees": t, "max_depth": dep}
                for t, dep in product(self.rf_trees, self.rf_depth)
            ]
        raise ValueError(f"unknown model kind {kind!r} (expected one of {MODEL_KINDS})")


def _cell_size_hint(kind: str, params: dict, n_features: int, n_classes: int) -> float:
    """Approximate parameter count, used only to break exact accuracy ties."""
    if kind == "mlp":
        sizes = (n_features,) + tuple(params["hidden"]) + (n_classes,)
        return float(sum(a * b + b for a, b in zip(sizes, sizes[1:])))
    if kind == "rf":
        depth = params["max_depth"] if params["max_depth"] is not None else 64
        return float(params["n_trees"] * depth)
    return 0.0  # knn and svm cells do not change the stored parameter count


def _stratified_folds(y: np.ndarray, folds: int, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    assignment = np.zeros(y.size, dtype=np.int64)
    for c in np.unique(y):
        rows = rng.permutation(np.flatnonzero(y == c))
        assignment[rows] = np.arange(rows.size) % folds
    return [np.flatnonzero(assignment == f) for f in range(folds)]


@dataclass(frozen=True)
class GridSearchResult:
    kind: str
    best_params: dict
    best_accuracy: float
    table: tuple[dict, ...]  # one record per cell, in axis order

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "best_params": _jsonable(self.best_params),
            "best_accuracy": self.best_accuracy,
            "table": [_jsonable(rec) for rec in self.table],
        }


def grid_search(
    d: Dataset,
    kind: str,
    grid: GridSpec,
    folds: int = 5,
    seed: int = 0,
    selected_indices: tuple[int, ...] | None = None,
) -> GridSearchResult:
    """Stratified k-fold accuracy per grid cell; argmax with deterministic
    tie-breaks (fewest parameters, then first in axis order). Cells whose
    training raises are marked failed and excluded."""
    if folds < 2:
        raise ValueError("cross-validation needs at least 2 folds")
    cells = grid.cells(kind)
    fold_rows = _stratified_folds(d.y, folds, derive_seed(seed, 0xF01D))
    n_classes = len(d.class_names)

    table: list[dict] = []
    best = None  # (mean_acc, -size_hint) maximized, first-wins on ties
    for ci, params in enumerate(cells):
        accs: list[float] = []
        error = None
        for fi, rows in enumerate(fold_rows):
            mask = np.ones(d.n, dtype=bool)
            mask[rows] = False
            try:
                train_part = d.subset(np.flatnonzero(mask))
                model = train_model(kind, train_part, params,
                                    seed=derive_seed(seed, ci, fi),
                                    selected_indices=selected_indices)
            except Exception as exc:  # cell failure: record and exclude
                error = f"{type(exc).__name__}: {exc}"
                accs = []
                break
            pred = classify_matrix(model, d.x[rows])
            accs.append(float(np.mean(pred == d.y[rows])))
        record = {
            "params": params,
            "fold_accuracies": accs,
            "mean_accuracy": float(np.mean(accs)) if accs else None,
            "failed": error is not None,
            "error": error,
        }
        table.append(record)
        if error is None:
            size = _cell_size_hint(kind, params, d.n_features, n_classes)
            key = (record["mean_accuracy"], -size)
            if best is None or key > best[0]:
                best = (key, ci)
    if best is None:
        raise RuntimeError("every grid cell failed to train")
    best_ci = best[1]
    return GridSearchResult(
        kind=kind,
        best_params=cells[best_ci],
        best_accuracy=table[best_ci]["mean_accuracy"],
        table=tuple(table),
    )


# --- mean decrease accuracy ----------------------------------------------------

@dataclass(frozen=True)
class MdaReport:
    baseline_accuracy: float
    importances: tuple[float, ...]  # baseline minus mean shuffled accuracy
    ranking: tuple[int, ...]  # feature indices, most important first
    repetitions: int
    seed: int
    kind: str
    params: dict

    def __post_init__(self):
        if sorted(self.ranking) != list(range(len(self.importances))):
            raise ValueError("ranking must be a permutation of the feature indices")

    def to_json(self) -> str:
        return json.dumps(
            {
                "baseline_accuracy": self.baseline_accuracy,
                "importances": list(self.importances),
                "ranking": list(self.ranking),
                "repetitions": self.repetitions,
                "seed": self.seed,
                "kind": self.kind,
                "params": _jsonable(self.params),
            },
            sort_keys=True,
            indent=1,
        )

    @classmethod
    def from_json(cls, text: str) -> "MdaReport":
        doc = json.loads(text)
        return cls(
            baseline_accuracy=doc["baseline_accuracy"],
            importances=tuple(doc["importances"]),
            ranking=tuple(doc["ranking"]),
            repetitions=doc["repetitions"],
            seed=doc["seed"],
            kind=doc["kind"],
            params=doc["params"],
        )


def mda_rank(
    kind: str,
    params: dict,
    train: Dataset,
    test: Dataset,
    repetitions: int = 10,
    seed: int = 0,
) -> MdaReport:
    """Permutation importance on the test split.

    The model is trained exactly once on the full vector; each feature's
    test column is then shuffled `repetitions` times (fresh permutation per
    repetition) and the accuracy loss against the baseline is averaged.
    Ranking sorts by descending importance, lower index first on ties."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    model = train_model(kind, train, params, seed=derive_seed(seed, 0xBA5E))
    baseline = float(np.mean(classify_matrix(model, test.x) == test.y))
    n_features = train.n_features
    importances = np.zeros(n_features)
    for f in range(n_features):
        drop = 0.0
        for rep in range(repetitions):
            rng = np.random.default_rng([seed, f, rep])
            shuffled = test.x.copy()
            shuffled[:, f] = shuffled[rng.permutation(test.n), f]
            acc = float(np.mean(classify_matrix(model, shuffled) == test.y))
            drop += baseline - acc
        importances[f] = drop / repetitions
    order = np.lexsort((np.arange(n_features), -importances))
    return MdaReport(
        baseline_accuracy=baseline,
        importances=tuple(float(v) for v in importances),
        ranking=tuple(int(i) for i in order),
        repetitions=repetitions,
        seed=seed,
        kind=kind,
        params=params,
    )


# --- feature-count sweep -------------------------------------------------------

@dataclass(frozen=True)
class SweepPoint:
    m: int
    indices: tuple[int, ...]
    params: dict
    accuracy: float
    precision: float
    recall: float
    cost: CostReport

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "indices": list(self.indices),
            "params": _jsonable(self.params),
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "cost": self.cost.as_dict(),
        }


@dataclass(frozen=True)
class SweepReport:
    kind: str
    points: tuple[SweepPoint, ...]
    chosen_m: int
    feasible: bool  # chosen point fits the budget
    max_accuracy: float
    drop_tolerance: float
    overfitting_dip: bool
    seed: int

    @property
    def chosen(self) -> SweepPoint:
        return next(p for p in self.points if p.m == self.chosen_m)

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "points": [p.as_dict() for p in self.points],
                "chosen_m": self.chosen_m,
                "feasible": self.feasible,
                "max_accuracy": self.max_accuracy,
                "drop_tolerance": self.drop_tolerance,
                "overfitting_dip": self.overfitting_dip,
                "seed": self.seed,
            },
            sort_keys=True,
            indent=1,
        )

    def to_csv(self) -> str:
        """Per-point accuracy/MAC/flash curve data for external plotting."""
        lines = ["m,accuracy,precision,recall,mac,cycles,flash_bytes,sram_bytes,fits_budget"]
        for p in self.points:
            t = p.cost.total
            lines.append(
                f"{p.m},{p.accuracy!r},{p.precision!r},{p.recall!r},"
                f"{t.mac!r},{t.cycles!r},{t.flash_bytes!r},{t.sram_bytes!r},"
                f"{int(p.cost.verdict.fits)}"
            )
        return "\n".join(lines) + "\n"


def sweep_feature_count(
    train: Dataset,
    test: Dataset,
    kind: str,
    mda: MdaReport,
    profile: CostProfile,
    grid: GridSpec | None = None,
    fixed_params: dict | None = None,
    drop_tolerance: float = 0.05,
    feature_counts: list[int] | None = None,
    folds: int = 3,
    seed: int = 0,
) -> SweepReport:
    """Grow the feature set along the MDA ranking and score every prefix.

    Each point re-tunes hyperparameters with a grid search unless
    fixed_params short-circuits it (the fast mode). The chosen operating
    point is the smallest count whose accuracy is within drop_tolerance of
    the sweep maximum and whose cost report fits the profile; when no point
    fits, the best-effort point is reported with feasible=False."""
    if len(mda.ranking) != train.n_features:
        raise ValueError("the MDA ranking must cover every feature")
    if fixed_params is None and grid is None:
        raise ValueError("provide a grid to tune with, or fixed_params for fast mode")
    counts = list(feature_counts) if feature_counts else list(range(1, train.n_features + 1))
    if counts != sorted(set(counts)) or counts[0] < 1 or counts[-1] > train.n_features:
        raise ValueError("feature counts must be strictly increasing and within range")

    points: list[SweepPoint] = []
    for m in counts:
        indices = tuple(mda.ranking[:m])
        if fixed_params is not None:
            params = dict(fixed_params)
        else:
            params = grid_search(
                train, kind, grid, folds=folds,
                seed=derive_seed(seed, m, 0x9D1D),
                selected_indices=indices,
            ).best_params
        model = train_model(kind, train, params, seed=derive_seed(seed, m),
                            selected_indices=indices)
        metrics = evaluate(test.y, classify_matrix(model, test.x), len(test.class_names))
        points.append(
            SweepPoint(
                m=m,
                indices=indices,
                params=params,
                accuracy=metrics.accuracy,
                precision=metrics.precision_macro,
                recall=metrics.recall_macro,
                cost=cost_report(model, profile),
            )
        )

    max_accuracy = max(p.accuracy for p in points)
    in_tolerance = [p for p in points if p.accuracy >= max_accuracy - drop_tolerance]
    fitting = [p for p in in_tolerance if p.cost.verdict.fits]
    if fitting:
        chosen, feasible = fitting[0], True
    else:
        chosen, feasible = in_tolerance[0], False
    return SweepReport(
        kind=kind,
        points=tuple(points),
        chosen_m=chosen.m,
        feasible=feasible,
        max_accuracy=max_accuracy,
        drop_tolerance=drop_tolerance,
        overfitting_dip=points[-1].accuracy < max_accuracy - drop_tolerance,
        seed=seed,
    )


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj

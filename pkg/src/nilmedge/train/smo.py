"""SVM training via sequential minimal optimization, merged one-vs-one.

Each class pair gets a binary soft-margin problem solved by SMO with the
classic two-element working set: the outer loop alternates full sweeps with
sweeps over non-bound multipliers, the inner choice maximizes |E1 - E2|
with deterministic fallback scans (no random restarts, so training is a
pure function of the data order). KKT violations are tested at tolerance
1e-3. Pairs that hit the iteration cap are recorded in the model metadata
as capped rather than raising.

The per-pair solutions are merged into the shared support-vector layout of
`SvmModel`: a point enters the SV set if any of its pair machines keeps a
non-zero multiplier, and its signed alpha lands in the dual-coefficient row
of the opposing class.
"""

from __future__ import annotations

import numpy as np

from ..models.base import Scaler
from ..models.svm import SvmModel, kernel_matrix, pair_order
from .dataset import Dataset

KKT_TOL = 1e-3
STEP_EPS = 1e-12
SV_EPS = 1e-8
MAX_SWEEPS = 200


def smo_binary(k: np.ndarray, y: np.ndarray, c: float,
               tol: float = KKT_TOL, max_sweeps: int = MAX_SWEEPS):
    """Solve one binary problem; returns (alpha, b, converged).

    k is the precomputed kernel matrix, y the +-1 labels. The decision is
    f(x) = sum_j alpha_j y_j K(x_j, x) + b.
    """
    n = y.size
    alpha = np.zeros(n)
    b = 0.0
    errors = -y.astype(np.float64)  # f(x) - y with all-zero alphas

    def take_step(i1: int, i2: int) -> bool:
        nonlocal b, errors
        if i1 == i2:
            return False
        a1_old, a2_old = alpha[i1], alpha[i2]
        y1, y2 = y[i1], y[i2]
        e1, e2 = errors[i1], errors[i2]
        s = y1 * y2
        if s > 0:
            lo, hi = max(0.0, a1_old + a2_old - c), min(c, a1_old + a2_old)
        else:
            lo, hi = max(0.0, a2_old - a1_old), min(c, c + a2_old - a1_old)
        if hi - lo < STEP_EPS:
            return False
        eta = k[i1, i1] + k[i2, i2] - 2.0 * k[i1, i2]
        if eta > STEP_EPS:
            a2 = a2_old + y2 * (e1 - e2) / eta
            a2 = min(max(a2, lo), hi)
        else:
            # flat or concave direction: evaluate the objective at both ends
            f1 = y1 * (e1 + b) - a1_old * k[i1, i1] - s * a2_old * k[i1, i2]
            f2 = y2 * (e2 + b) - s * a1_old * k[i1, i2] - a2_old * k[i2, i2]
            l1 = a1_old + s * (a2_old - lo)
            h1 = a1_old + s * (a2_old - hi)
            obj_lo = (l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k[i1, i1]
                      + 0.5 * lo * lo * k[i2, i2] + s * lo * l1 * k[i1, i2])
            obj_hi = (h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k[i1, i1]
                      + 0.5 * hi * hi * k[i2, i2] + s * hi * h1 * k[i1, i2])
            if obj_lo < obj_hi - STEP_EPS:
                a2 = lo
            elif obj_lo > obj_hi + STEP_EPS:
                a2 = hi
            else:
                return False
        if abs(a2 - a2_old) < STEP_EPS * (a2 + a2_old + STEP_EPS):
            return False
        a1 = a1_old + s * (a2_old - a2)

        b1 = e1 + y1 * (a1 - a1_old) * k[i1, i1] + y2 * (a2 - a2_old) * k[i1, i2] + b
        b2 = e2 + y1 * (a1 - a1_old) * k[i1, i2] + y2 * (a2 - a2_old) * k[i2, i2] + b
        if 0 < a1 < c:
            b_new = b1
        elif 0 < a2 < c:
            b_new = b2
        else:
            b_new = (b1 + b2) / 2.0

        errors += (y1 * (a1 - a1_old) * k[i1] + y2 * (a2 - a2_old) * k[i2]) - (b_new - b)
        alpha[i1], alpha[i2] = a1, a2
        b = b_new
        return True

    def examine(i2: int) -> bool:
        r2 = errors[i2] * y[i2]
        if not ((r2 < -tol and alpha[i2] < c) or (r2 > tol and alpha[i2] > 0)):
            return False
        non_bound = np.flatnonzero((alpha > 0) & (alpha < c))
        if non_bound.size > 1:
            gaps = np.abs(errors[non_bound] - errors[i2])
            if take_step(int(non_bound[np.argmax(gaps)]), i2):
                return True
        for i1 in non_bound:
            if take_step(int(i1), i2):
                return True
        for i1 in range(n):
            if take_step(i1, i2):
                return True
        return False

    examine_all = True
    converged = False
    for _ in range(max_sweeps):
        changed = 0
        if examine_all:
            targets = range(n)
        else:
            targets = np.flatnonzero((alpha > 0) & (alpha < c))
        for i2 in targets:
            changed += examine(int(i2))
        if examine_all:
            if changed == 0:
                converged = True
                break
            examine_all = False
        elif changed == 0:
            examine_all = True
    return alpha, -b, converged


def train_svm(
    d: Dataset,
    c: float = 1.0,
    gamma: float | None = None,
    kernel: str = "rbf",
    selected_indices: tuple[int, ...] | None = None,
) -> SvmModel:
    """Fit all class pairs and merge them into the shared-SV layout.

    gamma=None uses 1/n_features on the standardized inputs.
    """
    if c <= 0:
        raise ValueError("regularization parameter c must be positive")
    if selected_indices is None:
        selected_indices = tuple(range(d.n_features))
    x_raw = d.x[:, np.array(selected_indices, dtype=np.intp)]
    scaler = Scaler.fit(x_raw)
    x = scaler.transform(x_raw)
    y = d.y
    n_classes = len(d.class_names)
    if gamma is None:
        gamma = 1.0 / x.shape[1]
    if kernel == "rbf" and gamma <= 0:
        raise ValueError("rbf gamma must be positive")

    class_rows = [np.flatnonzero(y == cls) for cls in range(n_classes)]
    pairs = pair_order(n_classes)
    # alpha_by_pair[p] maps original row -> multiplier for that pair machine
    pair_alphas: list[dict[int, float]] = []
    intercepts = np.zeros(len(pairs))
    capped_pairs: list[str] = []

    for p, (a_cls, b_cls) in enumerate(pairs):
        rows = np.concatenate([class_rows[a_cls], class_rows[b_cls]])
        rows.sort()  # keep the dataset's own order deterministic
        labels = np.where(y[rows] == a_cls, 1.0, -1.0)
        k = kernel_matrix(kernel, gamma, x[rows], x[rows])
        alpha, b, converged = smo_binary(k, labels, c)
        if not converged:
            capped_pairs.append(f"{a_cls}-{b_cls}")
        intercepts[p] = b
        pair_alphas.append(
            {int(r): float(al) for r, al in zip(rows, alpha) if al > SV_EPS}
        )

    # union of SVs, grouped by class in class-id order
    sv_rows: list[int] = []
    sv_counts = np.zeros(n_classes, dtype=np.int64)
    for cls in range(n_classes):
        members = [int(r) for r in class_rows[cls]
                   if any(r in pa for pa in pair_alphas)]
        sv_rows.extend(members)
        sv_counts[cls] = len(members)
    col_of = {r: j for j, r in enumerate(sv_rows)}

    dual = np.zeros((max(n_classes - 1, 1), len(sv_rows)))
    for p, (a_cls, b_cls) in enumerate(pairs):
        for r, al in pair_alphas[p].items():
            cls = int(y[r])
            signed = al if cls == a_cls else -al
            other = b_cls if cls == a_cls else a_cls
            row = other if other < cls else other - 1
            dual[row, col_of[r]] = signed

    metadata = {"c": c, "gamma": gamma}
    if capped_pairs:
        metadata["capped_pairs"] = capped_pairs

    return SvmModel(
        class_names=d.class_names,
        layout=d.layout,
        selected_indices=tuple(selected_indices),
        scaler=scaler,
        metadata=metadata,
        kernel=kernel,
        gamma=float(gamma),
        support=x[np.array(sv_rows, dtype=np.intp)],
        sv_counts=sv_counts,
        dual_coef=dual,
        intercepts=intercepts,
    )

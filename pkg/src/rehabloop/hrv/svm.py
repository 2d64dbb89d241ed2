"""RBF-kernel SVM: inference, a small deterministic SMO trainer, and the
model file format.

The trainer is simplified sequential minimal optimization with a
deterministic second-multiplier choice, which is plenty for the few
hundred training windows a stress model sees here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import InputError, SpecificationError
from .features import N_FEATURES

MODEL_FORMAT_VERSION = 1
KKT_TOL = 1e-3


@dataclass(frozen=True)
class SvmModel:
    gamma: float
    bias: float
    support_vectors: np.ndarray  # (n_sv, n_features)
    dual_coefficients: np.ndarray  # alpha_i * y_i, (n_sv,)
    n_features: int = N_FEATURES

    def __post_init__(self) -> None:
        if not self.gamma > 0:
            raise SpecificationError("gamma must be > 0")
        if len(self.support_vectors) != len(self.dual_coefficients):
            raise SpecificationError("support vector / coefficient length mismatch")
        if len(self.support_vectors) < 1:
            raise SpecificationError("need at least one support vector")
        if self.support_vectors.shape[1] != self.n_features:
            raise SpecificationError(
                f"support vectors must be {self.n_features}-dimensional"
            )
        if not (
            np.all(np.isfinite(self.support_vectors))
            and np.all(np.isfinite(self.dual_coefficients))
            and np.isfinite(self.bias)
        ):
            raise SpecificationError("model parameters must be finite")


def svm_predict(model: SvmModel, x: np.ndarray) -> tuple[float, bool]:
    """Decision score and the stressed verdict (score > 0)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.n_features,):
        raise InputError(f"expected {model.n_features}-d input, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InputError("input must be finite")
    d = model.support_vectors - x
    k = np.exp(-model.gamma * np.sum(d * d, axis=1))
    score = float(np.dot(model.dual_coefficients, k) + model.bias)
    return score, score > 0


def svm_train(
    X: np.ndarray,
    y: np.ndarray,
    gamma: float = 0.5,
    C: float = 10.0,
    tol: float = KKT_TOL,
    max_sweeps: int = 200,
) -> SvmModel:
    """Soft-margin dual via simplified SMO; labels must be +-1 (or 0/1)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    y = np.where(y > 0, 1.0, -1.0)
    n = len(X)
    if n < 2 or len(set(y.tolist())) < 2:
        raise InputError("need >= 2 examples with both classes present")

    d2 = np.sum((X[:, None, :] - X[None, :, :]) ** 2, axis=2)
    K = np.exp(-gamma * d2)

    alpha = np.zeros(n)
    b = 0.0

    def f(i: int) -> float:
        return float(np.dot(alpha * y, K[:, i]) + b)

    quiet_sweeps = 0
    sweeps = 0
    while quiet_sweeps < 2 and sweeps < max_sweeps:
        changed = 0
        errors = K @ (alpha * y) + b - y
        for i in range(n):
            Ei = f(i) - y[i]
            if not (
                (y[i] * Ei < -tol and alpha[i] < C)
                or (y[i] * Ei > tol and alpha[i] > 0)
            ):
                continue
            # Deterministic heuristic: maximize |Ei - Ej|.
            j = int(np.argmax(np.abs(Ei - errors)))
            if j == i:
                j = (i + 1) % n
            Ej = f(j) - y[j]
            ai_old, aj_old = alpha[i], alpha[j]
            if y[i] != y[j]:
                lo = max(0.0, aj_old - ai_old)
                hi = min(C, C + aj_old - ai_old)
            else:
                lo = max(0.0, ai_old + aj_old - C)
                hi = min(C, ai_old + aj_old)
            if lo >= hi:
                continue
            eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
            if eta >= 0:
                continue
            aj = aj_old - y[j] * (Ei - Ej) / eta
            aj = min(hi, max(lo, aj))
            if abs(aj - aj_old) < 1e-7:
                continue
            ai = ai_old + y[i] * y[j] * (aj_old - aj)
            alpha[i], alpha[j] = ai, aj
            b1 = b - Ei - y[i] * (ai - ai_old) * K[i, i] - y[j] * (aj - aj_old) * K[i, j]
            b2 = b - Ej - y[i] * (ai - ai_old) * K[i, j] - y[j] * (aj - aj_old) * K[j, j]
            if 0 < ai < C:
                b = b1
            elif 0 < aj < C:
                b = b2
            else:
                b = 0.5 * (b1 + b2)
            changed += 1
        sweeps += 1
        quiet_sweeps = quiet_sweeps + 1 if changed == 0 else 0

    sv_mask = alpha > 1e-8
    if not sv_mask.any():
        # Degenerate but legal outcome; keep the most central example.
        sv_mask[0] = True
    return SvmModel(
        gamma=gamma,
        bias=b,
        support_vectors=X[sv_mask].copy(),
        dual_coefficients=(alpha * y)[sv_mask].copy(),
        n_features=X.shape[1],
    )


def save_model(model: SvmModel, path: str | Path) -> None:
    doc = {
        "version": MODEL_FORMAT_VERSION,
        "gamma": model.gamma,
        "bias": model.bias,
        "n_features": model.n_features,
        "support_vectors": model.support_vectors.tolist(),
        "dual_coefficients": model.dual_coefficients.tolist(),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_model(path: str | Path) -> SvmModel:
    doc = json.loads(Path(path).read_text())
    if doc.get("version") != MODEL_FORMAT_VERSION:
        raise InputError(f"unsupported model version {doc.get('version')!r}")
    return SvmModel(
        gamma=float(doc["gamma"]),
        bias=float(doc["bias"]),
        support_vectors=np.asarray(doc["support_vectors"], dtype=float),
        dual_coefficients=np.asarray(doc["dual_coefficients"], dtype=float),
        n_features=int(doc["n_features"]),
    )

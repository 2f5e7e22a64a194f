import json
import logging
import os
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

STAGES = ["filament", "anchor", "coefficients", "frames", "curve"]


class PipelineError(Exception):
    """A polygon-pipeline stage failed; `stage` names it."""

    def __init__(self, stage, message):
        if stage not in STAGES:
            raise ValueError(f"Unknown pipeline stage '{stage}'. Available stages: {STAGES}")
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass
class PolygonRun:
    """
    One evolution of a polygonal line from its anchor time.

    Attributes:
        spec (PolygonSpec): Initial polygon
        t0 (float): Anchor time
        T (float): Horizon
        coefficients (CoeffTrajectory): A_k at the saved times
        curve (CurveTrajectory): Curve states at the saved times
        metadata (dict): Every grid, tolerance and flag of the run
    """

    spec: object
    t0: float
    T: float
    coefficients: object
    curve: object
    metadata: dict = field(default_factory=dict)
    residual: object = None

    def __post_init__(self):
        if not 0 < self.t0 < self.T:
            raise ValueError(f"Need 0 < t0 < T, got t0={self.t0}, T={self.T}")

    @property
    def times(self):
        return self.curve.times

    @property
    def x(self):
        return self.curve.x

    def state_index(self, t):
        """Index of the saved time nearest t."""
        return int(np.argmin(np.abs(self.times - t)))

    def save(self, folder):
        """
        Write the coefficient and curve dumps plus a JSON ledger.

        Returns:
            list: Written paths
        """
        os.makedirs(folder, exist_ok=True)
        paths = list(self.coefficients.save(os.path.join(folder, "coefficients.csv")))
        paths.append(self.curve.save(os.path.join(folder, "curve.csv")))
        ledger = os.path.join(folder, "run.json")
        with open(ledger, "w", encoding="utf-8") as f:
            json.dump(self.metadata, f, indent=2, default=float)
        paths.append(ledger)
        logger.info(f"💾 Saved polygon run: {folder}")
        return paths


@dataclass
class TraceConvergence:
    """
    Fitted |chi(t, x) - chi_0(x)| = C * t^exponent per sampled x.

    `rate_free_exponent` comes from successive dyadic differences of chi and
    does not depend on the extrapolated chi_0.
    """

    x: np.ndarray
    exponent: np.ndarray
    constant: np.ndarray
    max_deviation: np.ndarray
    rate_free_exponent: np.ndarray

    def to_frame(self):
        return pd.DataFrame({
            "x": self.x,
            "exponent": self.exponent,
            "constant": self.constant,
            "max_deviation": self.max_deviation,
            "rate_free_exponent": self.rate_free_exponent,
        })


@dataclass
class CornerTrajectory:
    """
    Rescaled corner path against the Riemann-function reference.

    `rescaled` is n*(chi_n(t, x0) - chi_n(t0, x0)); `reference` is the
    Riemann path after the fitted global rotation. Both share `times`.
    """

    n: int
    nu: float
    theta: float
    x0: float
    times: np.ndarray
    path: np.ndarray
    rescaled: np.ndarray
    reference: np.ndarray
    rotation: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def deviation(self):
        return np.linalg.norm(self.rescaled - self.reference, axis=1)

    @property
    def sup_deviation(self):
        return float(self.deviation.max())

    def to_frame(self):
        data = {"t": self.times}
        for name, values in (("path", self.path), ("rescaled", self.rescaled), ("reference", self.reference)):
            for i in range(3):
                data[f"{name}{i + 1}"] = values[:, i]
        data["deviation"] = self.deviation
        return pd.DataFrame(data)


@dataclass
class FourierGrowth:
    """Windowed sup of |w_hat| near xi = 1/t, with the fit against log(1/t)."""

    times: np.ndarray
    sup_values: np.ndarray
    second_sup_values: np.ndarray
    outside_values: np.ndarray
    slope: float
    intercept: float
    r_squared: float
    windows: tuple
    flags: dict = field(default_factory=dict)

    @property
    def window_sensitivity(self):
        return float(np.max(np.abs(self.second_sup_values - self.sup_values) / self.sup_values))

    def to_frame(self):
        return pd.DataFrame({
            "t": self.times,
            "log_inverse_t": np.log(1.0 / self.times),
            "sup_window": self.sup_values,
            "sup_second_window": self.second_sup_values,
            "outside_max": self.outside_values,
        })

    def metadata(self):
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "windows": list(self.windows),
            "window_sensitivity": self.window_sensitivity,
            "flags": dict(self.flags),
        }


@dataclass
class EnergyDensity:
    """
    Band means (1/2pi) int_{2pi n}^{2pi(n+1)} |w_hat|^2 at one time.

    `closed_form` is 4*sum(1 - exp(-pi*a_k^2)), the t = 0 value, and `upper`
    is 4*pi*sum(a_k^2), the value at positive times.
    """

    t: float
    bands: np.ndarray
    values: np.ndarray
    closed_form: float
    upper: float
    flags: dict = field(default_factory=dict)

    @property
    def plateau(self):
        return float(np.median(self.values))

    @property
    def spread(self):
        plateau = self.plateau
        if plateau == 0:
            return 0.0
        return float((self.values.max() - self.values.min()) / plateau)

    def to_frame(self):
        return pd.DataFrame({"band": self.bands, "value": self.values})

    def metadata(self):
        return {
            "t": self.t,
            "plateau": self.plateau,
            "spread": self.spread,
            "closed_form": self.closed_form,
            "upper": self.upper,
            "flags": dict(self.flags),
        }


@dataclass
class ReversalCheck:
    """Fit of chi(t, x) by P*chi_reversed(t, -x) + c over every saved time."""

    P: np.ndarray
    translation: np.ndarray
    residual: float

    @property
    def det(self):
        return float(np.linalg.det(self.P))

    def metadata(self):
        return {"det": self.det, "residual": self.residual, "translation": self.translation.tolist()}


@dataclass
class AnchorSweep:
    """One scalar result per anchor time."""

    t0_values: np.ndarray
    values: np.ndarray

    @property
    def relative_spread(self):
        reference = float(np.median(np.abs(self.values)))
        if reference == 0:
            return 0.0
        return float((self.values.max() - self.values.min()) / reference)

    def to_frame(self):
        return pd.DataFrame({"t0": self.t0_values, "value": self.values})

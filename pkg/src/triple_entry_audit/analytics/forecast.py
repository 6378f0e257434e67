"""
Trend forecasting with a closed-form least-squares line.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..errors import EmptyInput, TripleEntryError
from ..ledger import TripleEntryRecord
from ..feature_engineering import records_to_frame

logger = logging.getLogger(__name__)


class DegenerateTimeAxis(TripleEntryError):
    """Raised when a series has fewer than two distinct time points."""

    pass


@dataclass(frozen=True)
class Forecast:
    horizon: float
    prediction: float
    slope: float
    intercept: float

    def to_dict(self) -> Dict[str, float]:
        return {
            "horizon": self.horizon,
            "intercept": self.intercept,
            "prediction": self.prediction,
            "slope": self.slope,
        }


def linear_forecast(series: Sequence[Tuple[float, float]], horizon: float) -> Forecast:
    """
    Fit value = slope * t + intercept and evaluate it at ``horizon``.

    Raises:
        DegenerateTimeAxis: If fewer than two distinct t values are given.
    """
    points = np.asarray(series, dtype=np.float64).reshape(-1, 2)
    t, v = points[:, 0], points[:, 1]
    if len(np.unique(t)) < 2:
        raise DegenerateTimeAxis("forecast needs at least two distinct time points")

    t_mean, v_mean = t.mean(), v.mean()
    slope = float(np.sum((t - t_mean) * (v - v_mean)) / np.sum((t - t_mean) ** 2))
    intercept = float(v_mean - slope * t_mean)
    return Forecast(
        horizon=float(horizon),
        prediction=slope * float(horizon) + intercept,
        slope=slope,
        intercept=intercept,
    )


def daily_series(
    records: Iterable[TripleEntryRecord], currency: Optional[str] = None
) -> List[Tuple[float, float]]:
    """
    Total record amount per calendar day (UTC) as (day index, minor units).

    Day 0 is the earliest day with activity; days without records are
    omitted rather than zero-filled.

    Raises:
        EmptyInput: If no record matches.
    """
    frame = records_to_frame(records)
    if currency is not None:
        frame = frame[frame["currency"] == currency]
    if frame.empty:
        raise EmptyInput("no records to build a daily series from")

    days = pd.to_datetime(frame["occurred_at"], utc=True).dt.floor("D")
    totals = frame.groupby(days)["amount"].sum().sort_index()
    origin = totals.index[0]
    series = [
        (float((day - origin).days), float(total)) for day, total in totals.items()
    ]
    logger.info(f"Built daily series with {len(series)} points")
    return series

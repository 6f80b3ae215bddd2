"""Difference-equation models built around a feedforward network.

A model relates the current output to lagged outputs and lagged inputs
through the network. Two evaluation modes exist:

* series-parallel: one-step-ahead predictions from *measured* lagged
  outputs (NARX style);
* parallel: free-run simulation where the model's own predictions are fed
  back (NOE style), with residual Jacobians obtained by propagating the
  per-step derivatives through the feedback loop.

Indexing note: arrays are 0-based; with orders ``(ny, nu, tau_d)`` the first
sample whose regressor is fully inside the record is ``k = max(ny, nu)``,
called the startup window below.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .net import (
    DynamicNetAlias := None,  # placeholder removed below
)

"""scikit-learn style wrapper around :func:`harness.scan_threshold`."""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .graphs import Model
from .harness import scan_threshold


class RainbowThresholdScan(BaseEstimator):
    """Empirical rainbow connectivity threshold for one ``(n, c, model)``.

    ``fit`` ignores ``X`` and ``y``; the data are the seeded random graphs.
    After fitting, ``curve_`` maps ``s`` to its success fraction and
    ``s_star_`` is the first ``s`` where that fraction reaches one half.

    >>> est = RainbowThresholdScan(n=40, c=2.0, trials_per_s=4, s_range=(3, 4))
    >>> sorted(est.fit().curve_)
    [3, 4]
    """

    def __init__(
        self,
        n=1000,
        c=2.0,
        model="family",
        trials_per_s=50,
        s_range=None,
        master_seed=0,
        p=None,
        workers=1,
    ):
        self.n = n
        self.c = c
        self.model = model
        self.trials_per_s = trials_per_s
        self.s_range = s_range
        self.master_seed = master_seed
        self.p = p
        self.workers = workers

    def fit(self, X=None, y=None):
        est = scan_threshold(
            self.n,
            self.c,
            Model(self.model),
            self.trials_per_s,
            self.master_seed,
            self.s_range,
            p=self.p,
            workers=self.workers,
        )
        self.estimate_ = est
        self.curve_ = {s: pt.fraction for s, pt in est.curve.items()}
        self.s_star_ = est.s_star
        self.records_ = list(est.records)
        return self

    def predict_proba(self, s):
        """Observed success fraction at each requested ``s``."""
        check_is_fitted(self, "curve_")
        values = np.atleast_1d(np.asarray(s))
        missing = [int(v) for v in values if int(v) not in self.curve_]
        if missing:
            raise ValueError(f"s values {missing} were not scanned")
        return np.array([self.curve_[int(v)] for v in values])

    def predict(self, s):
        """True where the observed success fraction is at least one half."""
        return self.predict_proba(s) >= 0.5


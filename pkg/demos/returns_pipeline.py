"""Preprocessing a price panel and comparing the two graph estimators.

Synthetic prices follow a one-factor model with heavy-tailed shocks. The
returns are log-differenced, clipped at three mean absolute deviations,
and standardized, then fed to the nonparanormal and the forest estimator.
"""

import numpy as np

from npgraph.dataset import Dataset
from npgraph.forest import fit_forest
from npgraph.glasso import glasso_fit, graph_from_precision
from npgraph.graphs import graph_diff
from npgraph.ingest import log_returns, standardize, winsorize_mad
from npgraph.marginals import fit_transform, transformed_covariance
from npgraph.numerics import make_rng

rng = make_rng(2026)
n, d = 1000, 8
loadings = np.array([0.9, 0.8, 0.7, 0.6, 0.0, 0.0, 0.5, 0.0])
market = rng.standard_t(4, size=n) * 0.01
shocks = rng.standard_t(3, size=(n, d)) * 0.01
prices = 100 * np.exp(np.cumsum(market[:, None] * loadings + shocks, axis=0))
panel = Dataset.from_array(prices, [f"S{j}" for j in range(d)])

returns = standardize(winsorize_mad(log_returns(panel)))
print(f"{returns.n} returns per series; constant columns: "
      f"{returns.meta['winsorize_constant_columns']}")

x = returns.values
npn = graph_from_precision(glasso_fit(transformed_covariance(fit_transform(x), x), 0.12),
                           labels=returns.names)
forest = fit_forest(returns, seed=0).forest
sym, common = graph_diff(npn, forest)
print("nonparanormal edges:", npn.n_edges, "forest edges:", forest.n_edges)
print("common edges:", [(npn.labels[i], npn.labels[j]) for i, j in common.edges])
print("symmetric difference:", sym.n_edges)

"""shrinklab: shrinkage priors, concentration bounds, and posterior contraction.

Desk-scale numerical laboratory for sparse linear regression y = X beta0 + eps
with known noise variance: prior families with exact densities and schedules,
prior-concentration lower bounds with negative-log diagnostics, the consistent
OLS-ball test with exponential error bounds, adaptive Metropolis posterior
samplers validated against conjugate/quadrature oracles, and reproducible
experiment sweeps.
"""

__version__ = "0.1.0"

"""ArchetypeLab: query-efficient latent type recovery and prior-robust mechanisms.

This package provides:
- Leverage scores, Lewis weights and sigma_min,p of archetype matrices
- Sketched ℓp regression and the latent-type query protocol
- Discrete latent priors, grid rounding, oracles and Prokhorov distances
- The round-down, TV-robust and round-up mechanism stages with exact audits
- Scenario configuration, experiment pipeline and command-line entry point
"""

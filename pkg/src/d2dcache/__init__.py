"""Coverage, caching, and throughput analysis for finite D2D networks.

Devices are dropped uniformly in a disk around the receiver; the library
computes exact and closed-form-bounded coverage probabilities per serving
rank, total hit probability under Zipf demand, capacity-constrained optimal
placement, and throughput, with a seeded Monte Carlo simulator as the
ground-truth companion for every analytic quantity.
"""

from .caching import (CachePolicy, ContentLibrary, hit_probability,
                      optimize_placement, throughput, zipf_pmf)
from .coverage import (CoverageTable, coverage_probability, coverage_table,
                       coverage_upper_bound)
from .geometry import (NetworkConfig, distance_cdf, distance_pdf,
                       inner_conditional_pdf, outer_conditional_pdf,
                       sample_inner, sample_outer, serving_distance_pdf)
from .interference import (MixtureWeights, laplace_interference,
                           laplace_mc_oracle, mixture_weights,
                           mixture_weights_exact)
from .montecarlo import (SimulationReport, sample_disk_point,
                         simulate_coverage, simulate_hit)
from .specfun import hyp2f1_caching, interference_factor

__version__ = "0.1.0"

__all__ = [
    "CachePolicy", "ContentLibrary", "CoverageTable", "MixtureWeights",
    "NetworkConfig", "SimulationReport", "coverage_probability",
    "coverage_table", "coverage_upper_bound", "distance_cdf", "distance_pdf",
    "hit_probability", "hyp2f1_caching", "inner_conditional_pdf",
    "interference_factor", "laplace_interference", "laplace_mc_oracle",
    "mixture_weights", "mixture_weights_exact", "optimize_placement",
    "outer_conditional_pdf", "sample_disk_point", "sample_inner",
    "sample_outer", "serving_distance_pdf", "simulate_coverage",
    "simulate_hit", "throughput", "zipf_pmf", "__version__",
]

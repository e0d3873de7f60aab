"""Workbench for random classifiable-algebra invariants and spectral distances.

Subpackage map:

* ``intlinalg`` -- exact Smith normal form, kernels, cokernels over Z;
* ``ktheory``   -- the constrained six-term exact-sequence solver and the
  shift-algebra / dimension-drop computations built on it;
* ``walk``      -- the reflecting/absorbing random walk on the half-line
  with exact first-step-analysis oracles;
* ``simplex``   -- random collapse towers of finite-dimensional simplices,
  the three collapse measures, pushdown and covering-radius diagnostics;
* ``sampler``   -- algebra descriptors sampled from walk + tower, with
  reproducible Monte-Carlo estimators;
* ``transport`` -- bottleneck matching, unitary-orbit distance and the
  infinity-Wasserstein distance on discrete spectral measures;
* ``cuntz``     -- extended-natural step functions, NCCW pullback elements
  and the K1-triviality criterion;
* ``cli``       -- the batch front end (subcommands walk, sample, simplex,
  weyl, cuntz, ktheory, summary).
"""

from . import cuntz, intlinalg, ktheory, rng, sampler, simplex, transport, walk

__all__ = [
    "cli",  # imported on demand; also the `cstarlab` console entry point
    "cuntz",
    "intlinalg",
    "ktheory",
    "rng",
    "sampler",
    "simplex",
    "transport",
    "walk",
]

__version__ = "0.1.0"

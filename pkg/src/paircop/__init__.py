"""paircop: pair copula constructions with numerically extracted
conditional copulas.

The package evaluates bivariate copula families (cdf, density,
h-functions and their inverses, Kendall's tau), Archimedean generators
with the conditional-generator construction, elliptical generators with
the closed-form Student-t conditional copula and scale-mixture
diagnostics, C-vine pair copula constructions (density, sampling,
trivariate cdf), a generic numerical conditional-copula extractor with a
simplified-assumption checker, and the trivariate symmetric
Marshall-Olkin copula with its exact conditional survival function.
"""

__version__ = "0.1.0"

from . import archimedean, bicop, elliptical, mo, pcc
from .archimedean import (ArchimedeanGenerator, ConditionalGenerator,
                          archimedean_cdf, conditional_archimedean_copula_cdf,
                          conditional_generator, generator_eval,
                          generator_inv, mtcj_conditional_generator,
                          trivariate_copula_density)
from .bicop import (BivariateCopulaSpec, cdf, empirical_tau, hfunc, hinv,
                    kendall_tau, pdf)
from .elliptical import (EllipticalSpec, MixingDistribution,
                         copula_density_callable, elliptical_generator_eval,
                         partial_correlation_matrix, rho_tau,
                         simplified_ratio_profile, t_conditional_copula,
                         tau_rho, tilted_moment)
from .errors import (BoundaryError, ConvergenceError, NoDensityError,
                     ParameterError)
from .mo import (MoSpec, mo_conditional_copula, mo_conditional_margin_inv,
                 mo_conditional_survival, mo_sample)
from .pcc import (ConditionalCopulaGrid, EdgeSpec, ParamFunction, PccSpec,
                  extract_conditional_copula, pcc_cdf3, pcc_density,
                  pcc_sample, resolve_edge_params,
                  simplified_assumption_check, trivariate_pcc)

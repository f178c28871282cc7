"""Exact normal forms of real hypersurfaces in complex space, truncated at a finite weight."""

from .errors import (CRNormalError, DegenerateLeviError, DimensionMismatch, InvalidSigmaError,
                     IrrationalScalingError, NotNormalFormError, PreconditionError,
                     SearchExhaustedError, TruncationError, UmbilicError, ValidationError)
from .group import (InitialValue, extract_initial_value, identity_sigma, phi_sigma_series,
                    sigma_compose, sigma_decompose, sigma_inverse, stabilizes, validate_sigma)
from .hermitian import Signature, check_levi, check_normal_form, hermitian_form, laplacian
from .maps import (HoloMap, Hypersurface, agree_up_to, compose_maps, identity_residual,
                   invert_map, transform_hypersurface)
from .normalize import (NormalizationResult, analyze_L, apply_L, kernel_dimension, normalize,
                        verify_identity_residual)
from .numbers import GaussianRational, format_q, gr, parse_q
from .series import HoloSeries, RealSeries, SeriesC
from .umbilic import (ReductionTrace, is_umbilic_origin, lower_weight, lowest_order,
                      lowest_weight, moser_alpha, moser_invariants, moser_reduce, moser_reduced,
                      spherical_to_order, translate_along_u, webster_a, webster_invariants,
                      webster_reduce, webster_reduced)

__version__ = "0.1.0"

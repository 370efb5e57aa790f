from .bounds import (CONSTANTS, BoundConstants, WedgeConfig, angle, equal_point_mass_scores,
                     unequal_point_mass_scores, second_iteration_separation, symmetric_margin,
                     sample_wedge_scores, expected_cos_bound, theorem1_bound, appendix_expectations)

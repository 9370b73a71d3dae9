"""Measure theory of continued-fraction sum-level sets on the Stern-Brocot tree.

Exact rational enumeration at small levels, compensated floating sums at
medium levels, and transfer-operator density iteration at large levels, plus
pressure estimates and digit statistics of random points.
"""

from .errors import (CheckpointError, DomainError, InsufficientDepthError,
                     LevelTooLargeError, SumLevelsError, UntranslatableCodeError)
from .exact import (BinaryCode, CFWord, Rational, SBInterval, apply_code,
                    cf_cylinder_interval, cf_digits, code_to_cylinder,
                    farey_map, gauss_map, mediant, sb_intervals, sb_level)
from .sumlevel import (IntervalFamily, MeasureValue, complement_family,
                       e_set_measure, enumerate_sum_level, lambda_auto,
                       lambda_compensated, lambda_exact,
                       lambda_exact_by_compositions, pullback_check,
                       tail_cylinder_measure)
from .transfer import (AsymptoticSeries, DensityGrid, MonotoneReport,
                       cesaro_ratio, cesaro_series, dual_apply, grid_nodes,
                       lambda_operator, lambda_operator_series,
                       monotone_class_check, pf_apply, return_sequence,
                       wandering_rate)
from .pressure import (PressureProbe, SandwichReport, partition_sum,
                       partition_value_exact, pressure_estimate, pressure_probe,
                       sandwich_check)
from .diophantine import (DigitSample, StatRecord, sample_digits, stat_series,
                          theta, theta_tail_exact)

__version__ = "0.1.0"

"""Two-user uplink power-domain NOMA with dynamic SIC: closed-form error
analysis cross-validated against a Monte Carlo link simulator."""

__version__ = "0.1.0"

from .analytic import (BerCurve, BerRow, PepContext, SymbolCombination, TermLedger,
                       TwoUserScenario, UeErrorTerms, compose_ue_error,
                       conditional_bit_error, enumerate_combinations,
                       exact_real_part_mixture, fixed_order_theory,
                       fixed_order_theory_curve, pdf_z_first, pdf_z_second,
                       pep_first, pep_first_ledger, pep_second_correct,
                       pep_second_incorrect, pep_second_incorrect_ledger,
                       theory_ber, theory_curve, theory_ue_terms,
                       unconditional_real_part_mixture)
from .channel import (ChannelParams, ChannelRealization, conditional_gain_pdf,
                      conditional_weak_scale, order_probability,
                      order_statistic_cdf, pdf_ordered_gain_strong,
                      pdf_ordered_gain_weak, sample_channels,
                      sample_conditioned_real_part)
from .errors import (ConfigError, ConvergenceError, DegenerateChannelError,
                     DomainError, EvaluationError, FeasibilityError, FitError,
                     NomaSicError, SizeError)
from .gaussfit import GaussianMixture, eval_mixture, fit_mixture
from .modem import (Constellation, ErrorDistanceTable, build_gray_constellation,
                    error_distance_table, mld_detect, scaling_factor)
from .numerics import (EmpiricalPdf, Quadrature, histogram_pdf,
                       integrate_semi_infinite, q_chiani, q_exact, rice_bin_count)
from .simcore import (SimConfig, TrialOutcome, collect_statistics, run_curve,
                      run_trial, stage2_conditional_rates)

__all__ = [name for name in dir() if not name.startswith("_")]

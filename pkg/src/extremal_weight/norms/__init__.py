"""Testing constants, Hilbert norms, stopping-time verification and extrapolation demo."""

from .hilbest import HilbestReport, LevelReport, hilbest_report, sample_offsets
from .quadrature import QuadratureError, QuadratureResult, hilbert_l2sigma, hilbert_sq_integral
from .rubio import RubioReport, grid_maximal, rubio_demo, sigma_normalized_bump
from .sawyer import SawyerReport, StoppingCell, random_triadic_pair, sawyer_verify
from .testing import CASE_CONSTANTS, TESTING_CAP, TestingReport, classify_case, testing_constant, testing_value

__all__ = [
    "HilbestReport",
    "LevelReport",
    "hilbest_report",
    "sample_offsets",
    "QuadratureError",
    "QuadratureResult",
    "hilbert_l2sigma",
    "hilbert_sq_integral",
    "RubioReport",
    "grid_maximal",
    "rubio_demo",
    "sigma_normalized_bump",
    "SawyerReport",
    "StoppingCell",
    "random_triadic_pair",
    "sawyer_verify",
    "CASE_CONSTANTS",
    "TESTING_CAP",
    "TestingReport",
    "classify_case",
    "testing_constant",
    "testing_value",
]

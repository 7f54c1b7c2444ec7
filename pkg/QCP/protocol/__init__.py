"""Protocol subpackage for QCP: model, measurements and the three protocols."""

from .bell import run_bell
from .model import ChangePoint, Regime, SequenceInstance, SourceModel, StateLabel, draw_change_point, sample_sequence
from .orthogonal import best_case_measurements, run_orthogonal, worst_case_measurements
from .results import BellProtocolResult, ProtocolResult, Status
from .unambiguous import average_distilled, expected_consumed, recursion_table, run_unambiguous

__all__ = ["model", "measurement", "knowledge", "bisection", "plan", "results",
           "orthogonal", "unambiguous", "bell", "errors"]

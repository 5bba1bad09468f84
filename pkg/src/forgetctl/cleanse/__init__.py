from .register import VerificationRegister
from .receipts import PropagationReceipt, StepStatus, CLEANSING_STEPS
from .residue import ResidueMatch, ResidueReport, scan_for_tokens
from .orchestrator import CleansingService

__all__ = [
    "VerificationRegister",
    "PropagationReceipt",
    "StepStatus",
    "CLEANSING_STEPS",
    "ResidueMatch",
    "ResidueReport",
    "scan_for_tokens",
    "CleansingService",
]

from .agreement import quantum_agreement
from .common import AgreementOutcome, LEOutcome
from .complete import quantum_le_complete
from .diameter2 import quantum_qw_le
from .matching import maximal_matching_cv
from .random_walk import quantum_rw_le
from .tree_merge import quantum_general_le

__all__ = [
    "AgreementOutcome",
    "LEOutcome",
    "maximal_matching_cv",
    "quantum_agreement",
    "quantum_general_le",
    "quantum_le_complete",
    "quantum_qw_le",
    "quantum_rw_le",
]

"""Path and cycle powers in tournaments: constructive algorithms, oracles and verifiers."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    DomainError,
    InfeasibleError,
    InputError,
    NotFoundError,
    Ordering,
    Tournament,
    TournamentError,
    Verdict,
    backward_edges,
    density,
    dominates,
    is_transitive,
    verify_cycle_power,
    verify_partition,
    verify_path_power,
)
from .oracle import (  # noqa: E402
    OracleBudget,
    backward_biclique,
    exact_intransitivity,
    exact_min_backward,
    exists_cycle_power,
    max_path_power_len,
    max_transitive,
)
from .median import check_median_degrees, median_order, split_intervals  # noqa: E402
from .extremal import (  # noqa: E402
    drc_transitive_pair,
    greedy_transitive,
    high_degree_subset,
    kst_subset,
    transitive_chain,
    transitive_pair,
)
from .sequencing import (  # noqa: E402
    TransChain,
    assemble_cycle_power,
    assemble_path_power,
    find_path_power,
    med_connect,
    med_connect_short,
    median_sequence,
    median_turan,
)
from .absorber import Absorber, absorber_span_path, chain_absorbers, find_absorber, verify_absorber  # noqa: E402
from .pipeline import (  # noqa: E402
    PipelineConfig,
    density_increment,
    discover_absorber,
    find_cycle_power,
    partition_path_powers,
    refine_intransitive,
)
from .construct import (  # noqa: E402
    blowup,
    no_tt_block,
    paley,
    random_reversal,
    random_tournament,
    transitive_tournament,
)
from .certificate import Certificate, verify_certificate  # noqa: E402

__all__ = [
    "DomainError",
    "InfeasibleError",
    "InputError",
    "NotFoundError",
    "Ordering",
    "Tournament",
    "TournamentError",
    "Verdict",
    "backward_edges",
    "density",
    "dominates",
    "is_transitive",
    "verify_cycle_power",
    "verify_partition",
    "verify_path_power",
    "OracleBudget",
    "backward_biclique",
    "exact_intransitivity",
    "exact_min_backward",
    "exists_cycle_power",
    "max_path_power_len",
    "max_transitive",
    "drc_transitive_pair",
    "greedy_transitive",
    "high_degree_subset",
    "kst_subset",
    "transitive_chain",
    "transitive_pair",
    "TransChain",
    "assemble_cycle_power",
    "assemble_path_power",
    "find_path_power",
    "med_connect",
    "med_connect_short",
    "median_sequence",
    "median_turan",
    "PipelineConfig",
    "density_increment",
    "discover_absorber",
    "find_cycle_power",
    "partition_path_powers",
    "refine_intransitive",
    "blowup",
    "no_tt_block",
    "paley",
    "random_reversal",
    "random_tournament",
    "transitive_tournament",
    "check_median_degrees",
    "median_order",
    "split_intervals",
    "Absorber",
    "absorber_span_path",
    "chain_absorbers",
    "find_absorber",
    "verify_absorber",
    "Certificate",
    "verify_certificate",
]

"""Sofic shift spaces with finite-range potentials: pressure, equilibrium
measures, and numerical weak-Gibbs certificates."""

from .exceptions import EmptyCylinderWarning, ValidationError, VolumeGuardError
from .measures import (EmpiricalPairing, RPFMeasure, cylinder_prob,
                       empirical_pairing, energy_density_gap,
                       equilibrium_measure)
from .potentials import (NormReport, Potential, ShapeTable, add_potentials,
                         boundary_norm_bound, energy, interaction, norms,
                         phi_function, zero_potential)
from .pressure import (BrutePartition, PressureEstimate, TransferSystem,
                       brute_partition, build_transfer, finite_pressure,
                       perron, pressure_limit)
from .shifts import (Alphabet, BlockCode, Cylinder, DecouplingCertificate,
                     Point, SoficPresentation, Word, apply_block_code,
                     decoupling_gap, enumerate_words, factor_gap_bound,
                     factor_presentation, is_aperiodic, is_irreducible,
                     periodic_point, point_from_words, sft_presentation,
                     splice)
from .verify import (InequalityRecord, LemmaReport, WeakGibbsReport,
                     constrained_partition, decoupling_1d_check,
                     indicator_potential, lemma_211_check, lemma_212_check,
                     tangent_derivative_check, weak_gibbs_scan)

__version__ = "0.1.0"

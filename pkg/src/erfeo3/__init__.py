"""Two-sublattice Er/Fe spin model of Er_xY_(1-x)FeO3.

Mean-field thermodynamics, magnon quantization, reduction to an extended
Dicke model, superradiant-phase-transition analysis, and spin-resonance
spectra, with a CLI (``erfeo3``) that emits CSV/JSON tables and figures.
"""

from .dicke import (DickeParams, ReducedDicke, alignment_energy, coupling_strengths,
                    derive_dicke_params, reduce_for_ltpt)
from .errors import (ConfigError, DegenerateParameterError, DomainError, ErFeO3Error,
                     InstabilityError, ModelValidityError)
from .magnon import (MagnonBasis, abcd, canting_angle, fluctuation_map, magnon_basis,
                     magnon_frequencies)
from .meanfield import (EquilibriumResult, MeanFields, SpinState, brillouin,
                        compute_mean_fields, free_energy, order_parameter,
                        rotation_angle_deg, solve_equilibrium, thermal_update)
from .model import (Environment, ErFeCouplings, ErParams, FeParams, ModelConfig,
                    build_coupling_vectors, build_j_matrix, default_config,
                    dump_config, load_config, validate_gamma12_symmetry)
from .resonances import (BosonicQuadratic, LinearizedSystem, ResonanceSet,
                         anticrossing_centers, dicke_resonances, effective_er_density,
                         linearize, mf_resonances)
from .bosonic import bogoliubov_frequencies
from .srpt import (BaselineDicke, CouplingDepths, SemiclassicalState,
                   baseline_dicke_equilibrium, coupling_depths, fe_spins_from_magnons,
                   hp_ground_state, semiclassical_equilibrium)
from .sweeps import (PhaseGrid, critical_field, critical_temperature, phase_boundary,
                     phase_diagram, temperature_sweep)
from .units import CONSTS, PhysConsts, convert

__version__ = "0.1.0"

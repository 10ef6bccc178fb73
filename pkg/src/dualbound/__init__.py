"""Certified robustness verification for networks with S-curve activations.

The pipeline underestimates each hidden neuron's reachable pre-activation
interval (by sampling or gradient steps), uses it to choose tight sound
linear relaxations of the activations, propagates symbolic bounds backward
through the network, and certifies label margins on l-infinity balls.
"""

from .activations import ARCTAN, S_CURVES, SIGMOID, TANH, Activation
from .network import (ConvLayer, DenseLayer, LayerValues, ModelFormatError,
                      Network, ShapeMismatchError, UnknownActivationError,
                      load_network, network_from_dict, network_to_dict, save_network)
from .relaxation import (Case, DomainPair, NeuronRelaxation, Strategy,
                         TangentSearchError, chord_slope, check_soundness_grid,
                         classify_case, relax_baseline, relax_dual,
                         tangent_point_through)
from .under_approx import UnderDomains, gradient_domains, monte_carlo_domains
from .propagation import (GradientUnder, MonteCarloUnder, PropagationConfig,
                          PropagationResult, SymbolicBound, backward_bound,
                          compute_domains, concretize, output_margin_bounds)
from .verifier import (CertifiedBound, VerificationOutcome, certified_lower_bound,
                       compare_strategies, improvement_pct, overestimation_ratio,
                       robustness_ratio, verify_robust)
from .oracle import (OracleConfig, actual_layer_domains, actual_neuron_domain,
                     exhaustive_margin, true_robust_radius)
from .synth import ArchitectureError, golden_vectors, parse_arch, synthesize, write_bundle
from .datasets import DatasetError, load_dataset

__version__ = "0.1.0"

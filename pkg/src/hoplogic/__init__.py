"""Logic programs on higher-order Hopfield networks.

Compile definite clauses into synaptic weights, learn the same weights with a
generalized Hebb rule, relax both networks and compare their stable states.
"""
from .dyadic import DyadicRational
from .dynamics import BACKEND, RelaxationResult, is_global, random_state, relax, sweep, update_neuron
from .energy import (
    CostPolynomial,
    PaperWeights,
    WeightSet,
    clause_cost,
    compile_program,
    cost_to_weights,
    dump_weights,
    energy,
    load_weights,
    local_field,
    program_cost,
    to_paper_convention,
)
from .hebbian import Event, LearningSchedule, apply_hebb, clause_events, learn_exhaustive, learn_sampled
from .logic import (
    Atom,
    Clause,
    LogicProgram,
    ProgramError,
    count_violations,
    enumerate_models,
    format_program,
    generate_random_program,
    is_violated,
    parse_program,
)

__version__ = "0.1.0"

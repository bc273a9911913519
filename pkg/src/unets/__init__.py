"""Unification nets for first-order multiplicative linear logic.

Nets are linkings on (cut) sequents whose existential witnesses are left
implicit and recovered by unification.  The package checks correctness in
quadratic time, translates proofs to nets and back, eliminates cuts locally
and compares against Girard-style nets with explicit witnesses.
"""

__version__ = "0.1.0"

from .errors import (
    ArityError, IllFormedError, MalformedCutError, ParseError, ResourceLimit, UnetsError,
)
from .syntax import (
    App, Atom, CutSequent, Exists, Forall, LeafId, Par, Tensor, Var,
    cleanse, dual, encode_cuts, free_vars,
)
from .text import Signature, parse_formula, parse_sequent, parse_term
from .unify import NotUnifiable, TermStore, apply_mgu, precedences, unify
from .nets import (
    Linking, NetGraph, Verdict, brute_force_correct, build_graph, check_correct, check_mll,
    enumerate_switchings, frame, is_correct,
)
from .calculus import (
    check_proof, equivalent, format_proof, parse_proof, skeleton, translate,
    verify_unification_proof,
)
from .sequentialize import sequentialize, sequentialize_cuts
from .cutelim import Redex, find_redexes, normalize, reduce
from .girard import GirardNet, check_girard, girard_normalize, girard_of, girard_of_proof, unet_of_girard
from .families import cut_chain, family, girard_chain, par_blowup, quantifier_blowup

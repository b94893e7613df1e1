"""Exact arithmetic differential operators of level m in characteristic p.

The ring D^(m) on affine r-space with its divided-power basis, the
p^m-curvature, Frobenius liftings mod p^2 and the induced splitting
maps, and the local correspondence between quasi-nilpotent D^(m)-modules
and Higgs modules.  Everything is exact (mod p or mod p^2); the `suites`
module re-verifies the underlying identities end to end.
"""

from .context import Context
from .poly import Poly
from .scalars import (angle, angle_mi, angle_mi_mod, binom_mod_p2, box,
                      box_le, brace, brace_mi, brace_mi_mod, degree_box,
                      dp_power_factor, lucas_closed_form)
from .dpalg import DPElem, RatDP, gamma_dp, pair_op, taylor
from .diffops import (DiffOp, central_embed, central_unit, commutator,
                      frob_descend, frob_raise, is_central, kaneda_matrix,
                      level_raise, quotient_matrix, ring_generators, theta,
                      theta_decompose, theta_power, theta_unit, zo_decompose,
                      zo_reassemble)
from .frobenius import (FrobData, LiftingZ, NotALifting, NotStrong, bullet,
                        bullet_matrix, glue_derivation, glue_endo,
                        lifting_from_json, ov_split_matrix, phi, phi_basis,
                        phi_center_inv, phi_tilde, phi_tilde_basis,
                        random_strong_lifting, standard_lifting)
from .simpson import (DModule, HiggsModule, InvariantSpace,
                      NotQuasiNilpotent, central_apply, corpus, corpus_json,
                      curvature_of, invariant_rank, pullback, random_higgs,
                      recovered_higgs, round_trip, solve_invariants,
                      solve_invariants_literal, worked_example)
from .expr import ExprError, parse, render_matrix, render_op, render_poly
from .suites import SUITES, SuiteCase, SuiteReport, run_suite

__version__ = "0.1.0"

__all__ = [
    "Context", "Poly", "DPElem", "RatDP", "DiffOp",
    "angle", "angle_mi", "angle_mi_mod", "binom_mod_p2", "box", "box_le",
    "brace", "brace_mi", "brace_mi_mod", "degree_box", "dp_power_factor",
    "lucas_closed_form",
    "gamma_dp", "pair_op", "taylor",
    "central_embed", "central_unit", "commutator", "frob_descend",
    "frob_raise", "is_central", "kaneda_matrix", "level_raise",
    "quotient_matrix", "ring_generators", "theta", "theta_decompose",
    "theta_power", "theta_unit", "zo_decompose", "zo_reassemble",
    "FrobData", "LiftingZ", "NotALifting", "NotStrong", "bullet",
    "bullet_matrix", "glue_derivation", "glue_endo", "lifting_from_json",
    "ov_split_matrix", "phi", "phi_basis", "phi_center_inv", "phi_tilde",
    "phi_tilde_basis", "random_strong_lifting", "standard_lifting",
    "DModule", "HiggsModule", "InvariantSpace", "NotQuasiNilpotent",
    "central_apply", "corpus", "corpus_json", "curvature_of",
    "invariant_rank", "pullback", "random_higgs", "recovered_higgs",
    "round_trip", "solve_invariants", "solve_invariants_literal",
    "worked_example",
    "ExprError", "parse", "render_matrix", "render_op", "render_poly",
    "SUITES", "SuiteCase", "SuiteReport", "run_suite",
]

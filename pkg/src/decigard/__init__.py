"""Decidable-by-construction model toolkit.

Total programs with static fuel bounds, non-trivial judge functions,
exhaustive and linear-region alignment verifiers, guard constructions that
make alignment (or misalignment) a construction invariant, and an
executable demonstration of why none of this extends to arbitrary
programs.
"""

from .kernel import (BitVec, DecigardError, DecodeError, IntervalError,
                     JudgeCheck, JudgeKindError, ParseError, Rat, RatVec,
                     ResourceExceeded, StructureError, TrivialJudgeError,
                     Verdict, VerifierDivergence, WidthError, format_rat,
                     parse_rat)
from .ir import (Act, Affine, Decode, Encode, Parallel, Repeat, Select, Seq,
                 Slice, Shape, TotalProgram, affine, bits, eval_program,
                 identity, parse_program, print_program, program,
                 static_fuel_bound, vec)
from .judges import (Judge, LinAnd, LinAtom, LinOr, atom, body_program,
                     check_nontrivial, eval_judge, linear_body_program,
                     parse_judge, print_judge)
from .agent import AgentLoop, Trace, parse_agent, print_agent, run_agent
from .linear import Box, Ineq, box, feasible, find_point, ineq
from .regions import (PwlNetwork, Region, activation_pattern,
                      enumerate_regions, forward, network,
                      network_from_program, network_to_program,
                      quantized_model)
from .verify import (ClosureResult, HaltingResult, check_final_closure,
                     verify_exhaustive, verify_halting, verify_regions)
from .guard import clip_guard, filter_model, misalign_model
from .micro import (MicroOutcome, MicroProgram, assemble_text, disassemble,
                    from_binary, run_micro, to_binary)
from .diagonal import (CandidateVerifier, ContradictionDemo, MicroJudge,
                       build_halting_reduction, demonstrate_contradiction,
                       make_adversary, verifier_zoo)

__version__ = "0.1.0"

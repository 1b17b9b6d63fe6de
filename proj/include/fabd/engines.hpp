#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "fabd/instance.hpp"

namespace fabd {

struct EngineConfig {
    // Brute-force model-evaluation budget per sat call.
    std::uint64_t model_budget = std::uint64_t{1} << 22;
};

enum class PropStatus { Ok, Conflict };

// Result of exhaustive unit propagation. When Ok, the residual contains no
// unit-forcing atom, shares no variable with the forced assignment, and
// residual AND forced is equivalent to the input formula.
struct PropagationResult {
    PropStatus status = PropStatus::Ok;
    Formula residual;
    Assignment forced;            // -1 untouched, 0/1 propagated
    std::vector<Var> forced_vars; // propagation order
};

PropagationResult unit_propagate(const Formula& f, std::size_t n_vars);

// Same, seeded with assumptions (propagated first, recorded in `forced`).
PropagationResult unit_propagate_assuming(const Formula& f, std::size_t n_vars,
                                          std::span<const std::pair<Var, bool>> assumptions);

enum class EngineHint { Auto, Horn, DualHorn, TwoSat, Xor, Brute };

struct SatResult {
    bool satisfiable = false;
    // Defined on var(f) when satisfiable; -1 elsewhere.
    Assignment model;
};

// Satisfiability with per-fragment polynomial engines and a budgeted
// brute-force fallback:
//   Horn      unit propagation, then residual variables to 0
//   DualHorn  unit propagation, then residual variables to 1
//   TwoSat    implication-graph strongly connected components
//   Xor       elimination over GF(2)
//   Brute     exhaustive scan in lexicographic assignment order
// Auto dispatches on the syntactic shape and falls back to Brute.
SatResult sat(const Formula& f, std::size_t n_vars, EngineHint hint = EngineHint::Auto,
              const EngineConfig& cfg = {});

// f entails m, decided as sat(f and not-m) == UNSAT. The added negative
// unit keeps Horn / 2-SAT / Xor routing valid; the dualHorn engine
// propagates units before completing the residual, which covers it too.
bool entails(const Formula& f, std::size_t n_vars, Var m, EngineHint hint = EngineHint::Auto,
             const EngineConfig& cfg = {});

// E is an explanation iff KB and E is satisfiable and KB and E entails
// every manifestation.
bool verify_explanation(const AbductionInstance& inst, std::span<const Var> explanation,
                        const EngineConfig& cfg = {});

// Syntactic fragment membership used by sat dispatch.
bool formula_in_fragment(const Formula& f, EngineHint hint);

} // namespace fabd

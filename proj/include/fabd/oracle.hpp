#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fabd/instance.hpp"

namespace fabd {

struct OracleLimits {
    std::uint32_t max_hyps = 20;
    std::uint32_t max_vars = 22;
    std::uint64_t max_pairs = std::uint64_t{1} << 26;
};

// Full exhaustive picture of the explanation space. Minimal explanations
// form an antichain; relevant is their union, necessary their intersection
// (empty when there are no explanations), facets = relevant minus necessary.
struct ExplanationReport {
    std::vector<std::vector<Var>> explanations;
    std::vector<std::vector<Var>> minimal;
    std::vector<Var> relevant;
    std::vector<Var> necessary;
    std::vector<Var> facets;
};

std::vector<std::vector<Var>> all_explanations(const AbductionInstance& inst,
                                               const OracleLimits& limits = {});
std::vector<std::vector<Var>> minimal_explanations(const AbductionInstance& inst,
                                                   const OracleLimits& limits = {});
ExplanationReport report(const AbductionInstance& inst, const OracleLimits& limits = {});

bool is_facet_oracle(const FacetInstance& fi, const OracleLimits& limits = {});
bool is_relevant_oracle(const FacetInstance& fi, const OracleLimits& limits = {});

struct DiversityWitness {
    std::vector<Var> e1;
    std::vector<Var> e2;
    std::uint32_t d = 0;
};

// Maximum-distance explanation pair; nullopt when no explanation exists.
// Ties are broken by the lexicographically first pair in hypothesis-mask
// order.
std::optional<DiversityWitness> max_diverse_pair(const AbductionInstance& inst,
                                                 const OracleLimits& limits = {});

} // namespace fabd

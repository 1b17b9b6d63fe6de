#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fabd/formula.hpp"

namespace fabd {

// (KB, H, M) with the variable table owning the name <-> index mapping.
// H and M are kept sorted. Parsed instances satisfy H, M subset of var(KB);
// instances produced by internal transformations may mention hypotheses or
// manifestations whose atoms were simplified away, which is harmless: such
// variables are simply unconstrained.
struct AbductionInstance {
    VarTable vars;
    Formula kb;
    std::vector<Var> hyps;
    std::vector<Var> mans;

    bool is_hyp(Var v) const;
    bool is_man(Var v) const;

    bool operator==(const AbductionInstance& other) const {
        return vars == other.vars && kb == other.kb && hyps == other.hyps && mans == other.mans;
    }
};

struct FacetInstance {
    AbductionInstance base;
    Var query; // must be a hypothesis
};

struct DivInstance {
    AbductionInstance base;
    std::uint32_t k;
};

// Result of parsing an instance file: query / k are present when the file
// carries them.
struct ParsedInstance {
    AbductionInstance base;
    std::optional<Var> query;
    std::optional<std::uint32_t> k;

    FacetInstance facet() const;
    DivInstance div() const;

    bool operator==(const ParsedInstance& other) const {
        return base == other.base && query == other.query && k == other.k;
    }
};

std::vector<std::string> var_names(const AbductionInstance& inst, const std::vector<Var>& vs);

} // namespace fabd

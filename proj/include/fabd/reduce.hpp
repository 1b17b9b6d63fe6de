#pragma once

#include "fabd/instance.hpp"
#include "fabd/reduce_defs.hpp"

namespace fabd {

// Replaces every atom whose relation has a definition by the instantiated
// body, with fresh existential variables kept outside the hypotheses.
// Table relations without a definition raise MISSING_DEFINITION; the
// canonical clause / xor / equality / unit forms pass through.
ParsedInstance efpp_substitute(const ParsedInstance& inst, const DefinitionSet& defs);

// KB' = KB + (x=m) + (y=m) over fresh x, y, m; H' = H + {x, y},
// M' = M + {m}, query x. The source admits an explanation iff x is a facet
// in the target. Needs equality in the language, the language outside the
// essentially negative / positive forms, or an equality definition.
FacetInstance abd_to_isfacet(const AbductionInstance& inst, const DefinitionSet* defs = nullptr);

// The same construction deciding 2-diversity instead of the facet query.
DivInstance abd_to_div(const AbductionInstance& inst, const DefinitionSet* defs = nullptr);

// Simulates positive unit clauses: identifies their variables with a fresh
// t added to both H and M. Resolves to a fixed negative answer when the
// query variable itself occurs as a positive unit.
struct ElimPosUnitsResult {
    bool resolved = false; // the answer is a fixed "no"
    FacetInstance out;
};

ElimPosUnitsResult elim_pos_units(const FacetInstance& fi);

// Simulates a negative unit over a 1-valid core: negative-unit variables
// are identified into z, the unit is dropped, and z implies every variable
// in scope; fresh x, y, m carry the facet question.
FacetInstance neg_unit_to_facet(const AbductionInstance& inst);

// Positive 2-CNF diversity as abduction diversity: clause variables imply
// a fresh manifestation per clause; models correspond to explanations with
// matching Hamming distances.
DivInstance pos2sat_to_div(const AbductionInstance& phi, std::uint32_t k);

} // namespace fabd

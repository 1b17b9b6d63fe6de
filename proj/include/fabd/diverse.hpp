#pragma once

#include "fabd/engines.hpp"
#include "fabd/oracle.hpp"

namespace fabd {

// |e1 symmetric-difference e2| for sorted variable sets.
std::uint32_t distance(const std::vector<Var>& e1, const std::vector<Var>& e2);

struct DivAnswer {
    bool diverse = false;
    // Present whenever explanations exist; for the constructive algorithms
    // the witness realizes the maximum distance.
    std::optional<DiversityWitness> witness;
};

DivAnswer div_oracle(const DivInstance& di, const OracleLimits& limits = {});

// Maximum-distance pair construction for 2-affine knowledge bases: one
// representative per manifestation class against the remaining ones, the
// larger hypothesis side of each leftover cluster against the opposite
// side, and unit-forced hypotheses on one side only.
DivAnswer div_affine2(const DivInstance& di);

// Same construction for essentially positive knowledge bases; all classes
// are independent and classes swallowing a whole positive clause are
// entailed for free.
DivAnswer div_ep(const DivInstance& di);

} // namespace fabd

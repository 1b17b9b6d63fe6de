#pragma once

#include <string>

#include "fabd/instance.hpp"

namespace fabd {

enum class GenFragment { Imp, DualHorn, Horn, Affine2, En, Ep, Pos2Cnf };

const char* gen_fragment_name(GenFragment f);
GenFragment gen_fragment_from(const std::string& name);

struct GenConfig {
    GenFragment fragment = GenFragment::DualHorn;
    std::uint32_t n_vars = 6;
    std::uint32_t n_atoms = 8;
    std::uint64_t seed = 1;
    // Probability that an atom ignores the hidden reference model; 0 keeps
    // the output satisfiable by construction.
    double adversarial = 0.15;
};

// Deterministic per config: the same seed yields byte-identical text. The
// output parses, profiles into the requested fragment, and carries
// disjoint non-empty hypothesis and manifestation sets.
std::string generate(const GenConfig& cfg);

ParsedInstance generate_instance(const GenConfig& cfg);

} // namespace fabd

#pragma once

#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fabd/generate.hpp"
#include "fabd/instance.hpp"
#include "fabd/parser.hpp"

namespace fabd::test {

inline std::string data_path(const std::string& name) {
    return std::string(FABD_TEST_DATA_DIR) + "/" + name;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ParsedInstance load(const std::string& name) {
    return parse_instance(slurp(data_path(name)));
}

inline ParsedInstance sailing() { return load("sailing.abd"); }

inline Var var_of(const AbductionInstance& inst, const std::string& name) {
    return *inst.vars.find(name);
}

// Variable-name view of a set for readable assertions.
inline std::set<std::string> names(const AbductionInstance& inst, const std::vector<Var>& vs) {
    std::set<std::string> out;
    for (Var v : vs) out.insert(inst.vars.name(v));
    return out;
}

inline std::set<std::set<std::string>> name_sets(const AbductionInstance& inst,
                                                 const std::vector<std::vector<Var>>& sets) {
    std::set<std::set<std::string>> out;
    for (const auto& s : sets) out.insert(names(inst, s));
    return out;
}

inline ParsedInstance gen(GenFragment frag, std::uint32_t vars, std::uint32_t atoms,
                          std::uint64_t seed, double adversarial = 0.15) {
    GenConfig cfg;
    cfg.fragment = frag;
    cfg.n_vars = vars;
    cfg.n_atoms = atoms;
    cfg.seed = seed;
    cfg.adversarial = adversarial;
    return generate_instance(cfg);
}

// Seed-derived small sizes for property suites.
struct SuiteSizes {
    std::uint32_t vars;
    std::uint32_t atoms;
};

inline SuiteSizes sizes_for(std::uint64_t seed, std::uint32_t min_vars = 4,
                            std::uint32_t var_span = 5, std::uint32_t min_atoms = 3,
                            std::uint32_t atom_span = 8) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 1);
    return {min_vars + static_cast<std::uint32_t>(rng() % var_span),
            min_atoms + static_cast<std::uint32_t>(rng() % atom_span)};
}

} // namespace fabd::test

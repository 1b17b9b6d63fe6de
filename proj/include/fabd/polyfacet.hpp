#pragma once

#include <optional>

#include "fabd/engines.hpp"
#include "fabd/instance.hpp"
#include "fabd/lattice.hpp"

namespace fabd {

// Tractable fragments with a dedicated facet / relevance algorithm.
enum class Fragment { Implication, DualHorn, Affine2, En };

const char* fragment_name(Fragment f);

// Most specific fragment the formula's syntactic profile licenses, if any.
std::optional<Fragment> detect_fragment(const LanguageProfile& p);

// Unit-propagation preprocessing of a facet query. Resolves to a fixed
// negative answer when the knowledge base is unsatisfiable, a
// manifestation is forced false, or the query variable is forced either
// way; otherwise reduces to a unit-free instance with forced
// manifestations and hypotheses removed.
struct Preprocessed {
    bool resolved = false;
    bool answer = false;
    FacetInstance reduced;
    Assignment forced;
};

Preprocessed preprocess_units(const FacetInstance& fi);

// Per-manifestation analysis for the implication algorithm: h_map[m] lists
// the hypotheses that each explain m on their own, m_x the manifestations
// the query explains on its own.
struct ImpAnalysis {
    std::vector<std::pair<Var, std::vector<Var>>> h_map;
    std::vector<Var> m_x;
};

ImpAnalysis analyze_implications(const AbductionInstance& inst, Var x,
                                 const EngineConfig& cfg = {});

// Facet decision for knowledge bases consisting solely of binary
// implications: scan the manifestations the query explains for a candidate
// avoiding it, then check for an explanation without the query.
bool isfacet_imp(const FacetInstance& fi, const EngineConfig& cfg = {});

// Facet decision for dualHorn knowledge bases (units allowed): the
// implication algorithm generalized through unit preprocessing, with
// single-hypothesis entailment tables.
bool isfacet_dualhorn(const FacetInstance& fi, const EngineConfig& cfg = {});

// Variable equivalence classes induced by equalities, with disequalities
// pairing classes into clusters of opposite truth value.
struct ClusterStructure {
    std::vector<std::vector<Var>> classes; // partition, each sorted
    std::vector<std::pair<int, int>> pairs; // (class index, class index)
    std::vector<int> class_of;              // per variable, -1 outside
    std::vector<int> partner;               // per class, -1 unpaired

    int cls(Var v) const { return class_of[v]; }
};

// Throws WRONG_FRAGMENT for non 2-affine atoms and UNSAT_STRUCTURE when a
// class is forced to differ from itself.
ClusterStructure build_clusters(const Formula& f, std::size_t n_vars);

// Facet decision for 2-affine knowledge bases (units, equalities, binary
// xor).
bool isfacet_affine2(const FacetInstance& fi, const EngineConfig& cfg = {});

// Facet decision for essentially negative knowledge bases (negative
// clauses, units, equalities).
bool isfacet_en(const FacetInstance& fi, const EngineConfig& cfg = {});

bool isfacet_poly(const FacetInstance& fi, Fragment fragment, const EngineConfig& cfg = {});

// The facet algorithms with the final dispensability step dropped.
bool relevance_poly(const FacetInstance& fi, Fragment fragment, const EngineConfig& cfg = {});

} // namespace fabd

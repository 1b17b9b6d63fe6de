#pragma once

#include <span>
#include <string>
#include <vector>

#include "fabd/formula.hpp"

namespace fabd {

// Polymorphism operations used by the classification: constants, negation,
// conjunction, disjunction, ternary majority, ternary parity.
enum class PolyOp { Const0, Const1, Not, And2, Or2, Maj3, Xor3 };

std::uint32_t poly_op_arity(PolyOp op);

// Exact closure test: every tuple combination of every relation maps back
// into the relation. Clause / xor relations wider than a threshold use the
// closed-form answer instead of enumerating tuple powers; the result is
// identical.
bool closed_under(std::span<const RelationPtr> rels, PolyOp op);

struct LanguageProfile {
    // Semantic flags (polymorphism closures / b-validity).
    bool zero_valid = true;
    bool one_valid = true;
    bool complementive = true;
    bool horn = true;       // closed under And2
    bool dualhorn = true;   // closed under Or2
    bool bijunctive = true; // closed under Maj3
    bool affine = true;     // closed under Xor3

    // Syntactic tags; each holds when every relation carries the kind.
    bool all_implication = true; // binary clause, one positive one negative
    bool en_form = true;         // negative clauses, units, equality
    bool ep_form = true;         // positive clauses, units, equality
    bool affine2_form = true;    // units, equality, binary xor
    bool clausal = true;         // clauses and units only
    bool xor_forms_only = true;  // xor, equality, units only
    bool xor_all_even = true;    // every xor relation has even arity
    bool has_pos_unit = false;
    bool has_neg_unit = false;
    bool has_xor = false;
    std::uint32_t max_arity = 0;

    bool schaefer() const { return horn || dualhorn || bijunctive || affine; }
    bool dualhorn_clausal() const { return dualhorn && clausal; }
};

LanguageProfile profile(std::span<const RelationPtr> rels);

// Distinct relations used by a formula; always-true relations carry no
// constraint and are skipped.
std::vector<RelationPtr> kb_relations(const Formula& f);

LanguageProfile profile(const Formula& f);

enum class Problem { Abd, IsFacet, Relevance, DivAbd };
enum class Verdict { P, NpComplete, Sigma2pComplete, Open, Unknown };

const char* problem_name(Problem p);
const char* verdict_name(Verdict v);

struct ComplexityVerdict {
    Problem problem;
    Verdict verdict;
    std::vector<std::string> justification; // empty exactly for Unknown
};

// First-match rule table over the profile. Cells without a supporting
// result stay Unknown rather than guessing.
ComplexityVerdict verdict(const LanguageProfile& p, Problem problem);

namespace just {
inline constexpr const char* kImpFacet = "implication-facet-algorithm";
inline constexpr const char* kDualHornFacet = "dualhorn-facet-algorithm";
inline constexpr const char* kUnitElim = "unit-propagation-elimination";
inline constexpr const char* kAffine2Facet = "two-affine-cluster-algorithm";
inline constexpr const char* kEnFacet = "essentially-negative-algorithm";
inline constexpr const char* kVerifier = "polynomial-explanation-verifier";
inline constexpr const char* kNpMembership = "np-membership-via-verifier";
inline constexpr const char* kAbdToFacet = "abduction-to-facet-reduction";
inline constexpr const char* kEqExpress = "equality-expressibility";
inline constexpr const char* kHornNpHard = "definite-horn-facet-np-hardness";
inline constexpr const char* kPosUnitElim = "positive-unit-elimination";
inline constexpr const char* kNegUnitSim = "negative-unit-simulation";
inline constexpr const char* kSigma2p = "non-schaefer-sigma2p-hardness";
inline constexpr const char* kOpenEvenAffine = "open-even-affine-cases";
inline constexpr const char* kEvenOddNote = "note-even-vs-odd-length-wording";
inline constexpr const char* kAffine2Div = "two-affine-diversity-construction";
inline constexpr const char* kEpDiv = "essentially-positive-diversity-construction";
inline constexpr const char* kPos2SatDiv = "pos2sat-diversity-np-hardness";
inline constexpr const char* kAbdToDiv = "abduction-to-diversity-reduction";
inline constexpr const char* kSigma2pDiv = "sigma2p-diversity-hardness";
inline constexpr const char* kDualHornAbd = "dualhorn-abduction-polynomial";
inline constexpr const char* kHornAbd = "horn-abduction-np-complete";
inline constexpr const char* kRelevanceDrop = "relevance-via-dispensability-drop";
} // namespace just

} // namespace fabd

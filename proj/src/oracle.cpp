#include "fabd/oracle.hpp"

#include <algorithm>
#include <bit>

#include "fabd/error.hpp"

namespace fabd {

namespace {

// Explanation space over hypothesis masks, computed from the model list of
// the knowledge base restricted to the variables that matter.
struct ExplanationSpace {
    std::vector<Var> hyps;               // bit i of a mask is hyps[i]
    std::vector<std::uint32_t> expl;     // explanation masks, ascending
    std::vector<std::uint8_t> is_expl;   // indexed by mask
    std::vector<std::uint32_t> minimal;  // minimal explanation masks, ascending

    std::vector<Var> to_vars(std::uint32_t mask) const {
        std::vector<Var> out;
        for (std::size_t i = 0; i < hyps.size(); ++i)
            if ((mask >> i) & 1) out.push_back(hyps[i]);
        return out;
    }
};

ExplanationSpace explanation_space(const AbductionInstance& inst, const OracleLimits& limits) {
    if (inst.hyps.size() > limits.max_hyps)
        fail(ErrorCode::BudgetExceeded,
             "oracle limit of " + std::to_string(limits.max_hyps) + " hypotheses exceeded");

    // Only variables constrained by the knowledge base or named in H / M
    // influence the answer; everything else is padding.
    std::vector<Var> scope = inst.kb.vars();
    scope.insert(scope.end(), inst.hyps.begin(), inst.hyps.end());
    scope.insert(scope.end(), inst.mans.begin(), inst.mans.end());
    std::sort(scope.begin(), scope.end());
    scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
    if (scope.size() > limits.max_vars)
        fail(ErrorCode::BudgetExceeded,
             "oracle limit of " + std::to_string(limits.max_vars) + " variables exceeded");

    std::vector<std::uint32_t> hyp_pos(inst.vars.size(), UINT32_MAX);
    for (std::size_t i = 0; i < inst.hyps.size(); ++i) hyp_pos[inst.hyps[i]] = static_cast<std::uint32_t>(i);

    const std::size_t n = scope.size();
    const std::size_t h = inst.hyps.size();

    // Enumerate models of KB over the scope; record the hypothesis
    // projection and whether every manifestation holds.
    Assignment a = make_assignment(inst.vars.size());
    std::vector<std::uint32_t> cnt(std::size_t{1} << h, 0);
    std::vector<std::uint32_t> bad(std::size_t{1} << h, 0);
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        for (std::size_t i = 0; i < n; ++i)
            a[scope[i]] = static_cast<std::int8_t>((mask >> i) & 1);
        if (!evaluate(inst.kb, a)) continue;
        std::uint32_t hm = 0;
        for (std::size_t i = 0; i < h; ++i)
            if (a[inst.hyps[i]] == 1) hm |= std::uint32_t{1} << i;
        bool covers = std::all_of(inst.mans.begin(), inst.mans.end(),
                                  [&](Var m) { return a[m] == 1; });
        ++cnt[hm];
        if (!covers) ++bad[hm];
    }

    // Superset sums: cnt[E] then counts the models whose hypothesis
    // projection contains E, i.e. the models of KB and E.
    for (std::size_t bit = 0; bit < h; ++bit) {
        const std::uint32_t b = std::uint32_t{1} << bit;
        for (std::uint32_t m = 0; m < (std::uint32_t{1} << h); ++m) {
            if (m & b) continue;
            cnt[m] += cnt[m | b];
            bad[m] += bad[m | b];
        }
    }

    ExplanationSpace space;
    space.hyps = inst.hyps;
    space.is_expl.assign(std::size_t{1} << h, 0);
    for (std::uint32_t m = 0; m < (std::uint32_t{1} << h); ++m) {
        if (cnt[m] > 0 && bad[m] == 0) {
            space.is_expl[m] = 1;
            space.expl.push_back(m);
        }
    }
    // A proper-subset explanation implies a one-bit-removed explanation:
    // anything between stays consistent and keeps entailing.
    for (std::uint32_t m : space.expl) {
        bool minimal = true;
        for (std::size_t i = 0; i < h && minimal; ++i)
            if ((m >> i) & 1)
                if (space.is_expl[m & ~(std::uint32_t{1} << i)]) minimal = false;
        if (minimal) space.minimal.push_back(m);
    }
    return space;
}

} // namespace

std::vector<std::vector<Var>> all_explanations(const AbductionInstance& inst,
                                               const OracleLimits& limits) {
    auto space = explanation_space(inst, limits);
    std::vector<std::vector<Var>> out;
    out.reserve(space.expl.size());
    for (std::uint32_t m : space.expl) out.push_back(space.to_vars(m));
    return out;
}

std::vector<std::vector<Var>> minimal_explanations(const AbductionInstance& inst,
                                                   const OracleLimits& limits) {
    auto space = explanation_space(inst, limits);
    std::vector<std::vector<Var>> out;
    out.reserve(space.minimal.size());
    for (std::uint32_t m : space.minimal) out.push_back(space.to_vars(m));
    return out;
}

ExplanationReport report(const AbductionInstance& inst, const OracleLimits& limits) {
    auto space = explanation_space(inst, limits);
    ExplanationReport rep;
    for (std::uint32_t m : space.expl) rep.explanations.push_back(space.to_vars(m));
    for (std::uint32_t m : space.minimal) rep.minimal.push_back(space.to_vars(m));

    std::uint32_t rel_mask = 0;
    std::uint32_t nec_mask = space.minimal.empty() ? 0 : ~std::uint32_t{0};
    for (std::uint32_t m : space.minimal) {
        rel_mask |= m;
        nec_mask &= m;
    }
    rep.relevant = space.to_vars(rel_mask);
    rep.necessary = space.to_vars(space.minimal.empty() ? 0 : nec_mask);
    rep.facets = space.to_vars(rel_mask & ~(space.minimal.empty() ? 0 : nec_mask));
    return rep;
}

bool is_facet_oracle(const FacetInstance& fi, const OracleLimits& limits) {
    auto rep = report(fi.base, limits);
    return std::binary_search(rep.facets.begin(), rep.facets.end(), fi.query);
}

bool is_relevant_oracle(const FacetInstance& fi, const OracleLimits& limits) {
    auto rep = report(fi.base, limits);
    return std::binary_search(rep.relevant.begin(), rep.relevant.end(), fi.query);
}

std::optional<DiversityWitness> max_diverse_pair(const AbductionInstance& inst,
                                                 const OracleLimits& limits) {
    auto space = explanation_space(inst, limits);
    if (space.expl.empty()) return std::nullopt;
    const std::uint64_t pairs =
        static_cast<std::uint64_t>(space.expl.size()) * space.expl.size();
    if (pairs > limits.max_pairs)
        fail(ErrorCode::BudgetExceeded, "too many explanation pairs to scan");

    std::uint32_t best_d = 0, best1 = space.expl[0], best2 = space.expl[0];
    bool found = false;
    for (std::uint32_t m1 : space.expl) {
        for (std::uint32_t m2 : space.expl) {
            std::uint32_t d = static_cast<std::uint32_t>(std::popcount(m1 ^ m2));
            if (!found || d > best_d) {
                found = true;
                best_d = d;
                best1 = m1;
                best2 = m2;
            }
        }
    }
    return DiversityWitness{space.to_vars(best1), space.to_vars(best2), best_d};
}

} // namespace fabd

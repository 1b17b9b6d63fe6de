#include "fabd/diverse.hpp"

#include <algorithm>
#include <map>

#include "fabd/error.hpp"
#include "fabd/polyfacet.hpp"

namespace fabd {

std::uint32_t distance(const std::vector<Var>& e1, const std::vector<Var>& e2) {
    std::uint32_t d = 0;
    std::size_t i = 0, j = 0;
    while (i < e1.size() || j < e2.size()) {
        if (j == e2.size() || (i < e1.size() && e1[i] < e2[j])) { ++d; ++i; }
        else if (i == e1.size() || e2[j] < e1[i]) { ++d; ++j; }
        else { ++i; ++j; }
    }
    return d;
}

DivAnswer div_oracle(const DivInstance& di, const OracleLimits& limits) {
    auto best = max_diverse_pair(di.base, limits);
    if (!best) return {false, std::nullopt};
    return {best->d >= di.k, best};
}

namespace {

struct PairBuild {
    std::vector<Var> e1, e2;

    DivAnswer finish(std::uint32_t k) {
        std::sort(e1.begin(), e1.end());
        e1.erase(std::unique(e1.begin(), e1.end()), e1.end());
        std::sort(e2.begin(), e2.end());
        e2.erase(std::unique(e2.begin(), e2.end()), e2.end());
        DiversityWitness w{e1, e2, distance(e1, e2)};
        return {w.d >= k, w};
    }
};

// Common on both constructions after unit propagation resolved the forced
// variables. Returns false in `ok` when no explanation exists.
struct PropagatedDiv {
    bool ok = false;
    Formula residual;
    std::vector<Var> hyps, mans;     // surviving after propagation
    std::vector<Var> forced_hyps;    // hypotheses forced true: free distance
};

std::optional<PropagatedDiv> propagate_div(const AbductionInstance& inst) {
    auto prop = unit_propagate(inst.kb, inst.vars.size());
    if (prop.status == PropStatus::Conflict) return std::nullopt;
    for (Var m : inst.mans)
        if (prop.forced[m] == 0) return std::nullopt;
    PropagatedDiv out;
    out.ok = true;
    out.residual = std::move(prop.residual);
    for (Var h : inst.hyps) {
        if (prop.forced[h] == 1) out.forced_hyps.push_back(h);
        else if (prop.forced[h] < 0) out.hyps.push_back(h);
        // hypotheses forced false can never join an explanation
    }
    for (Var m : inst.mans)
        if (prop.forced[m] < 0) out.mans.push_back(m);
    return out;
}

std::vector<Var> hyps_of_class(const std::vector<Var>& cls, const std::vector<Var>& hyps) {
    std::vector<Var> out;
    for (Var v : cls)
        if (std::binary_search(hyps.begin(), hyps.end(), v)) out.push_back(v);
    return out;
}

} // namespace

DivAnswer div_affine2(const DivInstance& di) {
    for (const Atom& a : di.base.kb.atoms()) {
        const Relation& r = *a.rel;
        if (r.always_true() || r.always_false()) continue;
        if (!(r.kind() == RelKind::Unit || r.kind() == RelKind::Equality ||
              (r.kind() == RelKind::Xor && r.arity() <= 2)))
            fail(ErrorCode::WrongFragment, "atom outside the 2-affine fragment");
    }

    auto prop = propagate_div(di.base);
    if (!prop) return {false, std::nullopt};

    ClusterStructure cs;
    try {
        cs = build_clusters(prop->residual, di.base.vars.size());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::UnsatStructure) return {false, std::nullopt};
        throw;
    }
    // Singletons for surviving variables the residual does not mention.
    auto extend = [&](Var v) {
        if (cs.class_of[v] >= 0) return;
        cs.class_of[v] = static_cast<int>(cs.classes.size());
        cs.classes.push_back({v});
        cs.partner.push_back(-1);
    };
    for (Var v : prop->hyps) extend(v);
    for (Var v : prop->mans) extend(v);

    std::vector<int> man_class;
    for (Var m : prop->mans) man_class.push_back(cs.class_of[m]);
    std::sort(man_class.begin(), man_class.end());
    man_class.erase(std::unique(man_class.begin(), man_class.end()), man_class.end());
    auto is_man_class = [&](int c) {
        return std::binary_search(man_class.begin(), man_class.end(), c);
    };

    PairBuild pair;
    for (int c : man_class) {
        int partner = cs.partner[static_cast<std::size_t>(c)];
        if (partner >= 0 && is_man_class(partner)) return {false, std::nullopt};
        auto reps = hyps_of_class(cs.classes[static_cast<std::size_t>(c)], prop->hyps);
        if (reps.empty()) return {false, std::nullopt};
        // One representative against the remaining ones.
        pair.e1.push_back(reps[0]);
        if (reps.size() == 1) pair.e2.push_back(reps[0]);
        else pair.e2.insert(pair.e2.end(), reps.begin() + 1, reps.end());
    }

    // Leftover hypotheses in clusters not touching any manifestation: the
    // larger side joins the first explanation, the opposite side the
    // second.
    std::vector<std::uint8_t> handled(cs.classes.size(), 0);
    for (int c : man_class) {
        handled[static_cast<std::size_t>(c)] = 1;
        int partner = cs.partner[static_cast<std::size_t>(c)];
        if (partner >= 0) handled[static_cast<std::size_t>(partner)] = 1;
    }
    for (std::size_t c = 0; c < cs.classes.size(); ++c) {
        if (handled[c]) continue;
        handled[c] = 1;
        auto side1 = hyps_of_class(cs.classes[c], prop->hyps);
        std::vector<Var> side2;
        int partner = cs.partner[c];
        if (partner >= 0) {
            handled[static_cast<std::size_t>(partner)] = 1;
            side2 = hyps_of_class(cs.classes[static_cast<std::size_t>(partner)], prop->hyps);
        }
        if (side1.size() < side2.size()) std::swap(side1, side2);
        pair.e1.insert(pair.e1.end(), side1.begin(), side1.end());
        pair.e2.insert(pair.e2.end(), side2.begin(), side2.end());
    }

    // Unit-forced hypotheses hold in every model; including them on one
    // side only widens the pair.
    pair.e1.insert(pair.e1.end(), prop->forced_hyps.begin(), prop->forced_hyps.end());

    return pair.finish(di.k);
}

DivAnswer div_ep(const DivInstance& di) {
    for (const Atom& a : di.base.kb.atoms()) {
        const Relation& r = *a.rel;
        if (r.always_true() || r.always_false()) continue;
        if (!(r.kind() == RelKind::Unit || r.kind() == RelKind::Equality ||
              (r.kind() == RelKind::Clause && r.negative_count() == 0)))
            fail(ErrorCode::WrongFragment, "atom outside the essentially positive fragment");
    }

    auto prop = propagate_div(di.base);
    if (!prop) return {false, std::nullopt};

    Formula equalities;
    std::vector<const Atom*> positives;
    for (const Atom& a : prop->residual.atoms()) {
        if (a.rel->always_true()) continue;
        if (a.rel->kind() == RelKind::Equality) equalities.add(a.rel, a.args);
        else positives.push_back(&a);
    }

    ClusterStructure cs = build_clusters(equalities, di.base.vars.size());
    auto extend = [&](Var v) {
        if (cs.class_of[v] >= 0) return;
        cs.class_of[v] = static_cast<int>(cs.classes.size());
        cs.classes.push_back({v});
        cs.partner.push_back(-1);
    };
    for (const Atom* a : positives)
        for (Var v : a->args) extend(v);
    for (Var v : prop->hyps) extend(v);
    for (Var v : prop->mans) extend(v);

    // A positive clause entirely inside one class forces the class true,
    // entailing its members for free.
    std::vector<std::uint8_t> forced_class(cs.classes.size(), 0);
    for (const Atom* a : positives) {
        int c = cs.class_of[a->args[0]];
        bool same = std::all_of(a->args.begin(), a->args.end(),
                                [&](Var v) { return cs.class_of[v] == c; });
        if (same) forced_class[static_cast<std::size_t>(c)] = 1;
    }

    std::vector<int> man_class;
    for (Var m : prop->mans) {
        int c = cs.class_of[m];
        if (!forced_class[static_cast<std::size_t>(c)]) man_class.push_back(c);
    }
    std::sort(man_class.begin(), man_class.end());
    man_class.erase(std::unique(man_class.begin(), man_class.end()), man_class.end());

    PairBuild pair;
    std::vector<std::uint8_t> constrained(cs.classes.size(), 0);
    for (int c : man_class) {
        constrained[static_cast<std::size_t>(c)] = 1;
        auto reps = hyps_of_class(cs.classes[static_cast<std::size_t>(c)], prop->hyps);
        if (reps.empty()) return {false, std::nullopt};
        pair.e1.push_back(reps[0]);
        if (reps.size() == 1) pair.e2.push_back(reps[0]);
        else pair.e2.insert(pair.e2.end(), reps.begin() + 1, reps.end());
    }

    // Every other hypothesis is free: it joins the first explanation only.
    for (Var h : prop->hyps) {
        int c = cs.class_of[h];
        if (!constrained[static_cast<std::size_t>(c)]) pair.e1.push_back(h);
    }
    pair.e1.insert(pair.e1.end(), prop->forced_hyps.begin(), prop->forced_hyps.end());

    return pair.finish(di.k);
}

} // namespace fabd

#include "fabd/polyfacet.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "fabd/error.hpp"

namespace fabd {

const char* fragment_name(Fragment f) {
    switch (f) {
        case Fragment::Implication: return "implication";
        case Fragment::DualHorn: return "dualhorn";
        case Fragment::Affine2: return "affine2";
        case Fragment::En: return "en";
    }
    return "?";
}

std::optional<Fragment> detect_fragment(const LanguageProfile& p) {
    if (p.all_implication) return Fragment::Implication;
    if (p.dualhorn_clausal()) return Fragment::DualHorn;
    if (p.affine2_form) return Fragment::Affine2;
    if (p.en_form) return Fragment::En;
    return std::nullopt;
}

namespace {

bool atom_in_fragment(const Atom& a, Fragment frag) {
    const Relation& r = *a.rel;
    if (r.always_true() || r.always_false()) return true;
    switch (frag) {
        case Fragment::Implication:
            return r.kind() == RelKind::Clause && r.arity() == 2 && r.positive_count() == 1;
        case Fragment::DualHorn:
            return r.kind() == RelKind::Unit ||
                   (r.kind() == RelKind::Clause && r.negative_count() <= 1);
        case Fragment::Affine2:
            return r.kind() == RelKind::Unit || r.kind() == RelKind::Equality ||
                   (r.kind() == RelKind::Xor && r.arity() <= 2);
        case Fragment::En:
            return r.kind() == RelKind::Unit || r.kind() == RelKind::Equality ||
                   (r.kind() == RelKind::Clause && r.positive_count() == 0);
    }
    return false;
}

void require_fragment(const Formula& f, Fragment frag) {
    for (const Atom& a : f.atoms())
        if (!atom_in_fragment(a, frag))
            fail(ErrorCode::WrongFragment,
                 std::string("atom outside the ") + fragment_name(frag) + " fragment");
}

std::vector<Var> minus_assigned(const std::vector<Var>& vs, const Assignment& forced) {
    std::vector<Var> out;
    for (Var v : vs)
        if (forced[v] < 0) out.push_back(v);
    return out;
}

// Word-parallel subset of the hypothesis list.
class HypSet {
public:
    explicit HypSet(std::size_t n = 0) : n_(n), words_((n + 63) / 64, 0) {}
    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
    bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1; }
    bool any() const {
        return std::any_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w != 0; });
    }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    // this \ other nonempty
    bool escapes(const HypSet& other) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~other.words_[i]) return true;
        return false;
    }
    bool any_except(std::size_t i) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            if (w == i / 64) bits &= ~(std::uint64_t{1} << (i % 64));
            if (bits) return true;
        }
        return false;
    }

private:
    std::size_t n_;
    std::vector<std::uint64_t> words_;
};

// Assumption propagation over a unit-free clause formula with rollback,
// used to tabulate single-hypothesis entailment per manifestation.
class ClausePropagator {
public:
    ClausePropagator(const Formula& f, std::size_t n_vars) : val_(n_vars, -1), occ_(n_vars) {
        for (const Atom& a : f.atoms()) {
            if (a.rel->always_true()) continue;
            if (a.rel->kind() != RelKind::Clause)
                fail(ErrorCode::Internal, "clause propagator fed a non-clause atom");
            std::uint32_t cid = static_cast<std::uint32_t>(clauses_.size());
            Clause c;
            c.begin = static_cast<std::uint32_t>(lits_.size());
            for (std::size_t i = 0; i < a.args.size(); ++i) {
                lits_.push_back({a.args[i], a.rel->signs()[i]});
                occ_[a.args[i]].push_back(cid);
            }
            c.end = static_cast<std::uint32_t>(lits_.size());
            c.open = c.end - c.begin;
            clauses_.push_back(c);
        }
    }

    // Assigns v := b and propagates to fixpoint; false on conflict. State
    // is rolled back with rollback() either way.
    bool assume(Var v, bool b) {
        queue_.clear();
        if (!push(v, b)) return false;
        std::size_t qi = 0;
        while (qi < queue_.size()) {
            Var u = queue_[qi++];
            bool uval = val_[u] == 1;
            for (std::uint32_t cid : occ_[u]) {
                Clause& c = clauses_[cid];
                if (c.satisfied) continue;
                bool sign = lit_sign(c, u);
                if (sign == uval) {
                    c.satisfied = true;
                    log_.push_back(Event{EventKind::Satisfied, cid});
                    continue;
                }
                --c.open;
                log_.push_back(Event{EventKind::Shrunk, cid});
                if (c.open == 0) return false;
                if (c.open == 1) {
                    auto [w, ws] = sole_open(c);
                    if (!push(w, ws)) return false;
                }
            }
        }
        return true;
    }

    void rollback() {
        for (auto it = log_.rbegin(); it != log_.rend(); ++it) {
            switch (it->kind) {
                case EventKind::Assigned: val_[it->payload] = -1; break;
                case EventKind::Satisfied: clauses_[it->payload].satisfied = false; break;
                case EventKind::Shrunk: ++clauses_[it->payload].open; break;
            }
        }
        log_.clear();
        queue_.clear();
    }

    std::int8_t value(Var v) const { return val_[v]; }

private:
    struct Lit {
        Var v;
        bool sign;
    };
    struct Clause {
        std::uint32_t begin = 0, end = 0, open = 0;
        bool satisfied = false;
    };
    enum class EventKind { Assigned, Satisfied, Shrunk };
    struct Event {
        EventKind kind;
        std::uint32_t payload;
    };

    bool push(Var v, bool b) {
        if (val_[v] >= 0) return val_[v] == (b ? 1 : 0);
        val_[v] = b ? 1 : 0;
        log_.push_back(Event{EventKind::Assigned, v});
        queue_.push_back(v);
        return true;
    }

    bool lit_sign(const Clause& c, Var v) const {
        for (std::uint32_t i = c.begin; i < c.end; ++i)
            if (lits_[i].v == v) return lits_[i].sign;
        fail(ErrorCode::Internal, "literal lookup miss");
    }

    std::pair<Var, bool> sole_open(const Clause& c) const {
        for (std::uint32_t i = c.begin; i < c.end; ++i) {
            const Lit& l = lits_[i];
            if (val_[l.v] < 0) return {l.v, l.sign};
        }
        fail(ErrorCode::Internal, "open-literal lookup miss");
    }

    std::vector<Lit> lits_;
    std::vector<Clause> clauses_;
    std::vector<std::int8_t> val_;
    std::vector<std::vector<std::uint32_t>> occ_;
    std::vector<Event> log_;
    std::vector<Var> queue_;
};

} // namespace

Preprocessed preprocess_units(const FacetInstance& fi) {
    const AbductionInstance& inst = fi.base;
    auto prop = unit_propagate(inst.kb, inst.vars.size());

    Preprocessed out;
    out.forced = prop.forced;
    if (prop.status == PropStatus::Conflict) {
        out.resolved = true;
        out.answer = false; // no explanations can exist
        return out;
    }
    for (Var m : inst.mans) {
        if (prop.forced[m] == 0) {
            out.resolved = true;
            out.answer = false; // the manifestation is refuted outright
            return out;
        }
    }
    if (prop.forced[fi.query] >= 0) {
        out.resolved = true;
        out.answer = false; // a forced variable cannot be a facet
        return out;
    }
    out.reduced.base.vars = inst.vars;
    out.reduced.base.kb = std::move(prop.residual);
    out.reduced.base.hyps = minus_assigned(inst.hyps, prop.forced);
    out.reduced.base.mans = minus_assigned(inst.mans, prop.forced);
    out.reduced.query = fi.query;
    return out;
}

ImpAnalysis analyze_implications(const AbductionInstance& inst, Var x, const EngineConfig& cfg) {
    ImpAnalysis out;
    const std::size_t n = inst.vars.size();
    for (Var m : inst.mans) {
        std::vector<Var> hs;
        for (Var h : inst.hyps) {
            Formula g = inst.kb;
            g.add(Relation::unit(true), {h});
            if (entails(g, n, m, EngineHint::Auto, cfg)) hs.push_back(h);
        }
        out.h_map.emplace_back(m, std::move(hs));
    }
    {
        Formula g = inst.kb;
        g.add(Relation::unit(true), {x});
        for (Var m : inst.mans)
            if (entails(g, n, m, EngineHint::Auto, cfg)) out.m_x.push_back(m);
    }
    return out;
}

namespace {

bool entails_all(const Formula& kb, std::size_t n, const std::vector<Var>& on,
                 const std::vector<Var>& targets, const EngineConfig& cfg) {
    Formula g = kb;
    for (Var v : on) g.add(Relation::unit(true), {v});
    return std::all_of(targets.begin(), targets.end(),
                       [&](Var m) { return entails(g, n, m, EngineHint::Auto, cfg); });
}

// The implication-fragment scan. Relevance holds when some manifestation
// explained by the query admits a maximal candidate avoiding it; the facet
// answer additionally needs an explanation without the query.
bool imp_scan(const FacetInstance& fi, bool facet_mode, const EngineConfig& cfg) {
    const AbductionInstance& inst = fi.base;
    const std::size_t n = inst.vars.size();
    ImpAnalysis an = analyze_implications(inst, fi.query, cfg);

    std::vector<Var> m_rest; // M minus M_x
    for (Var m : inst.mans)
        if (!std::binary_search(an.m_x.begin(), an.m_x.end(), m)) m_rest.push_back(m);

    bool candidate_found = false;
    for (Var m : an.m_x) {
        const auto& hm = std::find_if(an.h_map.begin(), an.h_map.end(),
                                      [&](const auto& e) { return e.first == m; })
                             ->second;
        std::vector<Var> avoid; // H minus h(m)
        std::set_difference(inst.hyps.begin(), inst.hyps.end(), hm.begin(), hm.end(),
                            std::back_inserter(avoid));
        if (entails_all(inst.kb, n, avoid, m_rest, cfg)) candidate_found = true;
    }
    if (!candidate_found) return false; // the query cannot be made relevant
    if (!facet_mode) return true;

    // Is there an explanation without the query?
    std::vector<Var> without;
    for (Var h : inst.hyps)
        if (h != fi.query) without.push_back(h);
    return entails_all(inst.kb, n, without, inst.mans, cfg);
}

// DualHorn core on the unit-free residual: one refutation propagation per
// manifestation tabulates which hypotheses entail it singly (OR-closure
// makes single hypotheses sufficient), then the implication scan becomes a
// set computation. Manifestations entailed by the residual alone cannot
// witness relevance and are skipped in the scan.
bool dualhorn_scan(const FacetInstance& reduced, bool facet_mode) {
    const AbductionInstance& inst = reduced.base;
    const std::size_t n_mans = inst.mans.size();
    const std::size_t n_hyps = inst.hyps.size();
    if (n_mans == 0) return false;

    std::vector<std::uint32_t> hyp_pos(inst.vars.size(), UINT32_MAX);
    for (std::size_t i = 0; i < n_hyps; ++i) hyp_pos[inst.hyps[i]] = static_cast<std::uint32_t>(i);

    ClausePropagator prop(inst.kb, inst.vars.size());
    std::vector<HypSet> rows;
    std::vector<std::uint8_t> free_entailed(n_mans, 0);
    rows.reserve(n_mans);
    for (std::size_t i = 0; i < n_mans; ++i) {
        HypSet row(n_hyps);
        if (!prop.assume(inst.mans[i], false)) {
            free_entailed[i] = 1;
        } else {
            for (std::size_t j = 0; j < n_hyps; ++j)
                if (prop.value(inst.hyps[j]) == 0) row.set(j);
        }
        prop.rollback();
        rows.push_back(std::move(row));
    }

    const std::uint32_t xp = hyp_pos[reduced.query];
    if (xp == UINT32_MAX) fail(ErrorCode::Internal, "query missing from reduced hypotheses");

    std::vector<std::uint8_t> in_mx(n_mans, 0);
    for (std::size_t i = 0; i < n_mans; ++i)
        in_mx[i] = free_entailed[i] || rows[i].test(xp);

    bool relevant = false;
    for (std::size_t i = 0; i < n_mans && !relevant; ++i) {
        if (!in_mx[i] || free_entailed[i]) continue;
        bool ok = true;
        for (std::size_t j = 0; j < n_mans && ok; ++j) {
            if (in_mx[j]) continue;
            // H \ h(m_i) explains m_j iff some hypothesis explains m_j
            // without explaining m_i.
            if (!rows[j].escapes(rows[i])) ok = false;
        }
        if (ok) relevant = true;
    }
    if (!relevant) return false;
    if (!facet_mode) return true;

    for (std::size_t j = 0; j < n_mans; ++j) {
        if (free_entailed[j]) continue;
        if (!rows[j].any_except(xp)) return false; // only the query explains m_j
    }
    return true;
}

} // namespace

bool isfacet_imp(const FacetInstance& fi, const EngineConfig& cfg) {
    require_fragment(fi.base.kb, Fragment::Implication);
    return imp_scan(fi, true, cfg);
}

bool isfacet_dualhorn(const FacetInstance& fi, const EngineConfig& cfg) {
    (void)cfg;
    require_fragment(fi.base.kb, Fragment::DualHorn);
    Preprocessed pre = preprocess_units(fi);
    if (pre.resolved) return pre.answer;
    return dualhorn_scan(pre.reduced, true);
}

ClusterStructure build_clusters(const Formula& f, std::size_t n_vars) {
    // Weighted union-find: parity records whether a variable is equal or
    // opposite to its root. Paths compress on every find.
    std::vector<std::int32_t> parent(n_vars, -1);
    std::vector<std::uint8_t> parity(n_vars, 0);
    std::vector<Var> path;

    auto find = [&](Var v) -> std::pair<Var, bool> {
        path.clear();
        Var root = v;
        bool p = false;
        while (parent[root] >= 0) {
            path.push_back(root);
            p ^= parity[root] != 0;
            root = static_cast<Var>(parent[root]);
        }
        bool acc = false;
        for (std::size_t i = path.size(); i-- > 0;) {
            acc = acc != (parity[path[i]] != 0);
            parent[path[i]] = static_cast<std::int32_t>(root);
            parity[path[i]] = acc ? 1 : 0;
        }
        return {root, p};
    };

    std::vector<Var> used;
    auto touch = [&](Var v) { used.push_back(v); };

    for (const Atom& a : f.atoms()) {
        const Relation& r = *a.rel;
        if (r.always_true()) continue;
        if (r.always_false())
            fail(ErrorCode::UnsatStructure, "always-false atom in cluster construction");
        bool opposite;
        if (r.kind() == RelKind::Equality) opposite = false;
        else if (r.kind() == RelKind::Xor && r.arity() == 2) opposite = r.rhs();
        else fail(ErrorCode::WrongFragment, "cluster construction expects equalities and binary xors");
        Var a0 = a.args[0], a1 = a.args[1];
        touch(a0);
        touch(a1);
        auto [r0, p0] = find(a0);
        auto [r1, p1] = find(a1);
        if (r0 == r1) {
            if ((p0 != p1) != opposite)
                fail(ErrorCode::UnsatStructure, "variable class forced opposite to itself");
            continue;
        }
        parent[r1] = static_cast<std::int32_t>(r0);
        parity[r1] = ((p0 != p1) != opposite) ? 1 : 0;
    }

    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());

    ClusterStructure cs;
    cs.class_of.assign(n_vars, -1);
    std::map<std::pair<Var, bool>, int> class_index;
    for (Var v : used) {
        auto key = find(v);
        auto it = class_index.find(key);
        int idx;
        if (it == class_index.end()) {
            idx = static_cast<int>(cs.classes.size());
            class_index.emplace(key, idx);
            cs.classes.emplace_back();
        } else {
            idx = it->second;
        }
        cs.class_of[v] = idx;
        cs.classes[static_cast<std::size_t>(idx)].push_back(v);
    }
    cs.partner.assign(cs.classes.size(), -1);
    for (const auto& [key, idx] : class_index) {
        auto other = class_index.find({key.first, !key.second});
        if (other != class_index.end()) {
            cs.partner[static_cast<std::size_t>(idx)] = other->second;
            if (idx < other->second) cs.pairs.emplace_back(idx, other->second);
        }
    }
    return cs;
}

namespace {

// Shared class view for the 2-affine and essentially negative algorithms:
// clusters over the residual plus singleton classes for untouched
// variables of interest.
struct ClassView {
    ClusterStructure cs;
    std::size_t real_classes = 0;

    int cls(Var v) const { return cs.class_of[v]; }

    // Adds singletons for any of `extra` not covered by the residual.
    void extend(const std::vector<Var>& extra) {
        for (Var v : extra) {
            if (cs.class_of[v] >= 0) continue;
            cs.class_of[v] = static_cast<int>(cs.classes.size());
            cs.classes.push_back({v});
            cs.partner.push_back(-1);
        }
    }
};

std::optional<ClassView> class_view(const Formula& residual, std::size_t n_vars,
                                    const std::vector<Var>& extra) {
    ClassView view;
    try {
        view.cs = build_clusters(residual, n_vars);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::UnsatStructure) return std::nullopt;
        throw;
    }
    view.real_classes = view.cs.classes.size();
    view.extend(extra);
    return view;
}

std::vector<Var> class_hyps(const std::vector<Var>& cls, const AbductionInstance& inst) {
    std::vector<Var> out;
    for (Var v : cls)
        if (inst.is_hyp(v)) out.push_back(v);
    return out;
}

bool affine2_scan(const FacetInstance& reduced, bool facet_mode) {
    const AbductionInstance& inst = reduced.base;
    std::vector<Var> extra = inst.hyps;
    extra.insert(extra.end(), inst.mans.begin(), inst.mans.end());
    extra.push_back(reduced.query);
    auto view = class_view(inst.kb, inst.vars.size(), extra);
    if (!view) return false; // contradictory clusters, no models

    // Manifestation classes.
    std::vector<int> man_class;
    for (Var m : inst.mans) man_class.push_back(view->cls(m));
    std::sort(man_class.begin(), man_class.end());
    man_class.erase(std::unique(man_class.begin(), man_class.end()), man_class.end());

    auto is_man_class = [&](int c) {
        return std::binary_search(man_class.begin(), man_class.end(), c);
    };

    for (int c : man_class) {
        // Two manifestation classes on opposite sides of one cluster can
        // never be true together.
        int partner = view->cs.partner[static_cast<std::size_t>(c)];
        if (partner >= 0 && is_man_class(partner)) return false;
        if (class_hyps(view->cs.classes[static_cast<std::size_t>(c)], inst).empty())
            return false; // nothing can switch this class on
    }

    int xc = view->cls(reduced.query);
    if (!is_man_class(xc)) return false; // the query cannot be made relevant
    if (!facet_mode) return true;
    auto hyps = class_hyps(view->cs.classes[static_cast<std::size_t>(xc)], inst);
    return hyps.size() >= 2; // another representative makes the query dispensable
}

bool en_scan(const FacetInstance& reduced, bool facet_mode) {
    const AbductionInstance& inst = reduced.base;

    Formula equalities;
    std::vector<const Atom*> negatives;
    for (const Atom& a : inst.kb.atoms()) {
        if (a.rel->always_true()) continue;
        if (a.rel->kind() == RelKind::Equality) equalities.add(a.rel, a.args);
        else negatives.push_back(&a);
    }

    std::vector<Var> extra = inst.hyps;
    extra.insert(extra.end(), inst.mans.begin(), inst.mans.end());
    extra.push_back(reduced.query);
    auto view = class_view(equalities, inst.vars.size(), extra);
    if (!view) fail(ErrorCode::Internal, "equalities cannot be contradictory");

    std::vector<int> man_class;
    for (Var m : inst.mans) man_class.push_back(view->cls(m));
    std::sort(man_class.begin(), man_class.end());
    man_class.erase(std::unique(man_class.begin(), man_class.end()), man_class.end());

    for (int c : man_class)
        if (class_hyps(view->cs.classes[static_cast<std::size_t>(c)], inst).empty())
            return false; // this manifestation cannot be entailed

    // Setting every manifestation class true must leave each negative
    // clause a variable to falsify.
    for (const Atom* a : negatives) {
        bool all_forced_true = true;
        for (Var v : a->args) {
            int c = view->cls(v);
            if (c < 0 || !std::binary_search(man_class.begin(), man_class.end(), c)) {
                all_forced_true = false;
                break;
            }
        }
        if (all_forced_true) return false; // no explanations at all
    }

    int xc = view->cls(reduced.query);
    if (!std::binary_search(man_class.begin(), man_class.end(), xc))
        return false; // the query explains no manifestation
    if (!facet_mode) return true;
    auto hyps = class_hyps(view->cs.classes[static_cast<std::size_t>(xc)], inst);
    return hyps.size() >= 2;
}

} // namespace

bool isfacet_affine2(const FacetInstance& fi, const EngineConfig& cfg) {
    (void)cfg;
    require_fragment(fi.base.kb, Fragment::Affine2);
    Preprocessed pre = preprocess_units(fi);
    if (pre.resolved) return pre.answer;
    return affine2_scan(pre.reduced, true);
}

bool isfacet_en(const FacetInstance& fi, const EngineConfig& cfg) {
    (void)cfg;
    require_fragment(fi.base.kb, Fragment::En);
    Preprocessed pre = preprocess_units(fi);
    if (pre.resolved) return pre.answer;
    return en_scan(pre.reduced, true);
}

bool isfacet_poly(const FacetInstance& fi, Fragment fragment, const EngineConfig& cfg) {
    switch (fragment) {
        case Fragment::Implication: return isfacet_imp(fi, cfg);
        case Fragment::DualHorn: return isfacet_dualhorn(fi, cfg);
        case Fragment::Affine2: return isfacet_affine2(fi, cfg);
        case Fragment::En: return isfacet_en(fi, cfg);
    }
    fail(ErrorCode::Internal, "unknown fragment");
}

bool relevance_poly(const FacetInstance& fi, Fragment fragment, const EngineConfig& cfg) {
    switch (fragment) {
        case Fragment::Implication:
            require_fragment(fi.base.kb, Fragment::Implication);
            return imp_scan(fi, false, cfg);
        case Fragment::DualHorn: {
            require_fragment(fi.base.kb, Fragment::DualHorn);
            Preprocessed pre = preprocess_units(fi);
            if (pre.resolved) return pre.answer;
            return dualhorn_scan(pre.reduced, false);
        }
        case Fragment::Affine2: {
            require_fragment(fi.base.kb, Fragment::Affine2);
            Preprocessed pre = preprocess_units(fi);
            if (pre.resolved) return pre.answer;
            return affine2_scan(pre.reduced, false);
        }
        case Fragment::En: {
            require_fragment(fi.base.kb, Fragment::En);
            Preprocessed pre = preprocess_units(fi);
            if (pre.resolved) return pre.answer;
            return en_scan(pre.reduced, false);
        }
    }
    fail(ErrorCode::Internal, "unknown fragment");
}

} // namespace fabd

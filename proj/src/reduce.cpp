#include "fabd/reduce.hpp"

#include <algorithm>

#include "fabd/error.hpp"
#include "fabd/lattice.hpp"

namespace fabd {

std::vector<TupleMask> EfppDefinition::projected_tuples() const {
    const std::size_t n = free_names.size() + exist_names.size();
    if (n > 22) fail(ErrorCode::InvalidDefinition, "definition body too wide to validate");
    std::vector<TupleMask> out;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        bool ok = true;
        for (const BodyAtom& atom : body) {
            TupleMask t = 0;
            for (std::size_t i = 0; i < atom.locals.size(); ++i)
                if ((mask >> atom.locals[i]) & 1) t |= TupleMask{1} << i;
            if (!atom.rel->contains(t)) { ok = false; break; }
        }
        if (ok) out.push_back(static_cast<TupleMask>(mask & ((std::uint64_t{1} << free_names.size()) - 1)));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void EfppDefinition::validate_against(const Relation& target_rel) const {
    if (target_rel.arity() != arity())
        fail(ErrorCode::InvalidDefinition,
             "definition arity differs from relation '" + target + "'");
    if (projected_tuples() != target_rel.tuples())
        fail(ErrorCode::InvalidDefinition,
             "definition body does not define relation '" + target + "'");
}

void DefinitionSet::add(EfppDefinition def) {
    auto declared_it = declared.find(def.target);
    if (declared_it != declared.end()) def.validate_against(*declared_it->second);
    if (by_target.count(def.target))
        fail(ErrorCode::InvalidDefinition, "duplicate definition for '" + def.target + "'");
    by_target.emplace(def.target, std::move(def));
}

const EfppDefinition* DefinitionSet::find(const std::string& target) const {
    auto it = by_target.find(target);
    return it == by_target.end() ? nullptr : &it->second;
}

namespace {

void insert_sorted(std::vector<Var>& vs, Var v) {
    auto it = std::lower_bound(vs.begin(), vs.end(), v);
    if (it == vs.end() || *it != v) vs.insert(it, v);
}

bool is_builtin_form(const Relation& r) {
    return r.kind() != RelKind::Table || r.always_true() || r.always_false();
}

// Equality atoms are only justified when the language carries or can
// express equality; outside the essentially negative / positive forms it
// always can.
void check_equality_available(const AbductionInstance& inst, const DefinitionSet* defs) {
    bool has_eq = std::any_of(inst.kb.atoms().begin(), inst.kb.atoms().end(), [](const Atom& a) {
        return a.rel->kind() == RelKind::Equality;
    });
    if (has_eq) return;
    if (defs && defs->find("eq")) return;
    LanguageProfile p = profile(inst.kb);
    if (p.en_form || p.ep_form)
        fail(ErrorCode::NoEquality,
             "the language cannot express equality and no definition was supplied");
}

struct FreshTriple {
    Var x, y, m;
};

// Appends (x = m) and (y = m) over fresh x, y, m.
FreshTriple add_equality_gadget(AbductionInstance& inst) {
    FreshTriple f{inst.vars.fresh("_fx"), inst.vars.fresh("_fy"), inst.vars.fresh("_fm")};
    inst.kb.add(Relation::equality(), {f.x, f.m});
    inst.kb.add(Relation::equality(), {f.y, f.m});
    insert_sorted(inst.hyps, f.x);
    insert_sorted(inst.hyps, f.y);
    insert_sorted(inst.mans, f.m);
    return f;
}

std::vector<Var> apply_subst(const std::vector<Var>& vs, const std::vector<Var>& subst) {
    std::vector<Var> out;
    for (Var v : vs) out.push_back(subst[v]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

ParsedInstance efpp_substitute(const ParsedInstance& inst, const DefinitionSet& defs) {
    ParsedInstance out;
    out.base.vars = inst.base.vars;
    out.base.hyps = inst.base.hyps;
    out.base.mans = inst.base.mans;
    out.query = inst.query;
    out.k = inst.k;

    for (const Atom& atom : inst.base.kb.atoms()) {
        const EfppDefinition* def = defs.find(atom.rel->name());
        if (!def) {
            if (!is_builtin_form(*atom.rel))
                fail(ErrorCode::MissingDefinition,
                     "no definition for relation '" + atom.rel->name() + "'");
            out.base.kb.add(atom.rel, atom.args);
            continue;
        }
        def->validate_against(*atom.rel);
        // Local index -> instance variable; existentials are fresh per atom
        // and stay outside the hypotheses.
        std::vector<Var> map(def->free_names.size() + def->exist_names.size());
        for (std::size_t i = 0; i < def->free_names.size(); ++i) map[i] = atom.args[i];
        for (std::size_t j = 0; j < def->exist_names.size(); ++j)
            map[def->free_names.size() + j] = out.base.vars.fresh(def->exist_names[j]);
        for (const auto& batom : def->body) {
            std::vector<Var> args;
            args.reserve(batom.locals.size());
            for (std::uint32_t l : batom.locals) args.push_back(map[l]);
            out.base.kb.add(batom.rel, std::move(args));
        }
    }
    return out;
}

FacetInstance abd_to_isfacet(const AbductionInstance& inst, const DefinitionSet* defs) {
    check_equality_available(inst, defs);
    FacetInstance out;
    out.base = inst;
    auto fresh = add_equality_gadget(out.base);
    out.query = fresh.x;
    return out;
}

DivInstance abd_to_div(const AbductionInstance& inst, const DefinitionSet* defs) {
    check_equality_available(inst, defs);
    DivInstance out;
    out.base = inst;
    add_equality_gadget(out.base);
    out.k = 2;
    return out;
}

ElimPosUnitsResult elim_pos_units(const FacetInstance& fi) {
    std::vector<Var> unit_vars;
    for (const Atom& a : fi.base.kb.atoms())
        if (a.rel->kind() == RelKind::Unit && a.rel->rhs()) unit_vars.push_back(a.args[0]);
    std::sort(unit_vars.begin(), unit_vars.end());
    unit_vars.erase(std::unique(unit_vars.begin(), unit_vars.end()), unit_vars.end());

    if (unit_vars.empty()) return {false, fi};
    if (std::binary_search(unit_vars.begin(), unit_vars.end(), fi.query))
        return {true, fi}; // forced-true query: never a facet

    ElimPosUnitsResult res;
    res.out.base.vars = fi.base.vars;
    Var t = res.out.base.vars.fresh("_t");

    std::vector<Var> subst(res.out.base.vars.size());
    for (Var v = 0; v < subst.size(); ++v)
        subst[v] = std::binary_search(unit_vars.begin(), unit_vars.end(), v) ? t : v;

    for (const Atom& a : fi.base.kb.atoms()) {
        if (a.rel->kind() == RelKind::Unit && a.rel->rhs() &&
            std::binary_search(unit_vars.begin(), unit_vars.end(), a.args[0]))
            continue; // the simulated unit itself
        std::vector<Var> args;
        args.reserve(a.args.size());
        for (Var v : a.args) args.push_back(subst[v]);
        res.out.base.kb.add(a.rel, std::move(args));
    }
    res.out.base.hyps = apply_subst(fi.base.hyps, subst);
    res.out.base.mans = apply_subst(fi.base.mans, subst);
    insert_sorted(res.out.base.hyps, t);
    insert_sorted(res.out.base.mans, t);
    res.out.query = fi.query;
    return res;
}

FacetInstance neg_unit_to_facet(const AbductionInstance& inst) {
    std::vector<Var> neg_vars;
    for (const Atom& a : inst.kb.atoms())
        if (a.rel->kind() == RelKind::Unit && !a.rel->rhs()) neg_vars.push_back(a.args[0]);
    std::sort(neg_vars.begin(), neg_vars.end());
    neg_vars.erase(std::unique(neg_vars.begin(), neg_vars.end()), neg_vars.end());
    if (neg_vars.empty())
        fail(ErrorCode::NoNegUnit, "the construction needs a negative unit clause");

    FacetInstance out;
    out.base.vars = inst.vars;
    const Var z = neg_vars[0];
    std::vector<Var> subst(inst.vars.size());
    for (Var v = 0; v < subst.size(); ++v)
        subst[v] = std::binary_search(neg_vars.begin(), neg_vars.end(), v) ? z : v;

    // phi: everything except the identified negative units; must be 1-valid.
    Formula phi;
    for (const Atom& a : inst.kb.atoms()) {
        if (a.rel->kind() == RelKind::Unit && !a.rel->rhs()) continue;
        std::vector<Var> args;
        for (Var v : a.args) args.push_back(subst[v]);
        phi.add(a.rel, std::move(args));
    }
    for (const Atom& a : phi.atoms()) {
        const TupleMask ones = static_cast<TupleMask>((std::uint64_t{1} << a.rel->arity()) - 1);
        if (!a.rel->contains(ones))
            fail(ErrorCode::NotOneValid, "core formula is not 1-valid");
    }

    out.base.hyps = apply_subst(inst.hyps, subst);
    out.base.mans = apply_subst(inst.mans, subst);

    const Var x = out.base.vars.fresh("_fx");
    const Var y = out.base.vars.fresh("_fy");
    const Var m = out.base.vars.fresh("_fm");

    std::vector<Var> scope = phi.vars();
    for (Var v : out.base.hyps) insert_sorted(scope, v);
    for (Var v : out.base.mans) insert_sorted(scope, v);
    insert_sorted(scope, x);
    insert_sorted(scope, y);
    insert_sorted(scope, m);

    out.base.kb = std::move(phi);
    for (Var v : scope)
        if (v != z) out.base.kb.add(Relation::clause({false, true}), {z, v});
    out.base.kb.add(Relation::clause({false, true}), {x, m});
    out.base.kb.add(Relation::clause({false, true}), {y, m});

    insert_sorted(out.base.hyps, x);
    insert_sorted(out.base.hyps, y);
    insert_sorted(out.base.mans, m);
    out.query = x;
    return out;
}

DivInstance pos2sat_to_div(const AbductionInstance& phi, std::uint32_t k) {
    for (const Atom& a : phi.kb.atoms()) {
        const Relation& r = *a.rel;
        bool pos2 = r.kind() == RelKind::Clause && r.arity() == 2 && r.negative_count() == 0;
        if (!pos2)
            fail(ErrorCode::NotPos2Cnf, "input must consist of positive clauses of size 2");
    }
    DivInstance out;
    out.base.vars = phi.vars;
    out.k = k;
    out.base.hyps = phi.kb.vars();

    for (const Atom& a : phi.kb.atoms()) {
        Var c = out.base.vars.fresh("_c");
        for (Var v : a.args)
            out.base.kb.add(Relation::clause({false, true}), {v, c});
        insert_sorted(out.base.mans, c);
    }
    return out;
}

} // namespace fabd

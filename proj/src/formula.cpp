#include "fabd/formula.hpp"

#include <algorithm>

#include "fabd/error.hpp"

namespace fabd {

Var VarTable::intern(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    Var v = static_cast<Var>(names_.size());
    names_.push_back(name);
    index_.emplace(name, v);
    return v;
}

std::optional<Var> VarTable::find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Var VarTable::fresh(const std::string& stem) {
    if (!index_.count(stem)) return intern(stem);
    for (int i = 1;; ++i) {
        std::string candidate = stem + "_" + std::to_string(i);
        if (!index_.count(candidate)) return intern(candidate);
    }
}

bool Atom::operator==(const Atom& other) const {
    if (args != other.args) return false;
    if (rel == other.rel) return true;
    return rel && other.rel && rel->same_structure(*other.rel);
}

Assignment make_assignment(std::size_t n_vars) {
    return Assignment(n_vars, -1);
}

std::pair<RelationPtr, std::vector<Var>> project_atom(const RelationPtr& rel,
                                                      std::span<const Var> args) {
    if (args.size() != rel->arity()) fail(ErrorCode::Internal, "atom arity mismatch");
    std::vector<Var> distinct;
    std::vector<std::uint32_t> position(args.size());
    bool repeats = false;
    for (std::size_t i = 0; i < args.size(); ++i) {
        auto it = std::find(distinct.begin(), distinct.end(), args[i]);
        if (it == distinct.end()) {
            position[i] = static_cast<std::uint32_t>(distinct.size());
            distinct.push_back(args[i]);
        } else {
            position[i] = static_cast<std::uint32_t>(it - distinct.begin());
            repeats = true;
        }
    }
    if (!repeats) return {rel, std::move(distinct)};

    std::vector<TupleMask> projected;
    for (TupleMask t : rel->tuples()) {
        TupleMask out = 0;
        bool consistent = true;
        // Every original position must agree with the projected value of
        // its distinct argument.
        std::vector<std::int8_t> val(distinct.size(), -1);
        for (std::size_t i = 0; i < args.size() && consistent; ++i) {
            bool bit = ((t >> i) & 1) != 0;
            std::int8_t& slot = val[position[i]];
            if (slot < 0) slot = bit ? 1 : 0;
            else if ((slot == 1) != bit) consistent = false;
        }
        if (!consistent) continue;
        for (std::size_t j = 0; j < distinct.size(); ++j)
            if (val[j] == 1) out |= TupleMask{1} << j;
        projected.push_back(out);
    }
    auto proj = Relation::table(rel->name() + "_proj", static_cast<std::uint32_t>(distinct.size()),
                                std::move(projected));
    return {proj, std::move(distinct)};
}

void Formula::add(const RelationPtr& rel, std::vector<Var> args) {
    auto [r, distinct] = project_atom(rel, args);
    atoms_.push_back(Atom{r, std::move(distinct)});
}

std::vector<Var> Formula::vars() const {
    std::vector<Var> out;
    for (const Atom& a : atoms_) out.insert(out.end(), a.args.begin(), a.args.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool evaluate_atom(const Atom& atom, const Assignment& a) {
    TupleMask t = 0;
    for (std::size_t i = 0; i < atom.args.size(); ++i) {
        Var v = atom.args[i];
        if (v >= a.size() || a[v] < 0)
            fail(ErrorCode::PartialAssignment,
                 "assignment undefined on variable index " + std::to_string(v));
        if (a[v] == 1) t |= TupleMask{1} << i;
    }
    return atom.rel->contains(t);
}

bool evaluate(const Formula& f, const Assignment& a) {
    for (const Atom& atom : f.atoms())
        if (!evaluate_atom(atom, a)) return false;
    return true;
}

Formula restrict(const Formula& f, Var v, bool b) {
    Formula out;
    for (const Atom& atom : f.atoms()) {
        auto it = std::find(atom.args.begin(), atom.args.end(), v);
        if (it == atom.args.end()) {
            if (!atom.rel->always_true()) out.add(atom.rel, atom.args);
            continue;
        }
        std::size_t pos = static_cast<std::size_t>(it - atom.args.begin());
        std::vector<TupleMask> kept;
        for (TupleMask t : atom.rel->tuples()) {
            if ((((t >> pos) & 1) != 0) != b) continue;
            // Drop the fixed coordinate.
            TupleMask low = t & ((TupleMask{1} << pos) - 1);
            TupleMask high = (t >> (pos + 1)) << pos;
            kept.push_back(low | high);
        }
        std::vector<Var> rest = atom.args;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(pos));
        auto rel = Relation::table(atom.rel->name() + "_r",
                                   static_cast<std::uint32_t>(rest.size()), std::move(kept));
        if (rel->always_true()) continue;
        out.add(rel, std::move(rest));
    }
    return out;
}

} // namespace fabd

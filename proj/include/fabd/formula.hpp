#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fabd/relation.hpp"

namespace fabd {

using Var = std::uint32_t;

// Maps variable names to dense indices in first-occurrence order.
class VarTable {
public:
    Var intern(const std::string& name);
    std::optional<Var> find(const std::string& name) const;
    const std::string& name(Var v) const { return names_[v]; }
    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

    // Interns a name derived from `stem` that does not collide with any
    // existing variable.
    Var fresh(const std::string& stem);

    bool operator==(const VarTable& other) const { return names_ == other.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, Var> index_;
};

struct Atom {
    RelationPtr rel;
    std::vector<Var> args; // |args| == rel->arity(), all distinct after normalization

    bool operator==(const Atom& other) const;
};

// A partial assignment: -1 unset, 0 / 1 assigned.
using Assignment = std::vector<std::int8_t>;

Assignment make_assignment(std::size_t n_vars);

// Conjunction of atoms. Atoms are normalized on insertion: repeated
// arguments are projected away, so every stored atom has pairwise
// distinct arguments (a repeated-argument atom constrains the projected
// tuple set, which is what the projection computes).
class Formula {
public:
    Formula() = default;

    // Adds rel(args); repeated arguments are projected. The atom is kept
    // even when the projection is a full (always true) relation so that
    // its variables stay part of var(f).
    void add(const RelationPtr& rel, std::vector<Var> args);

    const std::vector<Atom>& atoms() const { return atoms_; }
    // Sorted distinct variables occurring in the atoms.
    std::vector<Var> vars() const;
    bool empty() const { return atoms_.empty(); }

    bool operator==(const Formula& other) const { return atoms_ == other.atoms_; }

private:
    std::vector<Atom> atoms_;
};

// True iff every atom's argument tuple under `a` lies in its relation.
// Throws PARTIAL_ASSIGNMENT when `a` is unset on a variable of `f`.
bool evaluate(const Formula& f, const Assignment& a);

// Evaluates a single atom; requires all argument variables assigned.
bool evaluate_atom(const Atom& atom, const Assignment& a);

// Fixes v := b. Satisfied atoms are dropped, emptied relations stay as
// always-false atoms.
Formula restrict(const Formula& f, Var v, bool b);

// Projects a relation applied to possibly-repeated arguments onto the
// distinct arguments (kept in first-occurrence order). Returns the
// projected relation and the distinct argument list.
std::pair<RelationPtr, std::vector<Var>> project_atom(const RelationPtr& rel,
                                                      std::span<const Var> args);

} // namespace fabd

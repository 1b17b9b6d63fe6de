#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace fabd {

// A tuple of an r-ary Boolean relation is packed into a uint32_t:
// bit i holds the value of argument position i. Arity is capped so
// that full tuple sets stay enumerable.
using TupleMask = std::uint32_t;

constexpr std::uint32_t kMaxArity = 20;

enum class RelKind { Clause, Xor, Equality, Unit, Table };

const char* rel_kind_name(RelKind k);

// An r-ary Boolean relation, i.e. a set of bit tuples, together with its
// canonical syntactic form when it has one. The tuple set is always the
// semantic truth table of that form. Relations are immutable after
// construction and shared between atoms.
class Relation {
public:
    static std::shared_ptr<const Relation> clause(std::vector<bool> signs);
    static std::shared_ptr<const Relation> xor_eq(std::uint32_t arity, bool rhs);
    static std::shared_ptr<const Relation> equality();
    static std::shared_ptr<const Relation> unit(bool positive);
    // Classifies the tuple set; a table matching a clause / xor / equality /
    // unit truth table is upgraded to that kind.
    static std::shared_ptr<const Relation> table(std::string name, std::uint32_t arity,
                                                 std::vector<TupleMask> tuples);

    RelKind kind() const { return kind_; }
    std::uint32_t arity() const { return arity_; }
    const std::string& name() const { return name_; }
    const std::vector<TupleMask>& tuples() const { return tuples_; }

    // Clause only: signs[i] is true when argument i occurs positively.
    const std::vector<bool>& signs() const { return signs_; }
    // Xor: the equation's right-hand side. Unit: true for (x), false for (not x).
    bool rhs() const { return rhs_; }

    bool contains(TupleMask t) const;
    bool always_true() const { return tuples_.size() == (std::size_t{1} << arity_); }
    bool always_false() const { return tuples_.empty(); }

    // Number of positive / negative literals of a clause relation.
    std::uint32_t positive_count() const;
    std::uint32_t negative_count() const;

    bool same_structure(const Relation& other) const;

private:
    Relation(RelKind kind, std::uint32_t arity, std::string name, std::vector<bool> signs,
             bool rhs, std::vector<TupleMask> tuples);

    RelKind kind_;
    std::uint32_t arity_;
    std::string name_;
    std::vector<bool> signs_;
    bool rhs_;
    std::vector<TupleMask> tuples_;
};

using RelationPtr = std::shared_ptr<const Relation>;

// Enumerates the truth table of a clause with the given signs.
std::vector<TupleMask> clause_tuples(const std::vector<bool>& signs);

} // namespace fabd

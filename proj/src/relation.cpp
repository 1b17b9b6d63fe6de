#include "fabd/relation.hpp"

#include <algorithm>
#include <bit>

#include "fabd/error.hpp"

namespace fabd {

const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::ParseError: return "PARSE_ERROR";
        case ErrorCode::ScopeError: return "SCOPE_ERROR";
        case ErrorCode::PartialAssignment: return "PARTIAL_ASSIGNMENT";
        case ErrorCode::WrongFragment: return "WRONG_FRAGMENT";
        case ErrorCode::BudgetExceeded: return "BUDGET_EXCEEDED";
        case ErrorCode::NotSubsetOfH: return "NOT_SUBSET_OF_H";
        case ErrorCode::MissingDefinition: return "MISSING_DEFINITION";
        case ErrorCode::InvalidDefinition: return "INVALID_DEFINITION";
        case ErrorCode::NoEquality: return "NO_EQUALITY";
        case ErrorCode::NotOneValid: return "NOT_ONE_VALID";
        case ErrorCode::NoNegUnit: return "NO_NEG_UNIT";
        case ErrorCode::NotPos2Cnf: return "NOT_POS2CNF";
        case ErrorCode::UnsatStructure: return "UNSAT_STRUCTURE";
        case ErrorCode::Usage: return "USAGE";
        case ErrorCode::Internal: return "INTERNAL";
    }
    return "UNKNOWN";
}

std::string Error::format(ErrorCode code, const std::string& message, int line, int column) {
    std::string s = error_code_name(code);
    if (line > 0) {
        s += " at line " + std::to_string(line);
        if (column > 0) s += ", column " + std::to_string(column);
    }
    s += ": " + message;
    return s;
}

const char* rel_kind_name(RelKind k) {
    switch (k) {
        case RelKind::Clause: return "clause";
        case RelKind::Xor: return "xor";
        case RelKind::Equality: return "eq";
        case RelKind::Unit: return "unit";
        case RelKind::Table: return "table";
    }
    return "?";
}

std::vector<TupleMask> clause_tuples(const std::vector<bool>& signs) {
    const std::uint32_t r = static_cast<std::uint32_t>(signs.size());
    // The single falsifying tuple sets every positive argument to 0 and
    // every negative argument to 1.
    TupleMask falsifier = 0;
    for (std::uint32_t i = 0; i < r; ++i)
        if (!signs[i]) falsifier |= TupleMask{1} << i;
    std::vector<TupleMask> out;
    const TupleMask total = TupleMask{1} << r;
    out.reserve(total - 1);
    for (TupleMask t = 0; t < total; ++t)
        if (t != falsifier) out.push_back(t);
    return out;
}

namespace {

std::vector<TupleMask> xor_tuples(std::uint32_t arity, bool rhs) {
    std::vector<TupleMask> out;
    const TupleMask total = TupleMask{1} << arity;
    out.reserve(total / 2);
    for (TupleMask t = 0; t < total; ++t)
        if ((std::popcount(t) & 1) == (rhs ? 1 : 0)) out.push_back(t);
    return out;
}

std::string sign_suffix(const std::vector<bool>& signs) {
    std::string s;
    for (bool b : signs) s += b ? 'p' : 'n';
    return s;
}

} // namespace

Relation::Relation(RelKind kind, std::uint32_t arity, std::string name, std::vector<bool> signs,
                   bool rhs, std::vector<TupleMask> tuples)
    : kind_(kind), arity_(arity), name_(std::move(name)), signs_(std::move(signs)), rhs_(rhs),
      tuples_(std::move(tuples)) {}

RelationPtr Relation::clause(std::vector<bool> signs) {
    if (signs.empty() || signs.size() > kMaxArity)
        fail(ErrorCode::ParseError, "clause arity out of range");
    if (signs.size() == 1) return unit(signs[0]);
    auto tuples = clause_tuples(signs);
    std::string name = "clause_" + sign_suffix(signs);
    return RelationPtr(new Relation(RelKind::Clause, static_cast<std::uint32_t>(signs.size()),
                                    std::move(name), std::move(signs), false, std::move(tuples)));
}

RelationPtr Relation::xor_eq(std::uint32_t arity, bool rhs) {
    if (arity == 0 || arity > kMaxArity)
        fail(ErrorCode::ParseError, "xor arity out of range");
    if (arity == 1) return unit(rhs);
    if (arity == 2 && !rhs) return equality();
    auto tuples = xor_tuples(arity, rhs);
    std::string name = "xor" + std::to_string(arity) + "_" + (rhs ? "1" : "0");
    return RelationPtr(new Relation(RelKind::Xor, arity, std::move(name), {}, rhs,
                                    std::move(tuples)));
}

RelationPtr Relation::equality() {
    return RelationPtr(new Relation(RelKind::Equality, 2, "eq", {}, false, {0b00, 0b11}));
}

RelationPtr Relation::unit(bool positive) {
    return RelationPtr(new Relation(RelKind::Unit, 1, positive ? "unit_p" : "unit_n", {}, positive,
                                    {positive ? TupleMask{1} : TupleMask{0}}));
}

RelationPtr Relation::table(std::string name, std::uint32_t arity, std::vector<TupleMask> tuples) {
    if (arity > kMaxArity) fail(ErrorCode::ParseError, "relation arity out of range");
    std::sort(tuples.begin(), tuples.end());
    tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
    const std::uint64_t total = std::uint64_t{1} << arity;
    for (TupleMask t : tuples)
        if (t >= total) fail(ErrorCode::Internal, "tuple exceeds arity");

    // Upgrade to a canonical syntactic kind when the truth table matches one.
    if (arity == 1 && tuples.size() == 1) return unit(tuples[0] == 1);
    if (arity == 2 && tuples == std::vector<TupleMask>{0b00, 0b11}) return equality();
    if (arity >= 2 && tuples.size() == total / 2) {
        bool p0 = (std::popcount(tuples[0]) & 1) != 0;
        bool uniform = std::all_of(tuples.begin(), tuples.end(), [&](TupleMask t) {
            return ((std::popcount(t) & 1) != 0) == p0;
        });
        if (uniform) return xor_eq(arity, p0);
    }
    if (arity >= 2 && tuples.size() == total - 1) {
        TupleMask falsifier = static_cast<TupleMask>(total - 1);
        for (TupleMask expect = 0; expect < tuples.size(); ++expect) {
            if (tuples[expect] != expect) { falsifier = expect; break; }
        }
        std::vector<bool> signs(arity);
        for (std::uint32_t i = 0; i < arity; ++i) signs[i] = ((falsifier >> i) & 1) == 0;
        return clause(std::move(signs));
    }
    return RelationPtr(new Relation(RelKind::Table, arity, std::move(name), {}, false,
                                    std::move(tuples)));
}

bool Relation::contains(TupleMask t) const {
    switch (kind_) {
        case RelKind::Clause: {
            for (std::uint32_t i = 0; i < arity_; ++i) {
                bool v = ((t >> i) & 1) != 0;
                if (v == signs_[i]) return true;
            }
            return false;
        }
        case RelKind::Xor:
            return ((std::popcount(t) & 1) != 0) == rhs_;
        case RelKind::Equality:
            return t == 0b00 || t == 0b11;
        case RelKind::Unit:
            return (t & 1) == (rhs_ ? 1u : 0u);
        case RelKind::Table:
            return std::binary_search(tuples_.begin(), tuples_.end(), t);
    }
    return false;
}

std::uint32_t Relation::positive_count() const {
    std::uint32_t n = 0;
    for (bool b : signs_) n += b ? 1 : 0;
    return n;
}

std::uint32_t Relation::negative_count() const {
    return static_cast<std::uint32_t>(signs_.size()) - positive_count();
}

bool Relation::same_structure(const Relation& other) const {
    return kind_ == other.kind_ && arity_ == other.arity_ && tuples_ == other.tuples_ &&
           name_ == other.name_;
}

} // namespace fabd

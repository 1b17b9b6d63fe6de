#pragma once

#include <map>
#include <string>
#include <vector>

#include "fabd/relation.hpp"

namespace fabd {

// An existentially quantified conjunctive definition of a target relation
// over base relations, without free equality. Body atoms are stored over
// local indices: 0..free-1 are the free arguments, the rest are the
// existential variables.
struct EfppDefinition {
    std::string target;
    std::vector<std::string> free_names;
    std::vector<std::string> exist_names;
    struct BodyAtom {
        RelationPtr rel;
        std::vector<std::uint32_t> locals;
    };
    std::vector<BodyAtom> body;

    std::uint32_t arity() const { return static_cast<std::uint32_t>(free_names.size()); }

    // Enumerates the body's models and projects them onto the free
    // arguments.
    std::vector<TupleMask> projected_tuples() const;

    // Throws INVALID_DEFINITION when the projection differs from `target`'s
    // tuple set.
    void validate_against(const Relation& target_rel) const;
};

struct DefinitionSet {
    std::map<std::string, EfppDefinition> by_target;
    // Relations declared with `rel` lines in the definition file; used to
    // validate definitions eagerly at registration.
    std::map<std::string, RelationPtr> declared;

    // Registers a definition, validating it against a declared relation if
    // one is present.
    void add(EfppDefinition def);

    const EfppDefinition* find(const std::string& target) const;
};

} // namespace fabd

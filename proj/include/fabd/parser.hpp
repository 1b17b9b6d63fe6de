#pragma once

#include <string>
#include <string_view>

#include "fabd/instance.hpp"
#include "fabd/reduce_defs.hpp"

namespace fabd {

// Instance grammar (UTF-8, line based, '#' starts a comment):
//   clause <lit>+          lit = name or -name
//   xor <name>+ = 0|1
//   eq <name> <name>
//   rel <name> <arity> : <bitstring>+
//   app <relname> <name>+
//   hyp <name>+
//   man <name>+
//   query <name>
//   k <nat>
// Definition files additionally allow
//   def <relname>(<free>+ ; <exist>*) { <atom lines> }
// Names match [A-Za-z_][A-Za-z0-9_]*. In a rel bitstring, character i is
// the value of argument i.
ParsedInstance parse_instance(std::string_view text);

// Parses a definition file; plain instance lines are ignored except for
// rel declarations, which pin the target truth table.
DefinitionSet parse_definitions(std::string_view text);

std::string render(const ParsedInstance& inst);
std::string render(const AbductionInstance& inst);

} // namespace fabd

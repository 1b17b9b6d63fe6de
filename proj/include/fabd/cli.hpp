#pragma once

#include <iosfwd>

namespace fabd {

// Exit status: 0 answered (the answer is in the payload), 64 usage or
// input errors, 65 fragment mismatch under --engine poly, 66 budget
// exhaustion, 67 internal invariant violations.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace fabd

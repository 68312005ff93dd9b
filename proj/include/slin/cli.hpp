#pragma once

#include <ostream>

namespace slin {

/// The slin command line. Exit codes: 0 pass / witness / linearizable,
/// 1 claim failure / NONE / inconclusive, 2 usage or input error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace slin

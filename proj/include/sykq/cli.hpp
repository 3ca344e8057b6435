#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sykq {

/// Run one CLI invocation.  Exit codes: 0 success, 1 pipeline error,
/// 2 usage error.
int dispatch(const std::vector<std::string>& args, std::ostream& out);

}  // namespace sykq

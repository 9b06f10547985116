#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace uqsup::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;

// args excludes the program name. Nothing is written to disk unless every
// input has been read and every output computed.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uqsup::cli

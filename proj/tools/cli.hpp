#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hrlda::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Runs one command line (args excludes the program name). Returns 0 on
/// success, 1 on usage errors, 2 on data errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
std::string file_digest(const std::string& path);

}  // namespace hrlda::cli

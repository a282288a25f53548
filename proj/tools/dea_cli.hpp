#pragma once

#include <iosfwd>
#include <string>

namespace dea::cli {

/// Exit codes: 0 success, 1 bad data or usage, 2 solver failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256 of a file's bytes.
std::string file_digest(const std::string& path);

}  // namespace dea::cli

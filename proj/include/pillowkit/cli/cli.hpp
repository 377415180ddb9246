#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pillowkit::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes: 0 success / Accept, 1 negative result (Reject, nothing found,
/// a check failed), 2 schema, IO or computation error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& data);

}  // namespace pillowkit::cli

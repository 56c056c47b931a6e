#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace qpfs::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kOther = 1;
inline constexpr int kConfigError = 2;
inline constexpr int kDataError = 3;
inline constexpr int kNumericalError = 4;

// Entry point behind the `qpfs` binary; everything it prints goes to out/err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

// Download `url` (http(s) or file://) into memory. Throws DataError.
std::string download(const std::string& url);
std::string sha256_hex(const std::string& bytes);

}  // namespace qpfs::cli

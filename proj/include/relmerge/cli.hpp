#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace relmerge {

// Exit codes of run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;  // usage, parse or validation error
inline constexpr int kExitIo = 2;

// Runs the command line tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

std::string read_file(const std::string& path);
// Writes through a temporary file in the same directory, then renames.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace relmerge

#pragma once

#include <filesystem>
#include <string>

namespace qsn {

inline constexpr const char* kSchemaLine = "# schema=1";
inline constexpr const char* kVersion = "0.1.0";

/// Shortest round-trip decimal form; "inf" for +infinity.
std::string format_double(double v);

/// Parses what format_double writes.
double parse_double(const std::string& s);

/// Creates `dir` if needed. Throws IoError when it exists and is non-empty
/// unless `force` is set.
void prepare_output_dir(const std::filesystem::path& dir, bool force);

void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace qsn

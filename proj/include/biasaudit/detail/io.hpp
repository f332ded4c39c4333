#pragma once

#include <filesystem>
#include <string>

namespace biasaudit::detail {

// Reads a whole file; throws format_error if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Writes via a temp file in the same directory plus rename, so concurrent
// same-key writers are last-writer-wins and readers never see partial files.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace biasaudit::detail

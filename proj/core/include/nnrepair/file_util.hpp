#pragma once

// Whole-file read/write helpers.

#include <string>
#include <string_view>

namespace nnrepair {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace nnrepair

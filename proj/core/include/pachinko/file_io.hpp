#pragma once

#include <string>
#include <string_view>

namespace pachinko {

// Whole-file helpers; both throw ValidationError on I/O failure.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace pachinko

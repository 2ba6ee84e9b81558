#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace thermo {

// Reals in reports: 12 significant digits, locale independent, "0" for zero.
std::string format_real(double x, int significant_digits = 12);

// Full precision, used where text must parse back to the identical double.
std::string format_exact(double x);

void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace thermo

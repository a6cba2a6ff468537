#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nids::dataset {

std::string_view trim(std::string_view s) noexcept;

/// Splits one CSV line on commas; double-quoted fields may contain commas and
/// "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

/// Quotes a field only when it contains a comma, quote or newline.
std::string quote_csv(std::string_view field);

}  // namespace nids::dataset

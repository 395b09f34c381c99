#pragma once

#include <string_view>

namespace quotesurvey {

/// Officially assigned ISO 3166-1 alpha-2 code (uppercase only).
bool is_valid_country_code(std::string_view code);

}  // namespace quotesurvey

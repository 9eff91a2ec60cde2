#pragma once

#include <string>

namespace fracwick {

/// Shortest locale-independent rendering with 17 significant digits
/// ("nan", "inf" and "-inf" for non-finite values).
std::string format_double(double v);

}  // namespace fracwick

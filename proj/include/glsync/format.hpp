#pragma once

#include <string>

namespace glsync {

/// Shortest decimal text that parses back to the same double; "nan", "inf"
/// and "-inf" for non-finite values.
std::string format_double(double v);

/// Inverse of format_double. Throws InvalidInput on trailing garbage.
double parse_double(const std::string& text);

} // namespace glsync

#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

#include "deepspace/types.hpp"

namespace deepspace {

/// Shortest decimal text that parses back to exactly `value`. Integral values
/// keep a trailing ".0" so the column reads as real-valued.
template <typename Scalar>
std::string format_real(Scalar value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  std::string out(buf, res.ptr);
  if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
  return out;
}

template <typename Scalar>
Scalar parse_real(std::string_view text) {
  Scalar value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last)
    throw FormatError("not a real number: '" + std::string(text) + "'");
  return value;
}

}  // namespace deepspace

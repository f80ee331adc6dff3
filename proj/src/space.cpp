#include "deepspace/space.hpp"

#include <charconv>

namespace deepspace {

const char* to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::cf: return "cf";
    case Provenance::cb: return "cb";
    case Provenance::vsm: return "vsm";
    case Provenance::unknown: return "unknown";
  }
  return "unknown";
}

Provenance parse_provenance(std::string_view text) {
  if (text == "cf") return Provenance::cf;
  if (text == "cb") return Provenance::cb;
  if (text == "vsm") return Provenance::vsm;
  if (text == "unknown") return Provenance::unknown;
  throw FormatError("unknown space provenance '" + std::string(text) + "'");
}

namespace detail {

std::int64_t parse_count(std::string_view text, const char* what) {
  std::int64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw FormatError(std::string("bad ") + what + " '" + std::string(text) + "'");
  if (value < 0 && std::string_view(what) != "item id")
    throw FormatError(std::string(what) + " must be non-negative");
  return value;
}

}  // namespace detail
}  // namespace deepspace

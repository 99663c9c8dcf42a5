#include "warpwave/wavelet.hpp"

#include <algorithm>
#include <cctype>

namespace warpwave {

FilterName parse_filter_name(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "haar" || lower == "db1") return FilterName::Haar;
  if (lower == "db2") return FilterName::DB2;
  if (lower == "db4") return FilterName::DB4;
  if (lower == "db6") return FilterName::DB6;
  throw ConfigError("unsupported wavelet '" + std::string(name) +
                    "' (expected haar, db2, db4 or db6)");
}

std::string to_string(FilterName name) {
  switch (name) {
    case FilterName::Haar: return "haar";
    case FilterName::DB2: return "db2";
    case FilterName::DB4: return "db4";
    case FilterName::DB6: return "db6";
  }
  return "unknown";
}

}  // namespace warpwave

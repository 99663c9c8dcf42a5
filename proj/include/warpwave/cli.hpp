#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "warpwave/design_warp.hpp"

namespace warpwave {

/// Reads an `x,y` CSV with a header line; further columns are checked for
/// arity and otherwise ignored.
RegressionSample read_series_csv(const std::string& path);

/// Writes an `x,<name>` CSV with 17 significant digits.
void write_pairs_csv(std::ostream& os, const std::string& value_column, const Vec& xs,
                     const Vec& values);

/// Entry point of the `warpwave` tool. args[0] is the program name.
/// Returns 0 on success, 2 on usage errors, 1 on runtime errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace warpwave

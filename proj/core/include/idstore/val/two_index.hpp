#pragma once

#include "idstore/mid/simulate.hpp"
#include "idstore/val/stochastic.hpp"

namespace idstore::val {

/// Two-stock problem: at each hour, volumes are chosen on both the product
/// two hours ahead and the product three hours ahead. The second state is the
/// volume already committed on the 3h-ahead product.
struct TwoIndexResult {
    double value = 0.0;  // EUR per battery, in-sample estimate
};

/// Backward DP over (stock, pending 3h volume). Requires impact.delta == 2
/// and a path grid containing T_1 - 3 plus every T_i - 2. With the second
/// index disabled the problem collapses to the one-index DP exactly.
TwoIndexResult optimize_two_index(const mid::PricePathSet& paths, const BatterySpec& battery,
                                  const ImpactSpec& impact, const RegressionConfig& cfg = {},
                                  bool enable_second_index = true);

} // namespace idstore::val

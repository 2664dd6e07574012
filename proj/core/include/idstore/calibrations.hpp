#pragma once

#include "idstore/liq/model.hpp"
#include "idstore/mid/model.hpp"

namespace idstore::calib {

/// Sample parameter sets estimated on January data, usable as simulation
/// ground truth and CLI defaults. The jump laws are small two-point samples
/// matching the reported first and second moments exactly.
struct MarketCalibration {
    mid::MidPriceParams midprice;
    liq::LiquiditySessionParams liquidity;
};

MarketCalibration germany_2021(int n_maturities = 24);
MarketCalibration france_2021(int n_maturities = 24);

/// Market profile constants: the volume window the liquidity fit uses and the
/// number of displayed book levels.
struct MarketProfile {
    const char* name;
    double volume_window;  // MWh per side
    int depth_cap;         // displayed levels per side
};

inline constexpr MarketProfile kFranceProfile{"fr", 20.0, 20};
inline constexpr MarketProfile kGermanyProfile{"de", 100.0, 60};

} // namespace idstore::calib

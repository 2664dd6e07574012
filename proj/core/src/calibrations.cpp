#include "idstore/calibrations.hpp"

namespace idstore::calib {

namespace {

std::vector<double> hourly_maturities(int n) {
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) t[static_cast<std::size_t>(m)] = static_cast<double>(m);
    return t;
}

mid::JumpLaw two_point_law(double small, double large, int n_small, int n_total) {
    mid::JumpLaw law;
    law.sizes.reserve(static_cast<std::size_t>(n_total));
    for (int i = 0; i < n_small; ++i) law.sizes.push_back(small);
    for (int i = n_small; i < n_total; ++i) law.sizes.push_back(large);
    return law;
}

} // namespace

MarketCalibration germany_2021(int n) {
    MarketCalibration c;
    c.midprice.kappa = 0.25;
    c.midprice.mu = 109.45;
    c.midprice.mu_c = 55.45;
    // moments 0.09 / 0.04
    c.midprice.jump_law = two_point_law(0.019945076492138629, 0.54535700280109891, 13, 15);
    c.midprice.maturities = hourly_maturities(n);

    const double row[8] = {0.1751, 0.0122, 2.6968, -1.8208, 0.0859, 0.0240, 3.6898, -2.2508};
    c.liquidity = liq::LiquiditySessionParams::from_table_row(row, n);
    return c;
}

MarketCalibration france_2021(int n) {
    MarketCalibration c;
    c.midprice.kappa = 0.28;
    c.midprice.mu = 11.50;
    c.midprice.mu_c = 21.33;
    // moments 0.32 / 1.28
    c.midprice.jump_law = two_point_law(0.029975370504010963, 4.3803448129438465, 14, 15);
    c.midprice.maturities = hourly_maturities(n);

    const double row[8] = {0.1854, 0.2517, 3.2813, -0.6146, 0.1468, 0.2746, 3.5512, -0.7842};
    c.liquidity = liq::LiquiditySessionParams::from_table_row(row, n);
    return c;
}

} // namespace idstore::calib

#pragma once

#include <optional>

#include "idstore/liq/model.hpp"

namespace idstore::val {

/// An n-hour battery: capacity n MWh, 1 MWh/h injection/withdrawal, round
/// trip efficiency rho^2.
struct BatterySpec {
    double capacity = 2.0;       // MWh
    double rate = 1.0;           // MWh per hour
    double efficiency = 0.92;    // rho
    double initial_stock = 0.0;  // MWh at the first decision
};

/// Market impact context: how many identical batteries trade, the liquidity
/// surface (absent = mid only), and the decision lag.
struct ImpactSpec {
    int n_batteries = 1;
    std::optional<liq::LiquiditySessionParams> liq;
    int delta = 2;  // hours between decision and delivery
    // When set, the liquidity cost argument is the grid-side volume
    // (c/rho buys, c*rho sells) instead of the storage-side volume n*c.
    bool impact_on_grid_volume = false;
};

/// Grid-side market volume implied by a storage-side control c (per battery).
inline double grid_volume(double c, const BatterySpec& b) {
    return c >= 0.0 ? c / b.efficiency : c * b.efficiency;
}

/// Unit price paid/received for a storage control c on maturity m decided
/// tau_hours before delivery: forecast plus the liquidity cost of the park's
/// volume.
double unit_price(double c, double forecast, int maturity, double tau_hours,
                  const BatterySpec& battery, const ImpactSpec& impact);

/// Per-battery cash flow of control c: -c (1/rho if c>=0 else rho) * price.
double control_cash(double c, double forecast, int maturity, double tau_hours,
                    const BatterySpec& battery, const ImpactSpec& impact);

/// Stock/control discretization; throws InfeasibleSpec when the battery
/// limits are incompatible with the step.
struct ControlGrid {
    double step = 0.1;
    int n_stock = 0;        // stock points 0..capacity
    int rate_steps = 0;     // controls are k*step, |k| <= rate_steps
    int initial_index = 0;

    static ControlGrid make(const BatterySpec& battery, double step = 0.1);
};

} // namespace idstore::val

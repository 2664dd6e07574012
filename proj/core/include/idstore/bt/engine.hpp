#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "idstore/bt/schedule.hpp"
#include "idstore/mid/simulate.hpp"
#include "idstore/val/battery.hpp"
#include "idstore/val/stochastic.hpp"

namespace idstore::bt {

enum class Strategy { det_no_depth = 0, det_depth = 1, sto_no_depth = 2, sto_depth = 3 };
inline constexpr std::array<Strategy, 4> kAllStrategies{
    Strategy::det_no_depth, Strategy::det_depth, Strategy::sto_no_depth, Strategy::sto_depth};
const char* strategy_name(Strategy s);

struct BacktestOptions {
    std::vector<int> n_batteries{1};
    int delta = 2;
    val::BatterySpec battery;
    val::RegressionConfig reg;
    int sim_paths = 4000;         // training paths per Monday model
    std::uint64_t seed = 1;
    calib::MarketProfile profile = calib::kFranceProfile;
    std::vector<Strategy> strategies{kAllStrategies.begin(), kAllStrategies.end()};
};

struct DayStrategyResult {
    double eur_per_battery = 0.0;
    double traded_mwh = 0.0;    // park volume filled
    double residual_mwh = 0.0;  // park volume that found no depth
    int missing_hours = 0;      // hours skipped for lack of a book
};

struct DayResult {
    Date day;
    // indexed [strategy][n_batteries index]
    std::vector<std::vector<DayStrategyResult>> results;
};

struct BacktestResult {
    std::vector<int> n_batteries;
    std::vector<Strategy> strategies;
    std::vector<DayResult> days;

    double total_eur_per_battery(Strategy s, int nb_index) const;
    double park_total_eur(Strategy s, int nb_index) const;

    /// backtest.csv: day,strategy,n_batteries,eur_per_battery
    void write_backtest_csv(std::ostream& os) const;
    /// park_gain.csv: n_batteries,total_eur for the depth-aware stochastic
    /// strategy (the headline park-gain series).
    void write_park_gain_csv(std::ostream& os) const;
    /// park_gain_all.csv variant with a strategy column.
    void write_park_gain_all_csv(std::ostream& os) const;
};

/// Replays one day: computes the four strategies from the models in force and
/// executes their controls against the day's books at each T_m - delta,
/// starting from zero inventory. Controls never look past the execution
/// instant; realized stock is tracked through partial fills.
DayResult run_day(const SessionStore& store, const CalibrationSchedule& schedule, Date day,
                  const BacktestOptions& opt, const mid::PricePathSet* increments = nullptr);

/// Runs a day range and aggregates per-day results.
BacktestResult run_range(const SessionStore& store, const CalibrationSchedule& schedule,
                         const std::vector<Date>& days, const BacktestOptions& opt);

} // namespace idstore::bt

#include "idstore/bt/engine.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>

#include "idstore/errors.hpp"
#include "idstore/rng.hpp"
#include "idstore/val/deterministic.hpp"

namespace idstore::bt {

const char* strategy_name(Strategy s) {
    switch (s) {
    case Strategy::det_no_depth: return "det_no_depth";
    case Strategy::det_depth: return "det_depth";
    case Strategy::sto_no_depth: return "sto_no_depth";
    case Strategy::sto_depth: return "sto_depth";
    }
    return "?";
}

namespace {

bool uses_depth(Strategy s) {
    return s == Strategy::det_depth || s == Strategy::sto_depth;
}
bool is_stochastic(Strategy s) {
    return s == Strategy::sto_no_depth || s == Strategy::sto_depth;
}

std::uint64_t monday_seed(std::uint64_t base, Date monday) {
    std::uint64_t x = base ^ (static_cast<std::uint64_t>(monday.to_sys_days().time_since_epoch().count()) *
                              0x9e3779b97f4a7c15ULL);
    return splitmix64(x);
}

/// Simulated increments (f0 = 0) for one Monday model; shared by every day
/// that inherits the model.
mid::PricePathSet simulate_increments(const ModelSet& models, const BacktestOptions& opt) {
    const std::vector<double>& T = models.midprice.maturities;
    std::vector<double> zeros(T.size(), 0.0);
    return mid::simulate(models.midprice, zeros, val::decision_grid(T, opt.delta),
                         opt.sim_paths, monday_seed(opt.seed, models.fitted_on));
}

mid::PricePathSet shift_paths(const mid::PricePathSet& increments, const std::vector<double>& f0) {
    mid::PricePathSet out = increments;
    out.f0 = f0;
    const int M = out.n_maturities();
    const std::size_t n_blocks = out.values.size() / static_cast<std::size_t>(M);
    for (std::size_t b = 0; b < n_blocks; ++b)
        for (int m = 0; m < M; ++m)
            out.values[b * static_cast<std::size_t>(M) + static_cast<std::size_t>(m)] +=
                f0[static_cast<std::size_t>(m)];
    return out;
}

double last_mid_at(const mid::MidSeries& series, double t, double fallback) {
    const auto it = std::upper_bound(series.times.begin(), series.times.end(), t);
    if (it == series.times.begin()) return fallback;
    return series.values[static_cast<std::size_t>(it - series.times.begin() - 1)];
}

} // namespace

DayResult run_day(const SessionStore& store, const CalibrationSchedule& schedule, Date day,
                  const BacktestOptions& opt, const mid::PricePathSet* increments) {
    if (opt.delta < 1) throw InfeasibleSpec("delta must be at least 1 hour (XBID closure)");
    const ModelSet& models = schedule.for_day(day);
    const int M = store.n_maturities();
    const val::ControlGrid grid = val::ControlGrid::make(opt.battery);

    // spot vector: first session mid, forward-filled across maturities
    std::vector<mid::MidSeries> series(static_cast<std::size_t>(M));
    std::vector<double> spot(static_cast<std::size_t>(M), 0.0);
    std::vector<bool> has_spot(static_cast<std::size_t>(M), false);
    for (int m = 1; m <= M; ++m) {
        series[static_cast<std::size_t>(m - 1)] = store.mid_series(day, m);
        const auto& s = series[static_cast<std::size_t>(m - 1)];
        if (!s.values.empty()) {
            spot[static_cast<std::size_t>(m - 1)] = s.values.front();
            has_spot[static_cast<std::size_t>(m - 1)] = true;
        }
    }
    double fill = 0.0;
    bool fill_valid = false;
    for (int m = 0; m < M; ++m) {
        if (has_spot[static_cast<std::size_t>(m)]) {
            fill = spot[static_cast<std::size_t>(m)];
            fill_valid = true;
        } else if (fill_valid) {
            spot[static_cast<std::size_t>(m)] = fill;
        }
    }
    for (int m = M - 1; m >= 0; --m) {  // leading gap: backward fill
        if (has_spot[static_cast<std::size_t>(m)]) fill = spot[static_cast<std::size_t>(m)];
        else spot[static_cast<std::size_t>(m)] = fill;
    }

    // strategy policies
    const bool need_sto = std::any_of(opt.strategies.begin(), opt.strategies.end(), is_stochastic);
    mid::PricePathSet local_increments;
    const mid::PricePathSet* incr = increments;
    if (need_sto && incr == nullptr) {
        local_increments = simulate_increments(models, opt);
        incr = &local_increments;
    }
    mid::PricePathSet day_paths;
    if (need_sto) day_paths = shift_paths(*incr, spot);

    DayResult out;
    out.day = day;
    out.results.resize(opt.strategies.size());

    for (std::size_t si = 0; si < opt.strategies.size(); ++si) {
        const Strategy strat = opt.strategies[si];
        out.results[si].resize(opt.n_batteries.size());
        for (std::size_t ni = 0; ni < opt.n_batteries.size(); ++ni) {
            const int n_bat = opt.n_batteries[static_cast<std::size_t>(ni)];
            val::ImpactSpec impact;
            impact.n_batteries = n_bat;
            impact.delta = opt.delta;
            if (uses_depth(strat)) impact.liq = models.liquidity;

            std::vector<double> det_controls;
            std::unique_ptr<val::BatteryPolicy> policy;
            if (is_stochastic(strat)) {
                policy = std::make_unique<val::BatteryPolicy>(
                    val::optimize_stochastic(day_paths, opt.battery, impact, opt.reg));
            } else {
                det_controls = val::optimize_deterministic(spot, opt.battery, impact).controls;
            }

            DayStrategyResult& res = out.results[si][ni];
            double stock = opt.battery.initial_stock;  // per battery, MWh
            double cash = 0.0;                         // park EUR
            std::vector<double> prices(static_cast<std::size_t>(M));
            for (int i = 1; i <= M; ++i) {
                const double t_exec = static_cast<double>(i - 1) - static_cast<double>(opt.delta);
                double c;
                if (is_stochastic(strat)) {
                    for (int m = 1; m <= M; ++m)
                        prices[static_cast<std::size_t>(m - 1)] =
                            last_mid_at(series[static_cast<std::size_t>(m - 1)], t_exec,
                                        spot[static_cast<std::size_t>(m - 1)]);
                    const double snapped =
                        std::clamp(std::nearbyint(stock / grid.step) * grid.step, 0.0,
                                   opt.battery.capacity);
                    c = policy->control(i, snapped, prices);
                } else {
                    c = det_controls[static_cast<std::size_t>(i - 1)];
                }
                // physical feasibility against the realized stock
                c = std::clamp(c, -std::min(opt.battery.rate, stock),
                               std::min(opt.battery.rate, opt.battery.capacity - stock));
                if (c == 0.0) continue;
                const auto book = store.snapshot_at(day, i, t_exec);
                if (!book) {
                    ++res.missing_hours;
                    continue;
                }
                const double park_volume = static_cast<double>(n_bat) * val::grid_volume(c, opt.battery);
                const lob::ExecutionReport rep = lob::execute_market_order(*book, park_volume);
                cash += rep.cash;
                res.traded_mwh += rep.filled;
                res.residual_mwh += rep.residual;
                const double filled_per_battery = rep.filled / static_cast<double>(n_bat);
                if (c > 0.0)
                    stock += filled_per_battery * opt.battery.efficiency;
                else
                    stock -= filled_per_battery / opt.battery.efficiency;
                stock = std::clamp(stock, 0.0, opt.battery.capacity);
            }
            res.eur_per_battery = cash / static_cast<double>(n_bat);
        }
    }
    return out;
}

BacktestResult run_range(const SessionStore& store, const CalibrationSchedule& schedule,
                         const std::vector<Date>& days, const BacktestOptions& opt) {
    BacktestResult out;
    out.n_batteries = opt.n_batteries;
    out.strategies = opt.strategies;
    out.days.reserve(days.size());

    const bool need_sto = std::any_of(opt.strategies.begin(), opt.strategies.end(), is_stochastic);
    Date current_fit{1900, 1, 1};
    mid::PricePathSet increments;
    for (const Date& day : days) {
        const ModelSet& models = schedule.for_day(day);
        if (need_sto && !(models.fitted_on == current_fit)) {
            increments = simulate_increments(models, opt);
            current_fit = models.fitted_on;
        }
        out.days.push_back(run_day(store, schedule, day, opt, need_sto ? &increments : nullptr));
    }
    return out;
}

double BacktestResult::total_eur_per_battery(Strategy s, int nb_index) const {
    const auto it = std::find(strategies.begin(), strategies.end(), s);
    if (it == strategies.end()) throw Error("strategy not part of this backtest");
    const std::size_t si = static_cast<std::size_t>(it - strategies.begin());
    double total = 0.0;
    for (const DayResult& d : days)
        total += d.results[si][static_cast<std::size_t>(nb_index)].eur_per_battery;
    return total;
}

double BacktestResult::park_total_eur(Strategy s, int nb_index) const {
    return total_eur_per_battery(s, nb_index) *
           static_cast<double>(n_batteries[static_cast<std::size_t>(nb_index)]);
}

void BacktestResult::write_backtest_csv(std::ostream& os) const {
    os << "day,strategy,n_batteries,eur_per_battery\n";
    char buf[128];
    for (const DayResult& d : days)
        for (std::size_t si = 0; si < strategies.size(); ++si)
            for (std::size_t ni = 0; ni < n_batteries.size(); ++ni) {
                std::snprintf(buf, sizeof buf, "%s,%s,%d,%.6f\n", d.day.to_string().c_str(),
                              strategy_name(strategies[si]), n_batteries[ni],
                              d.results[si][ni].eur_per_battery);
                os << buf;
            }
}

void BacktestResult::write_park_gain_csv(std::ostream& os) const {
    os << "n_batteries,total_eur\n";
    const auto it = std::find(strategies.begin(), strategies.end(), Strategy::sto_depth);
    if (it == strategies.end()) return;
    char buf[64];
    for (std::size_t ni = 0; ni < n_batteries.size(); ++ni) {
        std::snprintf(buf, sizeof buf, "%d,%.2f\n", n_batteries[ni],
                      park_total_eur(Strategy::sto_depth, static_cast<int>(ni)));
        os << buf;
    }
}

void BacktestResult::write_park_gain_all_csv(std::ostream& os) const {
    os << "strategy,n_batteries,total_eur\n";
    char buf[96];
    for (const Strategy s : strategies)
        for (std::size_t ni = 0; ni < n_batteries.size(); ++ni) {
            std::snprintf(buf, sizeof buf, "%s,%d,%.2f\n", strategy_name(s), n_batteries[ni],
                          park_total_eur(s, static_cast<int>(ni)));
            os << buf;
        }
}

} // namespace idstore::bt

#include "idstore/val/deterministic.hpp"

#include <cmath>
#include <limits>

#include "idstore/errors.hpp"

namespace idstore::val {

double unit_price(double c, double forecast, int maturity, double tau_hours,
                  const BatterySpec& battery, const ImpactSpec& impact) {
    double price = forecast;
    if (impact.liq && c != 0.0) {
        const double park = static_cast<double>(impact.n_batteries);
        const double volume = impact.impact_on_grid_volume ? park * grid_volume(c, battery)
                                                           : park * c;
        price += liq::eval_cost(*impact.liq, maturity, tau_hours, volume);
    }
    return price;
}

double control_cash(double c, double forecast, int maturity, double tau_hours,
                    const BatterySpec& battery, const ImpactSpec& impact) {
    if (c == 0.0) return 0.0;
    const double conv = c >= 0.0 ? 1.0 / battery.efficiency : battery.efficiency;
    return -c * conv * unit_price(c, forecast, maturity, tau_hours, battery, impact);
}

ControlGrid ControlGrid::make(const BatterySpec& battery, double step) {
    auto to_steps = [step](double v, const char* what) {
        const double scaled = v / step;
        const double rounded = std::nearbyint(scaled);
        if (std::abs(scaled - rounded) > 1e-9)
            throw InfeasibleSpec(std::string(what) + " is not a multiple of the control step");
        return static_cast<int>(rounded);
    };
    ControlGrid g;
    g.step = step;
    g.n_stock = to_steps(battery.capacity, "capacity") + 1;
    g.rate_steps = to_steps(battery.rate, "rate");
    g.initial_index = to_steps(battery.initial_stock, "initial stock");
    if (g.initial_index < 0 || g.initial_index >= g.n_stock)
        throw InfeasibleSpec("initial stock outside [0, capacity]");
    if (g.rate_steps <= 0) throw InfeasibleSpec("rate must be positive");
    return g;
}

DeterministicResult optimize_deterministic(const std::vector<double>& spot,
                                           const BatterySpec& battery, const ImpactSpec& impact) {
    const ControlGrid grid = ControlGrid::make(battery);
    const int n = static_cast<int>(spot.size());
    const int n_stock = grid.n_stock;

    // backward value over the stock grid plus the argmax table for recovery
    std::vector<double> v_next(static_cast<std::size_t>(n_stock), 0.0);
    std::vector<double> v_cur(static_cast<std::size_t>(n_stock), 0.0);
    std::vector<int> best(static_cast<std::size_t>(n) * static_cast<std::size_t>(n_stock), 0);

    for (int i = n; i >= 1; --i) {
        for (int s = 0; s < n_stock; ++s) {
            double best_val = -std::numeric_limits<double>::infinity();
            int best_k = 0;
            for (int k = -grid.rate_steps; k <= grid.rate_steps; ++k) {
                const int s2 = s + k;
                if (s2 < 0 || s2 >= n_stock) continue;
                const double c = k * grid.step;
                const double val =
                    control_cash(c, spot[static_cast<std::size_t>(i - 1)], i,
                                 static_cast<double>(impact.delta), battery, impact) +
                    v_next[static_cast<std::size_t>(s2)];
                if (val > best_val) {
                    best_val = val;
                    best_k = k;
                }
            }
            v_cur[static_cast<std::size_t>(s)] = best_val;
            best[static_cast<std::size_t>(i - 1) * n_stock + static_cast<std::size_t>(s)] = best_k;
        }
        std::swap(v_cur, v_next);
    }

    DeterministicResult out;
    out.value = v_next[static_cast<std::size_t>(grid.initial_index)];
    out.controls.resize(static_cast<std::size_t>(n));
    int s = grid.initial_index;
    for (int i = 1; i <= n; ++i) {
        const int k = best[static_cast<std::size_t>(i - 1) * n_stock + static_cast<std::size_t>(s)];
        out.controls[static_cast<std::size_t>(i - 1)] = k * grid.step;
        s += k;
    }
    return out;
}

} // namespace idstore::val

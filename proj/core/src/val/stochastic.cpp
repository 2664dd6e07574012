#include "idstore/val/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "idstore/errors.hpp"
#include "regression_detail.hpp"

namespace idstore::val {

std::vector<double> decision_grid(const std::vector<double>& maturities, int delta) {
    std::vector<double> grid;
    grid.reserve(maturities.size());
    for (double T : maturities) grid.push_back(T - static_cast<double>(delta));
    return grid;
}

std::vector<double> decision_grid_two_index(const std::vector<double>& maturities) {
    std::vector<double> grid;
    grid.reserve(maturities.size() + 1);
    grid.push_back(maturities.front() - 3.0);
    for (double T : maturities) grid.push_back(T - 2.0);
    return grid;
}

int StepPolicy::group_of(const std::vector<double>& x, int meshes) const {
    if (!indicator_keys.empty()) {
        auto it = std::lower_bound(indicator_keys.begin(), indicator_keys.end(), x);
        if (it == indicator_keys.end()) --it;
        return static_cast<int>(it - indicator_keys.begin());
    }
    int cell = 0, stride = 1;
    for (std::size_t d = 0; d < cuts.size(); ++d) {
        const auto& cd = cuts[d];
        const int digit =
            static_cast<int>(std::upper_bound(cd.begin(), cd.end(), x[d]) - cd.begin());
        cell += digit * stride;
        stride *= meshes;
    }
    return cell_group.empty() ? 0 : cell_group[static_cast<std::size_t>(cell)];
}

double BatteryPolicy::continuation(int step, int stock_index,
                                   const std::vector<double>& regressor_values, int group) const {
    const StepPolicy& sp = steps[static_cast<std::size_t>(step - 1)];
    if (sp.coeffs.empty()) return 0.0;
    const int n_stock = static_cast<int>(stock_grid.size());
    const double* c = sp.coeffs.data() +
                      (static_cast<std::size_t>(group) * n_stock + static_cast<std::size_t>(stock_index)) *
                          sp.basis;
    double v = c[0];
    for (int j = 1; j < sp.basis; ++j) v += c[j] * regressor_values[static_cast<std::size_t>(j - 1)];
    return v;
}

double BatteryPolicy::control(int step, double stock, const std::vector<double>& prices) const {
    const ControlGrid grid = ControlGrid::make(battery);
    const StepPolicy& sp = steps[static_cast<std::size_t>(step - 1)];
    const int n_stock = static_cast<int>(stock_grid.size());
    int s_idx = static_cast<int>(std::nearbyint(stock / grid.step));
    s_idx = std::clamp(s_idx, 0, n_stock - 1);

    std::vector<double> x(sp.regressors.size());
    for (std::size_t d = 0; d < sp.regressors.size(); ++d)
        x[d] = prices[static_cast<std::size_t>(sp.regressors[d] - 1)];
    const int group = sp.group_of(x, meshes);

    const double f = prices[static_cast<std::size_t>(step - 1)];
    double best_val = -std::numeric_limits<double>::infinity();
    int best_k = 0;
    for (int k = -grid.rate_steps; k <= grid.rate_steps; ++k) {
        const int s2 = s_idx + k;
        if (s2 < 0 || s2 >= n_stock) continue;
        const double c = k * grid.step;
        const double val =
            control_cash(c, f, step, static_cast<double>(impact.delta), battery, impact) +
            continuation(step, s2, x, group);
        if (val > best_val) {
            best_val = val;
            best_k = k;
        }
    }
    return best_k * grid.step;
}

void BatteryPolicy::save_json(std::ostream& os) const {
    nlohmann::json j;
    j["value_eur_per_battery"] = value;
    j["stock_grid"] = stock_grid;
    j["meshes_per_dim"] = meshes;
    j["n_batteries"] = impact.n_batteries;
    j["delta_hours"] = impact.delta;
    nlohmann::json steps_json = nlohmann::json::array();
    for (const StepPolicy& sp : steps) {
        nlohmann::json s;
        s["decision_time"] = sp.decision_time;
        s["regressors"] = sp.regressors;
        s["cuts"] = sp.cuts;
        s["cell_group"] = sp.cell_group;
        s["basis"] = sp.basis;
        s["n_groups"] = sp.n_groups;
        s["coeffs"] = sp.coeffs;  // [group][stock][basis] flattened
        steps_json.push_back(std::move(s));
    }
    j["steps"] = std::move(steps_json);
    os << j.dump() << '\n';
}

BatteryPolicy optimize_stochastic(const mid::PricePathSet& paths, const BatterySpec& battery,
                                  const ImpactSpec& impact, const RegressionConfig& cfg) {
    const int M = paths.n_maturities();
    const int n_paths = paths.n_paths;
    const ControlGrid grid = ControlGrid::make(battery);
    const int n_stock = grid.n_stock;
    if (paths.maturities.empty()) throw GridMismatch("path set carries no maturities");

    if (!cfg.scenario_indicator) {
        int max_dim = std::min(cfg.max_regressors, M);
        long long cells = 1;
        for (int d = 0; d < max_dim; ++d) cells *= cfg.meshes_per_dim;
        if (static_cast<long long>(n_paths) < cells * cfg.min_paths_per_cell)
            throw TooFewPaths("optimize_stochastic: fewer than min_paths_per_cell per cell");
    }

    std::vector<int> gidx(static_cast<std::size_t>(M));
    for (int i = 1; i <= M; ++i)
        gidx[static_cast<std::size_t>(i - 1)] = paths.grid_index(
            paths.maturities[static_cast<std::size_t>(i - 1)] - static_cast<double>(impact.delta));

    BatteryPolicy policy;
    policy.battery = battery;
    policy.impact = impact;
    policy.meshes = cfg.meshes_per_dim;
    policy.stock_grid.resize(static_cast<std::size_t>(n_stock));
    for (int k = 0; k < n_stock; ++k) policy.stock_grid[static_cast<std::size_t>(k)] = k * grid.step;
    policy.steps.resize(static_cast<std::size_t>(M));

    std::vector<double> v(static_cast<std::size_t>(n_paths) * n_stock, 0.0);
    std::vector<double> v_new(v.size(), 0.0);
    std::vector<double> xs;
    std::vector<int> path_group;
    std::vector<double> cont(static_cast<std::size_t>(n_stock), 0.0);
    const double tau = static_cast<double>(impact.delta);

    for (int i = M; i >= 1; --i) {
        const int dim = std::min(cfg.max_regressors, M - i + 1);
        StepPolicy& sp = policy.steps[static_cast<std::size_t>(i - 1)];
        sp.decision_time = paths.grid[static_cast<std::size_t>(gidx[static_cast<std::size_t>(i - 1)])];
        sp.regressors.resize(static_cast<std::size_t>(dim));
        for (int d = 0; d < dim; ++d) sp.regressors[static_cast<std::size_t>(d)] = i + d;

        xs.resize(static_cast<std::size_t>(n_paths) * dim);
        for (int p = 0; p < n_paths; ++p)
            for (int d = 0; d < dim; ++d)
                xs[static_cast<std::size_t>(p) * dim + static_cast<std::size_t>(d)] =
                    paths.at(p, gidx[static_cast<std::size_t>(i - 1)], i + d);

        const detail::CellModel cm = detail::build_cells(xs, n_paths, dim, cfg, path_group);
        sp.cuts = cm.cuts;
        sp.cell_group = cm.cell_group;
        sp.indicator_keys = cm.indicator_keys;
        sp.n_groups = cm.n_groups;
        sp.basis = cm.basis;
        if (i < M)
            sp.coeffs = detail::regress_states(cm, xs, path_group, n_paths, v, n_stock);

        for (int p = 0; p < n_paths; ++p) {
            const double* x = xs.data() + static_cast<std::ptrdiff_t>(p) * dim;
            if (i < M) {
                const int g = path_group[static_cast<std::size_t>(p)];
                for (int k = 0; k < n_stock; ++k) {
                    const double* c =
                        sp.coeffs.data() +
                        (static_cast<std::size_t>(g) * n_stock + static_cast<std::size_t>(k)) * sp.basis;
                    double val = c[0];
                    for (int j = 1; j < sp.basis; ++j) val += c[j] * x[j - 1];
                    cont[static_cast<std::size_t>(k)] = val;
                }
            } else {
                std::fill(cont.begin(), cont.end(), 0.0);
            }
            const double f = x[0];  // traded maturity is the first regressor
            for (int s = 0; s < n_stock; ++s) {
                double best = -std::numeric_limits<double>::infinity();
                for (int k = -grid.rate_steps; k <= grid.rate_steps; ++k) {
                    const int s2 = s + k;
                    if (s2 < 0 || s2 >= n_stock) continue;
                    const double val = control_cash(k * grid.step, f, i, tau, battery, impact) +
                                       cont[static_cast<std::size_t>(s2)];
                    if (val > best) best = val;
                }
                v_new[static_cast<std::size_t>(p) * n_stock + static_cast<std::size_t>(s)] = best;
            }
        }
        std::swap(v, v_new);
    }

    double total = 0.0;
    for (int p = 0; p < n_paths; ++p)
        total += v[static_cast<std::size_t>(p) * n_stock + static_cast<std::size_t>(grid.initial_index)];
    policy.value = total / static_cast<double>(n_paths);
    return policy;
}

double evaluate_policy(const ControlPolicy& policy, const mid::PricePathSet& paths,
                       const BatterySpec& battery, const ImpactSpec& impact) {
    const int M = paths.n_maturities();
    const ControlGrid grid = ControlGrid::make(battery);
    std::vector<int> gidx(static_cast<std::size_t>(M));
    for (int i = 1; i <= M; ++i)
        gidx[static_cast<std::size_t>(i - 1)] = paths.grid_index(
            paths.maturities[static_cast<std::size_t>(i - 1)] - static_cast<double>(impact.delta));

    const double tau = static_cast<double>(impact.delta);
    double total = 0.0;
    std::vector<double> prices(static_cast<std::size_t>(M));
    for (int p = 0; p < paths.n_paths; ++p) {
        int s = grid.initial_index;
        double cash = 0.0;
        for (int i = 1; i <= M; ++i) {
            for (int m = 1; m <= M; ++m)
                prices[static_cast<std::size_t>(m - 1)] =
                    paths.at(p, gidx[static_cast<std::size_t>(i - 1)], m);
            const double c = policy.control(i, s * grid.step, prices);
            const double scaled = c / grid.step;
            const int k = static_cast<int>(std::nearbyint(scaled));
            if (std::abs(scaled - k) > 1e-6)
                throw StockViolation("policy control off the 0.1 MWh grid");
            if (std::abs(k) > grid.rate_steps || s + k < 0 || s + k >= grid.n_stock)
                throw StockViolation("policy drives the stock outside [0, capacity]");
            cash += control_cash(k * grid.step, prices[static_cast<std::size_t>(i - 1)], i, tau,
                                 battery, impact);
            s += k;
        }
        total += cash;
    }
    return total / static_cast<double>(paths.n_paths);
}

} // namespace idstore::val

#pragma once

#include <iosfwd>
#include <vector>

#include "idstore/mid/simulate.hpp"
#include "idstore/val/battery.hpp"

namespace idstore::val {

struct RegressionConfig {
    int meshes_per_dim = 4;       // equal-probability meshes per regressor
    int max_regressors = 4;       // products kept for conditioning
    int min_paths_per_cell = 50;  // smaller cells are merged with neighbours
    // Conditions on the exact regressor vector instead of quantile cells;
    // used to make scenario-tree problems exact.
    bool scenario_indicator = false;
};

/// Decision times T_i - delta for i = 1..M.
std::vector<double> decision_grid(const std::vector<double>& maturities, int delta);
/// Same plus the extra T_1 - 3 instant used by the two-index problem.
std::vector<double> decision_grid_two_index(const std::vector<double>& maturities);

/// Anything that can map (step, stock, prices at the decision time) to a
/// storage control.
class ControlPolicy {
public:
    virtual ~ControlPolicy() = default;
    /// step is 1-based; prices holds every maturity's price at the step's
    /// decision time.
    virtual double control(int step, double stock, const std::vector<double>& prices) const = 0;
};

class FixedControls : public ControlPolicy {
public:
    explicit FixedControls(std::vector<double> controls) : controls_(std::move(controls)) {}
    double control(int step, double, const std::vector<double>&) const override {
        return controls_[static_cast<std::size_t>(step - 1)];
    }

private:
    std::vector<double> controls_;
};

/// Per-step continuation tables: quantile cuts per regressor, the cell->group
/// merge map, and the linear coefficients per (group, stock).
struct StepPolicy {
    double decision_time = 0.0;
    std::vector<int> regressors;            // 1-based maturity indices
    std::vector<std::vector<double>> cuts;  // per regressor, internal cut points
    std::vector<int> cell_group;            // raw cell -> merged group
    std::vector<std::vector<double>> indicator_keys;  // scenario-indicator mode
    int n_groups = 0;
    int basis = 0;                 // 1 (indicator) or 1 + #regressors
    std::vector<double> coeffs;    // [group][stock][basis], empty on the last step

    int group_of(const std::vector<double>& x, int meshes) const;
};

/// Regression-based policy: continuation-value tables plus the battery and
/// impact context needed to re-run the control maximization on new prices.
class BatteryPolicy : public ControlPolicy {
public:
    BatterySpec battery;
    ImpactSpec impact;
    int meshes = 4;
    std::vector<double> stock_grid;
    std::vector<StepPolicy> steps;
    double value = 0.0;  // in-sample estimate, EUR per battery

    double control(int step, double stock, const std::vector<double>& prices) const override;

    /// Estimated continuation of holding stock index k past `step`.
    double continuation(int step, int stock_index, const std::vector<double>& regressor_values,
                        int group) const;

    void save_json(std::ostream& os) const;
};

/// Backward dynamic programming over the stock grid with per-cell linear
/// regression of the continuation values on the shortest-maturity live
/// prices. Throws TooFewPaths / GridMismatch / InfeasibleSpec.
BatteryPolicy optimize_stochastic(const mid::PricePathSet& paths, const BatterySpec& battery,
                                  const ImpactSpec& impact, const RegressionConfig& cfg = {});

/// Forward-simulates a policy on a path set and averages the realized cash.
/// Throws StockViolation when the policy leaves the admissible stock set.
double evaluate_policy(const ControlPolicy& policy, const mid::PricePathSet& paths,
                       const BatterySpec& battery, const ImpactSpec& impact);

} // namespace idstore::val

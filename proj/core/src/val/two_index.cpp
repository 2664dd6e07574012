#include "idstore/val/two_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "idstore/errors.hpp"
#include "regression_detail.hpp"

namespace idstore::val {

TwoIndexResult optimize_two_index(const mid::PricePathSet& paths, const BatterySpec& battery,
                                  const ImpactSpec& impact, const RegressionConfig& cfg,
                                  bool enable_second_index) {
    if (impact.delta != 2) throw InfeasibleSpec("two-index optimization assumes delta == 2");
    const int M = paths.n_maturities();
    const int n_paths = paths.n_paths;
    const ControlGrid grid = ControlGrid::make(battery);
    const int n_stock = grid.n_stock;
    const int n_y = 2 * grid.rate_steps + 1;  // pending 3h-ahead volume in [-rate, rate]
    const int n_states = n_stock * n_y;
    const int y_zero = grid.rate_steps;

    if (!cfg.scenario_indicator) {
        int max_dim = std::min(cfg.max_regressors, M);
        long long cells = 1;
        for (int d = 0; d < max_dim; ++d) cells *= cfg.meshes_per_dim;
        if (static_cast<long long>(n_paths) < cells * cfg.min_paths_per_cell)
            throw TooFewPaths("optimize_two_index: fewer than min_paths_per_cell per cell");
    }

    // decision instants: u_0 = T_1 - 3, u_k = T_k - 2
    std::vector<int> gidx(static_cast<std::size_t>(M + 1));
    gidx[0] = paths.grid_index(paths.maturities.front() - 3.0);
    for (int k = 1; k <= M; ++k)
        gidx[static_cast<std::size_t>(k)] =
            paths.grid_index(paths.maturities[static_cast<std::size_t>(k - 1)] - 2.0);

    std::vector<double> v(static_cast<std::size_t>(n_paths) * n_states, 0.0);
    std::vector<double> v_new(v.size(), 0.0);
    std::vector<double> xs;
    std::vector<int> path_group;
    std::vector<double> cont(static_cast<std::size_t>(n_states), 0.0);
    std::vector<double> w(static_cast<std::size_t>(n_stock), 0.0);
    std::vector<double> cash2(static_cast<std::size_t>(2 * grid.rate_steps + 1), 0.0);
    std::vector<double> cash3(static_cast<std::size_t>(2 * grid.rate_steps + 1), 0.0);
    double value = 0.0;

    const int k3_lo = enable_second_index ? -grid.rate_steps : 0;
    const int k3_hi = enable_second_index ? grid.rate_steps : 0;

    for (int k = M; k >= 0; --k) {
        const int base = std::max(k, 1);
        const int dim = std::min(cfg.max_regressors, M - base + 1);
        xs.resize(static_cast<std::size_t>(n_paths) * dim);
        for (int p = 0; p < n_paths; ++p)
            for (int d = 0; d < dim; ++d)
                xs[static_cast<std::size_t>(p) * dim + static_cast<std::size_t>(d)] =
                    paths.at(p, gidx[static_cast<std::size_t>(k)], base + d);

        const detail::CellModel cm = detail::build_cells(xs, n_paths, dim, cfg, path_group);
        std::vector<double> coeffs;
        if (k < M) coeffs = detail::regress_states(cm, xs, path_group, n_paths, v, n_states);

        double value_acc = 0.0;
        for (int p = 0; p < n_paths; ++p) {
            const double* x = xs.data() + static_cast<std::ptrdiff_t>(p) * dim;
            if (k < M) {
                const int g = path_group[static_cast<std::size_t>(p)];
                for (int st = 0; st < n_states; ++st) {
                    const double* c =
                        coeffs.data() +
                        (static_cast<std::size_t>(g) * n_states + static_cast<std::size_t>(st)) *
                            cm.basis;
                    double val = c[0];
                    for (int j = 1; j < cm.basis; ++j) val += c[j] * x[j - 1];
                    cont[static_cast<std::size_t>(st)] = val;
                }
            } else {
                std::fill(cont.begin(), cont.end(), 0.0);
            }

            // immediate cash of the two trades at this instant
            const double f2 = k >= 1 ? paths.at(p, gidx[static_cast<std::size_t>(k)], k) : 0.0;
            const double f3 =
                k <= M - 1 ? paths.at(p, gidx[static_cast<std::size_t>(k)], k + 1) : 0.0;
            for (int kc = -grid.rate_steps; kc <= grid.rate_steps; ++kc) {
                const std::size_t idx = static_cast<std::size_t>(kc + grid.rate_steps);
                cash2[idx] = k >= 1 ? control_cash(kc * grid.step, f2, k, 2.0, battery, impact) : 0.0;
                cash3[idx] =
                    k <= M - 1 ? control_cash(kc * grid.step, f3, k + 1, 3.0, battery, impact) : 0.0;
            }

            // W(s') = best 3h-ahead trade given the post-delivery stock s'
            if (k >= 1) {
                for (int s2 = 0; s2 < n_stock; ++s2) {
                    double best = -std::numeric_limits<double>::infinity();
                    if (k == M) {
                        best = 0.0;  // no further product to trade
                    } else {
                        for (int k3 = k3_lo; k3 <= k3_hi; ++k3) {
                            const double val =
                                cash3[static_cast<std::size_t>(k3 + grid.rate_steps)] +
                                cont[static_cast<std::size_t>(s2 * n_y + (k3 + y_zero))];
                            if (val > best) best = val;
                        }
                    }
                    w[static_cast<std::size_t>(s2)] = best;
                }
                for (int s = 0; s < n_stock; ++s) {
                    for (int y = 0; y < n_y; ++y) {
                        const int pending = y - y_zero;
                        double best = -std::numeric_limits<double>::infinity();
                        for (int k2 = -grid.rate_steps; k2 <= grid.rate_steps; ++k2) {
                            const int delivered = pending + k2;
                            if (std::abs(delivered) > grid.rate_steps) continue;
                            const int s2 = s + delivered;
                            if (s2 < 0 || s2 >= n_stock) continue;
                            const double val =
                                cash2[static_cast<std::size_t>(k2 + grid.rate_steps)] +
                                w[static_cast<std::size_t>(s2)];
                            if (val > best) best = val;
                        }
                        v_new[static_cast<std::size_t>(p) * n_states +
                              static_cast<std::size_t>(s * n_y + y)] = best;
                    }
                }
            } else {
                // k == 0: only the 3h-ahead trade on the first product
                double best = -std::numeric_limits<double>::infinity();
                for (int k3 = k3_lo; k3 <= k3_hi; ++k3) {
                    const double val = cash3[static_cast<std::size_t>(k3 + grid.rate_steps)] +
                                       cont[static_cast<std::size_t>(grid.initial_index * n_y +
                                                                     (k3 + y_zero))];
                    if (val > best) best = val;
                }
                value_acc += best;
            }
        }
        if (k >= 1) std::swap(v, v_new);
        else value = value_acc / static_cast<double>(n_paths);
    }

    return TwoIndexResult{value};
}

} // namespace idstore::val

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "idstore/val/stochastic.hpp"

namespace idstore::val::detail {

/// Builds the per-step conditioning structure from the regressor sample:
/// either meshes^dim quantile cells merged up to a minimum occupancy, or one
/// group per distinct regressor vector (scenario-indicator mode).
struct CellModel {
    int dim = 0;
    int meshes = 4;
    bool indicator = false;
    int basis = 1;  // 1 + dim, or 1 in indicator mode
    std::vector<std::vector<double>> cuts;
    std::vector<int> cell_group;
    std::vector<std::vector<double>> indicator_keys;
    int n_groups = 0;

    static int digit(const std::vector<double>& cuts_d, double x) {
        return static_cast<int>(std::upper_bound(cuts_d.begin(), cuts_d.end(), x) - cuts_d.begin());
    }

    int group_of(const double* x) const {
        if (indicator) {
            std::vector<double> key(x, x + dim);
            auto it = std::lower_bound(indicator_keys.begin(), indicator_keys.end(), key);
            if (it == indicator_keys.end()) --it;
            return static_cast<int>(it - indicator_keys.begin());
        }
        int cell = 0, stride = 1;
        for (int d = 0; d < dim; ++d) {
            cell += digit(cuts[static_cast<std::size_t>(d)], x[d]) * stride;
            stride *= meshes;
        }
        return cell_group[static_cast<std::size_t>(cell)];
    }
};

inline CellModel build_cells(const std::vector<double>& xs, int n_paths, int dim,
                             const RegressionConfig& cfg, std::vector<int>& path_group) {
    CellModel cm;
    cm.dim = dim;
    cm.meshes = cfg.meshes_per_dim;
    cm.indicator = cfg.scenario_indicator;
    path_group.assign(static_cast<std::size_t>(n_paths), 0);

    if (cm.indicator) {
        cm.basis = 1;
        std::map<std::vector<double>, int> keys;
        for (int p = 0; p < n_paths; ++p) {
            std::vector<double> key(xs.begin() + static_cast<std::ptrdiff_t>(p) * dim,
                                    xs.begin() + static_cast<std::ptrdiff_t>(p + 1) * dim);
            keys.emplace(std::move(key), 0);
        }
        int gid = 0;
        for (auto& [key, id] : keys) {
            id = gid++;
            cm.indicator_keys.push_back(key);
        }
        cm.n_groups = gid;
        for (int p = 0; p < n_paths; ++p) {
            std::vector<double> key(xs.begin() + static_cast<std::ptrdiff_t>(p) * dim,
                                    xs.begin() + static_cast<std::ptrdiff_t>(p + 1) * dim);
            path_group[static_cast<std::size_t>(p)] = keys.at(key);
        }
        return cm;
    }

    cm.basis = 1 + dim;
    cm.cuts.resize(static_cast<std::size_t>(dim));
    std::vector<double> column(static_cast<std::size_t>(n_paths));
    for (int d = 0; d < dim; ++d) {
        for (int p = 0; p < n_paths; ++p)
            column[static_cast<std::size_t>(p)] = xs[static_cast<std::size_t>(p) * dim + d];
        std::sort(column.begin(), column.end());
        auto& cuts_d = cm.cuts[static_cast<std::size_t>(d)];
        for (int k = 1; k < cm.meshes; ++k)
            cuts_d.push_back(column[static_cast<std::size_t>(n_paths) * k / cm.meshes]);
    }

    int n_cells = 1;
    for (int d = 0; d < dim; ++d) n_cells *= cm.meshes;
    std::vector<int> counts(static_cast<std::size_t>(n_cells), 0);
    std::vector<int> raw_cell(static_cast<std::size_t>(n_paths));
    for (int p = 0; p < n_paths; ++p) {
        int cell = 0, stride = 1;
        for (int d = 0; d < dim; ++d) {
            cell += CellModel::digit(cm.cuts[static_cast<std::size_t>(d)],
                                     xs[static_cast<std::size_t>(p) * dim + d]) * stride;
            stride *= cm.meshes;
        }
        raw_cell[static_cast<std::size_t>(p)] = cell;
        ++counts[static_cast<std::size_t>(cell)];
    }

    // merge underfull cells into the nearest well-populated one
    std::vector<int> target(static_cast<std::size_t>(n_cells), -1);
    bool any_full = false;
    for (int c = 0; c < n_cells; ++c)
        if (counts[static_cast<std::size_t>(c)] >= cfg.min_paths_per_cell) {
            target[static_cast<std::size_t>(c)] = c;
            any_full = true;
        }
    if (!any_full) {
        cm.cell_group.assign(static_cast<std::size_t>(n_cells), 0);
        cm.n_groups = 1;
        std::fill(path_group.begin(), path_group.end(), 0);
        return cm;
    }
    for (int c = 0; c < n_cells; ++c) {
        if (target[static_cast<std::size_t>(c)] >= 0) continue;
        for (int r = 1; r < n_cells; ++r) {
            const int lo = c - r, hi = c + r;
            if (lo >= 0 && target[static_cast<std::size_t>(lo)] == lo) { target[static_cast<std::size_t>(c)] = lo; break; }
            if (hi < n_cells && target[static_cast<std::size_t>(hi)] == hi) { target[static_cast<std::size_t>(c)] = hi; break; }
        }
    }
    // compact group ids
    std::vector<int> gid(static_cast<std::size_t>(n_cells), -1);
    int next = 0;
    cm.cell_group.assign(static_cast<std::size_t>(n_cells), 0);
    for (int c = 0; c < n_cells; ++c) {
        const int t = target[static_cast<std::size_t>(c)];
        if (gid[static_cast<std::size_t>(t)] < 0) gid[static_cast<std::size_t>(t)] = next++;
        cm.cell_group[static_cast<std::size_t>(c)] = gid[static_cast<std::size_t>(t)];
    }
    cm.n_groups = next;
    for (int p = 0; p < n_paths; ++p)
        path_group[static_cast<std::size_t>(p)] =
            cm.cell_group[static_cast<std::size_t>(raw_cell[static_cast<std::size_t>(p)])];
    return cm;
}

/// Least squares of every state's next-step values on the per-group basis.
/// Returns coeffs[group][state][basis] flattened. Rank-deficient groups get
/// the minimum-norm solution, which still reproduces the group means.
inline std::vector<double> regress_states(const CellModel& cm, const std::vector<double>& xs,
                                          const std::vector<int>& path_group, int n_paths,
                                          const std::vector<double>& values, int n_states) {
    const int B = cm.basis;
    const int G = cm.n_groups;
    std::vector<Eigen::MatrixXd> gram(static_cast<std::size_t>(G), Eigen::MatrixXd::Zero(B, B));
    std::vector<Eigen::MatrixXd> rhs(static_cast<std::size_t>(G), Eigen::MatrixXd::Zero(B, n_states));
    Eigen::VectorXd phi(B);
    for (int p = 0; p < n_paths; ++p) {
        phi(0) = 1.0;
        for (int d = 1; d < B; ++d) phi(d) = xs[static_cast<std::size_t>(p) * cm.dim + (d - 1)];
        const int g = path_group[static_cast<std::size_t>(p)];
        gram[static_cast<std::size_t>(g)].noalias() += phi * phi.transpose();
        rhs[static_cast<std::size_t>(g)].noalias() +=
            phi * Eigen::Map<const Eigen::RowVectorXd>(
                      values.data() + static_cast<std::ptrdiff_t>(p) * n_states, n_states);
    }
    std::vector<double> coeffs(static_cast<std::size_t>(G) * static_cast<std::size_t>(n_states) *
                                   static_cast<std::size_t>(B),
                               0.0);
    for (int g = 0; g < G; ++g) {
        const Eigen::MatrixXd sol =
            gram[static_cast<std::size_t>(g)].completeOrthogonalDecomposition().solve(
                rhs[static_cast<std::size_t>(g)]);
        for (int k = 0; k < n_states; ++k)
            for (int j = 0; j < B; ++j)
                coeffs[(static_cast<std::size_t>(g) * n_states + static_cast<std::size_t>(k)) * B +
                       static_cast<std::size_t>(j)] = sol(j, k);
    }
    return coeffs;
}

} // namespace idstore::val::detail

#include "idstore/mid/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Dense>

#include "idstore/errors.hpp"
#include "idstore/parallel.hpp"
#include "idstore/rng.hpp"

namespace idstore::mid {

namespace {

/// One inhomogeneous compound-Poisson component with intensity
/// factor * exp(-kappa (horizon - s)) on [t0, horizon].
struct Process {
    double factor;
    double horizon;
    double sign;        // +1 or -1
    int own_maturity;   // 1-based; 0 when the process is a common one
    int common_level;   // j: moves maturities 1..j; 0 for own processes
};

std::vector<Process> build_processes(const MidPriceParams& p) {
    std::vector<Process> out;
    const int M = p.n_maturities();
    out.reserve(static_cast<std::size_t>(4 * M));
    for (int m = 1; m <= M; ++m) {
        for (double sign : {+1.0, -1.0})
            out.push_back({p.mu, p.maturity(m), sign, m, 0});
        double factor;
        if (m < M) {
            const double gap = p.maturity(m + 1) - p.maturity(m);
            factor = p.mu_c * (1.0 - std::exp(-p.kappa * gap));
        } else {
            factor = p.mu_c;
        }
        for (double sign : {+1.0, -1.0})
            out.push_back({factor, p.maturity(m), sign, 0, m});
    }
    return out;
}

/// Draws the jump times of one process by exact inversion of the cumulative
/// intensity Lambda(t) = (c/kappa) (exp(-kappa(T-t)) - exp(-kappa(T-t0))).
template <typename OnJump>
void draw_jumps(const Process& proc, const MidPriceParams& p, Rng& rng,
                const std::vector<double>& sizes, OnJump&& on_jump) {
    if (proc.factor <= 0.0) return;
    const double e0 = std::exp(-p.kappa * (proc.horizon - p.t0));
    double u = 0.0;
    while (true) {
        u += rng.exponential();
        const double w = p.kappa * u / proc.factor + e0;
        if (w >= 1.0) break;
        const double t = proc.horizon + std::log(w) / p.kappa;
        const double y = sizes[rng.uniform_index(sizes.size())];
        on_jump(t, proc.sign * y);
    }
}

void fill_path_jumps(const MidPriceParams& p, const std::vector<double>& f0,
                     const std::vector<double>& grid, std::uint64_t seed, std::uint64_t path,
                     const std::vector<Process>& procs, double* out) {
    const int M = p.n_maturities();
    const std::size_t G = grid.size();
    std::fill(out, out + G * static_cast<std::size_t>(M), 0.0);

    for (std::size_t pid = 0; pid < procs.size(); ++pid) {
        const Process& proc = procs[pid];
        Rng rng(seed, path, pid);
        draw_jumps(proc, p, rng, p.jump_law.sizes, [&](double t, double dy) {
            const auto git = std::lower_bound(grid.begin(), grid.end(), t);
            if (git == grid.end()) return;
            const std::size_t g = static_cast<std::size_t>(git - grid.begin());
            if (proc.own_maturity > 0) {
                out[g * static_cast<std::size_t>(M) + static_cast<std::size_t>(proc.own_maturity - 1)] += dy;
            } else {
                // common shock at level j: moves every maturity 1..j still alive at t
                for (int m = 1; m <= proc.common_level; ++m) {
                    if (p.maturity(m) < t) continue;
                    out[g * static_cast<std::size_t>(M) + static_cast<std::size_t>(m - 1)] += dy;
                }
            }
        });
    }

    // prefix-sum the increments and add the initial prices
    for (int m = 0; m < M; ++m) {
        double acc = f0[static_cast<std::size_t>(m)];
        for (std::size_t g = 0; g < G; ++g) {
            acc += out[g * static_cast<std::size_t>(M) + static_cast<std::size_t>(m)];
            out[g * static_cast<std::size_t>(M) + static_cast<std::size_t>(m)] = acc;
        }
    }
}

struct DiffusionPlan {
    Eigen::MatrixXd chol;            // Cholesky factor of the correlation matrix
    std::vector<double> step_var;    // [step][m] integrated variance per grid step
};

DiffusionPlan build_diffusion_plan(const MidPriceParams& p, const std::vector<double>& grid) {
    const int M = p.n_maturities();
    DiffusionPlan plan;
    Eigen::MatrixXd corr(M, M);
    for (int l = 1; l <= M; ++l)
        for (int k = 1; k <= M; ++k)
            corr(l - 1, k - 1) = l == k ? 1.0 : theoretical_corr(p, l, k);
    Eigen::LLT<Eigen::MatrixXd> llt(corr);
    if (llt.info() != Eigen::Success) {
        corr += 1e-12 * Eigen::MatrixXd::Identity(M, M);
        llt.compute(corr);
    }
    plan.chol = llt.matrixL();

    const JumpLawStats stats =
        p.jump_law.sizes.empty() ? JumpLawStats{0.0, 0.0} : jump_law_stats(p.jump_law);
    const double scale = 2.0 * stats.m2 * (p.mu + p.mu_c) / p.kappa;
    plan.step_var.assign(grid.size() * static_cast<std::size_t>(M), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double a = g == 0 ? p.t0 : grid[g - 1];
        for (int m = 1; m <= M; ++m) {
            const double T = p.maturity(m);
            const double b = std::min(grid[g], T);
            if (b <= a) continue;
            const double integral = scale * (std::exp(-p.kappa * (T - b)) - std::exp(-p.kappa * (T - a)));
            plan.step_var[g * static_cast<std::size_t>(M) + static_cast<std::size_t>(m - 1)] =
                std::max(0.0, integral);
        }
    }
    return plan;
}

void fill_path_diffusion(const MidPriceParams& p, const std::vector<double>& f0,
                         const std::vector<double>& grid, std::uint64_t seed, std::uint64_t path,
                         const DiffusionPlan& plan, double* out) {
    const int M = p.n_maturities();
    Rng rng(seed, path, 0);
    Eigen::VectorXd z(M), w(M);
    std::vector<double> level(f0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        for (int m = 0; m < M; ++m) z(m) = rng.normal();
        w = plan.chol * z;
        for (int m = 0; m < M; ++m) {
            const double var = plan.step_var[g * static_cast<std::size_t>(M) + static_cast<std::size_t>(m)];
            if (var > 0.0) level[static_cast<std::size_t>(m)] += std::sqrt(var) * w(m);
            out[g * static_cast<std::size_t>(M) + static_cast<std::size_t>(m)] =
                level[static_cast<std::size_t>(m)];
        }
    }
}

void check_inputs(const MidPriceParams& p, const std::vector<double>& f0,
                  const std::vector<double>& grid) {
    p.validate();
    if (static_cast<int>(f0.size()) != p.n_maturities())
        throw Error("simulate: f0 size does not match the maturities");
    if ((p.mu > 0 || p.mu_c > 0) && p.jump_law.sizes.empty())
        throw EmptyJumpLaw("simulate: positive intensity with an empty jump law");
    for (std::size_t g = 1; g < grid.size(); ++g)
        if (grid[g] <= grid[g - 1]) throw Error("simulate: grid not strictly increasing");
    if (!grid.empty() && (grid.front() < p.t0 - 1e-9 || grid.back() > p.maturities.back() + 1e-9))
        throw Error("simulate: grid outside [t0, T_M]");
}

} // namespace

int PricePathSet::grid_index(double t) const {
    for (std::size_t g = 0; g < grid.size(); ++g)
        if (std::abs(grid[g] - t) < 1e-9) return static_cast<int>(g);
    throw GridMismatch("path set grid does not contain the requested time");
}

void simulate_visit(const MidPriceParams& params, const std::vector<double>& f0,
                    const std::vector<double>& grid, int n_paths, std::uint64_t seed,
                    const std::function<void(int, const double*)>& visit,
                    SimulateBackend backend, unsigned n_threads) {
    check_inputs(params, f0, grid);
    const std::size_t block = grid.size() * f0.size();
    if (backend == SimulateBackend::jumps) {
        const std::vector<Process> procs = build_processes(params);
        parallel_for(static_cast<std::size_t>(n_paths), [&](std::size_t path) {
            std::vector<double> buf(block);
            fill_path_jumps(params, f0, grid, seed, path, procs, buf.data());
            visit(static_cast<int>(path), buf.data());
        }, n_threads);
    } else {
        const DiffusionPlan plan = build_diffusion_plan(params, grid);
        parallel_for(static_cast<std::size_t>(n_paths), [&](std::size_t path) {
            std::vector<double> buf(block);
            fill_path_diffusion(params, f0, grid, seed, path, plan, buf.data());
            visit(static_cast<int>(path), buf.data());
        }, n_threads);
    }
}

PricePathSet simulate(const MidPriceParams& params, std::vector<double> f0,
                      std::vector<double> grid, int n_paths, std::uint64_t seed,
                      SimulateBackend backend) {
    PricePathSet out;
    out.grid = std::move(grid);
    out.f0 = std::move(f0);
    out.maturities = params.maturities;
    out.n_paths = n_paths;
    out.seed = seed;
    const std::size_t block = out.grid.size() * out.f0.size();
    out.values.resize(block * static_cast<std::size_t>(n_paths));
    simulate_visit(params, out.f0, out.grid, n_paths, seed,
                   [&](int path, const double* buf) {
                       std::copy(buf, buf + block,
                                 out.values.begin() + static_cast<std::ptrdiff_t>(block) * path);
                   },
                   backend);
    return out;
}

std::vector<EventSeries> simulate_event_series(const MidPriceParams& params,
                                               const std::vector<double>& f0, std::uint64_t seed,
                                               std::uint64_t path_index) {
    params.validate();
    if ((params.mu > 0 || params.mu_c > 0) && params.jump_law.sizes.empty())
        throw EmptyJumpLaw("simulate_event_series: positive intensity with an empty jump law");
    const int M = params.n_maturities();
    struct RawJump {
        double t;
        double dy;
        std::uint64_t seq;
    };
    std::vector<std::vector<RawJump>> per_maturity(static_cast<std::size_t>(M));
    const std::vector<Process> procs = build_processes(params);
    std::uint64_t seq = 0;
    for (std::size_t pid = 0; pid < procs.size(); ++pid) {
        const Process& proc = procs[pid];
        Rng rng(seed, path_index, pid);
        draw_jumps(proc, params, rng, params.jump_law.sizes, [&](double t, double dy) {
            const std::uint64_t s = seq++;
            if (proc.own_maturity > 0) {
                per_maturity[static_cast<std::size_t>(proc.own_maturity - 1)].push_back({t, dy, s});
            } else {
                for (int m = 1; m <= proc.common_level; ++m) {
                    if (params.maturity(m) < t) continue;
                    per_maturity[static_cast<std::size_t>(m - 1)].push_back({t, dy, s});
                }
            }
        });
    }
    std::vector<EventSeries> out(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m) {
        auto& jumps = per_maturity[static_cast<std::size_t>(m)];
        std::sort(jumps.begin(), jumps.end(), [](const RawJump& a, const RawJump& b) {
            return a.t != b.t ? a.t < b.t : a.seq < b.seq;
        });
        EventSeries& es = out[static_cast<std::size_t>(m)];
        es.times.reserve(jumps.size() + 1);
        es.values.reserve(jumps.size() + 1);
        es.times.push_back(params.t0);
        es.values.push_back(f0[static_cast<std::size_t>(m)]);
        double level = f0[static_cast<std::size_t>(m)];
        for (const RawJump& j : jumps) {
            level += j.dy;
            es.times.push_back(j.t);
            es.values.push_back(level);
        }
    }
    return out;
}

void dump_paths_csv(std::ostream& os, const PricePathSet& paths) {
    os << "path,maturity,t,price\n";
    char buf[128];
    for (int p = 0; p < paths.n_paths; ++p)
        for (int m = 1; m <= paths.n_maturities(); ++m)
            for (int g = 0; g < paths.n_grid(); ++g) {
                std::snprintf(buf, sizeof buf, "%d,%d,%.10g,%.10g\n", p, m,
                              paths.grid[static_cast<std::size_t>(g)], paths.at(p, g, m));
                os << buf;
            }
}

} // namespace idstore::mid

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "idstore/mid/model.hpp"

namespace idstore::mid {

/// Simulated mid-price trajectories f_{m,t} on a fixed time grid. Values are
/// frozen at the last grid point not past T_m (jumps after a maturity never
/// move its price). Layout: values[(path * grid + g) * M + (m-1)].
struct PricePathSet {
    std::vector<double> grid;        // sampling times, hours, within [t0, T_M]
    std::vector<double> f0;          // initial prices per maturity
    std::vector<double> maturities;  // T_1..T_M hours
    int n_paths = 0;
    std::uint64_t seed = 0;
    std::vector<double> values;

    double at(int path, int g, int m) const {
        return values[(static_cast<std::size_t>(path) * grid.size() + static_cast<std::size_t>(g)) *
                          f0.size() +
                      static_cast<std::size_t>(m - 1)];
    }
    int n_grid() const { return static_cast<int>(grid.size()); }
    int n_maturities() const { return static_cast<int>(f0.size()); }

    /// Index of a grid time, matched to 1e-9. Throws GridMismatch.
    int grid_index(double t) const;
};

enum class SimulateBackend {
    jumps,      // exact compound-Poisson simulation by time-change inversion
    diffusion,  // Gaussian proxy with the same volatility and correlation
};

/// Materializes a full path set. Throws EmptyJumpLaw when the law is empty but
/// intensities are positive.
PricePathSet simulate(const MidPriceParams& params, std::vector<double> f0,
                      std::vector<double> grid, int n_paths, std::uint64_t seed,
                      SimulateBackend backend = SimulateBackend::jumps);

/// Streaming variant: visit(path_index, values) where values is the row-major
/// [grid][maturity] block for that path. Paths are visited by multiple threads
/// but each path's draw stream depends only on (seed, path), so results are
/// reproducible. The visitor must be thread-safe.
void simulate_visit(const MidPriceParams& params, const std::vector<double>& f0,
                    const std::vector<double>& grid, int n_paths, std::uint64_t seed,
                    const std::function<void(int, const double*)>& visit,
                    SimulateBackend backend = SimulateBackend::jumps, unsigned n_threads = 0);

/// Event-level view of one simulated path: per maturity, the jump times and
/// the mid price after each jump. The series starts with (t0, f0).
struct EventSeries {
    std::vector<double> times;
    std::vector<double> values;
};
std::vector<EventSeries> simulate_event_series(const MidPriceParams& params,
                                               const std::vector<double>& f0, std::uint64_t seed,
                                               std::uint64_t path_index);

/// Columnar CSV dump: path,maturity,t,price.
void dump_paths_csv(std::ostream& os, const PricePathSet& paths);

} // namespace idstore::mid

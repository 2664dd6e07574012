#pragma once

#include <vector>

#include "idstore/val/battery.hpp"

namespace idstore::val {

struct DeterministicResult {
    std::vector<double> controls;  // storage-side MWh per delivery hour
    double value = 0.0;            // EUR per battery
};

/// Exact backward dynamic program over the discretized stock for the
/// spot-forecast problem: one price per maturity, known upfront. Without a
/// depth model the optimum admits a bang-bang representative.
DeterministicResult optimize_deterministic(const std::vector<double>& spot,
                                           const BatterySpec& battery, const ImpactSpec& impact);

} // namespace idstore::val

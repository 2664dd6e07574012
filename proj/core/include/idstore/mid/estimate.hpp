#pragma once

#include <vector>

#include "idstore/mid/model.hpp"

namespace idstore::mid {

/// Event-time mid-price path of one maturity within one trading session.
struct MidSeries {
    int maturity = 1;              // 1-based index
    double maturity_hours = 0.0;   // T_m
    std::vector<double> times;     // session time, hours
    std::vector<double> values;    // EUR/MWh
};

/// One session-day: per-maturity series.
using SessionSeries = std::vector<MidSeries>;

struct EstimateOptions {
    double grid_minutes = 30.0;          // sampling step for (co)variations
    double count_bucket_minutes = 15.0;  // time-to-maturity buckets for the kappa fit
    double outlier_sigmas = 5.0;         // returns beyond this many sigmas are dropped
    int max_corr_distance = 6;           // maturity distances used in the correlation fit
    int min_bucket_count = 5;            // buckets with fewer changes are ignored
    bool ratio_from_covariation = false; // alternative mu_c route via adjacent covariations
};

struct EstimateDiagnostics {
    double total_intensity = 0.0;       // fitted 2 (mu + mu_c)
    double corr_intercept_ratio = 0.0;  // fitted mu_c / (mu + mu_c)
    double corr_slope = 0.0;            // fitted slope of log-correlation vs distance
    double corr_slope_deviation = 0.0;  // |slope / (-kappa/2) - 1|
    bool kappa_warning = false;         // deviation above 50% (reported, not fatal)
    std::vector<double> corr_by_distance;
    long long outliers_removed = 0;
    long long changes_used = 0;
};

/// Moment-based estimation: kappa and the total change intensity from a
/// log-linear fit of change counts per time-to-maturity bucket, the jump law
/// from the absolute mid-price changes, and the common/idiosyncratic split
/// from the intercept of the log-correlation regression (or, optionally, from
/// adjacent quadratic covariations). Throws NoJumpsObserved.
MidPriceParams estimate(const std::vector<SessionSeries>& sessions,
                        const EstimateOptions& opt = {},
                        EstimateDiagnostics* diagnostics = nullptr);

} // namespace idstore::mid

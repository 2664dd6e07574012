#include "idstore/mid/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "idstore/errors.hpp"
#include "idstore/lob/book.hpp"
#include "idstore/stats.hpp"

namespace idstore::mid {

namespace {

struct CleanSeries {
    int maturity = 1;
    double maturity_hours = 0.0;
    double t_first = 0.0;
    double initial = 0.0;        // level before the first kept change
    std::vector<double> times;   // times of kept changes
    std::vector<double> values;  // level after each kept change
};

double level_at(const CleanSeries& s, double t) {
    // last kept value at or before t
    const auto it = std::upper_bound(s.times.begin(), s.times.end(), t);
    if (it == s.times.begin()) return s.initial;
    return s.values[static_cast<std::size_t>(it - s.times.begin() - 1)];
}

} // namespace

MidPriceParams estimate(const std::vector<SessionSeries>& sessions, const EstimateOptions& opt,
                        EstimateDiagnostics* diagnostics) {
    if (sessions.empty()) throw NoJumpsObserved("estimate: no sessions");

    // 5-sigma outlier rule computed over every non-zero event return
    double sum = 0.0, sum2 = 0.0;
    long long n_changes = 0;
    for (const SessionSeries& session : sessions)
        for (const MidSeries& series : session)
            for (std::size_t i = 1; i < series.values.size(); ++i) {
                const double d = series.values[i] - series.values[i - 1];
                if (d == 0.0) continue;
                sum += d;
                sum2 += d * d;
                ++n_changes;
            }
    if (n_changes == 0) throw NoJumpsObserved("estimate: no mid-price changes observed");
    const double mean = sum / static_cast<double>(n_changes);
    const double sd = std::sqrt(std::max(0.0, sum2 / static_cast<double>(n_changes) - mean * mean));
    const double cut = opt.outlier_sigmas * sd;

    EstimateDiagnostics diag;

    // cleaned series, change counts and the jump-size sample
    std::vector<std::vector<CleanSeries>> clean(sessions.size());
    std::vector<double> jump_sizes;
    std::map<int, std::pair<double, double>> maturity_hours_seen;  // index -> (T_m, count)
    const double bucket_w = opt.count_bucket_minutes / 60.0;
    std::map<int, long long> bucket_counts;
    std::map<int, double> bucket_coverage;  // hours of observation covering each bucket

    for (std::size_t si = 0; si < sessions.size(); ++si) {
        for (const MidSeries& series : sessions[si]) {
            if (series.times.empty()) continue;
            CleanSeries cs;
            cs.maturity = series.maturity;
            cs.maturity_hours = series.maturity_hours;
            cs.t_first = series.times.front();
            cs.initial = series.values.front();
            double level = cs.initial;
            for (std::size_t i = 1; i < series.values.size(); ++i) {
                const double d = series.values[i] - series.values[i - 1];
                if (d == 0.0) continue;
                if (std::abs(d) > cut && sd > 0.0) {
                    ++diag.outliers_removed;
                    continue;
                }
                level += d;
                cs.times.push_back(series.times[i]);
                cs.values.push_back(level);
                jump_sizes.push_back(std::abs(d));
                const double tau = series.maturity_hours - series.times[i];
                if (tau >= 0.0) ++bucket_counts[static_cast<int>(std::floor(tau / bucket_w))];
            }
            // observation exposure per time-to-maturity bucket
            const double tau_lo = 0.0;
            const double tau_hi = series.maturity_hours - series.times.front();
            for (int b = 0; b * bucket_w < tau_hi; ++b) {
                const double lo = std::max(tau_lo, b * bucket_w);
                const double hi = std::min(tau_hi, (b + 1) * bucket_w);
                if (hi > lo) bucket_coverage[b] += hi - lo;
            }
            auto& seen = maturity_hours_seen[series.maturity];
            seen.first = series.maturity_hours;
            seen.second += 1;
            clean[si].push_back(std::move(cs));
        }
    }
    if (jump_sizes.empty()) throw NoJumpsObserved("estimate: all changes removed as outliers");
    diag.changes_used = static_cast<long long>(jump_sizes.size());

    // kappa and total intensity from the log-linear count fit
    std::vector<double> xs, ys;
    for (const auto& [b, count] : bucket_counts) {
        if (count < opt.min_bucket_count) continue;
        const auto cov = bucket_coverage.find(b);
        if (cov == bucket_coverage.end() || cov->second <= 0.0) continue;
        xs.push_back((b + 0.5) * bucket_w);
        ys.push_back(std::log(static_cast<double>(count) / cov->second));
    }
    if (xs.size() < 2) throw NoJumpsObserved("estimate: too few populated count buckets");
    const LineFit count_fit = fit_line(xs, ys);
    double kappa = -count_fit.slope;
    if (kappa <= 0.0) kappa = 1e-6;  // degenerate data; keep the model valid
    const double total_intensity = std::exp(count_fit.intercept);  // 2 (mu + mu_c)
    diag.total_intensity = total_intensity;

    // 30-minute grid increments per (session, maturity)
    const double step = opt.grid_minutes / 60.0;
    const double anchor = lob::kSessionOpenHours;
    std::vector<std::vector<std::vector<double>>> incr(sessions.size());
    std::vector<std::vector<int>> incr_maturity(sessions.size());
    for (std::size_t si = 0; si < sessions.size(); ++si) {
        for (const CleanSeries& cs : clean[si]) {
            std::vector<double> inc;
            double prev = level_at(cs, anchor);
            for (double t = anchor + step; t <= cs.maturity_hours + 1e-9; t += step) {
                const double cur = level_at(cs, t);
                inc.push_back(cur - prev);
                prev = cur;
            }
            incr[si].push_back(std::move(inc));
            incr_maturity[si].push_back(cs.maturity);
        }
    }

    // pooled correlations per maturity distance
    const int max_d = opt.max_corr_distance;
    std::vector<CorrAccum> accums(static_cast<std::size_t>(max_d));
    std::vector<double> dist_sum(static_cast<std::size_t>(max_d), 0.0);
    std::vector<double> dist_n(static_cast<std::size_t>(max_d), 0.0);
    for (std::size_t si = 0; si < sessions.size(); ++si) {
        const auto& mats = incr_maturity[si];
        for (std::size_t a = 0; a < mats.size(); ++a) {
            for (std::size_t b = a + 1; b < mats.size(); ++b) {
                const int d = std::abs(mats[b] - mats[a]);
                if (d < 1 || d > max_d) continue;
                const auto& ia = incr[si][a];
                const auto& ib = incr[si][b];
                const std::size_t n = std::min(ia.size(), ib.size());
                CorrAccum& acc = accums[static_cast<std::size_t>(d - 1)];
                for (std::size_t k = 0; k < n; ++k) acc.add(ia[k], ib[k]);
                double ta = 0.0, tb = 0.0;
                for (const CleanSeries& cs : clean[si]) {
                    if (cs.maturity == mats[a]) ta = cs.maturity_hours;
                    if (cs.maturity == mats[b]) tb = cs.maturity_hours;
                }
                dist_sum[static_cast<std::size_t>(d - 1)] += std::abs(tb - ta);
                dist_n[static_cast<std::size_t>(d - 1)] += 1.0;
            }
        }
    }

    std::vector<double> corr_d(static_cast<std::size_t>(max_d), 0.0);
    std::vector<double> dist_d(static_cast<std::size_t>(max_d), 0.0);
    for (int d = 1; d <= max_d; ++d) {
        corr_d[static_cast<std::size_t>(d - 1)] = accums[static_cast<std::size_t>(d - 1)].correlation();
        dist_d[static_cast<std::size_t>(d - 1)] =
            dist_n[static_cast<std::size_t>(d - 1)] > 0
                ? dist_sum[static_cast<std::size_t>(d - 1)] / dist_n[static_cast<std::size_t>(d - 1)]
                : static_cast<double>(d);
    }
    diag.corr_by_distance = corr_d;

    double ratio = 0.0;
    {
        std::vector<double> cx, cy;
        for (int d = 1; d <= max_d; ++d) {
            const double rho = corr_d[static_cast<std::size_t>(d - 1)];
            if (rho > 0.0 && accums[static_cast<std::size_t>(d - 1)].n >= 2) {
                cx.push_back(dist_d[static_cast<std::size_t>(d - 1)]);
                cy.push_back(std::log(rho));
            }
        }
        if (cx.size() >= 2) {
            const LineFit corr_fit = fit_line(cx, cy);
            diag.corr_slope = corr_fit.slope;
            ratio = std::exp(corr_fit.intercept);
            const double expected_slope = -0.5 * kappa;
            diag.corr_slope_deviation =
                expected_slope != 0.0 ? std::abs(corr_fit.slope / expected_slope - 1.0) : 0.0;
            diag.kappa_warning = diag.corr_slope_deviation > 0.5;
        } else if (!cx.empty()) {
            ratio = std::exp(cy.front() + 0.5 * kappa * cx.front());
        }
        if (opt.ratio_from_covariation && corr_d[0] > 0.0)
            ratio = corr_d[0] * std::exp(0.5 * kappa * dist_d[0]);
        ratio = std::clamp(ratio, 0.0, 1.0);
    }
    diag.corr_intercept_ratio = ratio;

    MidPriceParams params;
    params.kappa = kappa;
    const double total = total_intensity / 2.0;  // mu + mu_c
    params.mu_c = ratio * total;
    params.mu = total - params.mu_c;
    std::sort(jump_sizes.begin(), jump_sizes.end());
    params.jump_law.sizes = std::move(jump_sizes);
    int max_m = 0;
    for (const auto& [m, info] : maturity_hours_seen) max_m = std::max(max_m, m);
    params.maturities.resize(static_cast<std::size_t>(max_m));
    for (int m = 1; m <= max_m; ++m) {
        const auto it = maturity_hours_seen.find(m);
        params.maturities[static_cast<std::size_t>(m - 1)] =
            it != maturity_hours_seen.end() ? it->second.first : static_cast<double>(m - 1);
    }
    params.t0 = lob::kSessionOpenHours;
    params.validate();
    if (diagnostics) *diagnostics = diag;
    return params;
}

} // namespace idstore::mid

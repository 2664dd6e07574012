#include "idstore/bt/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "idstore/errors.hpp"

namespace idstore::bt {

namespace {

Date most_recent_monday(Date day) {
    while (!day.is_monday()) day = day.plus_days(-1);
    return day;
}

/// Per-day calibration inputs, cached so Mondays sharing window days reuse
/// the per-session work.
struct DayArtifacts {
    std::vector<std::vector<liq::SnapshotFit>> fits_per_maturity;  // tau-window fits
    std::vector<mid::MidSeries> series;
    int sessions = 0;
};

DayArtifacts build_artifacts(const SessionStore& store, Date day, const ScheduleOptions& opt) {
    DayArtifacts art;
    const int M = store.n_maturities();
    art.fits_per_maturity.resize(static_cast<std::size_t>(M));
    const liq::SessionFitOptions sopt = opt.session_fit();
    liq::FitOptions fopt;
    fopt.volume_window = opt.profile.volume_window;
    fopt.min_levels_per_side = opt.min_levels_per_side;
    for (int m = 1; m <= M; ++m) {
        if (!store.has_session(day, m)) continue;
        mid::MidSeries series = store.mid_series(day, m);
        if (series.times.empty()) continue;
        ++art.sessions;
        for (std::size_t i = 0; i < series.times.size(); ++i) {
            const double tau = series.maturity_hours - series.times[i];
            if (tau < sopt.tau_lo || tau > sopt.tau_hi) continue;
            const auto snap = store.snapshot_at(day, m, series.times[i]);
            if (!snap) continue;
            try {
                art.fits_per_maturity[static_cast<std::size_t>(m - 1)].push_back(
                    liq::fit_snapshot(snap->depth_cap ? *snap : snap->capped(opt.profile.depth_cap),
                                      fopt));
            } catch (const Error&) {
                // sparse book at this instant, skip the sample
            }
        }
        art.series.push_back(std::move(series));
    }
    return art;
}

ModelSet fit_window(const SessionStore& store, Date monday, const ScheduleOptions& opt,
                    std::map<Date, DayArtifacts>& cache) {
    const Date window_start = monday.plus_days(-opt.window_days);
    // drop cache entries older than any window that can still be requested
    while (!cache.empty() && cache.begin()->first < window_start) cache.erase(cache.begin());

    const int M = store.n_maturities();
    std::vector<std::vector<liq::SnapshotFit>> fits(static_cast<std::size_t>(M));
    std::vector<mid::SessionSeries> sessions;
    int sessions_used = 0;
    for (Date d = window_start; d < monday; d = d.plus_days(1)) {
        auto it = cache.find(d);
        if (it == cache.end()) it = cache.emplace(d, build_artifacts(store, d, opt)).first;
        const DayArtifacts& art = it->second;
        if (art.sessions == 0) continue;
        ++sessions_used;
        for (int m = 0; m < M; ++m)
            fits[static_cast<std::size_t>(m)].insert(fits[static_cast<std::size_t>(m)].end(),
                                                     art.fits_per_maturity[static_cast<std::size_t>(m)].begin(),
                                                     art.fits_per_maturity[static_cast<std::size_t>(m)].end());
        sessions.push_back(art.series);
    }
    if (sessions_used == 0)
        throw InsufficientHistory("no sessions inside the calibration window before " +
                                  monday.to_string());

    ModelSet set;
    set.fitted_on = monday;
    set.sessions_used = sessions_used;
    set.liquidity.maturities.resize(static_cast<std::size_t>(M));
    const liq::SessionFitOptions sopt = opt.session_fit();
    std::vector<int> failed;
    for (int m = 1; m <= M; ++m) {
        const double session_hours = static_cast<double>(m) + 8.0;
        try {
            set.liquidity.maturities[static_cast<std::size_t>(m - 1)] =
                liq::fit_session(fits[static_cast<std::size_t>(m - 1)], session_hours, sopt);
        } catch (const Error&) {
            failed.push_back(m);
        }
    }
    if (!failed.empty()) {
        // average the fitted maturities' normalized coefficients as a fallback
        int fitted = 0;
        liq::SideParams plus{}, minus{};
        for (int m = 1; m <= M; ++m) {
            if (std::find(failed.begin(), failed.end(), m) != failed.end()) continue;
            const liq::MaturityLiquidity& ml = set.liquidity.maturities[static_cast<std::size_t>(m - 1)];
            plus.alpha_A += ml.plus.alpha_A; plus.beta_A += ml.plus.beta_A;
            plus.alpha_B += ml.plus.alpha_B; plus.beta_B += ml.plus.beta_B;
            minus.alpha_A += ml.minus.alpha_A; minus.beta_A += ml.minus.beta_A;
            minus.alpha_B += ml.minus.alpha_B; minus.beta_B += ml.minus.beta_B;
            ++fitted;
        }
        if (fitted == 0)
            throw TooFewPoints("liquidity fit failed for every maturity before " + monday.to_string());
        const double n = static_cast<double>(fitted);
        plus.alpha_A /= n; plus.beta_A /= n; plus.alpha_B /= n; plus.beta_B /= n;
        minus.alpha_A /= n; minus.beta_A /= n; minus.alpha_B /= n; minus.beta_B /= n;
        for (int m : failed) {
            liq::MaturityLiquidity& ml = set.liquidity.maturities[static_cast<std::size_t>(m - 1)];
            ml.plus = plus;
            ml.minus = minus;
            ml.session_hours = static_cast<double>(m) + 8.0;
        }
        set.liquidity_fallbacks = static_cast<int>(failed.size());
    }
    set.midprice = mid::estimate(sessions);
    return set;
}

} // namespace

const ModelSet& CalibrationSchedule::for_day(Date day) const {
    const auto it = by_day.find(day);
    if (it == by_day.end()) throw InsufficientHistory("no calibration for " + day.to_string());
    return *it->second;
}

std::vector<Date> CalibrationSchedule::fit_dates() const {
    std::vector<Date> out;
    for (const auto& [day, set] : by_day)
        if (out.empty() || !(out.back() == set->fitted_on)) out.push_back(set->fitted_on);
    return out;
}

CalibrationSchedule make_schedule(const SessionStore& store, const std::vector<Date>& backtest_days,
                                  const ScheduleOptions& opt) {
    if (backtest_days.empty()) throw InsufficientHistory("no backtest days");
    const std::vector<Date> store_days = store.days();
    if (store_days.empty()) throw InsufficientHistory("empty session store");
    if (store_days.front().days_until(backtest_days.front()) < opt.window_days)
        throw InsufficientHistory("fewer than the required history days before the first backtest day");

    CalibrationSchedule schedule;
    std::map<Date, std::shared_ptr<const ModelSet>> mondays;
    std::map<Date, DayArtifacts> cache;
    for (const Date& day : backtest_days) {
        const Date monday = most_recent_monday(day);
        auto it = mondays.find(monday);
        if (it == mondays.end()) {
            auto set = std::make_shared<const ModelSet>(fit_window(store, monday, opt, cache));
            it = mondays.emplace(monday, std::move(set)).first;
        }
        schedule.by_day.emplace(day, it->second);
    }
    return schedule;
}

} // namespace idstore::bt

#pragma once

#include <map>
#include <memory>
#include <vector>

#include "idstore/bt/session_store.hpp"
#include "idstore/calibrations.hpp"
#include "idstore/liq/fit.hpp"
#include "idstore/liq/model.hpp"
#include "idstore/mid/estimate.hpp"

namespace idstore::bt {

/// Parameters in force for a trading day, fitted strictly from earlier data.
struct ModelSet {
    liq::LiquiditySessionParams liquidity;
    mid::MidPriceParams midprice;
    Date fitted_on;
    int sessions_used = 0;
    int liquidity_fallbacks = 0;  // maturities that reused the cross-maturity average
};

struct ScheduleOptions {
    int window_days = 28;
    int delta = 2;  // decides the time-to-maturity window of the liquidity fit
    calib::MarketProfile profile = calib::kFranceProfile;
    int min_levels_per_side = 1;

    liq::SessionFitOptions session_fit() const {
        liq::SessionFitOptions o;
        if (delta >= 2) {
            o.tau_lo = 1.5;
            o.tau_hi = 2.5;
        } else {
            o.tau_lo = 1.0;
            o.tau_hi = 1.5;
        }
        return o;
    }
};

/// Monday-refreshed rolling calibration: every Monday both models are fitted
/// on the trailing `window_days`; each day inherits the latest Monday fit.
class CalibrationSchedule {
public:
    const ModelSet& for_day(Date day) const;  // throws InsufficientHistory
    std::vector<Date> fit_dates() const;

    std::map<Date, std::shared_ptr<const ModelSet>> by_day;
};

/// Builds the schedule for `backtest_days`. Requires window_days of history
/// before the first backtest day; windows with missing sessions fall back to
/// whatever sessions exist (counted on the ModelSet).
CalibrationSchedule make_schedule(const SessionStore& store, const std::vector<Date>& backtest_days,
                                  const ScheduleOptions& opt);

/// One-shot calibration over an explicit day list (both models), the same fit
/// the schedule runs per Monday. `as_of` labels the fit. Throws fit errors /
/// InsufficientHistory when the days carry no usable sessions.
ModelSet calibrate_days(const SessionStore& store, const std::vector<Date>& days, Date as_of,
                        const ScheduleOptions& opt);

} // namespace idstore::bt

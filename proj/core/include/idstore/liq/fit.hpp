#pragma once

#include <vector>

#include "idstore/liq/model.hpp"
#include "idstore/lob/snapshot.hpp"

namespace idstore::liq {

/// Which x-coordinate/value pairing to regress against on the stepwise curve.
/// midpoint is the default; left_endpoint pairs each rupture point with its
/// own step (tends to underestimate costs), right_endpoint pairs it with the
/// next step (tends to overestimate).
enum class RegressionPointRule { midpoint, left_endpoint, right_endpoint };

/// Constrained per-snapshot fit of A|x| + B against the stepwise curve.
struct SnapshotFit {
    double a_plus = 0.0;
    double b_plus = 0.0;
    double a_minus = 0.0;
    double b_minus = 0.0;
    double tau_hours = 0.0;
    int n_points = 0;       // regression points used across both sides
    double objective = 0.0; // sum of squared residuals at the fit
};

struct FitOptions {
    double volume_window = 20.0;  // K: MWh per side kept in the regression
    RegressionPointRule rule = RegressionPointRule::midpoint;
    int min_levels_per_side = 1;  // the temporal study uses 5
    bool common_spread = false;   // tie B_+ = B_- across sides
};

/// Nonnegative least squares of the linear-jump model on one snapshot.
/// Throws TooFewPoints / DegenerateDesign.
SnapshotFit fit_snapshot(const lob::OrderBookSnapshot& snap, const FitOptions& opt);

struct SessionFitOptions {
    double window_minutes = 10.0;
    double tau_lo = 1.5;   // time-to-maturity window, hours
    double tau_hi = 2.5;
};

/// Averages per-snapshot fits over rolling windows of time to maturity, then
/// regresses the A averages linearly and the log-B averages linearly on tau.
/// B is averaged geometrically inside each window so that noiseless inputs
/// invert exactly. Throws InsufficientWindows.
MaturityLiquidity fit_session(const std::vector<SnapshotFit>& fits, double session_hours,
                              const SessionFitOptions& opt);

/// Pooled fit over every snapshot of every session of one delivery hour:
/// minimizes the squared stepwise-curve error over the four (alpha, beta)
/// parameters per side under the sign constraints, refined from a
/// session-style initial guess by a projected Levenberg-Marquardt iteration.
MaturityLiquidity fit_pooled(const std::vector<std::vector<lob::OrderBookSnapshot>>& sessions,
                             double session_hours, const FitOptions& opt);

/// Regression points (x, stepwise value) for one snapshot side under a rule;
/// exposed for tests and the pooled objective.
struct CurvePoint {
    double x = 0.0;  // signed MWh
    double y = 0.0;  // EUR/MWh over the mid
};
std::vector<CurvePoint> regression_points(const lob::OrderBookSnapshot& snap, bool ask_side,
                                          double volume_window, RegressionPointRule rule);

} // namespace idstore::liq

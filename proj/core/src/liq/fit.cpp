#include "idstore/liq/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Dense>

#include "idstore/errors.hpp"

namespace idstore::liq {

namespace {

constexpr double kTinyLogB = -27.631021115928547;  // log(1e-12), stands in for B == 0

double safe_exp(double x) { return std::exp(std::clamp(x, -700.0, 700.0)); }

struct XY {
    double x;
    double y;
};

/// Exact nonnegative least squares for y ~ a*x + b, a >= 0, b >= 0.
/// The minimizer of this 2-variable convex QP is the feasible KKT point of
/// one of: the interior, the a=0 face, the b=0 face, or the origin.
/// A single point pins a = 0, b = max(0, y).
struct Nnls2Result {
    double a = 0.0;
    double b = 0.0;
    double sse = 0.0;
};

double sse_of(const std::vector<XY>& pts, double a, double b) {
    double s = 0.0;
    for (const XY& p : pts) {
        const double r = a * p.x + b - p.y;
        s += r * r;
    }
    return s;
}

Nnls2Result nnls2(const std::vector<XY>& pts) {
    if (pts.empty()) throw TooFewPoints("nnls2: no points");
    if (pts.size() == 1) {
        Nnls2Result r;
        r.b = std::max(0.0, pts[0].y);
        r.sse = sse_of(pts, r.a, r.b);
        return r;
    }
    const double n = static_cast<double>(pts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const XY& p : pts) {
        sx += p.x;
        sy += p.y;
        sxx += p.x * p.x;
        sxy += p.x * p.y;
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-14 * std::max(1.0, n * sxx))
        throw DegenerateDesign("nnls2: all regression volumes equal");

    std::vector<Nnls2Result> candidates;
    {
        Nnls2Result r;
        r.a = (n * sxy - sx * sy) / det;
        r.b = (sy - r.a * sx) / n;
        if (r.a >= 0.0 && r.b >= 0.0) candidates.push_back(r);
    }
    candidates.push_back({0.0, std::max(0.0, sy / n), 0.0});
    if (sxx > 0.0) candidates.push_back({std::max(0.0, sxy / sxx), 0.0, 0.0});
    candidates.push_back({0.0, 0.0, 0.0});

    Nnls2Result best;
    double best_sse = std::numeric_limits<double>::infinity();
    for (Nnls2Result& c : candidates) {
        c.sse = sse_of(pts, c.a, c.b);
        if (c.sse < best_sse - 0.0) {
            best_sse = c.sse;
            best = c;
        }
    }
    return best;
}

/// Exact nonnegative least squares for the common-spread variant:
/// ask points follow a_plus*x + b, bid (mapped) points a_minus*u + b,
/// all three coefficients >= 0. Enumerates the 8 active-set faces.
struct Nnls3Result {
    double a_plus = 0.0, a_minus = 0.0, b = 0.0;
    double sse = 0.0;
};

Nnls3Result nnls3_common_spread(const std::vector<XY>& ask, const std::vector<XY>& bid) {
    Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    auto accumulate = [&](const std::vector<XY>& pts, int slope_idx) {
        for (const XY& p : pts) {
            Eigen::Vector3d phi = Eigen::Vector3d::Zero();
            phi(slope_idx) = p.x;
            phi(2) = 1.0;
            gram += phi * phi.transpose();
            rhs += phi * p.y;
        }
    };
    accumulate(ask, 0);
    accumulate(bid, 1);

    auto sse3 = [&](double ap, double am, double b) {
        double s = 0.0;
        for (const XY& p : ask) {
            const double r = ap * p.x + b - p.y;
            s += r * r;
        }
        for (const XY& p : bid) {
            const double r = am * p.x + b - p.y;
            s += r * r;
        }
        return s;
    };

    Nnls3Result best;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int mask = 0; mask < 8; ++mask) {
        std::vector<int> free_idx;
        for (int i = 0; i < 3; ++i)
            if (mask & (1 << i)) free_idx.push_back(i);
        Eigen::Vector3d sol = Eigen::Vector3d::Zero();
        if (!free_idx.empty()) {
            const int k = static_cast<int>(free_idx.size());
            Eigen::MatrixXd g(k, k);
            Eigen::VectorXd r(k);
            for (int i = 0; i < k; ++i) {
                r(i) = rhs(free_idx[static_cast<std::size_t>(i)]);
                for (int j = 0; j < k; ++j)
                    g(i, j) = gram(free_idx[static_cast<std::size_t>(i)],
                                   free_idx[static_cast<std::size_t>(j)]);
            }
            const Eigen::VectorXd x = g.completeOrthogonalDecomposition().solve(r);
            for (int i = 0; i < k; ++i) sol(free_idx[static_cast<std::size_t>(i)]) = x(i);
        }
        if (sol(0) < 0 || sol(1) < 0 || sol(2) < 0) continue;
        const double s = sse3(sol(0), sol(1), sol(2));
        if (s < best_sse) {
            best_sse = s;
            best = {sol(0), sol(1), sol(2), s};
        }
    }
    return best;
}

} // namespace

std::vector<CurvePoint> regression_points(const lob::OrderBookSnapshot& snap, bool ask_side,
                                          double volume_window, RegressionPointRule rule) {
    const double mid = mid_price(snap);
    const std::vector<lob::Level>& side = ask_side ? snap.asks : snap.bids;

    // cumulative volumes and full-VWAP step values
    std::vector<double> cum(side.size());
    std::vector<double> step(side.size());
    double v = 0.0, cost = 0.0;
    for (std::size_t i = 0; i < side.size(); ++i) {
        v += side[i].volume;
        cost += side[i].price * side[i].volume;
        cum[i] = v;
        step[i] = cost / v - mid;
    }

    std::vector<CurvePoint> pts;
    for (std::size_t i = 0; i < side.size(); ++i) {
        if (std::abs(cum[i]) > volume_window) break;
        switch (rule) {
        case RegressionPointRule::midpoint: {
            const double prev = i == 0 ? 0.0 : cum[i - 1];
            pts.push_back({0.5 * (prev + cum[i]), step[i]});
            break;
        }
        case RegressionPointRule::left_endpoint:
            pts.push_back({cum[i], step[i]});
            break;
        case RegressionPointRule::right_endpoint:
            if (i + 1 < side.size()) pts.push_back({cum[i], step[i + 1]});
            break;
        }
    }
    return pts;
}

SnapshotFit fit_snapshot(const lob::OrderBookSnapshot& snap, const FitOptions& opt) {
    auto count_levels = [&](const std::vector<lob::Level>& side) {
        int n = 0;
        double cum = 0.0;
        for (const lob::Level& lv : side) {
            cum += lv.volume;
            if (std::abs(cum) > opt.volume_window) break;
            ++n;
        }
        return n;
    };
    if (count_levels(snap.asks) < opt.min_levels_per_side ||
        count_levels(snap.bids) < opt.min_levels_per_side)
        throw TooFewPoints("fit_snapshot: not enough levels inside the volume window");

    const auto ask_pts = regression_points(snap, true, opt.volume_window, opt.rule);
    const auto bid_pts = regression_points(snap, false, opt.volume_window, opt.rule);
    if (ask_pts.empty() || bid_pts.empty())
        throw TooFewPoints("fit_snapshot: a side has no regression points");

    // Map the bid side onto positive coordinates: y = A x - B with x,y < 0
    // becomes (-y) = A(-x) + B.
    std::vector<XY> ask_xy, bid_xy;
    ask_xy.reserve(ask_pts.size());
    bid_xy.reserve(bid_pts.size());
    for (const CurvePoint& p : ask_pts) ask_xy.push_back({p.x, p.y});
    for (const CurvePoint& p : bid_pts) bid_xy.push_back({-p.x, -p.y});

    SnapshotFit fit;
    fit.tau_hours = snap.tau_hours;
    fit.n_points = static_cast<int>(ask_xy.size() + bid_xy.size());
    if (opt.common_spread) {
        const Nnls3Result r = nnls3_common_spread(ask_xy, bid_xy);
        fit.a_plus = r.a_plus;
        fit.a_minus = r.a_minus;
        fit.b_plus = fit.b_minus = r.b;
        fit.objective = r.sse;
    } else {
        const Nnls2Result ra = nnls2(ask_xy);
        const Nnls2Result rb = nnls2(bid_xy);
        fit.a_plus = ra.a;
        fit.b_plus = ra.b;
        fit.a_minus = rb.a;
        fit.b_minus = rb.b;
        fit.objective = ra.sse + rb.sse;
    }
    return fit;
}

namespace {

struct WindowAverages {
    std::vector<double> tau;
    std::vector<double> a;      // arithmetic mean
    std::vector<double> log_b;  // mean of logs (geometric mean); NaN if no positive B
};

WindowAverages window_average(const std::vector<SnapshotFit>& fits, bool plus_side,
                              const SessionFitOptions& opt) {
    const double w = opt.window_minutes / 60.0;
    std::map<int, std::vector<const SnapshotFit*>> buckets;
    for (const SnapshotFit& f : fits) {
        if (f.tau_hours < opt.tau_lo || f.tau_hours > opt.tau_hi) continue;
        int idx = static_cast<int>(std::floor((f.tau_hours - opt.tau_lo) / w));
        buckets[idx].push_back(&f);
    }
    WindowAverages out;
    for (const auto& [idx, group] : buckets) {
        double st = 0, sa = 0, slb = 0;
        int nb = 0;
        for (const SnapshotFit* f : group) {
            st += f->tau_hours;
            sa += plus_side ? f->a_plus : f->a_minus;
            const double b = plus_side ? f->b_plus : f->b_minus;
            if (b > 0) {
                slb += std::log(b);
                ++nb;
            }
        }
        out.tau.push_back(st / static_cast<double>(group.size()));
        out.a.push_back(sa / static_cast<double>(group.size()));
        out.log_b.push_back(nb > 0 ? slb / nb : std::numeric_limits<double>::quiet_NaN());
    }
    return out;
}

SideParams fit_side_from_windows(const WindowAverages& wa, double session_hours) {
    if (wa.tau.size() < 2)
        throw InsufficientWindows("fit_session: need at least two non-empty windows");
    const auto [tmin, tmax] = std::minmax_element(wa.tau.begin(), wa.tau.end());
    if (*tmax - *tmin < 1e-12)
        throw InsufficientWindows("fit_session: all windows at one time to maturity");

    SideParams s;
    {
        std::vector<XY> pts;
        for (std::size_t i = 0; i < wa.tau.size(); ++i) pts.push_back({wa.tau[i], wa.a[i]});
        const Nnls2Result r = nnls2(pts);
        s.alpha_A = r.a * session_hours;
        s.beta_A = r.b;
    }
    {
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < wa.tau.size(); ++i) {
            if (std::isnan(wa.log_b[i])) continue;
            xs.push_back(wa.tau[i]);
            ys.push_back(wa.log_b[i]);
        }
        if (xs.size() >= 2 &&
            *std::max_element(xs.begin(), xs.end()) - *std::min_element(xs.begin(), xs.end()) > 1e-12) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            const double n = static_cast<double>(xs.size());
            for (std::size_t i = 0; i < xs.size(); ++i) {
                sx += xs[i];
                sy += ys[i];
                sxx += xs[i] * xs[i];
                sxy += xs[i] * ys[i];
            }
            const double det = n * sxx - sx * sx;
            double slope = (n * sxy - sx * sy) / det;
            double intercept = (sy - slope * sx) / n;
            if (slope < 0) {  // project onto alpha_B >= 0
                slope = 0;
                intercept = sy / n;
            }
            s.alpha_B = slope * session_hours;
            s.beta_B = intercept;
        } else if (!ys.empty()) {
            s.alpha_B = 0.0;
            double sy = 0;
            for (double y : ys) sy += y;
            s.beta_B = sy / static_cast<double>(ys.size());
        } else {
            s.alpha_B = 0.0;
            s.beta_B = kTinyLogB;
        }
    }
    return s;
}

} // namespace

MaturityLiquidity fit_session(const std::vector<SnapshotFit>& fits, double session_hours,
                              const SessionFitOptions& opt) {
    MaturityLiquidity ml;
    ml.session_hours = session_hours;
    ml.plus = fit_side_from_windows(window_average(fits, true, opt), session_hours);
    ml.minus = fit_side_from_windows(window_average(fits, false, opt), session_hours);
    return ml;
}

namespace {

struct PooledPoint {
    double tau;
    double x;  // mapped positive volume
    double y;  // mapped positive cost
};

/// Projected Levenberg-Marquardt for
///   min sum ((aA*tau + bA)*x + exp(aB*tau + bB) - y)^2,  aA, bA, aB >= 0.
SideParams refine_side(const std::vector<PooledPoint>& pts, SideParams init, double session_hours) {
    // work with raw (per-hour) slopes
    Eigen::Vector4d theta(init.alpha_A / session_hours, init.beta_A,
                          init.alpha_B / session_hours, init.beta_B);
    auto project = [](Eigen::Vector4d& t) {
        t(0) = std::max(0.0, t(0));
        t(1) = std::max(0.0, t(1));
        t(2) = std::max(0.0, t(2));
    };
    project(theta);

    auto sse_at = [&](const Eigen::Vector4d& t) {
        double s = 0.0;
        for (const PooledPoint& p : pts) {
            const double r = (t(0) * p.tau + t(1)) * p.x + safe_exp(t(2) * p.tau + t(3)) - p.y;
            s += r * r;
        }
        return s;
    };

    double lambda = 1e-6;
    double sse = sse_at(theta);
    for (int iter = 0; iter < 300; ++iter) {
        Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
        Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
        for (const PooledPoint& p : pts) {
            const double e = safe_exp(theta(2) * p.tau + theta(3));
            const double r = (theta(0) * p.tau + theta(1)) * p.x + e - p.y;
            Eigen::Vector4d j(p.tau * p.x, p.x, p.tau * e, e);
            jtj += j * j.transpose();
            jtr += j * r;
        }
        bool accepted = false;
        for (int tries = 0; tries < 12; ++tries) {
            Eigen::Matrix4d damped = jtj + lambda * Eigen::Matrix4d::Identity();
            Eigen::Vector4d step = damped.ldlt().solve(-jtr);
            Eigen::Vector4d cand = theta + step;
            project(cand);
            const double cand_sse = sse_at(cand);
            if (cand_sse <= sse) {
                const double improvement = sse - cand_sse;
                theta = cand;
                sse = cand_sse;
                lambda = std::max(1e-12, lambda / 3.0);
                accepted = true;
                if (improvement < 1e-14 * (1.0 + sse) && step.cwiseAbs().maxCoeff() < 1e-12)
                    iter = 300;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) break;
    }

    SideParams out;
    out.alpha_A = theta(0) * session_hours;
    out.beta_A = theta(1);
    out.alpha_B = theta(2) * session_hours;
    out.beta_B = theta(3);
    return out;
}

} // namespace

MaturityLiquidity fit_pooled(const std::vector<std::vector<lob::OrderBookSnapshot>>& sessions,
                             double session_hours, const FitOptions& opt) {
    if (sessions.empty()) throw TooFewPoints("fit_pooled: no sessions");

    std::vector<PooledPoint> plus_pts, minus_pts;
    std::vector<SnapshotFit> fits;
    for (const auto& session : sessions) {
        for (const lob::OrderBookSnapshot& snap : session) {
            const auto ask = regression_points(snap, true, opt.volume_window, opt.rule);
            const auto bid = regression_points(snap, false, opt.volume_window, opt.rule);
            if (ask.empty() || bid.empty())
                throw TooFewPoints("fit_pooled: snapshot with no points inside the volume window");
            for (const CurvePoint& p : ask) plus_pts.push_back({snap.tau_hours, p.x, p.y});
            for (const CurvePoint& p : bid) minus_pts.push_back({snap.tau_hours, -p.x, -p.y});
            fits.push_back(fit_snapshot(snap, opt));
        }
    }

    // Initial guess: the windowed session fit over the full observed range,
    // or degenerate constants when there is a single change time.
    MaturityLiquidity init;
    init.session_hours = session_hours;
    double tau_min = std::numeric_limits<double>::infinity(), tau_max = -tau_min;
    for (const SnapshotFit& f : fits) {
        tau_min = std::min(tau_min, f.tau_hours);
        tau_max = std::max(tau_max, f.tau_hours);
    }
    try {
        SessionFitOptions sopt;
        sopt.tau_lo = tau_min;
        sopt.tau_hi = tau_max;
        init = fit_session(fits, session_hours, sopt);
    } catch (const InsufficientWindows&) {
        auto const_side = [&](bool plus) {
            SideParams s;
            double sa = 0, slb = 0;
            int nb = 0;
            for (const SnapshotFit& f : fits) {
                sa += plus ? f.a_plus : f.a_minus;
                const double b = plus ? f.b_plus : f.b_minus;
                if (b > 0) {
                    slb += std::log(b);
                    ++nb;
                }
            }
            s.beta_A = std::max(0.0, sa / static_cast<double>(fits.size()));
            s.beta_B = nb > 0 ? slb / nb : kTinyLogB;
            return s;
        };
        init.plus = const_side(true);
        init.minus = const_side(false);
    }

    MaturityLiquidity out;
    out.session_hours = session_hours;
    out.plus = refine_side(plus_pts, init.plus, session_hours);
    out.minus = refine_side(minus_pts, init.minus, session_hours);
    return out;
}

} // namespace idstore::liq

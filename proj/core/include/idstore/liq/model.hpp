#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace idstore::liq {

/// Linear-slope / exponential-spread coefficients for one side of one
/// maturity. The alpha values are stored normalized by the session duration
/// (multiplied by T_m + 9, matching the published table convention); the
/// division is applied when evaluating at a given time to maturity.
struct SideParams {
    double alpha_A = 0.0;  // EUR/MWh^2 (normalized slope of A)
    double beta_A = 0.0;   // EUR/MWh^2
    double alpha_B = 0.0;  // normalized slope of log B
    double beta_B = 0.0;   // log EUR/MWh, may be negative

    double a(double tau_hours, double session_hours) const {
        return alpha_A / session_hours * tau_hours + beta_A;
    }
    double b(double tau_hours, double session_hours) const;
};

struct MaturityLiquidity {
    SideParams plus;   // x > 0, ask side
    SideParams minus;  // x < 0, bid side
    double session_hours = 17.0;  // T_m + 9
};

/// Per-maturity liquidity cost surface L_m(tau, x) for one market/session
/// profile. Maturity indices are 1-based.
struct LiquiditySessionParams {
    std::vector<MaturityLiquidity> maturities;

    const MaturityLiquidity& at(int m) const;
    int n_maturities() const { return static_cast<int>(maturities.size()); }

    /// Builds M maturities sharing one normalized coefficient row; maturity m
    /// delivers at T_m = m - 1 hours, so its session lasts m + 8 hours.
    /// Row layout: aA+, bA+, aB+, bB+, aA-, bA-, aB-, bB-.
    static LiquiditySessionParams from_table_row(const double (&row)[8], int n_maturities);

    void validate() const;  // sign constraints on alpha/beta
};

/// L_m(tau, x): signed cost in EUR/MWh over the mid. Zero at x == 0 (no
/// trade). Throws NegativeCoefficient if the evaluated A or B is negative.
double eval_cost(const LiquiditySessionParams& p, int m, double tau_hours, double x);

/// Bid-ask spread B_+(tau) + B_-(tau).
double spread(const LiquiditySessionParams& p, int m, double tau_hours);

/// JSON parameter file: an array with one record per (maturity, side):
/// {"maturity":m,"side":"plus"|"minus","alpha_A":..,"beta_A":..,"alpha_B":..,
///  "beta_B":..,"session_hours":..}
void save_params_json(std::ostream& os, const LiquiditySessionParams& p);
LiquiditySessionParams load_params_json(std::istream& is);
LiquiditySessionParams load_params_json_file(const std::string& path);

/// CSV export in the published table column layout (one row per maturity plus
/// an averaged row).
void write_params_table_csv(std::ostream& os, const LiquiditySessionParams& p);

} // namespace idstore::liq

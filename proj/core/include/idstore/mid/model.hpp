#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace idstore::mid {

/// Empirical law of positive jump sizes; sampling is uniform over the stored
/// values.
struct JumpLaw {
    std::vector<double> sizes;
};

struct JumpLawStats {
    double m1 = 0.0;  // first moment
    double m2 = 0.0;  // second moment
};

/// Throws EmptySample on an empty law.
JumpLawStats jump_law_stats(const JumpLaw& law);

/// Common-shock compound-Poisson mid-price model over M maturities. Each
/// maturity m carries its own +/- jump processes with intensity
/// mu * exp(-kappa (T_m - s)); a cascade of common processes moves maturities
/// 1..k simultaneously with total common intensity mu_c * exp(-kappa (T_m - s))
/// seen from maturity m.
struct MidPriceParams {
    double kappa = 0.25;  // 1/h, > 0
    double mu = 0.0;      // 1/h, idiosyncratic intensity
    double mu_c = 0.0;    // 1/h, common-shock intensity
    JumpLaw jump_law;
    std::vector<double> maturities;  // T_1..T_M hours, strictly increasing
    double t0 = -9.0;                // session open relative to T_1 = 0

    int n_maturities() const { return static_cast<int>(maturities.size()); }
    double maturity(int m) const { return maturities[static_cast<std::size_t>(m - 1)]; }
    void validate() const;
};

/// Intensity of mid-price changes for maturity m at time t: 2 (mu + mu_c)
/// exp(-kappa (T_m - t)).
double change_intensity(const MidPriceParams& p, int m, double t);

/// Instantaneous variance proxy at time t (EUR/MWh)^2 per hour.
double vol_squared(const MidPriceParams& p, int m, double t);

/// Long-session limit of the integrated volatility proxy,
/// sqrt(2 m2 (mu + mu_c) / kappa).
double sigma_infinity(const MidPriceParams& p);

/// Increment correlation between maturities l and k (l != k):
/// mu_c/(mu+mu_c) * exp(-kappa |T_l - T_k| / 2). Throws SameMaturity.
double theoretical_corr(const MidPriceParams& p, int l, int k);

/// JSON: {"kappa":..,"mu":..,"mu_c":..,"jump_sizes":[..],"maturities":[..],"t0":..}
void save_params_json(std::ostream& os, const MidPriceParams& p);
MidPriceParams load_params_json(std::istream& is);
MidPriceParams load_params_json_file(const std::string& path);

} // namespace idstore::mid

#include "idstore/mid/model.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "idstore/errors.hpp"

#include <json.hpp>

namespace idstore::mid {

JumpLawStats jump_law_stats(const JumpLaw& law) {
    if (law.sizes.empty()) throw EmptySample("jump_law_stats: empty sample");
    JumpLawStats s;
    for (double y : law.sizes) {
        s.m1 += y;
        s.m2 += y * y;
    }
    const double n = static_cast<double>(law.sizes.size());
    s.m1 /= n;
    s.m2 /= n;
    return s;
}

void MidPriceParams::validate() const {
    if (kappa <= 0) throw Error("kappa must be positive");
    if (mu < 0 || mu_c < 0) throw Error("intensities must be nonnegative");
    if (maturities.empty()) throw Error("no maturities");
    for (std::size_t i = 1; i < maturities.size(); ++i)
        if (maturities[i] <= maturities[i - 1]) throw Error("maturities not strictly increasing");
    if (t0 > maturities.front()) throw Error("session opens after the first maturity");
    for (double y : jump_law.sizes)
        if (y <= 0) throw Error("jump sizes must be positive");
}

double change_intensity(const MidPriceParams& p, int m, double t) {
    return 2.0 * (p.mu + p.mu_c) * std::exp(-p.kappa * (p.maturity(m) - t));
}

double vol_squared(const MidPriceParams& p, int m, double t) {
    const JumpLawStats s = jump_law_stats(p.jump_law);
    return 2.0 * s.m2 * (p.mu + p.mu_c) * std::exp(-p.kappa * (p.maturity(m) - t));
}

double sigma_infinity(const MidPriceParams& p) {
    const JumpLawStats s = jump_law_stats(p.jump_law);
    return std::sqrt(2.0 * s.m2 * (p.mu + p.mu_c) / p.kappa);
}

double theoretical_corr(const MidPriceParams& p, int l, int k) {
    if (l == k) throw SameMaturity("theoretical_corr: l == k");
    const double total = p.mu + p.mu_c;
    if (total <= 0) return 0.0;
    return p.mu_c / total * std::exp(-0.5 * p.kappa * std::abs(p.maturity(l) - p.maturity(k)));
}

void save_params_json(std::ostream& os, const MidPriceParams& p) {
    nlohmann::json j;
    j["kappa"] = p.kappa;
    j["mu"] = p.mu;
    j["mu_c"] = p.mu_c;
    j["jump_sizes"] = p.jump_law.sizes;
    j["maturities"] = p.maturities;
    j["t0"] = p.t0;
    os << j.dump(2) << '\n';
}

MidPriceParams load_params_json(std::istream& is) {
    const nlohmann::json j = nlohmann::json::parse(is);
    MidPriceParams p;
    p.kappa = j.at("kappa").get<double>();
    p.mu = j.at("mu").get<double>();
    p.mu_c = j.at("mu_c").get<double>();
    p.jump_law.sizes = j.at("jump_sizes").get<std::vector<double>>();
    p.maturities = j.at("maturities").get<std::vector<double>>();
    p.t0 = j.value("t0", -9.0);
    p.validate();
    return p;
}

MidPriceParams load_params_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open mid-price params: " + path);
    return load_params_json(is);
}

} // namespace idstore::mid

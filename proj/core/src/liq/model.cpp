#include "idstore/liq/model.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "idstore/errors.hpp"

#include <json.hpp>

namespace idstore::liq {

double SideParams::b(double tau_hours, double session_hours) const {
    return std::exp(alpha_B / session_hours * tau_hours + beta_B);
}

const MaturityLiquidity& LiquiditySessionParams::at(int m) const {
    if (m < 1 || m > n_maturities()) throw Error("maturity index out of range");
    return maturities[static_cast<std::size_t>(m - 1)];
}

LiquiditySessionParams LiquiditySessionParams::from_table_row(const double (&row)[8], int n) {
    LiquiditySessionParams p;
    p.maturities.resize(static_cast<std::size_t>(n));
    for (int m = 1; m <= n; ++m) {
        MaturityLiquidity& ml = p.maturities[static_cast<std::size_t>(m - 1)];
        ml.plus = SideParams{row[0], row[1], row[2], row[3]};
        ml.minus = SideParams{row[4], row[5], row[6], row[7]};
        ml.session_hours = static_cast<double>(m) + 8.0;  // T_m + 9 with T_m = m - 1
    }
    p.validate();
    return p;
}

void LiquiditySessionParams::validate() const {
    for (const MaturityLiquidity& ml : maturities) {
        for (const SideParams* s : {&ml.plus, &ml.minus}) {
            if (s->alpha_A < 0 || s->beta_A < 0 || s->alpha_B < 0)
                throw NegativeCoefficient("liquidity params violate sign constraints");
        }
        if (ml.session_hours <= 0) throw Error("non-positive session duration");
    }
}

double eval_cost(const LiquiditySessionParams& p, int m, double tau_hours, double x) {
    if (x == 0.0) return 0.0;
    const MaturityLiquidity& ml = p.at(m);
    const SideParams& s = x > 0 ? ml.plus : ml.minus;
    const double a = s.a(tau_hours, ml.session_hours);
    const double b = s.b(tau_hours, ml.session_hours);
    if (a < 0.0 || b < 0.0)
        throw NegativeCoefficient("A or B negative at the requested time to maturity");
    return x > 0 ? a * x + b : a * x - b;
}

double spread(const LiquiditySessionParams& p, int m, double tau_hours) {
    const MaturityLiquidity& ml = p.at(m);
    return ml.plus.b(tau_hours, ml.session_hours) + ml.minus.b(tau_hours, ml.session_hours);
}

namespace {

nlohmann::json side_record(int m, const char* side, const SideParams& s, double session_hours) {
    return nlohmann::json{{"maturity", m},
                          {"side", side},
                          {"alpha_A", s.alpha_A},
                          {"beta_A", s.beta_A},
                          {"alpha_B", s.alpha_B},
                          {"beta_B", s.beta_B},
                          {"session_hours", session_hours}};
}

} // namespace

void save_params_json(std::ostream& os, const LiquiditySessionParams& p) {
    nlohmann::json arr = nlohmann::json::array();
    for (int m = 1; m <= p.n_maturities(); ++m) {
        const MaturityLiquidity& ml = p.at(m);
        arr.push_back(side_record(m, "plus", ml.plus, ml.session_hours));
        arr.push_back(side_record(m, "minus", ml.minus, ml.session_hours));
    }
    os << arr.dump(2) << '\n';
}

LiquiditySessionParams load_params_json(std::istream& is) {
    const nlohmann::json arr = nlohmann::json::parse(is);
    int max_m = 0;
    for (const auto& rec : arr) max_m = std::max(max_m, rec.at("maturity").get<int>());
    LiquiditySessionParams p;
    p.maturities.resize(static_cast<std::size_t>(max_m));
    for (const auto& rec : arr) {
        const int m = rec.at("maturity").get<int>();
        MaturityLiquidity& ml = p.maturities[static_cast<std::size_t>(m - 1)];
        SideParams s;
        s.alpha_A = rec.at("alpha_A").get<double>();
        s.beta_A = rec.at("beta_A").get<double>();
        s.alpha_B = rec.at("alpha_B").get<double>();
        s.beta_B = rec.at("beta_B").get<double>();
        ml.session_hours = rec.at("session_hours").get<double>();
        if (rec.at("side").get<std::string>() == "plus") ml.plus = s;
        else ml.minus = s;
    }
    p.validate();
    return p;
}

LiquiditySessionParams load_params_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open liquidity params: " + path);
    return load_params_json(is);
}

void write_params_table_csv(std::ostream& os, const LiquiditySessionParams& p) {
    os << "label,alpha_A_plus,beta_A_plus,alpha_B_plus,beta_B_plus,"
          "alpha_A_minus,beta_A_minus,alpha_B_minus,beta_B_minus\n";
    char buf[256];
    double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    for (int m = 1; m <= p.n_maturities(); ++m) {
        const MaturityLiquidity& ml = p.at(m);
        const double row[8] = {ml.plus.alpha_A, ml.plus.beta_A, ml.plus.alpha_B, ml.plus.beta_B,
                               ml.minus.alpha_A, ml.minus.beta_A, ml.minus.alpha_B, ml.minus.beta_B};
        for (int i = 0; i < 8; ++i) acc[i] += row[i];
        std::snprintf(buf, sizeof buf, "m%02d,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g\n", m,
                      row[0], row[1], row[2], row[3], row[4], row[5], row[6], row[7]);
        os << buf;
    }
    const double n = static_cast<double>(p.n_maturities());
    std::snprintf(buf, sizeof buf, "avg,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g\n",
                  acc[0] / n, acc[1] / n, acc[2] / n, acc[3] / n,
                  acc[4] / n, acc[5] / n, acc[6] / n, acc[7] / n);
    os << buf;
}

} // namespace idstore::liq

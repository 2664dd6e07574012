#include "idstore/lob/snapshot.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <string>

#include "idstore/errors.hpp"

#include <json.hpp>

namespace idstore::lob {

OrderBookSnapshot OrderBookSnapshot::capped(int depth) const {
    OrderBookSnapshot out;
    out.tau_hours = tau_hours;
    out.depth_cap = depth;
    const auto take = [depth](const std::vector<Level>& side) {
        const std::size_t n = std::min<std::size_t>(side.size(), static_cast<std::size_t>(depth));
        return std::vector<Level>(side.begin(), side.begin() + static_cast<std::ptrdiff_t>(n));
    };
    out.asks = take(asks);
    out.bids = take(bids);
    return out;
}

void OrderBookSnapshot::validate() const {
    for (std::size_t i = 0; i < asks.size(); ++i) {
        if (asks[i].volume <= 0.0) throw Error("ask level with non-positive volume");
        if (i > 0 && asks[i].price <= asks[i - 1].price)
            throw Error("ask prices not strictly increasing");
    }
    for (std::size_t i = 0; i < bids.size(); ++i) {
        if (bids[i].volume >= 0.0) throw Error("bid level with non-negative volume");
        if (i > 0 && bids[i].price >= bids[i - 1].price)
            throw Error("bid prices not strictly decreasing");
    }
    if (!asks.empty() && !bids.empty() && asks.front().price <= bids.front().price)
        throw Error("crossed snapshot: best ask <= best bid");
}

double mid_price(const OrderBookSnapshot& s) {
    if (s.asks.empty() || s.bids.empty()) throw EmptySide("mid_price: empty book side");
    return 0.5 * (s.asks.front().price + s.bids.front().price);
}

namespace {

// Walks one side and returns the VWAP-minus-mid for |x| of it. `side` holds
// levels in priority order with signed volumes; x and the level volumes share
// the same sign.
double vwap_cost(const std::vector<Level>& side, double x, double mid) {
    double remaining = x;
    double cost = 0.0;  // sum of price * signed filled volume
    for (const Level& lv : side) {
        const double take = (std::abs(remaining) >= std::abs(lv.volume)) ? lv.volume : remaining;
        cost += lv.price * take;
        remaining -= take;
        if (remaining == 0.0) break;
    }
    if (remaining != 0.0) throw InsufficientDepth("curve: ladder exhausted before x");
    return cost / x - mid;
}

} // namespace

double empirical_curve(const OrderBookSnapshot& s, double x) {
    if (x == 0.0) throw ZeroVolume("empirical_curve: x == 0");
    const double mid = mid_price(s);
    return vwap_cost(x > 0 ? s.asks : s.bids, x, mid);
}

double stepwise_curve(const OrderBookSnapshot& s, double x) {
    if (x == 0.0) throw ZeroVolume("stepwise_curve: x == 0");
    const double mid = mid_price(s);
    const std::vector<Level>& side = x > 0 ? s.asks : s.bids;
    // Find the first rupture point at or past x and take the full VWAP there.
    double cum = 0.0, cost = 0.0;
    for (const Level& lv : side) {
        cum += lv.volume;
        cost += lv.price * lv.volume;
        if (std::abs(x) <= std::abs(cum)) return cost / cum - mid;
    }
    throw InsufficientDepth("stepwise_curve: ladder exhausted before x");
}

ExecutionReport execute_market_order(const OrderBookSnapshot& s, double x) {
    if (x == 0.0) throw ZeroVolume("execute_market_order: x == 0");
    const std::vector<Level>& side = x > 0 ? s.asks : s.bids;
    double remaining = x;
    double traded_eur = 0.0;  // sum of price * signed filled volume
    for (const Level& lv : side) {
        const double take = (std::abs(remaining) >= std::abs(lv.volume)) ? lv.volume : remaining;
        traded_eur += lv.price * take;
        remaining -= take;
        if (remaining == 0.0) break;
    }
    ExecutionReport rep;
    rep.filled = std::abs(x - remaining);
    rep.residual = std::abs(remaining);
    rep.cash = -traded_eur;  // buys pay (negative cash), sells receive
    rep.vwap = rep.filled > 0.0 ? std::abs(traded_eur) / rep.filled : 0.0;
    return rep;
}

void dump_snapshots_jsonl(std::ostream& os, const std::vector<OrderBookSnapshot>& snaps) {
    for (const OrderBookSnapshot& s : snaps) {
        nlohmann::json j;
        j["t_hours_to_maturity"] = s.tau_hours;
        auto side = [](const std::vector<Level>& lv) {
            nlohmann::json arr = nlohmann::json::array();
            for (const Level& l : lv) arr.push_back({l.price, l.volume});
            return arr;
        };
        j["asks"] = side(s.asks);
        j["bids"] = side(s.bids);
        os << j.dump() << '\n';
    }
}

std::vector<OrderBookSnapshot> load_snapshots_jsonl(std::istream& is) {
    std::vector<OrderBookSnapshot> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        OrderBookSnapshot s;
        s.tau_hours = j.at("t_hours_to_maturity").get<double>();
        for (const auto& l : j.at("asks")) s.asks.push_back({l.at(0).get<double>(), l.at(1).get<double>()});
        for (const auto& l : j.at("bids")) s.bids.push_back({l.at(0).get<double>(), l.at(1).get<double>()});
        s.validate();
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace idstore::lob

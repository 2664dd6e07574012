#include "idstore/synth/generate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "idstore/errors.hpp"
#include "idstore/lob/book.hpp"
#include "idstore/lob/io.hpp"
#include "idstore/rng.hpp"

namespace idstore::synth {

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t x = a;
    x ^= 0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2);
    (void)splitmix64(x);
    x ^= c * 0xbf58476d1ce4e5b9ULL;
    return splitmix64(x);
}

/// One side's ladder from the exact midpoint inversion: with cumulative
/// volumes Vbar_i, level prices are the increments of
/// Vbar_i * (mid + L((Vbar_{i-1}+Vbar_i)/2)).
std::vector<lob::Level> build_side(const liq::SideParams& sp, double session_hours,
                                   double tau_hours, double mid, bool ask_side,
                                   double granularity, int n_levels, double noise_rel, Rng* rng) {
    const double a = sp.a(tau_hours, session_hours);
    const double b = sp.b(tau_hours, session_hours);
    if (a < 0.0 || b < 0.0) throw InfeasibleLadder("negative liquidity coefficients");
    const double sgn = ask_side ? 1.0 : -1.0;

    std::vector<lob::Level> side;
    side.reserve(static_cast<std::size_t>(n_levels));
    double cum = 0.0, cum_cost = 0.0, prev_offset = 0.0;
    for (int i = 1; i <= n_levels; ++i) {
        const double vol = granularity * static_cast<double>(i);
        const double next_cum = cum + vol;
        const double x_mid = sgn * 0.5 * (cum + next_cum);
        double step = a * x_mid + sgn * b;  // L at the stepwise midpoint
        if (rng && noise_rel > 0.0) step *= 1.0 + noise_rel * rng->normal();
        const double target_cost = sgn * next_cum * (mid + step);
        double price = (target_cost - cum_cost) / (sgn * vol);
        double offset = sgn * (price - mid);
        if (offset <= 0.0) {
            if (noise_rel <= 0.0) throw InfeasibleLadder("ladder crosses the mid");
            offset = prev_offset > 0.0 ? prev_offset : 1e-4;
            price = mid + sgn * offset;
        }
        if (offset < prev_offset) {
            if (noise_rel <= 0.0) throw InfeasibleLadder("non-monotone ladder");
            offset = prev_offset;
            price = mid + sgn * offset;
        }
        prev_offset = offset;
        cum = next_cum;
        cum_cost = sgn * next_cum * (mid + step);
        if (!side.empty() && std::abs(side.back().price - price) < 1e-12) {
            side.back().volume += sgn * vol;  // flat segment: merge into one level
        } else {
            side.push_back({price, sgn * vol});
        }
    }
    return side;
}

} // namespace

lob::OrderBookSnapshot make_book(const SynthSpec& spec, int maturity, double tau_hours,
                                 double mid, std::uint64_t noise_key) {
    const liq::MaturityLiquidity& ml = spec.liquidity.at(maturity);
    lob::OrderBookSnapshot snap;
    snap.tau_hours = tau_hours;
    Rng rng(spec.seed, 0x5eed5eedULL, noise_key);
    Rng* noise = spec.offset_noise_rel > 0.0 ? &rng : nullptr;
    snap.asks = build_side(ml.plus, ml.session_hours, tau_hours, mid, true,
                           spec.level_granularity, spec.levels_per_side, spec.offset_noise_rel,
                           noise);
    snap.bids = build_side(ml.minus, ml.session_hours, tau_hours, mid, false,
                           spec.level_granularity, spec.levels_per_side, spec.offset_noise_rel,
                           noise);
    if (snap.asks.front().price <= snap.bids.front().price)
        throw InfeasibleLadder("crossed synthetic book (zero total spread?)");
    snap.validate();
    return snap;
}

mid::SessionSeries gen_midprice_session(const SynthSpec& spec, std::uint64_t session_index) {
    const auto event_series =
        mid::simulate_event_series(spec.midprice, spec.f0, spec.seed, session_index);
    mid::SessionSeries out;
    out.reserve(event_series.size());
    for (int m = 1; m <= spec.midprice.n_maturities(); ++m) {
        const mid::EventSeries& es = event_series[static_cast<std::size_t>(m - 1)];
        mid::MidSeries series;
        series.maturity = m;
        series.maturity_hours = spec.midprice.maturity(m);
        series.times = es.times;
        series.values = es.values;
        out.push_back(std::move(series));
    }
    return out;
}

std::vector<lob::OrderBookSnapshot> gen_orderbook_session(const SynthSpec& spec,
                                                          const mid::MidSeries& series,
                                                          std::uint64_t session_index) {
    std::vector<lob::OrderBookSnapshot> out;
    out.reserve(series.times.size());
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const double t = series.times[i];
        const double tau = series.maturity_hours - t;
        if (tau < 0.0) break;
        const std::uint64_t key =
            mix(session_index, static_cast<std::uint64_t>(series.maturity), i);
        out.push_back(make_book(spec, series.maturity, tau, series.values[i], key));
    }
    return out;
}

SynthSessionStore::SynthSessionStore(SynthSpec spec, bt::Date start, int n_days)
    : spec_(std::move(spec)), start_(start), n_days_(n_days) {
    if (spec_.f0.size() != static_cast<std::size_t>(spec_.midprice.n_maturities()))
        throw Error("SynthSessionStore: f0 size mismatch");
}

std::vector<bt::Date> SynthSessionStore::days() const {
    std::vector<bt::Date> out;
    out.reserve(static_cast<std::size_t>(n_days_));
    for (int k = 0; k < n_days_; ++k) out.push_back(start_.plus_days(k));
    return out;
}

int SynthSessionStore::day_index(bt::Date day) const {
    const int k = start_.days_until(day);
    return (k >= 0 && k < n_days_) ? k : -1;
}

bool SynthSessionStore::has_session(bt::Date day, int maturity) const {
    return day_index(day) >= 0 && maturity >= 1 && maturity <= n_maturities();
}

const mid::SessionSeries& SynthSessionStore::session_for(int day_idx) const {
    auto it = cache_.find(day_idx);
    if (it == cache_.end()) {
        it = cache_.emplace(day_idx, gen_midprice_session(spec_, static_cast<std::uint64_t>(day_idx)))
                 .first;
        if (cache_.size() > 64) cache_.erase(cache_.begin());  // bounded memory over long ranges
    }
    return it->second;
}

mid::MidSeries SynthSessionStore::mid_series(bt::Date day, int maturity) const {
    const int k = day_index(day);
    if (k < 0) return mid::MidSeries{maturity, spec_.midprice.maturity(maturity), {}, {}};
    return session_for(k)[static_cast<std::size_t>(maturity - 1)];
}

std::optional<lob::OrderBookSnapshot> SynthSessionStore::snapshot_at(bt::Date day, int maturity,
                                                                     double t_hours) const {
    const int k = day_index(day);
    if (k < 0) return std::nullopt;
    const mid::MidSeries& series = session_for(k)[static_cast<std::size_t>(maturity - 1)];
    const auto it = std::upper_bound(series.times.begin(), series.times.end(), t_hours);
    if (it == series.times.begin()) return std::nullopt;
    const std::size_t i = static_cast<std::size_t>(it - series.times.begin() - 1);
    const double tau = series.maturity_hours - t_hours;
    if (tau < 0.0) return std::nullopt;
    const std::uint64_t key = mix(static_cast<std::uint64_t>(k),
                                  static_cast<std::uint64_t>(maturity), i);
    return make_book(spec_, maturity, tau, series.values[i], key);
}

void write_session_events_csv(std::ostream& os, const SynthSpec& spec,
                              const mid::MidSeries& series, std::uint64_t session_index) {
    std::vector<lob::OrderEvent> events;
    std::vector<std::string> live;
    long long next_id = 0;
    const double tick = 0.01;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const double t = series.times[i];
        const double tau = series.maturity_hours - t;
        if (tau < 0.0) break;
        const std::int64_t ts =
            static_cast<std::int64_t>(std::llround((t - lob::kSessionOpenHours) * 3.6e6));
        for (const std::string& id : live) {
            lob::OrderEvent ev;
            ev.ts_ms = ts;
            ev.maturity_index = series.maturity;
            ev.action = lob::Action::cancel;
            ev.order_id = id;
            ev.side = lob::Side::ask;  // side is irrelevant for cancels
            ev.price = 0.0;
            ev.volume = 1.0;
            events.push_back(std::move(ev));
        }
        live.clear();
        const std::uint64_t key =
            mix(session_index, static_cast<std::uint64_t>(series.maturity), i);
        const lob::OrderBookSnapshot snap =
            make_book(spec, series.maturity, tau, series.values[i], key);
        const double mid = lob::mid_price(snap);
        auto emit_side = [&](const std::vector<lob::Level>& side, lob::Side which) {
            for (const lob::Level& lv : side) {
                lob::OrderEvent ev;
                ev.ts_ms = ts;
                ev.maturity_index = series.maturity;
                ev.side = which;
                // round away from the mid so rounded books never cross
                const double scaled = lv.price / tick;
                ev.price = which == lob::Side::ask ? std::ceil(scaled - 1e-9) * tick
                                                   : std::floor(scaled + 1e-9) * tick;
                if (which == lob::Side::ask && ev.price <= mid) ev.price += tick;
                if (which == lob::Side::bid && ev.price >= mid) ev.price -= tick;
                ev.volume = std::max(0.001, std::round(std::abs(lv.volume) * 1000.0) / 1000.0);
                ev.action = lob::Action::add;
                ev.order_id = "s" + std::to_string(session_index) + "_m" +
                              std::to_string(series.maturity) + "_" + std::to_string(next_id++);
                live.push_back(ev.order_id);
                events.push_back(std::move(ev));
            }
        };
        emit_side(snap.bids, lob::Side::bid);
        emit_side(snap.asks, lob::Side::ask);
    }
    lob::write_order_events_csv(os, events);
}

} // namespace idstore::synth

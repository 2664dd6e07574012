#include "idstore/lob/book.hpp"

#include <algorithm>
#include <cmath>

#include "idstore/errors.hpp"

namespace idstore::lob {

namespace {

std::int64_t to_ticks(double price) {
    const double scaled = price * 100.0;
    const double rounded = std::nearbyint(scaled);
    if (std::abs(scaled - rounded) > 1e-6)
        throw InvalidEvent("price is not a multiple of the 0.01 tick");
    return static_cast<std::int64_t>(rounded);
}

std::int64_t to_kwh(double volume) {
    const double scaled = volume * 1000.0;
    const double rounded = std::nearbyint(scaled);
    if (rounded <= 0.0 || std::abs(scaled - rounded) > 1e-6)
        throw InvalidEvent("volume must be a positive multiple of 1 kWh");
    return static_cast<std::int64_t>(rounded);
}

} // namespace

Book::Book(double maturity_hours, Config cfg) : maturity_hours_(maturity_hours), cfg_(cfg) {}

void Book::apply_event(const OrderEvent& ev) {
    last_ts_ms_ = ev.ts_ms;
    switch (ev.action) {
    case Action::add: {
        const std::int64_t ticks = to_ticks(ev.price);
        const std::int64_t kwh = to_kwh(ev.volume);
        if (orders_.count(ev.order_id))
            throw InvalidEvent("duplicate order id: " + ev.order_id);
        std::int64_t remaining = kwh;
        const std::int64_t fillable = matchable_volume(ev.side, ticks, kwh);
        if (fillable > 0 && !cfg_.matching_enabled)
            throw CrossedBookAfterAdd("crossing add with matching disabled: " + ev.order_id);
        if (ev.restriction == Restriction::fok || ev.restriction == Restriction::aon) {
            if (fillable < kwh) { ++skipped_; return; }  // cancelled in full
        }
        if (fillable > 0) remaining = match_marketable(ev.side, ticks, remaining);
        if (ev.restriction == Restriction::ioc) return;  // unfilled part cancelled
        if (remaining > 0) {
            orders_[ev.order_id] = Order{ev.side, ticks, remaining};
            PriceLevel& lvl = ev.side == Side::ask ? asks_[ticks] : bids_[ticks];
            lvl.total_kwh += remaining;
            lvl.fifo.push_back(ev.order_id);
        }
        return;
    }
    case Action::cancel: {
        auto it = orders_.find(ev.order_id);
        if (it == orders_.end()) throw UnknownOrderId("cancel of unknown order: " + ev.order_id);
        remove_from_level(ev.order_id, it->second);
        orders_.erase(it);
        return;
    }
    case Action::execute: {
        auto it = orders_.find(ev.order_id);
        if (it == orders_.end()) throw UnknownOrderId("execute of unknown order: " + ev.order_id);
        const std::int64_t kwh = to_kwh(ev.volume);
        if (kwh > it->second.remaining_kwh)
            throw InvalidEvent("execute exceeds remaining volume: " + ev.order_id);
        reduce_order(ev.order_id, kwh);
        return;
    }
    }
    throw InvalidEvent("unknown action");
}

std::int64_t Book::matchable_volume(Side side, std::int64_t price_ticks, std::int64_t kwh) const {
    std::int64_t fillable = 0;
    if (side == Side::bid) {
        for (const auto& [p, lvl] : asks_) {
            if (p > price_ticks || fillable >= kwh) break;
            fillable += lvl.total_kwh;
        }
    } else {
        for (const auto& [p, lvl] : bids_) {
            if (p < price_ticks || fillable >= kwh) break;
            fillable += lvl.total_kwh;
        }
    }
    return std::min(fillable, kwh);
}

std::int64_t Book::match_marketable(Side side, std::int64_t price_ticks, std::int64_t kwh) {
    std::int64_t remaining = kwh;
    auto sweep = [&](auto& levels, auto crosses) {
        while (remaining > 0 && !levels.empty()) {
            auto it = levels.begin();
            if (!crosses(it->first)) break;
            PriceLevel& lvl = it->second;
            while (remaining > 0 && !lvl.fifo.empty()) {
                const std::string resting_id = lvl.fifo.front();
                Order& resting = orders_.at(resting_id);
                const std::int64_t take = std::min(remaining, resting.remaining_kwh);
                resting.remaining_kwh -= take;
                lvl.total_kwh -= take;
                remaining -= take;
                if (resting.remaining_kwh == 0) {
                    lvl.fifo.pop_front();
                    orders_.erase(resting_id);
                }
            }
            if (lvl.total_kwh == 0) levels.erase(it);
        }
    };
    if (side == Side::bid)
        sweep(asks_, [&](std::int64_t p) { return p <= price_ticks; });
    else
        sweep(bids_, [&](std::int64_t p) { return p >= price_ticks; });
    return remaining;
}

void Book::remove_from_level(const std::string& id, const Order& o) {
    auto erase_in = [&](auto& levels) {
        auto it = levels.find(o.price_ticks);
        if (it == levels.end()) return;
        PriceLevel& lvl = it->second;
        lvl.total_kwh -= o.remaining_kwh;
        auto pos = std::find(lvl.fifo.begin(), lvl.fifo.end(), id);
        if (pos != lvl.fifo.end()) lvl.fifo.erase(pos);
        if (lvl.total_kwh <= 0 || lvl.fifo.empty()) levels.erase(it);
    };
    if (o.side == Side::ask) erase_in(asks_); else erase_in(bids_);
}

void Book::reduce_order(const std::string& id, std::int64_t kwh) {
    Order& o = orders_.at(id);
    o.remaining_kwh -= kwh;
    auto reduce_in = [&](auto& levels) {
        auto it = levels.find(o.price_ticks);
        it->second.total_kwh -= kwh;
        if (o.remaining_kwh == 0) {
            auto pos = std::find(it->second.fifo.begin(), it->second.fifo.end(), id);
            if (pos != it->second.fifo.end()) it->second.fifo.erase(pos);
        }
        if (it->second.total_kwh <= 0) levels.erase(it);
    };
    if (o.side == Side::ask) reduce_in(asks_); else reduce_in(bids_);
    if (o.remaining_kwh == 0) orders_.erase(id);
}

OrderBookSnapshot Book::snapshot() const {
    OrderBookSnapshot s;
    s.tau_hours = maturity_hours_ - session_time_hours(last_ts_ms_);
    s.asks.reserve(asks_.size());
    for (const auto& [p, lvl] : asks_)
        s.asks.push_back({static_cast<double>(p) / 100.0, static_cast<double>(lvl.total_kwh) / 1000.0});
    s.bids.reserve(bids_.size());
    for (const auto& [p, lvl] : bids_)
        s.bids.push_back({static_cast<double>(p) / 100.0, -static_cast<double>(lvl.total_kwh) / 1000.0});
    return s;
}

OrderBookSnapshot Book::snapshot(int depth_cap) const { return snapshot().capped(depth_cap); }

SessionReplay::SessionReplay(std::vector<OrderEvent> events, double maturity_hours, Book::Config cfg)
    : events_(std::move(events)), book_(maturity_hours, cfg) {
    std::stable_sort(events_.begin(), events_.end(),
                     [](const OrderEvent& a, const OrderEvent& b) { return a.ts_ms < b.ts_ms; });
}

const Book& SessionReplay::advance_to(double t_hours) {
    while (cursor_ < events_.size() &&
           session_time_hours(events_[cursor_].ts_ms) <= t_hours) {
        book_.apply_event(events_[cursor_]);
        ++cursor_;
    }
    return book_;
}

const Book& SessionReplay::finish() {
    while (cursor_ < events_.size()) {
        book_.apply_event(events_[cursor_]);
        ++cursor_;
    }
    return book_;
}

std::vector<OrderBookSnapshot> snapshots_on_change(const std::vector<OrderEvent>& events,
                                                   double maturity_hours, Book::Config cfg) {
    Book book(maturity_hours, cfg);
    std::vector<OrderBookSnapshot> out;
    out.reserve(events.size());
    for (const OrderEvent& ev : events) {
        book.apply_event(ev);
        out.push_back(book.snapshot());
    }
    return out;
}

std::vector<OrderBookSnapshot> snapshots_at_times(const std::vector<OrderEvent>& events,
                                                  double maturity_hours,
                                                  const std::vector<double>& grid_hours,
                                                  Book::Config cfg) {
    SessionReplay replay(events, maturity_hours, cfg);
    std::vector<OrderBookSnapshot> out;
    for (double t : grid_hours) {
        const Book& b = replay.advance_to(t);
        if (b.empty() && b.last_ts_ms() == 0) continue;
        OrderBookSnapshot s = b.snapshot();
        s.tau_hours = maturity_hours - t;
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace idstore::lob

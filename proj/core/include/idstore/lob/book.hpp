#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <unordered_map>

#include "idstore/lob/snapshot.hpp"

namespace idstore::lob {

enum class Side { bid, ask };
enum class Action { add, cancel, execute };

/// Match-time restrictions carried by some venues' orders. `none` is the
/// plain limit order case.
enum class Restriction { none, ioc, fok, aon };

struct OrderEvent {
    std::int64_t ts_ms = 0;      // milliseconds since session open (15:00 the day before)
    int maturity_index = 1;      // 1..24
    Side side = Side::bid;
    double price = 0.0;          // EUR/MWh, tick 0.01
    double volume = 0.0;         // MWh, > 0
    Action action = Action::add;
    std::string order_id;
    Restriction restriction = Restriction::none;
};

/// Session open relative to T_1 = 0 (midnight of the delivery day).
inline constexpr double kSessionOpenHours = -9.0;

inline double session_time_hours(std::int64_t ts_ms) {
    return kSessionOpenHours + static_cast<double>(ts_ms) / 3.6e6;
}

/// Mutable order book for one maturity, rebuilt from an order-event stream
/// with price-time priority. Prices are kept in integer ticks (0.01 EUR) and
/// volumes in integer kWh; doubles only appear at the API boundary.
/// Single-writer: share snapshots, not the book.
class Book {
public:
    struct Config {
        // When false, an add that crosses the opposite side is rejected with
        // CrossedBookAfterAdd instead of being matched as marketable.
        bool matching_enabled = true;
    };

    explicit Book(double maturity_hours, Config cfg = {});

    /// Applies one event. Throws UnknownOrderId / CrossedBookAfterAdd /
    /// InvalidEvent. Events with the same timestamp are applied in call order.
    void apply_event(const OrderEvent& ev);

    /// Full-depth snapshot; deeper liquidity stays visible so market orders
    /// can reach past any display cap.
    OrderBookSnapshot snapshot() const;
    /// Snapshot view keeping the best `depth_cap` levels per side.
    OrderBookSnapshot snapshot(int depth_cap) const;

    double maturity_hours() const { return maturity_hours_; }
    std::int64_t last_ts_ms() const { return last_ts_ms_; }

    /// Orders skipped with a counted warning (hibernated/block flavours the
    /// replay does not model).
    std::int64_t skipped_orders() const { return skipped_; }

    bool empty() const { return asks_.empty() && bids_.empty(); }

private:
    struct Order {
        Side side;
        std::int64_t price_ticks;
        std::int64_t remaining_kwh;
    };
    struct PriceLevel {
        std::int64_t total_kwh = 0;
        std::deque<std::string> fifo;  // order ids in time priority
    };

    using AskMap = std::map<std::int64_t, PriceLevel>;                        // ascending
    using BidMap = std::map<std::int64_t, PriceLevel, std::greater<>>;       // descending

    void add_order(const OrderEvent& ev, std::int64_t price_ticks, std::int64_t kwh);
    std::int64_t match_marketable(Side side, std::int64_t price_ticks, std::int64_t kwh);
    std::int64_t matchable_volume(Side side, std::int64_t price_ticks, std::int64_t kwh) const;
    void remove_from_level(const std::string& id, const Order& o);
    void reduce_order(const std::string& id, std::int64_t kwh);

    double maturity_hours_;
    Config cfg_;
    AskMap asks_;
    BidMap bids_;
    std::unordered_map<std::string, Order> orders_;
    std::int64_t last_ts_ms_ = 0;
    std::int64_t skipped_ = 0;
};

/// Forward-only replay of a session's event stream with book queries at
/// arbitrary session times.
class SessionReplay {
public:
    SessionReplay(std::vector<OrderEvent> events, double maturity_hours, Book::Config cfg = {});

    /// Applies every event with timestamp <= t (hours since T_1 = 0 reference,
    /// i.e. session time) and returns the book.
    const Book& advance_to(double t_hours);

    /// Runs the remaining events to the end.
    const Book& finish();

    const Book& book() const { return book_; }

private:
    std::vector<OrderEvent> events_;
    Book book_;
    std::size_t cursor_ = 0;
};

/// One snapshot per book-changing event (full replay).
std::vector<OrderBookSnapshot> snapshots_on_change(const std::vector<OrderEvent>& events,
                                                   double maturity_hours,
                                                   Book::Config cfg = {});

/// Fixed-grid sampling decorator: the book state prevailing at each grid
/// instant (session-time hours). Instants before the first event yield no
/// entry.
std::vector<OrderBookSnapshot> snapshots_at_times(const std::vector<OrderEvent>& events,
                                                  double maturity_hours,
                                                  const std::vector<double>& grid_hours,
                                                  Book::Config cfg = {});

} // namespace idstore::lob

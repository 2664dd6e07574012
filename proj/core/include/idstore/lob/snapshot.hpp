#pragma once

#include <iosfwd>
#include <vector>

namespace idstore::lob {

struct Level {
    double price = 0.0;   // EUR/MWh
    double volume = 0.0;  // MWh; > 0 on the ask side, < 0 on the bid side
};

/// Immutable bid/ask ladders at one instant for one maturity. Bid volumes are
/// negative so that signed traded volume and ladder volume live on the same
/// axis. Safe to copy and share across threads.
struct OrderBookSnapshot {
    double tau_hours = 0.0;        // time to maturity
    std::vector<Level> asks;       // prices strictly increasing
    std::vector<Level> bids;       // prices strictly decreasing
    int depth_cap = 0;             // levels retained per side in this view; 0 = uncapped

    /// View limited to the best `depth` levels per side.
    OrderBookSnapshot capped(int depth) const;

    /// Throws Error if the ladder invariants are violated.
    void validate() const;

    bool operator==(const OrderBookSnapshot&) const = default;
};

/// (best bid + best ask) / 2. Throws EmptySide.
double mid_price(const OrderBookSnapshot& s);

/// Volume-weighted execution price over the mid for signed volume x:
/// the cost per MWh of walking the ladder, with partial fill of the marginal
/// level. Throws ZeroVolume / InsufficientDepth / EmptySide.
double empirical_curve(const OrderBookSnapshot& s, double x);

/// Piecewise-constant curve taking, on each inter-rupture interval, the full
/// ladder VWAP down to the next rupture point. Upper bound of the empirical
/// curve for x > 0 and lower bound for x < 0, with equality at rupture points.
double stepwise_curve(const OrderBookSnapshot& s, double x);

struct ExecutionReport {
    double cash = 0.0;      // EUR; negative when buying, positive when selling
    double vwap = 0.0;      // EUR/MWh over the filled volume (0 if nothing filled)
    double filled = 0.0;    // MWh actually executed (absolute)
    double residual = 0.0;  // MWh left unfilled when the ladder ran out (absolute)
};

/// Fills |x| MWh against the ladder (x > 0 buys from asks, x < 0 sells to
/// bids). Never throws on shallow books: fills what exists and reports the
/// residual.
ExecutionReport execute_market_order(const OrderBookSnapshot& s, double x);

/// JSON-lines dump, one object per snapshot:
/// {"t_hours_to_maturity":..., "asks":[[price,volume],...], "bids":[[price,volume],...]}
void dump_snapshots_jsonl(std::ostream& os, const std::vector<OrderBookSnapshot>& snaps);
std::vector<OrderBookSnapshot> load_snapshots_jsonl(std::istream& is);

} // namespace idstore::lob

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "idstore/bt/session_store.hpp"
#include "idstore/liq/model.hpp"
#include "idstore/mid/estimate.hpp"
#include "idstore/mid/simulate.hpp"

namespace idstore::synth {

/// Ground truth for synthetic sessions: mid-prices from the jump model,
/// ladders inverted from the liquidity cost surface so that a noiseless fit
/// recovers the generating coefficients exactly.
struct SynthSpec {
    mid::MidPriceParams midprice;
    liq::LiquiditySessionParams liquidity;
    std::vector<double> f0;          // initial mids per maturity
    double level_granularity = 1.0;  // MWh; ladder level i carries i * granularity
    int levels_per_side = 8;
    double offset_noise_rel = 0.0;   // relative noise on level offsets from the mid
    std::uint64_t seed = 0;
};

/// Ladder whose stepwise midpoints lie exactly on L_m(tau, .) around `mid`
/// (before noise). Throws InfeasibleLadder when the coefficients produce a
/// non-monotone or crossed ladder.
lob::OrderBookSnapshot make_book(const SynthSpec& spec, int maturity, double tau_hours,
                                 double mid, std::uint64_t noise_key);

/// One session-day of event-time mid series (jump times exposed).
mid::SessionSeries gen_midprice_session(const SynthSpec& spec, std::uint64_t session_index);

/// Snapshot stream for one maturity: a book at the session open and at every
/// mid-price change.
std::vector<lob::OrderBookSnapshot> gen_orderbook_session(const SynthSpec& spec,
                                                          const mid::MidSeries& series,
                                                          std::uint64_t session_index);

/// In-memory SessionStore over generated sessions; day `start + k` maps to
/// session index k. Deterministic per (spec.seed, day, maturity).
class SynthSessionStore : public bt::SessionStore {
public:
    SynthSessionStore(SynthSpec spec, bt::Date start, int n_days);

    std::vector<bt::Date> days() const override;
    bool has_session(bt::Date day, int maturity) const override;
    mid::MidSeries mid_series(bt::Date day, int maturity) const override;
    std::optional<lob::OrderBookSnapshot> snapshot_at(bt::Date day, int maturity,
                                                      double t_hours) const override;
    int n_maturities() const override { return spec_.midprice.n_maturities(); }

    const SynthSpec& spec() const { return spec_; }

private:
    const mid::SessionSeries& session_for(int day_index) const;
    int day_index(bt::Date day) const;

    SynthSpec spec_;
    bt::Date start_;
    int n_days_;
    mutable std::map<int, mid::SessionSeries> cache_;
};

/// Order-event CSV for one maturity's session: the ladder is rebuilt
/// (cancel + add) at the open and at every mid change, prices rounded to the
/// 0.01 tick away from the mid.
void write_session_events_csv(std::ostream& os, const SynthSpec& spec,
                              const mid::MidSeries& series, std::uint64_t session_index);

} // namespace idstore::synth

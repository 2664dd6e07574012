#include "idstore/bt/session_store.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <memory>

#include "idstore/errors.hpp"
#include "idstore/lob/book.hpp"
#include "idstore/lob/io.hpp"

namespace idstore::bt {

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
    return buf;
}

Date Date::parse(const std::string& s) {
    int y = 0;
    unsigned m = 0, d = 0;
    if (std::sscanf(s.c_str(), "%d-%u-%u", &y, &m, &d) != 3)
        throw Error("bad date (expected YYYY-MM-DD): " + s);
    return Date{y, m, d};
}

struct CsvSessionStore::Session {
    Date day;
    int maturity = 1;
    double maturity_hours = 0.0;
    std::vector<lob::OrderEvent> events;
    // book change times and snapshots, built once on load
    std::vector<double> change_times;
    std::vector<lob::OrderBookSnapshot> snapshots;
    mid::MidSeries mids;
};

namespace {

bool parse_session_name(const std::string& name, Date& day, int& maturity) {
    // YYYY-MM-DD_mMM.csv
    int y = 0;
    unsigned mo = 0, d = 0;
    int m = 0;
    if (std::sscanf(name.c_str(), "%d-%u-%u_m%d.csv", &y, &mo, &d, &m) != 4) return false;
    if (m < 1 || m > 24) return false;
    day = Date{y, mo, d};
    maturity = m;
    return true;
}

} // namespace

CsvSessionStore::CsvSessionStore(std::string directory) : dir_(std::move(directory)) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir_)) throw Error("session directory not found: " + dir_);
    for (const auto& entry : fs::directory_iterator(dir_)) {
        if (!entry.is_regular_file()) continue;
        Date day;
        int m;
        if (parse_session_name(entry.path().filename().string(), day, m))
            index_.emplace_back(day, m);
    }
    std::sort(index_.begin(), index_.end());
    cache_.resize(index_.size());
}

std::string CsvSessionStore::session_file_name(Date day, int maturity) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_m%02d.csv", day.to_string().c_str(), maturity);
    return buf;
}

std::vector<Date> CsvSessionStore::days() const {
    std::vector<Date> out;
    for (const auto& [day, m] : index_)
        if (out.empty() || !(out.back() == day)) out.push_back(day);
    return out;
}

bool CsvSessionStore::has_session(Date day, int maturity) const {
    return std::binary_search(index_.begin(), index_.end(), std::make_pair(day, maturity));
}

const CsvSessionStore::Session* CsvSessionStore::session(Date day, int maturity) const {
    const auto it = std::lower_bound(index_.begin(), index_.end(), std::make_pair(day, maturity));
    if (it == index_.end() || *it != std::make_pair(day, maturity)) return nullptr;
    const std::size_t idx = static_cast<std::size_t>(it - index_.begin());
    if (cache_[idx]) return cache_[idx].get();

    auto s = std::make_shared<Session>();
    s->day = day;
    s->maturity = maturity;
    s->maturity_hours = static_cast<double>(maturity - 1);
    const std::string path = dir_ + "/" + session_file_name(day, maturity);
    s->events = lob::read_order_events_csv_file(path).events;
    std::stable_sort(s->events.begin(), s->events.end(),
                     [](const lob::OrderEvent& a, const lob::OrderEvent& b) { return a.ts_ms < b.ts_ms; });

    lob::Book book(s->maturity_hours);
    s->mids.maturity = maturity;
    s->mids.maturity_hours = s->maturity_hours;
    for (const lob::OrderEvent& ev : s->events) {
        book.apply_event(ev);
        lob::OrderBookSnapshot snap = book.snapshot();
        const double t = lob::session_time_hours(ev.ts_ms);
        if (!snap.asks.empty() && !snap.bids.empty()) {
            const double mid = lob::mid_price(snap);
            if (s->mids.values.empty() || s->mids.values.back() != mid ||
                s->change_times.empty()) {
                s->mids.times.push_back(t);
                s->mids.values.push_back(mid);
            }
        }
        s->change_times.push_back(t);
        s->snapshots.push_back(std::move(snap));
    }
    cache_[idx] = std::move(s);
    return cache_[idx].get();
}

mid::MidSeries CsvSessionStore::mid_series(Date day, int maturity) const {
    const Session* s = session(day, maturity);
    if (!s) return mid::MidSeries{maturity, static_cast<double>(maturity - 1), {}, {}};
    return s->mids;
}

std::optional<lob::OrderBookSnapshot> CsvSessionStore::snapshot_at(Date day, int maturity,
                                                                   double t_hours) const {
    const Session* s = session(day, maturity);
    if (!s || s->change_times.empty()) return std::nullopt;
    const auto it = std::upper_bound(s->change_times.begin(), s->change_times.end(), t_hours);
    if (it == s->change_times.begin()) return std::nullopt;
    const std::size_t idx = static_cast<std::size_t>(it - s->change_times.begin() - 1);
    lob::OrderBookSnapshot snap = s->snapshots[idx];
    snap.tau_hours = s->maturity_hours - t_hours;
    return snap;
}

} // namespace idstore::bt

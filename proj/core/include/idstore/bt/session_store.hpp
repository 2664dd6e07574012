#pragma once

#include <chrono>
#include <compare>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "idstore/lob/snapshot.hpp"
#include "idstore/mid/estimate.hpp"

namespace idstore::bt {

/// Calendar day. Weekday math uses the civil calendar via std::chrono.
struct Date {
    int year = 2021;
    unsigned month = 1;
    unsigned day = 1;

    auto operator<=>(const Date&) const = default;

    std::chrono::sys_days to_sys_days() const {
        return std::chrono::sys_days{std::chrono::year{year} / std::chrono::month{month} /
                                     std::chrono::day{day}};
    }
    static Date from_sys_days(std::chrono::sys_days sd) {
        const std::chrono::year_month_day ymd{sd};
        return Date{static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                    static_cast<unsigned>(ymd.day())};
    }
    Date plus_days(int n) const { return from_sys_days(to_sys_days() + std::chrono::days{n}); }
    int days_until(const Date& other) const {
        return static_cast<int>((other.to_sys_days() - to_sys_days()).count());
    }
    bool is_monday() const {
        return std::chrono::weekday{to_sys_days()} == std::chrono::Monday;
    }
    std::string to_string() const;              // YYYY-MM-DD
    static Date parse(const std::string& s);    // YYYY-MM-DD
};

/// Read access to trading sessions, one per (day, maturity). Implementations:
/// CsvSessionStore over order-event CSV directories and the synthetic
/// generator's in-memory store.
class SessionStore {
public:
    virtual ~SessionStore() = default;

    virtual std::vector<Date> days() const = 0;
    virtual bool has_session(Date day, int maturity) const = 0;

    /// Event-time mid series of one session (empty series when absent).
    virtual mid::MidSeries mid_series(Date day, int maturity) const = 0;

    /// Book state at session time t (hours relative to midnight of the
    /// delivery day). nullopt when the session has no book yet.
    virtual std::optional<lob::OrderBookSnapshot> snapshot_at(Date day, int maturity,
                                                              double t_hours) const = 0;

    virtual int n_maturities() const { return 24; }
};

/// Session files named YYYY-MM-DD_mMM.csv inside one directory.
class CsvSessionStore : public SessionStore {
public:
    explicit CsvSessionStore(std::string directory);

    std::vector<Date> days() const override;
    bool has_session(Date day, int maturity) const override;
    mid::MidSeries mid_series(Date day, int maturity) const override;
    std::optional<lob::OrderBookSnapshot> snapshot_at(Date day, int maturity,
                                                      double t_hours) const override;

    static std::string session_file_name(Date day, int maturity);

private:
    struct Session;
    const Session* session(Date day, int maturity) const;

    std::string dir_;
    std::vector<std::pair<Date, int>> index_;
    mutable std::vector<std::shared_ptr<Session>> cache_;
};

} // namespace idstore::bt

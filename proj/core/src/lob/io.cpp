#include "idstore/lob/io.hpp"

#include <fstream>
#include <sstream>

#include "idstore/errors.hpp"

namespace idstore::lob {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

} // namespace

std::string side_name(Side s) { return s == Side::bid ? "bid" : "ask"; }

std::string action_name(Action a) {
    switch (a) {
    case Action::add: return "add";
    case Action::cancel: return "cancel";
    case Action::execute: return "execute";
    }
    return "?";
}

CsvReadReport read_order_events_csv(std::istream& is) {
    CsvReadReport rep;
    std::string line;
    if (!std::getline(is, line)) throw InvalidEvent("empty order-event CSV");
    bool first = true;
    while (true) {
        if (!first && !std::getline(is, line)) break;
        if (first) {
            first = false;
            if (line.rfind("ts_ms", 0) == 0) continue;  // header
        }
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() < 7) throw InvalidEvent("order-event CSV row with fewer than 7 fields");
        const std::string& action = f[5];
        if (action == "hibernate" || action == "block") {
            ++rep.skipped_rows;
            continue;
        }
        OrderEvent ev;
        ev.ts_ms = std::stoll(f[0]);
        ev.maturity_index = std::stoi(f[1]);
        if (ev.maturity_index < 1 || ev.maturity_index > 24)
            throw InvalidEvent("maturity index out of 1..24: " + f[1]);
        if (f[2] == "bid" || f[2] == "buy") ev.side = Side::bid;
        else if (f[2] == "ask" || f[2] == "sell") ev.side = Side::ask;
        else throw InvalidEvent("unknown side: " + f[2]);
        ev.price = std::stod(f[3]);
        ev.volume = std::stod(f[4]);
        if (action == "add") ev.action = Action::add;
        else if (action == "cancel") ev.action = Action::cancel;
        else if (action == "execute") ev.action = Action::execute;
        else throw InvalidEvent("unknown action: " + action);
        ev.order_id = f[6];
        if (f.size() > 7 && !f[7].empty()) {
            if (f[7] == "ioc") ev.restriction = Restriction::ioc;
            else if (f[7] == "fok") ev.restriction = Restriction::fok;
            else if (f[7] == "aon") ev.restriction = Restriction::aon;
            else throw InvalidEvent("unknown restriction: " + f[7]);
        }
        rep.events.push_back(std::move(ev));
    }
    return rep;
}

CsvReadReport read_order_events_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidEvent("cannot open order-event CSV: " + path);
    return read_order_events_csv(is);
}

void write_order_events_csv(std::ostream& os, const std::vector<OrderEvent>& events) {
    os << "ts_ms,maturity,side,price,volume,action,order_id\n";
    char buf[64];
    for (const OrderEvent& ev : events) {
        std::snprintf(buf, sizeof buf, "%.2f", ev.price);
        os << ev.ts_ms << ',' << ev.maturity_index << ',' << side_name(ev.side) << ',' << buf << ',';
        std::snprintf(buf, sizeof buf, "%.3f", ev.volume);
        os << buf << ',' << action_name(ev.action) << ',' << ev.order_id << '\n';
    }
}

} // namespace idstore::lob

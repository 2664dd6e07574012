#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "idstore/lob/book.hpp"

namespace idstore::lob {

/// Order-event CSV, header:
///   ts_ms,maturity,side,price,volume,action,order_id[,restriction]
/// The trailing restriction column is optional (ioc|fok|aon). Rows whose
/// action is a hibernate/block flavour are skipped and counted.
struct CsvReadReport {
    std::vector<OrderEvent> events;
    std::int64_t skipped_rows = 0;  // hibernated/block orders
};

CsvReadReport read_order_events_csv(std::istream& is);
CsvReadReport read_order_events_csv_file(const std::string& path);

void write_order_events_csv(std::ostream& os, const std::vector<OrderEvent>& events);

std::string side_name(Side s);
std::string action_name(Action a);

} // namespace idstore::lob

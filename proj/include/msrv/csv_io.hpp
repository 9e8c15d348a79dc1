#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "msrv/estimators.hpp"

namespace msrv {

struct IngestOptions {
    bool sort = false;         // sort by timestamp instead of rejecting disorder
    bool dedupe = false;       // keep the last row of duplicate timestamps
    bool price_column = false; // second column is a raw price; take its log
};

struct IngestResult {
    TickSeries series;
    double time_offset = 0.0; // original first timestamp (times are shifted to 0)
    std::size_t rows = 0;     // data rows kept
};

/// Reads `timestamp,logprice` CSV (header mandatory; `timestamp,price` with
/// the price option). Timestamps are normalized so t0 = 0 and T = last-first.
/// Malformed rows, disorder without --sort and duplicates without --dedupe
/// throw input_error naming the offending line.
IngestResult ingest_tick_csv(std::istream& in, const IngestOptions& options);
IngestResult ingest_tick_csv_file(const std::string& path, const IngestOptions& options);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

/// Write the observed series of a path as an ingestible tick CSV.
void write_tick_csv(std::ostream& out, std::span<const double> times,
                    std::span<const double> logprices);

} // namespace msrv

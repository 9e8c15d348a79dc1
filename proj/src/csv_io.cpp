#include "msrv/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "msrv/errors.hpp"

namespace msrv {

namespace {

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return std::string(s.substr(begin, end - begin + 1));
}

double parse_field(const std::string& field, std::size_t line, const char* what) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value))
        throw input_error("line " + std::to_string(line) + ": malformed " + what +
                          " '" + field + "'");
    return value;
}

} // namespace

IngestResult ingest_tick_csv(std::istream& in, const IngestOptions& options) {
    std::string line;
    if (!std::getline(in, line)) throw input_error("empty input: missing CSV header");

    const std::string expected = options.price_column ? "timestamp,price"
                                                      : "timestamp,logprice";
    if (trim(line) != expected)
        throw input_error("line 1: expected header '" + expected + "'");

    struct Row {
        double t;
        double y;
        std::size_t line;
    };
    std::vector<Row> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto comma = stripped.find(',');
        if (comma == std::string::npos ||
            stripped.find(',', comma + 1) != std::string::npos)
            throw input_error("line " + std::to_string(lineno) +
                              ": expected exactly 2 comma-separated fields");
        const double t = parse_field(trim(stripped.substr(0, comma)), lineno, "timestamp");
        double y = parse_field(trim(stripped.substr(comma + 1)), lineno,
                               options.price_column ? "price" : "logprice");
        if (options.price_column) {
            if (!(y > 0.0))
                throw input_error("line " + std::to_string(lineno) +
                                  ": price must be positive");
            y = std::log(y);
        }
        rows.push_back({t, y, lineno});
    }
    if (rows.empty()) throw input_error("no data rows in input");

    if (options.sort) {
        std::stable_sort(rows.begin(), rows.end(),
                         [](const Row& a, const Row& b) { return a.t < b.t; });
    } else {
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].t < rows[i - 1].t)
                throw input_error("line " + std::to_string(rows[i].line) +
                                  ": timestamps are not increasing (use --sort)");
    }

    std::vector<Row> kept;
    kept.reserve(rows.size());
    for (const auto& row : rows) {
        if (!kept.empty() && row.t == kept.back().t) {
            if (!options.dedupe)
                throw input_error("line " + std::to_string(row.line) +
                                  ": duplicate timestamp (use --dedupe)");
            kept.back() = row; // keep the last
        } else {
            kept.push_back(row);
        }
    }
    if (kept.size() < 3)
        throw input_error("need at least 3 distinct observations, got " +
                          std::to_string(kept.size()));

    const double offset = kept.front().t;
    std::vector<double> times(kept.size()), prices(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        times[i] = kept[i].t - offset;
        prices[i] = kept[i].y;
    }
    times.front() = 0.0;

    IngestResult result{TickSeries(SamplingGrid(std::move(times)), std::move(prices)),
                        offset, kept.size()};
    return result;
}

IngestResult ingest_tick_csv_file(const std::string& path,
                                  const IngestOptions& options) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open input file: " + path);
    return ingest_tick_csv(in, options);
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw numeric_error("cannot format value");
    return std::string(buf, ptr);
}

void write_tick_csv(std::ostream& out, std::span<const double> times,
                    std::span<const double> logprices) {
    out << "timestamp,logprice\n";
    for (std::size_t i = 0; i < times.size(); ++i)
        out << format_double(times[i]) << ',' << format_double(logprices[i]) << '\n';
}

} // namespace msrv

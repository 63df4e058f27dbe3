#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "contgrowth/dynamics.hpp"
#include "contgrowth/errors.hpp"

namespace contgrowth {

// Shortest-free fixed format: 17 significant digits, round-trips every double.
inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Event-log CSV: header `n,t,x0,...,x{d-1},r`, one row per event. Initial-set
/// balls come first with n = -1 and t = origin time.
template <int D>
void write_event_log(std::ostream& os, const GrowthState<D>& state, bool include_initial = true,
                     double t_cutoff = std::numeric_limits<double>::infinity()) {
    os << "n,t";
    for (int i = 0; i < D; ++i) os << ",x" << i;
    os << ",r\n";
    auto row = [&](std::int64_t n, double t, const Ball<D>& b) {
        os << n << ',' << format_real(t);
        for (int i = 0; i < D; ++i) os << ',' << format_real(b.center[i]);
        os << ',' << format_real(b.radius) << '\n';
    };
    if (include_initial)
        for (std::size_t i = 0; i < state.initial_balls; ++i) row(-1, state.origin_time, state.region.ball(i));
    for (const auto& ev : state.log) {
        if (ev.time > t_cutoff) break;
        row(ev.index, ev.time, ev.ball());
    }
}

struct LogRow {
    std::int64_t n = 0;
    double t = 0.0;
    std::vector<double> x;
    double r = 0.0;
};

/// Parses an event-log CSV; the dimension is taken from the header.
inline std::vector<LogRow> read_event_log(std::istream& is, int& dimension) {
    std::string line;
    if (!std::getline(is, line)) throw InvalidInput("event log is empty");
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    const int d = static_cast<int>(cols.size()) - 3;
    if (d < 1 || cols[0] != "n" || cols[1] != "t" || cols.back() != "r")
        throw InvalidInput("event log header must be n,t,x0,...,r");
    for (int i = 0; i < d; ++i)
        if (cols[2 + i] != "x" + std::to_string(i)) throw InvalidInput("event log header must be n,t,x0,...,r");
    dimension = d;

    std::vector<LogRow> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string f;
        std::vector<std::string> fields;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != cols.size())
            throw InvalidInput("event log line " + std::to_string(lineno) + " has the wrong field count");
        try {
            LogRow row;
            row.n = std::stoll(fields[0]);
            row.t = std::stod(fields[1]);
            for (int i = 0; i < d; ++i) row.x.push_back(std::stod(fields[2 + i]));
            row.r = std::stod(fields.back());
            rows.push_back(std::move(row));
        } catch (const std::logic_error&) {
            throw InvalidInput("event log line " + std::to_string(lineno) + " is not numeric");
        }
    }
    return rows;
}

struct ReplayReport {
    std::size_t events = 0;
    std::size_t initial_balls = 0;
    std::size_t disconnected = 0;   // event centers outside the prior union
    std::size_t non_increasing = 0; // times not strictly increasing
    std::size_t bad_index = 0;      // n not consecutive from 1
    bool ok() const { return disconnected == 0 && non_increasing == 0 && bad_index == 0 && initial_balls > 0; }
};

/// Replays a log and checks that every outburst lies in the union of the
/// balls before it, that times strictly increase and that indices run 1, 2, ...
template <int D>
ReplayReport replay_check(const std::vector<LogRow>& rows, double cell_size) {
    ReplayReport rep;
    BallUnion<D> region(cell_size);
    double last_t = -std::numeric_limits<double>::infinity();
    std::int64_t expected = 1;
    for (const auto& row : rows) {
        Ball<D> b;
        for (int i = 0; i < D; ++i) b.center[i] = row.x[i];
        b.radius = row.r;
        if (row.n < 0) {
            if (rep.events > 0) ++rep.bad_index;
            ++rep.initial_balls;
            region.insert(b);
            last_t = std::max(last_t, row.t);
            continue;
        }
        ++rep.events;
        if (row.n != expected++) ++rep.bad_index;
        if (!(row.t > last_t)) ++rep.non_increasing;
        last_t = row.t;
        if (region.empty() || !region.covers(b.center)) ++rep.disconnected;
        region.insert(b);
    }
    return rep;
}

}  // namespace contgrowth

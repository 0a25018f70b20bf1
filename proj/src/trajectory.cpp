#include "cpscause/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace cpscause {

namespace {

constexpr double kAlignEps = 1e-6;

bool steps_match(double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b));
}

}  // namespace

TimeGrid::TimeGrid(double start_, double step_, std::size_t count_) : start(start_), step(step_), count(count_) {
    if (!(step > 0.0) || !std::isfinite(step)) throw ContractError("time grid step must be positive");
    if (count == 0) throw ContractError("time grid needs at least one sample");
    if (!std::isfinite(start)) throw ContractError("time grid start must be finite");
}

std::size_t TimeGrid::snap(double t) const {
    double x = (t - start) / step;
    double k = std::nearbyint(x);
    if (std::abs(x - k) > 0.5 + 1e-9 || k < 0.0 || k > static_cast<double>(count))
        throw DomainError("time " + format_double(t) + " is outside the grid [" + format_double(start) + "," +
                          format_double(end()) + ")");
    return static_cast<std::size_t>(k);
}

bool TimeGrid::aligned_with(const TimeGrid& other) const {
    if (!steps_match(step, other.step)) return false;
    double off = (start - other.start) / step;
    return std::abs(off - std::nearbyint(off)) <= kAlignEps;
}

long TimeGrid::offset_in(const TimeGrid& other) const {
    if (!aligned_with(other)) throw ContractError("time grids are not aligned");
    return static_cast<long>(std::nearbyint((start - other.start) / step));
}

TimeInterval::TimeInterval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(lo < hi)) throw ContractError("interval needs lo < hi, got [" + format_double(lo) + "," + format_double(hi) + ")");
}

Trajectory::Trajectory(TimeGrid grid, std::vector<std::string> vars, std::vector<std::vector<double>> columns)
    : grid_(grid), vars_(std::move(vars)), cols_(std::move(columns)) {
    if (vars_.size() != cols_.size()) throw ContractError("variable/column count mismatch");
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (cols_[i].size() != grid_.count)
            throw ContractError("variable '" + vars_[i] + "' has " + std::to_string(cols_[i].size()) +
                                " samples, grid has " + std::to_string(grid_.count));
        for (std::size_t k = 0; k < cols_[i].size(); ++k)
            if (!std::isfinite(cols_[i][k]))
                throw ContractError("non-finite sample for '" + vars_[i] + "' at t=" + format_double(grid_.time(k)));
        if (!index_.emplace(vars_[i], i).second) throw ContractError("duplicate variable '" + vars_[i] + "'");
    }
}

bool Trajectory::has(std::string_view var) const { return index_.count(std::string(var)) != 0; }

std::size_t Trajectory::index_of(std::string_view var) const {
    auto it = index_.find(std::string(var));
    if (it == index_.end()) throw DomainError("unknown variable '" + std::string(var) + "'");
    return it->second;
}

const std::vector<double>& Trajectory::column(std::string_view var) const { return cols_[index_of(var)]; }

IndexRange Trajectory::range_of(const TimeInterval& iv) const {
    std::size_t b = grid_.snap(iv.lo);
    std::size_t e = grid_.snap(iv.hi);
    if (b >= e) throw DomainError("interval [" + format_double(iv.lo) + "," + format_double(iv.hi) + ") covers no samples");
    return {b, e};
}

Trajectory project(const Trajectory& t, const std::vector<std::string>& vars) {
    std::vector<std::vector<double>> cols;
    cols.reserve(vars.size());
    for (const auto& v : vars) cols.push_back(t.column(v));
    return Trajectory(t.grid(), vars, std::move(cols));
}

TrajectorySlice slice(const Trajectory& t, const TimeInterval& iv) {
    IndexRange r = t.range_of(iv);
    std::vector<std::vector<double>> cols;
    cols.reserve(t.variables().size());
    for (std::size_t i = 0; i < t.variables().size(); ++i) {
        const auto& c = t.column(i);
        cols.emplace_back(c.begin() + static_cast<long>(r.begin), c.begin() + static_cast<long>(r.end));
    }
    return Trajectory(TimeGrid(t.grid().time(r.begin), t.grid().step, r.size()), t.variables(), std::move(cols));
}

TrajectorySlice slice(const Trajectory& t, const std::string& var, const TimeInterval& iv) {
    IndexRange r = t.range_of(iv);
    const auto& c = t.column(var);
    return Trajectory(TimeGrid(t.grid().time(r.begin), t.grid().step, r.size()), {var},
                      {std::vector<double>(c.begin() + static_cast<long>(r.begin), c.begin() + static_cast<long>(r.end))});
}

bool equals_on(const Trajectory& a, const Trajectory& b, const TimeInterval& iv, double tol) {
    if (!a.grid().aligned_with(b.grid())) throw ContractError("equals_on: incompatible grids");
    IndexRange ra = a.range_of(iv);
    IndexRange rb = b.range_of(iv);
    if (ra.size() != rb.size()) throw ContractError("equals_on: interval maps to different sample counts");
    bool shared = false;
    for (std::size_t i = 0; i < a.variables().size(); ++i) {
        const auto& name = a.variables()[i];
        if (!b.has(name)) continue;
        shared = true;
        const auto& ca = a.column(i);
        const auto& cb = b.column(name);
        for (std::size_t k = 0; k < ra.size(); ++k)
            if (!(std::abs(ca[ra.begin + k] - cb[rb.begin + k]) <= tol)) return false;
    }
    if (!shared) throw ContractError("equals_on: no shared variables");
    return true;
}

bool same_trajectory(const Trajectory& a, const Trajectory& b, double tol) {
    if (a.variables().size() != b.variables().size()) return false;
    if (!(a.grid().count == b.grid().count) || !a.grid().aligned_with(b.grid()) ||
        std::abs(a.grid().start - b.grid().start) > kAlignEps * a.grid().step)
        return false;
    for (const auto& v : a.variables())
        if (!b.has(v)) return false;
    return equals_on(a, b, a.span(), tol);
}

namespace {

std::string slice_key(const TrajectorySlice& s) {
    std::vector<std::string> vs = s.variables();
    std::sort(vs.begin(), vs.end());
    std::string key;
    for (const auto& v : vs) key += v + ",";
    // Grid indices are compared through rounded times so that equal intervals map to one key.
    key += "@" + std::to_string(std::llround(s.grid().start / s.grid().step)) + ":" + std::to_string(s.grid().count);
    return key;
}

}  // namespace

bool is_alternative(const std::vector<TrajectorySlice>& xs, const std::vector<TrajectorySlice>& xs2, double tol) {
    if (xs.size() != xs2.size()) return false;
    // Every slice needs exactly one partner with the same var and dom, in both directions.
    auto match_all = [tol](const std::vector<TrajectorySlice>& from, const std::vector<TrajectorySlice>& to) {
        for (const auto& s : from) {
            int partners = 0;
            const TrajectorySlice* partner = nullptr;
            for (const auto& o : to)
                if (slice_key(s) == slice_key(o)) {
                    ++partners;
                    partner = &o;
                }
            if (partners != 1) return false;
            if (!partner->grid().aligned_with(s.grid())) return false;
            if (equals_on(s, *partner, s.span(), tol)) return false;
        }
        return true;
    };
    return match_all(xs, xs2) && match_all(xs2, xs);
}

Trajectory override_with(const Trajectory& c, const std::vector<TrajectorySlice>& slices) {
    return override_with(c, slices, {});
}

Trajectory override_with(const Trajectory& c, const std::vector<TrajectorySlice>& slices,
                         const std::set<std::string>& constants) {
    std::vector<std::vector<double>> cols;
    cols.reserve(c.variables().size());
    for (std::size_t i = 0; i < c.variables().size(); ++i) cols.push_back(c.column(i));

    std::map<std::string, std::vector<IndexRange>> claimed;
    for (const auto& s : slices) {
        long off = s.grid().offset_in(c.grid());
        if (off < 0 || off + static_cast<long>(s.size()) > static_cast<long>(c.size()))
            throw DomainError("override slice lies outside the trajectory");
        IndexRange r{static_cast<std::size_t>(off), static_cast<std::size_t>(off) + s.size()};
        for (std::size_t vi = 0; vi < s.variables().size(); ++vi) {
            const auto& var = s.variables()[vi];
            std::size_t ci = c.index_of(var);
            if (constants.count(var) && (r.begin != 0 || r.end != c.size()))
                throw ContractError("constant '" + var + "' can only be overridden over its full duration");
            for (const auto& other : claimed[var])
                if (r.begin < other.end && other.begin < r.end)
                    throw ContractError("overlapping override slices for '" + var + "'");
            claimed[var].push_back(r);
            const auto& src = s.column(vi);
            std::copy(src.begin(), src.end(), cols[ci].begin() + static_cast<long>(r.begin));
        }
    }
    return Trajectory(c.grid(), c.variables(), std::move(cols));
}

// ---- CSV -----------------------------------------------------------------

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError("not a number: '" + std::string(s) + "'", 0, 0);
    return v;
}

void write_csv_header(std::ostream& os, const std::vector<std::string>& vars) {
    os << "time";
    for (const auto& v : vars) os << ',' << v;
    os << '\n';
}

void write_csv(std::ostream& os, const Trajectory& t) {
    write_csv_header(os, t.variables());
    for (std::size_t k = 0; k < t.size(); ++k) {
        os << format_double(t.grid().time(k));
        for (std::size_t i = 0; i < t.variables().size(); ++i) os << ',' << format_double(t.column(i)[k]);
        os << '\n';
    }
}

void write_csv_file(const std::string& path, const Trajectory& t) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    write_csv(os, t);
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t c = line.find(',', pos);
        out.push_back(line.substr(pos, c == std::string_view::npos ? std::string_view::npos : c - pos));
        if (c == std::string_view::npos) break;
        pos = c + 1;
    }
    return out;
}

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

}  // namespace

CsvTable read_csv_table(std::istream& is) {
    CsvTable t;
    std::string line;
    int lineno = 0;
    if (!std::getline(is, line)) throw ParseError("empty CSV", 1, 1);
    ++lineno;
    auto head = split_commas(line);
    if (head.empty() || trim(head[0]) != "time") throw ParseError("CSV header must start with 'time'", 1, 1);
    for (std::size_t i = 1; i < head.size(); ++i) t.columns.push_back(trim(head[i]));
    t.values.resize(t.columns.size());
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto cells = split_commas(line);
        if (cells.size() != head.size())
            throw ParseError("expected " + std::to_string(head.size()) + " fields", lineno, 1);
        try {
            t.time.push_back(parse_double(cells[0]));
            for (std::size_t i = 1; i < cells.size(); ++i) {
                std::string cell = trim(cells[i]);
                t.values[i - 1].push_back(cell.empty() ? std::numeric_limits<double>::quiet_NaN() : parse_double(cell));
            }
        } catch (const ParseError& e) {
            throw ParseError(e.what(), lineno, 1);
        }
    }
    return t;
}

CsvTable read_csv_table_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    return read_csv_table(is);
}

namespace {

TimeGrid grid_from_times(const std::vector<double>& time, double fallback_step) {
    if (time.empty()) throw ParseError("CSV has no rows", 2, 1);
    double step = time.size() > 1 ? time[1] - time[0] : fallback_step;
    if (!(step > 0)) throw ParseError("CSV times must be increasing", 3, 1);
    for (std::size_t k = 0; k < time.size(); ++k) {
        double expect = time[0] + step * static_cast<double>(k);
        if (std::abs(time[k] - expect) > 1e-6 * std::max(1.0, std::abs(expect)))
            throw ParseError("CSV rows are not uniformly spaced", static_cast<int>(k) + 2, 1);
    }
    // Recover a clean step from the whole span to limit rounding drift.
    if (time.size() > 1) step = (time.back() - time.front()) / static_cast<double>(time.size() - 1);
    return TimeGrid(time[0], step, time.size());
}

}  // namespace

Trajectory table_to_trajectory(const CsvTable& table, double fallback_step) {
    TimeGrid g = grid_from_times(table.time, fallback_step);
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        for (std::size_t k = 0; k < table.values[i].size(); ++k)
            if (std::isnan(table.values[i][k]))
                throw ParseError("empty cell in column '" + table.columns[i] + "'", static_cast<int>(k) + 2,
                                 static_cast<int>(i) + 2);
    return Trajectory(g, table.columns, table.values);
}

Trajectory read_csv(std::istream& is, double fallback_step) {
    return table_to_trajectory(read_csv_table(is), fallback_step);
}

Trajectory read_csv_file(const std::string& path, double fallback_step) {
    return table_to_trajectory(read_csv_table_file(path), fallback_step);
}

void write_slices_csv(std::ostream& os, const TimeGrid& grid, const std::vector<TrajectorySlice>& slices) {
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    std::size_t lo = grid.count, hi = 0;
    for (const auto& s : slices) {
        long off = s.grid().offset_in(grid);
        if (off < 0 || off + static_cast<long>(s.size()) > static_cast<long>(grid.count))
            throw DomainError("slice lies outside the grid");
        lo = std::min(lo, static_cast<std::size_t>(off));
        hi = std::max(hi, static_cast<std::size_t>(off) + s.size());
    }
    if (slices.empty()) lo = hi = 0;
    for (const auto& s : slices) {
        long off = s.grid().offset_in(grid);
        for (std::size_t vi = 0; vi < s.variables().size(); ++vi) {
            names.push_back(s.variables()[vi]);
            std::vector<double> col(hi - lo, std::numeric_limits<double>::quiet_NaN());
            for (std::size_t k = 0; k < s.size(); ++k) col[static_cast<std::size_t>(off) - lo + k] = s.column(vi)[k];
            cols.push_back(std::move(col));
        }
    }
    write_csv_header(os, names);
    for (std::size_t k = lo; k < hi; ++k) {
        os << format_double(grid.time(k));
        for (const auto& col : cols) {
            os << ',';
            if (!std::isnan(col[k - lo])) os << format_double(col[k - lo]);
        }
        os << '\n';
    }
}

std::vector<TrajectorySlice> slices_from_table(const CsvTable& table, double fallback_step) {
    std::vector<TrajectorySlice> out;
    if (table.time.empty()) return out;
    TimeGrid g = grid_from_times(table.time, fallback_step);
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        const auto& col = table.values[i];
        std::size_t b = 0;
        while (b < col.size() && std::isnan(col[b])) ++b;
        std::size_t e = b;
        while (e < col.size() && !std::isnan(col[e])) ++e;
        for (std::size_t k = e; k < col.size(); ++k)
            if (!std::isnan(col[k]))
                throw ParseError("column '" + table.columns[i] + "' is not contiguous", static_cast<int>(k) + 2,
                                 static_cast<int>(i) + 2);
        if (b == e) throw ParseError("column '" + table.columns[i] + "' is empty", 2, static_cast<int>(i) + 2);
        out.emplace_back(TimeGrid(g.time(b), g.step, e - b), std::vector<std::string>{table.columns[i]},
                         std::vector<std::vector<double>>{std::vector<double>(col.begin() + static_cast<long>(b),
                                                                              col.begin() + static_cast<long>(e))});
    }
    return out;
}

}  // namespace cpscause

#pragma once

#include <cstddef>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cpscause/errors.hpp"

namespace cpscause {

inline constexpr double kDefaultTol = 1e-6;
inline constexpr double kDefaultDt = 0.01;

struct TimeGrid {
    double start = 0.0;
    double step = kDefaultDt;
    std::size_t count = 1;

    TimeGrid() = default;
    TimeGrid(double start, double step, std::size_t count);

    double time(std::size_t k) const { return start + step * static_cast<double>(k); }
    double end() const { return time(count); }

    // Nearest grid index in [0, count]; throws if t lies more than step/2 outside.
    std::size_t snap(double t) const;
    // Same step and the start offset is a whole number of steps.
    bool aligned_with(const TimeGrid& other) const;
    // Index of this grid's first sample inside an aligned grid (may be negative).
    long offset_in(const TimeGrid& other) const;

    bool operator==(const TimeGrid&) const = default;
};

// Left-closed, right-open.
struct TimeInterval {
    double lo = 0.0;
    double hi = 0.0;

    TimeInterval() = default;
    TimeInterval(double lo_, double hi_);

    double length() const { return hi - lo; }
    bool operator==(const TimeInterval&) const = default;
};

struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
};

class Trajectory {
public:
    Trajectory() = default;
    Trajectory(TimeGrid grid, std::vector<std::string> vars, std::vector<std::vector<double>> columns);

    const TimeGrid& grid() const { return grid_; }
    const std::vector<std::string>& variables() const { return vars_; }
    std::size_t size() const { return grid_.count; }
    bool empty() const { return vars_.empty(); }

    bool has(std::string_view var) const;
    std::size_t index_of(std::string_view var) const;
    const std::vector<double>& column(std::string_view var) const;
    const std::vector<double>& column(std::size_t i) const { return cols_[i]; }
    double value(std::string_view var, std::size_t k) const { return column(var)[k]; }

    TimeInterval span() const { return {grid_.start, grid_.end()}; }
    IndexRange range_of(const TimeInterval& iv) const;

    // Moves out the column storage; used by builders that need cheap copies.
    std::vector<std::vector<double>> release_columns() && { return std::move(cols_); }

private:
    TimeGrid grid_;
    std::vector<std::string> vars_;
    std::vector<std::vector<double>> cols_;
    std::unordered_map<std::string, std::size_t> index_;
};

// A slice is a trajectory whose grid spans exactly one interval of its parent.
using TrajectorySlice = Trajectory;

inline TimeInterval dom(const Trajectory& t) { return t.span(); }

Trajectory project(const Trajectory& t, const std::vector<std::string>& vars);
TrajectorySlice slice(const Trajectory& t, const TimeInterval& iv);
TrajectorySlice slice(const Trajectory& t, const std::string& var, const TimeInterval& iv);

bool equals_on(const Trajectory& a, const Trajectory& b, const TimeInterval& iv, double tol = kDefaultTol);
// Full-span comparison; false when variable sets or grids differ.
bool same_trajectory(const Trajectory& a, const Trajectory& b, double tol = kDefaultTol);

bool is_alternative(const std::vector<TrajectorySlice>& xs, const std::vector<TrajectorySlice>& xs2,
                    double tol = kDefaultTol);

Trajectory override_with(const Trajectory& c, const std::vector<TrajectorySlice>& slices);
// Same, but variables in `constants` may only be replaced over c's full span.
Trajectory override_with(const Trajectory& c, const std::vector<TrajectorySlice>& slices,
                         const std::set<std::string>& constants);

// ---- CSV -----------------------------------------------------------------

std::string format_double(double v);
double parse_double(std::string_view s);

void write_csv(std::ostream& os, const Trajectory& t);
void write_csv_file(const std::string& path, const Trajectory& t);
void write_csv_header(std::ostream& os, const std::vector<std::string>& vars);

// Table with possibly empty cells (NaN). Used for witness files whose columns cover different intervals.
struct CsvTable {
    std::vector<std::string> columns;  // excluding "time"
    std::vector<double> time;
    std::vector<std::vector<double>> values;  // per column
};
CsvTable read_csv_table(std::istream& is);
CsvTable read_csv_table_file(const std::string& path);

// Dense trajectory; `fallback_step` is used when only one row is present.
Trajectory read_csv(std::istream& is, double fallback_step = kDefaultDt);
Trajectory read_csv_file(const std::string& path, double fallback_step = kDefaultDt);
Trajectory table_to_trajectory(const CsvTable& table, double fallback_step = kDefaultDt);

// Writes slices that may cover different intervals into one table on `grid`.
void write_slices_csv(std::ostream& os, const TimeGrid& grid, const std::vector<TrajectorySlice>& slices);
// Inverse of write_slices_csv: one slice per non-empty column, cut to its contiguous rows.
std::vector<TrajectorySlice> slices_from_table(const CsvTable& table, double fallback_step = kDefaultDt);

}  // namespace cpscause

#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

namespace hdf {

/// A calendar quarter. Ordered, with well-defined successor/predecessor.
struct Quarter {
    int year = 1900;
    int q = 1;  // 1..4

    Quarter() = default;
    Quarter(int year_, int q_);

    /// Linear index on the quarterly grid (year*4 + q-1), used for arithmetic.
    int index() const { return year * 4 + (q - 1); }

    static Quarter from_index(int idx);

    friend auto operator<=>(const Quarter& a, const Quarter& b) { return a.index() <=> b.index(); }
    friend bool operator==(const Quarter& a, const Quarter& b) { return a.index() == b.index(); }

    std::string to_string() const;  // "1979Q2"
    static Quarter parse(const std::string& text);
};

/// Shift by k quarters with year carry; k may be negative.
Quarter quarter_add(Quarter q, int k);

/// Quarters from a to b, signed: quarter_diff(q, quarter_add(q, k)) == k.
int quarter_diff(Quarter from, Quarter to);

inline double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }
inline bool is_missing(double v) { return std::isnan(v); }

/// A quarterly series anchored at a start quarter. Missing values (NaN) are
/// permitted only as a contiguous warm-up head created by transforms; anything
/// interior is rejected.
class Series {
public:
    Series() = default;
    Series(Quarter start, std::vector<double> values);

    Quarter start() const { return start_; }
    Quarter end() const;
    int length() const { return static_cast<int>(values_.size()); }
    const std::vector<double>& values() const { return values_; }

    double at_index(int i) const { return values_[static_cast<std::size_t>(i)]; }
    /// Value at a calendar quarter; missing when outside the span.
    double at(Quarter q) const;
    bool contains(Quarter q) const { return q >= start_ && q <= end(); }

    /// Index of the first observed (non-missing) entry; length() if none.
    int first_observed() const;
    Quarter first_observed_quarter() const { return quarter_add(start_, first_observed()); }

    Series slice(Quarter from, Quarter to) const;

private:
    Quarter start_;
    std::vector<double> values_;
};

/// Value at t equals the input at t-k; the first k entries become missing.
Series lag(const Series& s, int k);

/// Named series sharing one calendar grid (same start, same length).
class SeriesFrame {
public:
    SeriesFrame() = default;

    void add(const std::string& name, Series s);
    /// Replaces an existing column (keeps its position) or appends.
    void set(const std::string& name, Series s);

    bool has(const std::string& name) const { return index_.count(name) > 0; }
    const Series& get(const std::string& name) const;
    const std::vector<std::string>& names() const { return names_; }
    std::size_t size() const { return names_.size(); }
    bool empty() const { return names_.empty(); }

    Quarter start() const { return start_; }
    Quarter end() const;
    int length() const { return length_; }

    /// First quarter at which every series is observed.
    Quarter first_balanced_quarter() const;

    std::vector<Series>& columns() { return columns_; }

private:
    Quarter start_;
    int length_ = 0;
    std::vector<std::string> names_;
    std::vector<Series> columns_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Restrict a frame to [start, end]; head rows where any series is still in
/// its transform warm-up are dropped. Idempotent.
SeriesFrame window(const SeriesFrame& f, Quarter start, Quarter end);

}  // namespace hdf

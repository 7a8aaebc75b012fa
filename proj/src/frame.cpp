#include "hdf/frame.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace hdf {

Quarter::Quarter(int year_, int q_) : year(year_), q(q_) {
    if (q < 1 || q > 4) throw std::invalid_argument("Quarter: q must be in 1..4, got " + std::to_string(q));
}

Quarter Quarter::from_index(int idx) {
    int year = idx >= 0 ? idx / 4 : -((-idx + 3) / 4);
    int rem = idx - year * 4;
    return Quarter(year, rem + 1);
}

std::string Quarter::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04dQ%d", year, q);
    return buf;
}

Quarter Quarter::parse(const std::string& text) {
    // YYYYQn, case-insensitive Q
    std::size_t pos = text.find_first_of("Qq");
    if (pos == std::string::npos || pos == 0 || pos + 2 != text.size())
        throw std::invalid_argument("Quarter::parse: expected YYYYQn, got '" + text + "'");
    for (std::size_t i = 0; i < pos; ++i)
        if (!std::isdigit(static_cast<unsigned char>(text[i])))
            throw std::invalid_argument("Quarter::parse: bad year in '" + text + "'");
    if (!std::isdigit(static_cast<unsigned char>(text[pos + 1])))
        throw std::invalid_argument("Quarter::parse: bad quarter digit in '" + text + "'");
    int year = std::stoi(text.substr(0, pos));
    int q = text[pos + 1] - '0';
    if (q < 1 || q > 4) throw std::invalid_argument("Quarter::parse: quarter out of 1..4 in '" + text + "'");
    return Quarter(year, q);
}

Quarter quarter_add(Quarter q, int k) { return Quarter::from_index(q.index() + k); }

int quarter_diff(Quarter from, Quarter to) { return to.index() - from.index(); }

Series::Series(Quarter start, std::vector<double> values) : start_(start), values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("Series: length must be >= 1");
    bool seen_observed = false;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (is_missing(values_[i])) {
            if (seen_observed)
                throw std::invalid_argument("Series: interior missing value at offset " + std::to_string(i) +
                                            " (missing allowed only as a warm-up head)");
        } else {
            seen_observed = true;
        }
    }
    if (!seen_observed) throw std::invalid_argument("Series: all values missing");
}

Quarter Series::end() const { return quarter_add(start_, length() - 1); }

double Series::at(Quarter q) const {
    if (!contains(q)) return missing_value();
    return values_[static_cast<std::size_t>(quarter_diff(start_, q))];
}

int Series::first_observed() const {
    for (int i = 0; i < length(); ++i)
        if (!is_missing(values_[static_cast<std::size_t>(i)])) return i;
    return length();
}

Series Series::slice(Quarter from, Quarter to) const {
    if (from > to) throw std::out_of_range("Series::slice: start " + from.to_string() + " > end " + to.to_string());
    if (from < start_ || to > end())
        throw std::out_of_range("Series::slice: [" + from.to_string() + ", " + to.to_string() +
                                "] outside span [" + start_.to_string() + ", " + end().to_string() + "]");
    auto b = values_.begin() + quarter_diff(start_, from);
    return Series(from, std::vector<double>(b, b + quarter_diff(from, to) + 1));
}

Series lag(const Series& s, int k) {
    if (k < 0) throw std::invalid_argument("lag: k must be >= 0");
    if (k >= s.length())
        throw std::invalid_argument("lag: k=" + std::to_string(k) + " leaves no observations (length " +
                                    std::to_string(s.length()) + ")");
    std::vector<double> out(static_cast<std::size_t>(s.length()), missing_value());
    for (int t = k; t < s.length(); ++t) out[static_cast<std::size_t>(t)] = s.at_index(t - k);
    return Series(s.start(), std::move(out));
}

void SeriesFrame::add(const std::string& name, Series s) {
    if (has(name)) throw std::invalid_argument("SeriesFrame::add: duplicate series name '" + name + "'");
    if (!names_.empty()) {
        if (s.start() != start_ || s.length() != length_)
            throw std::invalid_argument("SeriesFrame::add: series '" + name + "' spans " + s.start().to_string() +
                                        "+" + std::to_string(s.length()) + ", frame grid is " + start_.to_string() +
                                        "+" + std::to_string(length_));
    } else {
        start_ = s.start();
        length_ = s.length();
    }
    index_[name] = names_.size();
    names_.push_back(name);
    columns_.push_back(std::move(s));
}

void SeriesFrame::set(const std::string& name, Series s) {
    auto it = index_.find(name);
    if (it == index_.end()) {
        add(name, std::move(s));
        return;
    }
    if (s.start() != start_ || s.length() != length_)
        throw std::invalid_argument("SeriesFrame::set: series '" + name + "' not aligned to frame grid");
    columns_[it->second] = std::move(s);
}

const Series& SeriesFrame::get(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("SeriesFrame: no series named '" + name + "'");
    return columns_[it->second];
}

Quarter SeriesFrame::end() const { return quarter_add(start_, length_ - 1); }

Quarter SeriesFrame::first_balanced_quarter() const {
    if (names_.empty()) throw std::runtime_error("SeriesFrame: empty frame has no balanced quarter");
    int first = 0;
    for (const auto& col : columns_) first = std::max(first, col.first_observed());
    if (first >= length_) throw std::runtime_error("SeriesFrame: no quarter with all series observed");
    return quarter_add(start_, first);
}

SeriesFrame window(const SeriesFrame& f, Quarter start, Quarter end) {
    if (f.empty()) throw std::invalid_argument("window: empty frame");
    if (start > end)
        throw std::out_of_range("window: start " + start.to_string() + " > end " + end.to_string());
    if (start < f.start() || end > f.end())
        throw std::out_of_range("window: [" + start.to_string() + ", " + end.to_string() + "] outside frame span [" +
                                f.start().to_string() + ", " + f.end().to_string() + "]");
    Quarter head = std::max(start, f.first_balanced_quarter());
    if (head > end)
        throw std::out_of_range("window: no fully observed rows in [" + start.to_string() + ", " + end.to_string() + "]");
    SeriesFrame out;
    for (const auto& name : f.names()) out.add(name, f.get(name).slice(head, end));
    return out;
}

}  // namespace hdf

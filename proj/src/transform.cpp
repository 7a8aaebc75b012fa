#include "hdf/transform.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hdf {

namespace {

// Applies f over a trailing window of the input, producing missing entries
// until `warmup` observed inputs are available.
template <typename F>
Series windowed(const Series& s, int warmup, F&& f) {
    const int n = s.length();
    if (warmup >= n)
        throw std::invalid_argument("transform: warm-up of " + std::to_string(warmup) +
                                    " quarters leaves no observations (length " + std::to_string(n) + ")");
    std::vector<double> out(static_cast<std::size_t>(n), missing_value());
    for (int t = warmup; t < n; ++t) {
        bool ok = true;
        for (int b = 0; b <= warmup; ++b)
            if (is_missing(s.at_index(t - b))) { ok = false; break; }
        if (ok) out[static_cast<std::size_t>(t)] = f(s, t);
    }
    bool any = false;
    for (double v : out)
        if (!is_missing(v)) { any = true; break; }
    if (!any) throw std::invalid_argument("transform: no observed values after warm-up");
    return Series(s.start(), std::move(out));
}

void require_positive(const Series& s, const char* op) {
    for (int t = 0; t < s.length(); ++t) {
        double v = s.at_index(t);
        if (!is_missing(v) && v <= 0.0)
            throw std::domain_error(std::string(op) + ": nonpositive value " + std::to_string(v) + " at " +
                                    quarter_add(s.start(), t).to_string());
    }
}

}  // namespace

Series rate4(const Series& p) {
    require_positive(p, "rate4");
    return windowed(p, 4, [](const Series& s, int t) { return 100.0 * (std::log(s.at_index(t)) - std::log(s.at_index(t - 4))); });
}

Series avg4(const Series& x) {
    return windowed(x, 3, [](const Series& s, int t) {
        return 0.25 * (s.at_index(t) + s.at_index(t - 1) + s.at_index(t - 2) + s.at_index(t - 3));
    });
}

Series change4(const Series& x) {
    return windowed(x, 4, [](const Series& s, int t) { return s.at_index(t) - s.at_index(t - 4); });
}

Series diff1(const Series& x) {
    return windowed(x, 1, [](const Series& s, int t) { return s.at_index(t) - s.at_index(t - 1); });
}

Series log_series(const Series& x) {
    require_positive(x, "log");
    return windowed(x, 0, [](const Series& s, int t) { return std::log(s.at_index(t)); });
}

Series gap(const Series& x, int P) {
    if (P < 2) throw std::invalid_argument("gap: P must be >= 2, got " + std::to_string(P));
    return windowed(x, P, [P](const Series& s, int t) {
        double acc = 0.0;
        for (int p = 1; p <= P; ++p) acc += s.at_index(t - p);
        return s.at_index(t) - acc / P;
    });
}

Series star(const std::vector<Series>& values, const std::vector<double>& weights) {
    if (values.empty()) throw std::invalid_argument("star: no input series");
    if (values.size() != weights.size())
        throw std::invalid_argument("star: " + std::to_string(values.size()) + " series vs " +
                                    std::to_string(weights.size()) + " weights");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("star: negative weight " + std::to_string(w));
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw std::invalid_argument("star: weights sum to " + std::to_string(total) + ", expected 1");
    const Series& first = values.front();
    for (const auto& s : values)
        if (s.start() != first.start() || s.length() != first.length())
            throw std::invalid_argument("star: series calendars are not aligned");

    std::vector<double> out(static_cast<std::size_t>(first.length()), missing_value());
    for (int t = 0; t < first.length(); ++t) {
        double acc = 0.0;
        bool ok = true;
        for (std::size_t j = 0; j < values.size(); ++j) {
            double v = values[j].at_index(t);
            if (is_missing(v)) { ok = false; break; }
            acc += weights[j] * v;
        }
        if (ok) out[static_cast<std::size_t>(t)] = acc;
    }
    return Series(first.start(), std::move(out));
}

TransformKind parse_transform_kind(const std::string& s) {
    if (s == "rate4") return TransformKind::Rate4;
    if (s == "avg4") return TransformKind::Avg4;
    if (s == "change4") return TransformKind::Change4;
    if (s == "diff1") return TransformKind::Diff1;
    if (s == "gap") return TransformKind::Gap;
    if (s == "star") return TransformKind::Star;
    if (s == "log") return TransformKind::Log;
    throw std::invalid_argument("unknown transform kind '" + s + "'");
}

std::string transform_kind_name(TransformKind k) {
    switch (k) {
        case TransformKind::Rate4: return "rate4";
        case TransformKind::Avg4: return "avg4";
        case TransformKind::Change4: return "change4";
        case TransformKind::Diff1: return "diff1";
        case TransformKind::Gap: return "gap";
        case TransformKind::Star: return "star";
        case TransformKind::Log: return "log";
    }
    return "?";
}

void TransformSpec::validate() const {
    if (output.empty()) throw std::invalid_argument("transform spec: missing output name");
    if (sources.empty()) throw std::invalid_argument("transform spec '" + output + "': no source series");
    if (kind == TransformKind::Gap && P < 2)
        throw std::invalid_argument("transform spec '" + output + "': gap requires P >= 2");
    if (kind == TransformKind::Star) {
        if (weights.size() != sources.size())
            throw std::invalid_argument("transform spec '" + output + "': star needs one weight per source");
        double total = std::accumulate(weights.begin(), weights.end(), 0.0);
        for (double w : weights)
            if (w < 0.0) throw std::invalid_argument("transform spec '" + output + "': negative star weight");
        if (std::abs(total - 1.0) > 1e-10)
            throw std::invalid_argument("transform spec '" + output + "': star weights must sum to 1");
    } else if (sources.size() != 1) {
        throw std::invalid_argument("transform spec '" + output + "': " + transform_kind_name(kind) +
                                    " takes exactly one source");
    }
}

SeriesFrame apply_recipe(const SeriesFrame& frame, const std::vector<TransformSpec>& recipe) {
    SeriesFrame out = frame;
    for (const auto& spec : recipe) {
        spec.validate();
        for (const auto& src : spec.sources)
            if (!out.has(src))
                throw std::out_of_range("transform spec '" + spec.output + "': unknown source series '" + src + "'");
        Series result = [&]() -> Series {
            switch (spec.kind) {
                case TransformKind::Rate4: return rate4(out.get(spec.sources[0]));
                case TransformKind::Avg4: return avg4(out.get(spec.sources[0]));
                case TransformKind::Change4: return change4(out.get(spec.sources[0]));
                case TransformKind::Diff1: return diff1(out.get(spec.sources[0]));
                case TransformKind::Gap: return gap(out.get(spec.sources[0]), spec.P);
                case TransformKind::Log: return log_series(out.get(spec.sources[0]));
                case TransformKind::Star: {
                    std::vector<Series> inputs;
                    inputs.reserve(spec.sources.size());
                    for (const auto& src : spec.sources) inputs.push_back(out.get(src));
                    return star(inputs, spec.weights);
                }
            }
            throw std::logic_error("unreachable");
        }();
        out.set(spec.output, std::move(result));
    }
    return out;
}

int ActiveSet::column_index(const std::string& name) const {
    for (std::size_t j = 0; j < names.size(); ++j)
        if (names[j] == name) return static_cast<int>(j);
    return -1;
}

int ActiveSet::first_balanced_row() const {
    for (int t = 0; t < length(); ++t) {
        bool ok = true;
        for (int j = 0; j < k(); ++j)
            if (is_missing(values(t, j))) { ok = false; break; }
        if (ok) return t;
    }
    return length();
}

ActiveSet build_active_set(const SeriesFrame& levels, const std::vector<std::string>& names) {
    if (names.empty()) throw std::invalid_argument("build_active_set: need at least one level name");
    ActiveSet as;
    as.start = levels.start();
    as.values.resize(levels.length(), static_cast<Eigen::Index>(2 * names.size()));
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (!levels.has(names[j]))
            throw std::out_of_range("build_active_set: unknown series '" + names[j] + "'");
        const Series& level = levels.get(names[j]);
        Series diff = diff1(level);
        as.names.push_back(names[j]);
        as.names.push_back("D" + names[j]);
        for (int t = 0; t < levels.length(); ++t) {
            as.values(t, static_cast<Eigen::Index>(2 * j)) = level.at_index(t);
            as.values(t, static_cast<Eigen::Index>(2 * j + 1)) = diff.at_index(t);
        }
    }
    return as;
}

}  // namespace hdf

#include "hdf/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hdf/util.hpp"

namespace hdf {

MethodTag parse_method_tag(const std::string& s) {
    std::string t = s;
    std::replace(t.begin(), t.end(), '-', '_');
    if (t == "AR2") return MethodTag::AR2;
    if (t == "ARX") return MethodTag::ARX;
    if (t == "LASSO") return MethodTag::Lasso;
    if (t == "AR2_LASSO") return MethodTag::Ar2Lasso;
    if (t == "ARX_LASSO") return MethodTag::ArxLasso;
    if (t == "AR2_OCMT") return MethodTag::Ar2Ocmt;
    if (t == "ARX_OCMT") return MethodTag::ArxOcmt;
    throw std::invalid_argument("unknown method tag '" + s + "'");
}

std::string method_tag_name(MethodTag tag) {
    switch (tag) {
        case MethodTag::AR2: return "AR2";
        case MethodTag::ARX: return "ARX";
        case MethodTag::Lasso: return "LASSO";
        case MethodTag::Ar2Lasso: return "AR2_LASSO";
        case MethodTag::ArxLasso: return "ARX_LASSO";
        case MethodTag::Ar2Ocmt: return "AR2_OCMT";
        case MethodTag::ArxOcmt: return "ARX_OCMT";
    }
    return "?";
}

bool method_uses_lasso(MethodTag tag) {
    return tag == MethodTag::Lasso || tag == MethodTag::Ar2Lasso || tag == MethodTag::ArxLasso;
}

bool method_uses_ocmt(MethodTag tag) { return tag == MethodTag::Ar2Ocmt || tag == MethodTag::ArxOcmt; }

DirectDataset build_direct_dataset(const SeriesFrame& frame, const std::string& target, int h,
                                   const std::vector<std::string>& z_names, const ActiveSet& active,
                                   Quarter end, Quarter sample_start) {
    if (h < 1) throw std::invalid_argument("build_direct_dataset: horizon must be >= 1");
    if (!frame.has(target)) throw std::out_of_range("build_direct_dataset: unknown target '" + target + "'");
    if (end > frame.end() || end < frame.start())
        throw std::out_of_range("build_direct_dataset: window end " + end.to_string() + " outside frame span");

    const Series& ty = frame.get(target);

    std::vector<int> z_cols, x_cols;
    for (const auto& n : z_names) {
        int j = active.column_index(n);
        if (j < 0) throw std::out_of_range("build_direct_dataset: pre-selected '" + n + "' not in the active set");
        z_cols.push_back(j);
    }
    for (int j = 0; j < active.k(); ++j) x_cols.push_back(j);

    // First t with every active column observed and the target observed at t+h.
    int first_row = active.first_balanced_row();
    Quarter t0 = std::max(quarter_add(active.start, first_row), sample_start);
    t0 = std::max(t0, quarter_add(ty.first_observed_quarter(), -h));
    Quarter t_last = quarter_add(end, -h);
    if (t_last > quarter_add(ty.end(), -h)) t_last = quarter_add(ty.end(), -h);

    int rows = quarter_diff(t0, t_last) + 1;
    const int min_rows = static_cast<int>(z_cols.size()) + 8;
    if (rows < min_rows)
        throw std::runtime_error("build_direct_dataset: only " + std::to_string(std::max(rows, 0)) +
                                 " usable rows for window ending " + end.to_string() + " at h=" + std::to_string(h) +
                                 " (need at least " + std::to_string(min_rows) + ")");

    DirectDataset ds;
    ds.first_t = t0;
    ds.rows = rows;
    ds.z_names = z_names;
    ds.x_names = active.names;
    ds.y.resize(rows);
    ds.Z.resize(rows, static_cast<Eigen::Index>(z_cols.size()));
    ds.X.resize(rows, active.k());
    for (int r = 0; r < rows; ++r) {
        Quarter t = quarter_add(t0, r);
        int ar = quarter_diff(active.start, t);
        ds.y(r) = ty.at(quarter_add(t, h));
        for (std::size_t c = 0; c < z_cols.size(); ++c) ds.Z(r, static_cast<Eigen::Index>(c)) = active.values(ar, z_cols[static_cast<std::size_t>(c)]);
        for (int c = 0; c < active.k(); ++c) ds.X(r, c) = active.values(ar, c);
    }
    if (!ds.y.allFinite() || !ds.Z.allFinite() || !ds.X.allFinite())
        throw std::runtime_error("build_direct_dataset: unexpected missing value inside the balanced sample");
    return ds;
}

Eigen::VectorXd active_row(const ActiveSet& active, const std::vector<std::string>& names, Quarter t) {
    int r = quarter_diff(active.start, t);
    if (r < 0 || r >= active.length())
        throw std::out_of_range("active_row: " + t.to_string() + " outside the active set span");
    Eigen::VectorXd out(static_cast<Eigen::Index>(names.size()));
    for (std::size_t i = 0; i < names.size(); ++i) {
        int j = active.column_index(names[i]);
        if (j < 0) throw std::out_of_range("active_row: unknown column '" + names[i] + "'");
        double v = active.values(r, j);
        if (is_missing(v)) throw std::runtime_error("active_row: '" + names[i] + "' missing at " + t.to_string());
        out(static_cast<Eigen::Index>(i)) = v;
    }
    return out;
}

namespace {

struct Cell {
    std::size_t method = 0;
    int horizon = 0;
    Quarter window_end{};
};

// Forecast + optional selection log for one (method, horizon, window) cell.
void run_cell(const SeriesFrame& frame, const std::string& target, const ActiveSet& active,
              const MethodSpec& method, int h, Quarter window_end, Quarter sample_start, ForecastRecord& rec,
              std::optional<SelectionLogEntry>& log) {
    rec.method = method.display_name();
    rec.horizon = h;
    rec.window_end = window_end;
    rec.target = quarter_add(window_end, h);

    DirectDataset ds = build_direct_dataset(frame, target, h, method.preselected, active, window_end, sample_start);
    Eigen::VectorXd z_end = active_row(active, method.preselected, window_end);

    switch (method.tag) {
        case MethodTag::AR2:
        case MethodTag::ARX: {
            OlsFit fit = ols(ds.y, ds.Z, 0, ds.z_names);
            rec.forecast = fit.predict(z_end);
            break;
        }
        case MethodTag::Lasso: {
            CvResult cv = cv_lambda(ds.y, ds.X, method.cv);
            LassoFit fit = lasso_fit_raw(ds.y, ds.X, cv.lambda);
            Eigen::VectorXd x_end = active_row(active, ds.x_names, window_end);
            rec.forecast = fit.intercept + x_end.dot(fit.beta_raw);
            SelectionLogEntry e;
            e.lambda = cv.lambda;
            for (int j : fit.support) e.selected.emplace_back(ds.x_names[static_cast<std::size_t>(j)], fit.beta_raw(j));
            log = std::move(e);
            break;
        }
        case MethodTag::Ar2Lasso:
        case MethodTag::ArxLasso: {
            Eigen::MatrixXd Zi(ds.rows, ds.Z.cols() + 1);
            Zi.col(0).setOnes();
            Zi.rightCols(ds.Z.cols()) = ds.Z;
            // The CV sees the same partialled-out problem the final fit solves.
            Eigen::VectorXd y_t = residualize(ds.y, Zi);
            Eigen::MatrixXd X_t = residualize(ds.X, Zi);
            CvResult cv = cv_lambda(y_t, X_t, method.cv);
            auto [delta, fit] = partialled_lasso(ds.y, Zi, ds.X, cv.lambda);
            Eigen::VectorXd x_end = active_row(active, ds.x_names, window_end);
            rec.forecast = delta(0) + z_end.dot(delta.tail(delta.size() - 1)) + x_end.dot(fit.beta_raw);
            SelectionLogEntry e;
            e.lambda = cv.lambda;
            for (int j : fit.support) e.selected.emplace_back(ds.x_names[static_cast<std::size_t>(j)], fit.beta_raw(j));
            log = std::move(e);
            break;
        }
        case MethodTag::Ar2Ocmt:
        case MethodTag::ArxOcmt: {
            OcmtConfig cfg = method.ocmt;
            if (cfg.hac_lags > 0) cfg.hac_lags = h - 1;  // MA(h-1) error structure of direct regressions
            SelectionResult sel = gocmt_select(ds.y, ds.Z, ds.X, ds.x_names, cfg);
            sel.window_end = window_end;
            sel.horizon = h;
            sel.method = method.display_name();
            sel.preselected = method.preselected;

            std::vector<std::string> chosen = sel.selected;
            Eigen::MatrixXd X_sel(ds.rows, static_cast<Eigen::Index>(chosen.size()));
            for (std::size_t c = 0; c < chosen.size(); ++c)
                X_sel.col(static_cast<Eigen::Index>(c)) = ds.X.col(active.column_index(chosen[c]));
            std::vector<std::string> names = ds.z_names;
            names.insert(names.end(), chosen.begin(), chosen.end());
            OlsFit fit = final_regression(ds.y, ds.Z, X_sel, 0, names);

            Eigen::VectorXd reg(z_end.size() + static_cast<Eigen::Index>(chosen.size()));
            reg.head(z_end.size()) = z_end;
            if (!chosen.empty()) reg.tail(static_cast<Eigen::Index>(chosen.size())) = active_row(active, chosen, window_end);
            rec.forecast = fit.predict(reg);

            SelectionLogEntry e;
            e.is_ocmt = true;
            e.ocmt = std::move(sel);
            log = std::move(e);
            break;
        }
    }
    rec.has_forecast = true;

    if (log) {
        log->method = rec.method;
        log->horizon = h;
        log->window_end = window_end;
        log->preselected = method.preselected;
    }

    const Series& ty = frame.get(target);
    double realized = ty.at(rec.target);
    if (!is_missing(realized)) {
        rec.realization = realized;
        rec.has_realization = true;
    }
}

}  // namespace

RecursiveResult run_recursive(const SeriesFrame& frame, const std::string& target,
                              const std::vector<std::string>& active_names,
                              const std::vector<MethodSpec>& methods, const std::vector<int>& horizons,
                              Quarter eval_start, Quarter eval_end, Quarter sample_start, unsigned jobs) {
    if (methods.empty()) throw std::invalid_argument("run_recursive: no methods");
    if (horizons.empty()) throw std::invalid_argument("run_recursive: no horizons");
    if (eval_start > eval_end) throw std::invalid_argument("run_recursive: eval span is empty");
    for (int h : horizons)
        if (h < 1 || h > 8) throw std::invalid_argument("run_recursive: horizon " + std::to_string(h) + " outside 1..8");

    ActiveSet active = build_active_set(frame, active_names);

    // Window ends run from eval_start - h through eval_end for every horizon;
    // the trailing windows give unrealized tail forecasts.
    std::vector<Cell> cells;
    for (std::size_t m = 0; m < methods.size(); ++m)
        for (int h : horizons) {
            Quarter first_end = quarter_add(eval_start, -h);
            for (Quarter e = first_end; e <= eval_end; e = quarter_add(e, 1)) cells.push_back({m, h, e});
        }

    std::vector<ForecastRecord> records(cells.size());
    std::vector<std::optional<SelectionLogEntry>> logs(cells.size());
    parallel_for(cells.size(), jobs, [&](std::size_t i) {
        const Cell& c = cells[i];
        try {
            run_cell(frame, target, active, methods[c.method], c.horizon, c.window_end, sample_start, records[i],
                     logs[i]);
        } catch (const std::exception& e) {
            ForecastRecord& r = records[i];
            r.method = methods[c.method].display_name();
            r.horizon = c.horizon;
            r.window_end = c.window_end;
            r.target = quarter_add(c.window_end, c.horizon);
            r.error = e.what();
        }
    });

    RecursiveResult out;
    out.records = std::move(records);
    for (auto& l : logs)
        if (l) out.logs.push_back(std::move(*l));
    for (const auto& r : out.records)
        if (!r.error.empty())
            out.errors.push_back(r.method + " h=" + std::to_string(r.horizon) + " window " +
                                 r.window_end.to_string() + ": " + r.error);
    return out;
}

double rmsfe(const std::vector<ForecastRecord>& records) {
    double acc = 0.0;
    int n = 0;
    for (const auto& r : records) {
        if (!r.has_forecast || !r.has_realization) continue;
        const double e = r.realization - r.forecast;
        acc += e * e;
        ++n;
    }
    if (n == 0) throw std::runtime_error("rmsfe: no realized forecasts to evaluate");
    return std::sqrt(acc / n);
}

std::map<std::pair<std::string, int>, EvalCell> evaluate_records(const std::vector<ForecastRecord>& records,
                                                                 Quarter eval_start, Quarter eval_end) {
    std::map<std::pair<std::string, int>, EvalCell> cells;
    std::map<std::pair<std::string, int>, std::vector<ForecastRecord>> realized;
    for (const auto& r : records) {
        auto key = std::make_pair(r.method, r.horizon);
        auto& cell = cells[key];
        if (r.has_forecast) ++cell.forecasts;
        if (r.has_forecast && r.has_realization && r.target >= eval_start && r.target <= eval_end)
            realized[key].push_back(r);
    }
    for (auto& [key, recs] : realized) {
        cells[key].realized = static_cast<int>(recs.size());
        cells[key].rmsfe = rmsfe(recs);
    }
    return cells;
}

std::map<std::pair<std::string, int>, std::map<std::string, int>> selection_frequency(
    const std::vector<SelectionLogEntry>& logs) {
    std::map<std::pair<std::string, int>, std::map<std::string, int>> freq;
    for (const auto& l : logs) {
        auto& table = freq[{l.method, l.horizon}];
        if (l.is_ocmt) {
            for (const auto& cs : l.ocmt.stats)
                if (cs.selected) ++table[cs.name];
        } else {
            for (const auto& [name, coef] : l.selected) ++table[name];
        }
    }
    return freq;
}

std::string SelectionLogEntry::to_json() const {
    if (is_ocmt) return ocmt.to_json();
    std::ostringstream os;
    os << "{\"window_end\":\"" << window_end.to_string() << "\",\"horizon\":" << horizon << ",\"method\":\""
       << method << "\",\"lambda\":" << lambda << ",\"preselected\":[";
    for (std::size_t i = 0; i < preselected.size(); ++i) os << (i ? "," : "") << "\"" << preselected[i] << "\"";
    os << "],\"selected\":[";
    for (std::size_t i = 0; i < selected.size(); ++i) {
        os << (i ? "," : "") << "{\"name\":\"" << selected[i].first << "\",\"coef\":" << selected[i].second << "}";
    }
    os << "]}";
    return os.str();
}

void write_forecasts_csv(const std::vector<ForecastRecord>& records, const std::string& path,
                         const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_forecasts_csv: cannot open '" + path + "'");
    if (!comment.empty()) out << "# " << comment << "\n";
    out << "method,horizon,window_end,target_quarter,forecast,realization\n";
    for (const auto& r : records) {
        out << r.method << "," << r.horizon << "," << r.window_end.to_string() << "," << r.target.to_string() << ",";
        if (r.has_forecast) out << format_sig6(r.forecast);
        out << ",";
        if (r.has_realization) out << format_sig6(r.realization);
        out << "\n";
    }
}

std::vector<ForecastRecord> read_forecasts_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_forecasts_csv: cannot open '" + path + "'");
    std::vector<ForecastRecord> records;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;  // column order is fixed
            continue;
        }
        std::vector<std::string> cells;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                cells.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur.push_back(c);
            }
        }
        cells.push_back(cur);
        if (cells.size() != 6)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 6 cells");
        ForecastRecord r;
        r.method = cells[0];
        r.horizon = std::stoi(cells[1]);
        r.window_end = Quarter::parse(cells[2]);
        r.target = Quarter::parse(cells[3]);
        if (!cells[4].empty()) {
            r.forecast = std::stod(cells[4]);
            r.has_forecast = true;
        }
        if (!cells[5].empty()) {
            r.realization = std::stod(cells[5]);
            r.has_realization = true;
        }
        records.push_back(std::move(r));
    }
    return records;
}

void write_selection_log(const std::vector<SelectionLogEntry>& logs, const std::string& path,
                         const std::string& config_hash, std::uint64_t seed) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_selection_log: cannot open '" + path + "'");
    out << "{\"config\":\"" << config_hash << "\",\"seed\":" << seed << ",\"entries\":[\n";
    for (std::size_t i = 0; i < logs.size(); ++i) out << (i ? ",\n" : "") << logs[i].to_json();
    out << "\n]}\n";
}

void write_eval_report(const std::map<std::pair<std::string, int>, EvalCell>& cells,
                       const std::vector<int>& horizons, const std::string& path, const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_eval_report: cannot open '" + path + "'");
    if (!comment.empty()) out << "# " << comment << "\n";
    out << "method";
    for (int h : horizons) out << ",rmsfe_h" << h << ",n_h" << h;
    out << "\n";
    std::vector<std::string> methods;
    for (const auto& [key, cell] : cells)
        if (std::find(methods.begin(), methods.end(), key.first) == methods.end()) methods.push_back(key.first);
    for (const auto& m : methods) {
        out << m;
        for (int h : horizons) {
            auto it = cells.find({m, h});
            out << ",";
            if (it != cells.end() && it->second.realized > 0) out << format_sig6(it->second.rmsfe);
            out << "," << (it != cells.end() ? it->second.realized : 0);
        }
        out << "\n";
    }
}

}  // namespace hdf

#include "hdf/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace hdf {

namespace {

std::vector<std::string> split_row(const std::string& line) {
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
    return cells;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

SeriesFrame load_csv_stream(std::istream& in, const std::string& origin) {
    std::string line;
    int line_no = 0;

    // header
    if (!std::getline(in, line)) throw std::runtime_error(origin + ": empty file");
    ++line_no;
    auto header = split_row(line);
    if (header.empty() || trim(header[0]) != "date")
        throw std::runtime_error(origin + ":1: first column must be named 'date'");
    std::vector<std::string> names;
    for (std::size_t i = 1; i < header.size(); ++i) {
        std::string n = trim(header[i]);
        if (n.empty()) throw std::runtime_error(origin + ":1: empty series name in header");
        names.push_back(n);
    }
    if (names.empty()) throw std::runtime_error(origin + ":1: no series columns");

    std::vector<std::vector<double>> cols(names.size());
    Quarter start;
    Quarter prev;
    bool first_row = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_row(line);
        if (cells.size() != names.size() + 1)
            throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(names.size() + 1) + " cells, got " + std::to_string(cells.size()));
        Quarter q;
        try {
            q = Quarter::parse(trim(cells[0]));
        } catch (const std::exception& e) {
            throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (first_row) {
            start = q;
            first_row = false;
        } else if (quarter_diff(prev, q) != 1) {
            throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": date " + q.to_string() +
                                     " breaks the quarterly grid (previous row " + prev.to_string() + ")");
        }
        prev = q;
        for (std::size_t j = 0; j < names.size(); ++j) {
            std::string cell = trim(cells[j + 1]);
            if (cell.empty()) {
                cols[j].push_back(missing_value());
                continue;
            }
            char* endp = nullptr;
            double v = std::strtod(cell.c_str(), &endp);
            if (endp == cell.c_str() || *endp != '\0')
                throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": bad numeric cell '" + cell +
                                         "' in column '" + names[j] + "'");
            cols[j].push_back(v);
        }
    }
    if (first_row) throw std::runtime_error(origin + ": no data rows");

    SeriesFrame f;
    for (std::size_t j = 0; j < names.size(); ++j) {
        try {
            f.add(names[j], Series(start, std::move(cols[j])));
        } catch (const std::exception& e) {
            throw std::runtime_error(origin + ": column '" + names[j] + "': " + e.what());
        }
    }
    return f;
}

SeriesFrame load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open '" + path + "'");
    return load_csv_stream(in, path);
}

void write_csv(const SeriesFrame& f, const std::string& path, const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open '" + path + "' for writing");
    if (!comment.empty()) out << "# " << comment << "\n";
    out << "date";
    for (const auto& n : f.names()) out << "," << n;
    out << "\n";
    for (int t = 0; t < f.length(); ++t) {
        out << quarter_add(f.start(), t).to_string();
        for (const auto& n : f.names()) {
            double v = f.get(n).at_index(t);
            out << ",";
            if (!is_missing(v)) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%.10g", v);
                out << buf;
            }
        }
        out << "\n";
    }
}

}  // namespace hdf

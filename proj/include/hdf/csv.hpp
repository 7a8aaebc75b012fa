#pragma once

#include <iosfwd>
#include <string>

#include "hdf/frame.hpp"

namespace hdf {

/// Loads a quarterly panel. First column must be `date` with YYYYQn values on
/// a contiguous grid; remaining columns are numeric series named in the
/// header. Empty cells are missing and allowed only at the head of a column.
SeriesFrame load_csv(const std::string& path);
SeriesFrame load_csv_stream(std::istream& in, const std::string& origin);

/// Writes date + all columns. `comment` (if nonempty) becomes a leading
/// `# ...` line. Missing values are written as empty cells.
void write_csv(const SeriesFrame& f, const std::string& path, const std::string& comment = "");

}  // namespace hdf

#pragma once

#include "ajk/core_model.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace ajk {

/**
 * Panel CSV: a header row "label,<series names...>", then one row per
 * period with the time label in the first column. Cells are numbers or one
 * of the missing tokens "", "NA", "NaN". Fields may be double-quoted.
 *
 * Throws IngestionError with the 1-based file row and column for ragged
 * rows, unparsable cells, duplicate series names and files without any
 * observed cell ("no observations").
 */
TimeSeriesDataset parse_csv(std::istream& in);
TimeSeriesDataset ingest_csv(const std::filesystem::path& path);

/// Inverse of parse_csv. Values use the shortest round-trip representation;
/// missing cells are written as NA.
void write_csv(std::ostream& out, const TimeSeriesDataset& data);
void write_csv(const std::filesystem::path& path, const TimeSeriesDataset& data);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace ajk

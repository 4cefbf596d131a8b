#include "ajk/csv_io.hpp"

#include "ajk/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <system_error>

namespace ajk {

namespace {

std::vector<std::string> split_record(const std::string& line, int row) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (quoted) {
            if (c == '"') {
                if (k + 1 < line.size() && line[k + 1] == '"') {
                    field += '"';
                    ++k;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty() && !was_quoted) {
            quoted = was_quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            was_quoted = false;
        } else {
            field += c;
        }
    }
    if (quoted) throw IngestionError("unterminated quoted field", row, static_cast<int>(fields.size()) + 1);
    fields.push_back(std::move(field));
    return fields;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

bool is_missing_token(const std::string& s) { return s.empty() || s == "NA" || s == "NaN"; }

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

}  // namespace

TimeSeriesDataset parse_csv(std::istream& in) {
    std::string line;
    int row = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) return false;
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };

    if (!next_line()) throw IngestionError("empty file: missing header row");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const std::vector<std::string> header = split_record(line, row);
    if (header.size() < 2) throw IngestionError("header needs a time label column and at least one series", row);
    std::vector<std::string> names;
    std::set<std::string> seen;
    for (std::size_t c = 1; c < header.size(); ++c) {
        std::string name = trim(header[c]);
        if (!seen.insert(name).second)
            throw IngestionError("duplicate series name '" + name + "'", row, static_cast<int>(c) + 1);
        names.push_back(std::move(name));
    }
    const std::size_t width = header.size();
    const int n = static_cast<int>(names.size());

    std::vector<std::string> labels;
    std::vector<double> cells;
    std::vector<char> present;
    while (next_line()) {
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_record(line, row);
        if (fields.size() != width)
            throw IngestionError("expected " + std::to_string(width) + " fields, found " +
                                     std::to_string(fields.size()),
                                 row);
        labels.push_back(fields[0]);
        for (std::size_t c = 1; c < width; ++c) {
            const std::string cell = trim(fields[c]);
            if (is_missing_token(cell)) {
                cells.push_back(0.0);
                present.push_back(0);
                continue;
            }
            double value = 0.0;
            const char* first = cell.data();
            const char* last = first + cell.size();
            if (*first == '+') ++first;
            const auto [ptr, ec] = std::from_chars(first, last, value);
            if (ec != std::errc{} || ptr != last || !std::isfinite(value))
                throw IngestionError("cannot parse '" + cell + "' as a number", row, static_cast<int>(c) + 1);
            cells.push_back(value);
            present.push_back(1);
        }
    }
    const int T = static_cast<int>(labels.size());
    if (T == 0) throw IngestionError("no observations: the file has no data rows");

    Matrix values(n, T);
    Mask observed(n, T);
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < n; ++i) {
            const std::size_t k = static_cast<std::size_t>(t) * n + i;
            values(i, t) = cells[k];
            observed(i, t) = present[k] != 0;
        }
    if (!observed.any()) throw IngestionError("no observations: every cell is missing");
    return TimeSeriesDataset(std::move(values), std::move(observed), std::move(names), std::move(labels));
}

TimeSeriesDataset ingest_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot open '" + path.string() + "'");
    return parse_csv(in);
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    (void)ec;
    return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const TimeSeriesDataset& data) {
    const int n = data.num_series();
    const int T = data.num_periods();
    out << "label";
    for (int i = 0; i < n; ++i) {
        const std::string name =
            i < static_cast<int>(data.series_names().size()) ? data.series_names()[i] : "y" + std::to_string(i + 1);
        out << ',' << quote_if_needed(name);
    }
    out << '\n';
    for (int t = 0; t < T; ++t) {
        out << quote_if_needed(t < static_cast<int>(data.time_labels().size()) ? data.time_labels()[t]
                                                                               : std::to_string(t + 1));
        for (int i = 0; i < n; ++i) {
            out << ',';
            if (data.is_observed(i, t))
                out << format_double(data.values()(i, t));
            else
                out << "NA";
        }
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const TimeSeriesDataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    write_csv(out, data);
    if (!out) throw Error("write to '" + path.string() + "' failed");
}

}  // namespace ajk

#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tbeta {

// Daily relative humidity (as proportions) shipped with the library. Values
// are in recorded order, including the first observation that the usual
// analysis drops.
struct EmbeddedDataset {
    std::string_view name;
    std::string_view description;
    std::span<const double> values;
};

std::span<const EmbeddedDataset> embedded_datasets();

// nullptr when no dataset has that name.
const EmbeddedDataset* find_embedded(std::string_view name);

// Observation CSV: one value per line, optional non-numeric header on the
// first non-blank line, blank lines and lines starting with '#' ignored.
// Throws DataError naming the offending line on malformed input and when no
// observation is present.
std::vector<double> read_observations(std::istream& in, std::string_view source = "<stream>");
std::vector<double> read_observations_file(const std::string& path);

// Writes a header line "x" then one value per line in round-trip form,
// so re-reading reproduces every value exactly.
void write_observations(std::ostream& out, std::span<const double> values);

// Shortest decimal form that reads back to the same double; used by every exporter.
std::string format_double(double value);

} // namespace tbeta

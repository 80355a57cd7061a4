#include "tbeta/datasets.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "tbeta/error.hpp"

namespace tbeta {

namespace {

// Haarweg Wageningen station, May 2007 and May 2008.
constexpr std::array<double, 31> kRhMay2007 = {
    0.40, 0.44, 0.50, 0.55, 0.58, 0.62, 0.65, 0.69, 0.72, 0.72, 0.73, 0.75, 0.77, 0.80, 0.81, 0.81,
    0.83, 0.83, 0.85, 0.85, 0.85, 0.85, 0.86, 0.86, 0.87, 0.87, 0.89, 0.92, 0.94, 0.94, 0.97};

constexpr std::array<double, 31> kRhMay2008 = {
    0.39, 0.40, 0.42, 0.43, 0.43, 0.43, 0.44, 0.46, 0.48, 0.49, 0.51, 0.52, 0.53, 0.54, 0.56, 0.59,
    0.62, 0.64, 0.66, 0.73, 0.75, 0.76, 0.83, 0.85, 0.88, 0.91, 0.92, 0.92, 0.95, 0.97, 0.98};

const std::array<EmbeddedDataset, 2> kEmbedded = {{
    {"rh-may-2007", "Relative humidity, Wageningen (NL), May 2007, 31 daily values", kRhMay2007},
    {"rh-may-2008", "Relative humidity, Wageningen (NL), May 2008, 31 daily values", kRhMay2008},
}};

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view text, double& value)
{
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    return ec == std::errc() && ptr == end && std::isfinite(value);
}

} // namespace

std::span<const EmbeddedDataset> embedded_datasets()
{
    return kEmbedded;
}

const EmbeddedDataset* find_embedded(std::string_view name)
{
    for (const auto& d : kEmbedded)
        if (d.name == name)
            return &d;
    return nullptr;
}

std::vector<double> read_observations(std::istream& in, std::string_view source)
{
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    bool seen_content = false;
    while (std::getline(in, line)) {
        ++line_no;
        auto field = trim(line);
        if (field.empty() || field.front() == '#')
            continue;
        if (field.find(',') != std::string_view::npos) {
            // Tolerate a trailing comma, nothing else.
            if (field.back() == ',' && field.find(',') == field.size() - 1)
                field = trim(field.substr(0, field.size() - 1));
            else
                throw DataError(std::string(source) + ":" + std::to_string(line_no) +
                                ": expected one observation per line, found several fields");
        }
        double value = 0.0;
        if (!parse_double(field, value)) {
            if (!seen_content) {
                seen_content = true; // header
                continue;
            }
            throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": cannot parse '" +
                            std::string(field) + "' as a number");
        }
        seen_content = true;
        values.push_back(value);
    }
    if (values.empty())
        throw DataError(std::string(source) + ": no observations found");
    return values;
}

std::vector<double> read_observations_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open '" + path + "'");
    return read_observations(in, path);
}

std::string format_double(double value)
{
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

void write_observations(std::ostream& out, std::span<const double> values)
{
    out << "x\n";
    for (double v : values)
        out << format_double(v) << '\n';
}

} // namespace tbeta

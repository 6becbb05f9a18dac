#include "dpskr/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace dpskr::sweep {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("grid: cannot parse " + what + " '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v))
        throw std::invalid_argument("grid: cannot parse " + what + " '" + s + "'");
    return v;
}

long parse_count(const std::string& s) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("grid: cannot parse point count '" + s + "'");
    }
    if (used != s.size() || v < 1)
        throw std::invalid_argument("grid: point count must be a positive integer, got '" + s +
                                    "'");
    return v;
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
    if (spec.empty()) throw std::invalid_argument("grid: empty specification");
    std::vector<std::string> parts = split(spec, ':');

    if (parts.size() == 1) return {parse_double(parts[0], "value")};

    bool log_spaced = parts[0] == "log";
    std::size_t base = log_spaced ? 1 : 0;
    if (parts.size() != base + 3)
        throw std::invalid_argument("grid: expected start:stop:points" +
                                    std::string(log_spaced ? " after log:" : "") + ", got '" +
                                    spec + "'");

    double start = parse_double(parts[base], "start");
    double stop = parse_double(parts[base + 1], "stop");
    long points = parse_count(parts[base + 2]);

    if (points == 1) {
        if (start != stop)
            throw std::invalid_argument("grid: a one-point grid needs start == stop, got '" +
                                        spec + "'");
        return {start};
    }
    if (!(start < stop))
        throw std::invalid_argument("grid: start must be below stop, got '" + spec + "'");
    if (log_spaced && !(start > 0.0))
        throw std::invalid_argument("grid: log spacing needs a positive start, got '" + spec +
                                    "'");

    std::vector<double> out(static_cast<std::size_t>(points));
    if (log_spaced) {
        double a = std::log(start), b = std::log(stop);
        for (long i = 0; i < points; ++i)
            out[static_cast<std::size_t>(i)] =
                std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
    } else {
        for (long i = 0; i < points; ++i)
            out[static_cast<std::size_t>(i)] =
                start +
                (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    out.front() = start;
    out.back() = stop;
    return out;
}

std::string format_field(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string join_row(const std::vector<std::string>& fields) {
    std::string row;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) row += ',';
        row += fields[i];
    }
    return row;
}

std::string assemble_csv(const std::vector<std::string>& comments,
                         const std::vector<std::string>& columns,
                         const std::vector<std::string>& rows) {
    std::string doc;
    for (const auto& c : comments) {
        doc += "# ";
        doc += c;
        doc += '\n';
    }
    doc += join_row(columns);
    doc += '\n';
    for (const auto& r : rows) {
        doc += r;
        doc += '\n';
    }
    return doc;
}

std::string resolve_output_path(const std::string& explicit_path,
                               const std::string& default_name) {
    if (!explicit_path.empty()) return explicit_path;
    const char* dir = std::getenv("DPSKR_OUTPUT_DIR");
    if (dir != nullptr && dir[0] != '\0') return std::string(dir) + "/" + default_name;
    return default_name;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::invalid_argument("cannot open output file '" + path + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw std::invalid_argument("cannot write output file '" + path + "'");
}

}  // namespace dpskr::sweep

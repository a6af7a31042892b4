#include "wmamp/cli/format.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace wmamp::cli {

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

void write_value(std::ostream& out, const nlohmann::ordered_json& v, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (v.type()) {
    case nlohmann::ordered_json::value_t::object: {
        if (v.empty()) {
            out << "{}";
            return;
        }
        out << "{\n";
        bool first = true;
        for (const auto& [key, item] : v.items()) {
            if (!first) out << ",\n";
            first = false;
            out << inner << nlohmann::ordered_json(key).dump() << ": ";
            write_value(out, item, indent + 1);
        }
        out << "\n" << pad << "}";
        return;
    }
    case nlohmann::ordered_json::value_t::array: {
        if (v.empty()) {
            out << "[]";
            return;
        }
        out << "[\n";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out << ",\n";
            out << inner;
            write_value(out, v[i], indent + 1);
        }
        out << "\n" << pad << "]";
        return;
    }
    case nlohmann::ordered_json::value_t::number_float: {
        const double x = v.get<double>();
        out << (std::isfinite(x) ? format_number(x) : "null");
        return;
    }
    default:
        out << v.dump();
    }
}

} // namespace

void write_json(std::ostream& out, const nlohmann::ordered_json& doc) {
    write_value(out, doc, 0);
    out << "\n";
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << fields[i];
    }
    out << '\n';
}

void write_key_values(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& rows) {
    std::size_t width = 0;
    for (const auto& [k, v] : rows) width = std::max(width, k.size());
    for (const auto& [k, v] : rows) {
        out << k << std::string(width - k.size() + 2, ' ') << v << '\n';
    }
}

void write_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) widths[c] = header[c].size();
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size() && c < widths.size(); ++c) {
            widths[c] = std::max(widths[c], row[c].size());
        }
    }
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << "  ";
            out << row[c];
            if (c + 1 < row.size()) out << std::string(widths[c] - row[c].size(), ' ');
        }
        out << '\n';
    };
    emit(header);
    for (const auto& row : rows) emit(row);
}

} // namespace wmamp::cli

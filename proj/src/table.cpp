#include "kuznets/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kuznets/error.hpp"

namespace kuznets {

std::optional<std::size_t> DelimitedTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    return std::nullopt;
}

std::string_view trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

std::vector<std::string> split_record(std::string_view line, char delim) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delim) {
            fields.emplace_back(trim(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.emplace_back(trim(current));
    return fields;
}

DelimitedTable read_delimited(std::istream& in, char delim) {
    DelimitedTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!have_header && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
            static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
            line.erase(0, 3);
        }
        if (trim(line).empty()) continue;
        if (!have_header) {
            if (line.front() == '#') {
                table.metadata.emplace_back(trim(std::string_view(line).substr(1)));
                continue;
            }
            table.header = split_record(line, delim);
            have_header = true;
            continue;
        }
        if (line.front() == '#') continue;
        table.rows.push_back(split_record(line, delim));
    }
    if (!have_header) throw Error(Errc::MissingColumn, "no header row");
    return table;
}

DelimitedTable read_delimited_file(const std::filesystem::path& path, char delim) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    return read_delimited(in, delim);
}

std::string format_number(double value) {
    if (std::isnan(value)) return {};
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::optional<double> parse_number(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

std::optional<long long> parse_integer(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    long long value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

namespace {

std::string quote_field(const std::string& field, char delim) {
    if (field.find_first_of(std::string{delim, '"', '\n'}) == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

TableWriter::TableWriter(std::vector<std::string> header, char delim)
    : header_(std::move(header)), delim_(delim) {}

TableWriter& TableWriter::meta(std::string_view key, std::string_view value) {
    meta_.push_back(std::string(key) + "=" + std::string(value));
    return *this;
}

TableWriter& TableWriter::row(std::vector<std::string> fields) {
    if (fields.size() != header_.size()) {
        throw Error(Errc::InvalidArgument, "row width " + std::to_string(fields.size()) +
                                               " does not match header width " +
                                               std::to_string(header_.size()));
    }
    rows_.push_back(std::move(fields));
    return *this;
}

void TableWriter::write(std::ostream& out) const {
    for (const auto& m : meta_) out << "# " << m << '\n';
    auto put = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out << delim_;
            out << quote_field(fields[i], delim_);
        }
        out << '\n';
    };
    put(header_);
    for (const auto& r : rows_) put(r);
}

std::string TableWriter::str() const {
    std::ostringstream out;
    write(out);
    return out.str();
}

void TableWriter::save(const std::filesystem::path& path) const { write_text_file(path, str()); }

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

}  // namespace kuznets

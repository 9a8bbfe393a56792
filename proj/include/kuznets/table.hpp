#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kuznets {

/// A header-plus-rows delimited text table. Lines starting with '#' before the
/// header are kept as metadata; blank lines are skipped.
struct DelimitedTable {
    std::vector<std::string> metadata;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column(std::string_view name) const;
};

DelimitedTable read_delimited(std::istream& in, char delim = ',');
DelimitedTable read_delimited_file(const std::filesystem::path& path, char delim = ',');

std::vector<std::string> split_record(std::string_view line, char delim);

/// Shortest representation that parses back to the same double; NaN prints empty.
std::string format_number(double value);
std::optional<double> parse_number(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

std::string_view trim(std::string_view text);

class TableWriter {
public:
    explicit TableWriter(std::vector<std::string> header, char delim = ',');

    TableWriter& meta(std::string_view key, std::string_view value);
    TableWriter& row(std::vector<std::string> fields);

    std::string str() const;
    void write(std::ostream& out) const;
    void save(const std::filesystem::path& path) const;

    std::size_t size() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::string> meta_;
    std::vector<std::vector<std::string>> rows_;
    char delim_;
};

/// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace kuznets

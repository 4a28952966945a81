#pragma once

#include <optional>
#include <string>
#include <vector>

namespace evrisk::csv {

// Plain comma-separated UTF-8 with a header row. Fields in this project never
// contain commas or quotes, so no quoting rules apply.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // each padded/truncated to header size

  int column(const std::string& name) const;
  // Throws std::invalid_argument naming the file when the column is absent.
  int require_column(const std::string& name, const std::string& context) const;
};

Table read_file(const std::string& path);
void write_file(const std::string& path, const Table& table);
std::string join_row(const std::vector<std::string>& fields);

std::optional<double> to_double(const std::string& s);
std::optional<long> to_long(const std::string& s);
std::optional<int> to_int(const std::string& s);
std::optional<bool> to_bool(const std::string& s);  // 1/0/true/false

}  // namespace evrisk::csv

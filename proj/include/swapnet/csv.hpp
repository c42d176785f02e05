#pragma once

#include <string>
#include <vector>

namespace swapnet::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 if absent
};

Table read_file(const std::string& path);
Table parse(const std::string& text);

// Shortest representation that round-trips through a double.
std::string format_double(double v);

void write_file(const std::string& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows);

double to_double(const std::string& cell, const std::string& context);
long to_long(const std::string& cell, const std::string& context);

}  // namespace swapnet::csv

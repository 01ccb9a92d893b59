#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace collapse::csv {

// Shortest representation that round-trips (at most 17 significant digits).
std::string number(double x);

class Writer {
 public:
  explicit Writer(std::vector<std::string> header);

  Writer& cell(std::string_view s);
  Writer& cell(const char* s) { return cell(std::string_view(s)); }
  Writer& cell(double x);
  Writer& cell(long long x);
  Writer& cell(int x) { return cell(static_cast<long long>(x)); }
  Writer& cell(bool b);
  void end_row();

  const std::string& str() const { return out_; }

 private:
  std::size_t columns_;
  std::size_t in_row_ = 0;
  std::string out_;
};

}  // namespace collapse::csv

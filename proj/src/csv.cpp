#include "collapse/csv.hpp"

#include <charconv>
#include <stdexcept>

namespace collapse::csv {

std::string number(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

Writer::Writer(std::vector<std::string> header) : columns_(header.size()) {
  for (const auto& h : header) cell(h);
  end_row();
}

Writer& Writer::cell(std::string_view s) {
  if (in_row_++ > 0) out_ += ',';
  if (s.find_first_of(",\"\n") == std::string_view::npos) {
    out_ += s;
    return *this;
  }
  out_ += '"';
  for (char c : s) {
    if (c == '"') out_ += '"';
    out_ += c;
  }
  out_ += '"';
  return *this;
}

Writer& Writer::cell(double x) { return cell(std::string_view(number(x))); }
Writer& Writer::cell(long long x) { return cell(std::string_view(std::to_string(x))); }
Writer& Writer::cell(bool b) { return cell(std::string_view(b ? "true" : "false")); }

void Writer::end_row() {
  if (in_row_ != columns_) throw std::logic_error("csv row has wrong number of cells");
  out_ += '\n';
  in_row_ = 0;
}

}  // namespace collapse::csv

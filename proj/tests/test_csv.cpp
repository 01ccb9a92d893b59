#include "doctest.h"

#include "collapse/csv.hpp"

#include <clocale>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>

using namespace collapse;

TEST_CASE("numbers round-trip in shortest form") {
  CHECK(csv::number(0.1) == "0.1");
  CHECK(csv::number(1.0) == "1");
  CHECK(csv::number(-2.5) == "-2.5");
  CHECK(csv::number(1e-300) == "1e-300");
  CHECK(csv::number(0.1 + 0.2) == "0.30000000000000004");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    const std::string s = csv::number(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
    std::string mantissa = s.substr(0, s.find('e'));
    std::erase_if(mantissa, [](char c) { return c < '0' || c > '9'; });
    mantissa.erase(0, mantissa.find_first_not_of('0'));
    mantissa.erase(mantissa.find_last_not_of('0') + 1);
    if (std::abs(x) < 1e17) CHECK_MESSAGE(mantissa.size() <= 17, s);
  }
}

TEST_CASE("formatting ignores the C locale") {
  const char* old = std::setlocale(LC_NUMERIC, nullptr);
  const std::string saved = old ? old : "C";
  if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8") || std::setlocale(LC_NUMERIC, "fr_FR.UTF-8"))
    CHECK(csv::number(1.5) == "1.5");
  std::setlocale(LC_NUMERIC, saved.c_str());
}

TEST_CASE("writer") {
  csv::Writer w({"a", "b", "c"});
  w.cell(1).cell(0.5).cell(true);
  w.end_row();
  w.cell("x,y").cell("say \"hi\"").cell(false);
  w.end_row();
  CHECK(w.str() == "a,b,c\n1,0.5,true\n\"x,y\",\"say \"\"hi\"\"\",false\n");
  w.cell(1);
  CHECK_THROWS(w.end_row());
}

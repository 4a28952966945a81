#include "core/dates.hpp"

#include <cstdio>
#include <stdexcept>

namespace evrisk::dates {

namespace {

bool is_leap(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int parse_int(const std::string& text, size_t pos, size_t len) {
  int v = 0;
  for (size_t i = pos; i < pos + len; ++i) {
    char c = i < text.size() ? text[i] : '\0';
    if (c < '0' || c > '9') throw std::invalid_argument("bad date component in '" + text + "'");
    v = v * 10 + (c - '0');
  }
  return v;
}

}  // namespace

Month Month::plus(int n) const {
  int idx = index() + n;
  int y = idx / 12;
  int m = idx % 12;
  if (m < 0) {
    m += 12;
    y -= 1;
  }
  return Month{y, m + 1};
}

std::string Month::str() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
  return buf;
}

Month Month::parse(const std::string& text) {
  if (text.size() != 7 || text[4] != '-') {
    throw std::invalid_argument("expected YYYY-MM, got '" + text + "'");
  }
  Month m{parse_int(text, 0, 4), parse_int(text, 5, 2)};
  if (m.month < 1 || m.month > 12) {
    throw std::invalid_argument("month out of range in '" + text + "'");
  }
  return m;
}

int days_in_month(int year, int month) {
  static const int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month < 1 || month > 12) return 0;
  if (month == 2 && is_leap(year)) return 29;
  return days[month - 1];
}

bool valid_date(int year, int month, int day) {
  return month >= 1 && month <= 12 && day >= 1 && day <= days_in_month(year, month);
}

Date last_day(Month m) { return Date{m.year, m.month, days_in_month(m.year, m.month)}; }
Date first_day(Month m) { return Date{m.year, m.month, 1}; }

std::string Date::str() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

Date Date::parse(const std::string& text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw std::invalid_argument("expected YYYY-MM-DD, got '" + text + "'");
  }
  Date d{parse_int(text, 0, 4), parse_int(text, 5, 2), parse_int(text, 8, 2)};
  if (!valid_date(d.year, d.month, d.day)) {
    throw std::invalid_argument("invalid calendar date '" + text + "'");
  }
  return d;
}

std::string MonthWindow::str() const { return start.str() + ":" + end.str(); }

MonthWindow MonthWindow::parse(const std::string& text) {
  auto sep = text.find(':');
  if (sep == std::string::npos) {
    throw std::invalid_argument("expected YYYY-MM:YYYY-MM, got '" + text + "'");
  }
  MonthWindow w{Month::parse(text.substr(0, sep)), Month::parse(text.substr(sep + 1))};
  w.validate();
  return w;
}

void MonthWindow::validate() const {
  if (end < start) {
    throw std::invalid_argument("window end " + end.str() + " precedes start " + start.str());
  }
}

void WindowPair::validate() const {
  feature.validate();
  label.validate();
  if (feature.end.index() >= label.start.index()) {
    throw std::invalid_argument("feature window " + feature.str() +
                                " must end before label window " + label.str() + " begins");
  }
}

}  // namespace evrisk::dates

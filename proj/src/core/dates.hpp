#pragma once

#include <compare>
#include <string>

namespace evrisk::dates {

// Calendar month, ordered by position in the proleptic Gregorian calendar.
struct Month {
  int year = 0;
  int month = 1;  // 1..12

  int index() const { return year * 12 + (month - 1); }
  Month plus(int n) const;

  std::string str() const;  // "YYYY-MM"
  static Month parse(const std::string& text);

  friend std::strong_ordering operator<=>(const Month& a, const Month& b) {
    return a.index() <=> b.index();
  }
  friend bool operator==(const Month& a, const Month& b) { return a.index() == b.index(); }
};

struct Date {
  int year = 0;
  int month = 1;
  int day = 1;

  Month month_of() const { return Month{year, month}; }

  std::string str() const;  // "YYYY-MM-DD"
  static Date parse(const std::string& text);

  friend auto operator<=>(const Date&, const Date&) = default;
};

int days_in_month(int year, int month);
bool valid_date(int year, int month, int day);
Date last_day(Month m);
Date first_day(Month m);

// Inclusive month range.
struct MonthWindow {
  Month start;
  Month end;

  int length() const { return end.index() - start.index() + 1; }
  bool contains(Month m) const { return start <= m && m <= end; }
  bool contains(const Date& d) const { return contains(d.month_of()); }
  // 0-based offset of m from the window start; caller checks contains() first.
  int offset(Month m) const { return m.index() - start.index(); }

  std::string str() const;  // "YYYY-MM:YYYY-MM"
  static MonthWindow parse(const std::string& text);
  void validate() const;

  friend bool operator==(const MonthWindow&, const MonthWindow&) = default;
};

// Feature months strictly precede label months; no shared month.
struct WindowPair {
  MonthWindow feature;
  MonthWindow label;
  void validate() const;
};

}  // namespace evrisk::dates

#include "radiographer/numfmt.hpp"

#include <array>
#include <charconv>
#include <stdexcept>
#include <string>
#include <system_error>

namespace radiographer {

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0 into 0
  std::array<char, 64> buffer{};
  auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  if (ec != std::errc()) throw std::runtime_error("format_number: conversion failed");
  return std::string(buffer.data(), end);
}

double parse_number(std::string_view token) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && token.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (token.empty() || ec != std::errc() || ptr != last)
    throw std::invalid_argument("not a number: '" + std::string(token) + "'");
  return value;
}

long long parse_integer(std::string_view token) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size())
    throw std::invalid_argument("not an integer: '" + std::string(token) + "'");
  return value;
}

}  // namespace radiographer

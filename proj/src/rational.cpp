#include "dtap/rational.hpp"

#include <cctype>
#include <sstream>

namespace dtap {

namespace {

bool is_plain_integer(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

std::optional<Rat> parse_rational(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    std::string num = text.substr(0, slash);
    std::string den = text.substr(slash + 1);
    if (!is_plain_integer(num) || !is_plain_integer(den)) return std::nullopt;
    Int d(den);
    if (d == 0) return std::nullopt;
    return Rat(Int(num), d);
  }
  auto dot = text.find('.');
  if (dot != std::string::npos) {
    std::string whole = text.substr(0, dot);
    std::string frac = text.substr(dot + 1);
    if (whole.empty() || whole == "-" || whole == "+") whole += "0";
    if (!is_plain_integer(whole)) return std::nullopt;
    if (frac.empty()) return Rat(Int(whole));
    for (char c : frac)
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    Int scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Int w(whole);
    Int f(frac);
    bool neg = !whole.empty() && whole[0] == '-';
    Rat r = Rat(w) + (neg ? -Rat(f, scale) : Rat(f, scale));
    return r;
  }
  if (!is_plain_integer(text)) return std::nullopt;
  return Rat(Int(text));
}

std::string rat_to_string(const Rat& value) {
  std::ostringstream os;
  os << numerator(value);
  if (denominator(value) != 1) os << "/" << denominator(value);
  return os.str();
}

std::string rat_to_decimal(const Rat& value, int digits) {
  bool neg = value < 0;
  Rat v = neg ? Rat(-value) : value;
  Int scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  Int scaled = numerator(v) * scale / denominator(v);
  Int whole = scaled / scale;
  Int frac = scaled % scale;
  std::ostringstream os;
  if (neg) os << '-';
  os << whole;
  if (digits > 0) {
    std::string f = frac.str();
    os << '.' << std::string(static_cast<std::size_t>(digits) - f.size(), '0') << f;
  }
  return os.str();
}

}  // namespace dtap

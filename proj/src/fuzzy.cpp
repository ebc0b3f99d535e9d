#include "fuzzyembed/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "fuzzyembed/errors.hpp"

namespace fuzzyembed {

std::string_view label_name(Label label) {
  switch (label) {
    case Label::Low:
      return "low";
    case Label::Medium:
      return "medium";
    case Label::High:
      return "high";
  }
  return "?";
}

Label parse_label(std::string_view name) {
  if (name == "low") return Label::Low;
  if (name == "medium") return Label::Medium;
  if (name == "high") return Label::High;
  throw ConfigError(fmt::format("unknown linguistic label '{}'", name));
}

std::string_view kind_name(FuzzyKind kind) { return kind == FuzzyKind::T1 ? "T1" : "IT2"; }

FuzzyKind parse_kind(std::string_view name) {
  if (name == "T1" || name == "t1") return FuzzyKind::T1;
  if (name == "IT2" || name == "it2") return FuzzyKind::IT2;
  throw ConfigError(fmt::format("unknown fuzzy set kind '{}' (expected T1 or IT2)", name));
}

MembershipFunction::MembershipFunction(Shape shape, double a, double b, double c)
    : shape_(shape), points_{a, b, c} {
  if (!(a <= b) || !(b <= c)) {
    throw ConfigError(fmt::format("membership breakpoints out of order: {}, {}, {}", a, b, c));
  }
}

MembershipFunction MembershipFunction::trapezoid_left(double plateau_end, double zero_point) {
  return {Shape::TrapezoidLeft, plateau_end, zero_point, zero_point};
}

MembershipFunction MembershipFunction::triangle(double left_zero, double peak, double right_zero) {
  return {Shape::Triangle, left_zero, peak, right_zero};
}

MembershipFunction MembershipFunction::trapezoid_right(double zero_point, double plateau_start) {
  return {Shape::TrapezoidRight, zero_point, plateau_start, plateau_start};
}

std::span<const double> MembershipFunction::breakpoints() const noexcept {
  return {points_.data(), shape_ == Shape::Triangle ? std::size_t{3} : std::size_t{2}};
}

// Plateau and peak tests come first so zero-width segments resolve to the
// larger neighbour.
double MembershipFunction::operator()(double x) const noexcept {
  const auto [a, b, c] = points_;
  switch (shape_) {
    case Shape::TrapezoidLeft:
      if (x <= a) return 1.0;
      if (x >= b) return 0.0;
      return (b - x) / (b - a);
    case Shape::Triangle:
      if (x == b) return 1.0;
      if (x <= a || x >= c) return 0.0;
      if (x < b) return (x - a) / (b - a);
      return (c - x) / (c - b);
    case Shape::TrapezoidRight:
      if (x >= b) return 1.0;
      if (x <= a) return 0.0;
      return (x - a) / (b - a);
  }
  return 0.0;
}

LinguisticVariable::LinguisticVariable(std::string name, FuzzyKind kind, double domain_min,
                                       double q20, double q50, double q80, double domain_max,
                                       double lower_scale)
    : name_(std::move(name)),
      kind_(kind),
      min_(domain_min),
      q20_(q20),
      q50_(q50),
      q80_(q80),
      max_(domain_max),
      lower_scale_(kind == FuzzyKind::T1 ? 1.0 : lower_scale),
      sets_{FuzzySet{Label::Low, MembershipFunction::trapezoid_left(q20, q50), lower_scale_},
            FuzzySet{Label::Medium, MembershipFunction::triangle(q20, q50, q80), lower_scale_},
            FuzzySet{Label::High, MembershipFunction::trapezoid_right(q50, q80), lower_scale_}} {
  for (double v : {domain_min, q20, q50, q80, domain_max}) {
    if (!std::isfinite(v)) throw ConfigError(fmt::format("variable '{}': non-finite bound", name_));
  }
  if (!(min_ <= q20_ && q20_ <= q50_ && q50_ <= q80_ && q80_ <= max_)) {
    throw ConfigError(fmt::format("variable '{}': quantiles out of order", name_));
  }
  if (min_ == max_) {
    throw DegeneratePartition(fmt::format("variable '{}': constant domain {}", name_, min_));
  }
  if (!(lower_scale_ > 0.0 && lower_scale_ <= 1.0)) {
    throw ConfigError(fmt::format("variable '{}': lower_scale {} not in (0, 1]", name_, lower_scale));
  }
}

TruthDegree LinguisticVariable::membership(Label label, double x) const noexcept {
  return set(label).degree(std::clamp(x, min_, max_));
}

bool operator==(const LinguisticVariable& a, const LinguisticVariable& b) noexcept {
  return a.name_ == b.name_ && a.kind_ == b.kind_ && a.min_ == b.min_ && a.q20_ == b.q20_ &&
         a.q50_ == b.q50_ && a.q80_ == b.q80_ && a.max_ == b.max_ &&
         a.lower_scale_ == b.lower_scale_;
}

namespace {

double sorted_quantile(const std::vector<double>& sorted, double q) {
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

double empirical_quantile(std::span<const double> values, double q) {
  if (values.empty()) throw Error("empirical_quantile: empty input");
  if (!(q >= 0.0 && q <= 1.0)) throw Error(fmt::format("empirical_quantile: q={} not in [0,1]", q));
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted_quantile(sorted, q);
}

LinguisticVariable build_partition(std::span<const double> values, FuzzyKind kind,
                                   std::string name) {
  if (values.empty()) throw Error(fmt::format("build_partition '{}': no values", name));
  std::vector<double> sorted(values.begin(), values.end());
  if (!std::all_of(sorted.begin(), sorted.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(fmt::format("build_partition '{}': non-finite value", name));
  }
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) {
    throw DegeneratePartition(
        fmt::format("build_partition '{}': fewer than 2 distinct values", name));
  }
  return LinguisticVariable(std::move(name), kind, sorted.front(), sorted_quantile(sorted, 0.2),
                            sorted_quantile(sorted, 0.5), sorted_quantile(sorted, 0.8),
                            sorted.back());
}

nlohmann::json to_json(const LinguisticVariable& var) {
  const auto q = var.quantiles();
  return {{"name", var.name()},
          {"kind", kind_name(var.kind())},
          {"min", var.domain_min()},
          {"quantiles", {q[0], q[1], q[2]}},
          {"max", var.domain_max()},
          {"lower_scale", var.lower_scale()}};
}

LinguisticVariable variable_from_json(const nlohmann::json& j) {
  try {
    const auto& q = j.at("quantiles");
    if (!q.is_array() || q.size() != 3) throw ConfigError("variable: quantiles must have 3 entries");
    return LinguisticVariable(j.at("name").get<std::string>(),
                              parse_kind(j.at("kind").get<std::string>()),
                              j.at("min").get<double>(), q[0].get<double>(), q[1].get<double>(),
                              q[2].get<double>(), j.at("max").get<double>(),
                              j.value("lower_scale", kDefaultLowerScale));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("malformed variable JSON: {}", e.what()));
  }
}

}  // namespace fuzzyembed

#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

namespace fuzzyembed {

enum class Label { Low = 0, Medium = 1, High = 2 };
inline constexpr std::array<Label, 3> kLabels{Label::Low, Label::Medium, Label::High};

std::string_view label_name(Label label);
/// Throws ConfigError on anything but "low", "medium" or "high".
Label parse_label(std::string_view name);

enum class FuzzyKind { T1, IT2 };

std::string_view kind_name(FuzzyKind kind);
FuzzyKind parse_kind(std::string_view name);

/// Membership interval. Type-1 sets report lower == upper.
struct TruthDegree {
  double lower = 0.0;
  double upper = 0.0;

  friend bool operator==(const TruthDegree&, const TruthDegree&) = default;
};

/// Piecewise-linear membership function over feature units.
///
/// Breakpoints by shape:
///   TrapezoidLeft  {plateau_end, zero_point}      1 up to a, falls to 0 at b
///   Triangle       {left_zero, peak, right_zero}  0 at a, 1 at b, 0 at c
///   TrapezoidRight {zero_point, plateau_start}    0 up to a, rises to 1 at b
///
/// Coincident breakpoints form zero-width segments; at such a point the
/// function takes the larger of the adjacent pieces.
class MembershipFunction {
 public:
  enum class Shape { TrapezoidLeft, Triangle, TrapezoidRight };

  static MembershipFunction trapezoid_left(double plateau_end, double zero_point);
  static MembershipFunction triangle(double left_zero, double peak, double right_zero);
  static MembershipFunction trapezoid_right(double zero_point, double plateau_start);

  double operator()(double x) const noexcept;

  Shape shape() const noexcept { return shape_; }
  std::span<const double> breakpoints() const noexcept;

 private:
  MembershipFunction(Shape shape, double a, double b, double c);

  Shape shape_;
  std::array<double, 3> points_;
};

/// One linguistic label. For IT2 sets the upper function is `mf` and the
/// lower function is `lower_scale * mf`; T1 sets use lower_scale = 1.
struct FuzzySet {
  Label label;
  MembershipFunction mf;
  double lower_scale = 1.0;

  TruthDegree degree(double x) const noexcept {
    const double upper = mf(x);
    return {lower_scale * upper, upper};
  }
};

inline constexpr double kDefaultLowerScale = 0.8;

/// A feature with its quantile-derived low/medium/high partition.
class LinguisticVariable {
 public:
  /// Construct from the quantities that fully determine the partition.
  /// Throws DegeneratePartition when min == max and ConfigError when the
  /// quantiles are out of order or lower_scale is outside (0, 1].
  LinguisticVariable(std::string name, FuzzyKind kind, double domain_min, double q20, double q50,
                     double q80, double domain_max, double lower_scale = kDefaultLowerScale);

  const std::string& name() const noexcept { return name_; }
  FuzzyKind kind() const noexcept { return kind_; }
  double domain_min() const noexcept { return min_; }
  double domain_max() const noexcept { return max_; }
  std::array<double, 3> quantiles() const noexcept { return {q20_, q50_, q80_}; }
  /// 1.0 for T1 variables.
  double lower_scale() const noexcept { return lower_scale_; }
  const FuzzySet& set(Label label) const noexcept { return sets_[static_cast<int>(label)]; }

  /// Degree of `x` in `label`; x is clamped to [domain_min, domain_max].
  TruthDegree membership(Label label, double x) const noexcept;

  friend bool operator==(const LinguisticVariable& a, const LinguisticVariable& b) noexcept;

 private:
  std::string name_;
  FuzzyKind kind_;
  double min_, q20_, q50_, q80_, max_;
  double lower_scale_;
  std::array<FuzzySet, 3> sets_;
};

/// Linear-interpolation quantile: h = q (n - 1) on the sorted sample,
/// interpolated between neighbours. Throws Error on empty input.
double empirical_quantile(std::span<const double> values, double q);

/// Build the three-label partition of a feature from its sample.
/// Throws DegeneratePartition on fewer than two distinct values and
/// Error on empty or non-finite input.
LinguisticVariable build_partition(std::span<const double> values, FuzzyKind kind,
                                   std::string name);

nlohmann::json to_json(const LinguisticVariable& var);
LinguisticVariable variable_from_json(const nlohmann::json& j);

}  // namespace fuzzyembed

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace abpole {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Thrown when an operation is called outside its documented preconditions.
class PreconditionError : public std::invalid_argument {
public:
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when a numerical procedure breaks down or fails to converge.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Point2& operator+=(Point2 o) { x += o.x; y += o.y; return *this; }
  constexpr Point2& operator-=(Point2 o) { x -= o.x; y -= o.y; return *this; }
  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point2 a, Point2 b) = default;
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 polar(double r, double t) { return {r * std::cos(t), r * std::sin(t)}; }

/// Reduce an angle to [lo, lo + 2pi).
inline double wrap_angle(double t, double lo = 0.0) {
  double w = std::fmod(t - lo, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w -= kTwoPi;
  return lo + w;
}

/// Twice the signed area of (a, b, c); positive when counterclockwise.
/// Exact sign, via an adaptive fallback to extended precision.
double orient2d(Point2 a, Point2 b, Point2 c);

/// Positive when d lies strictly inside the circle through the
/// counterclockwise triangle (a, b, c). Exact sign.
double incircle(Point2 a, Point2 b, Point2 c, Point2 d);

Point2 circumcenter(Point2 a, Point2 b, Point2 c);

inline double signed_area(Point2 a, Point2 b, Point2 c) {
  return 0.5 * cross(b - a, c - a);
}

}  // namespace abpole

#include "abpole/geometry.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <limits>

namespace abpole {

namespace {

// 512 mantissa bits hold every product of four coordinate differences
// exactly for the coordinate ranges meshes use here.
using Exact = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<512, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

constexpr double kEps = std::numeric_limits<double>::epsilon();

double orient_exact(Point2 a, Point2 b, Point2 c) {
  Exact acx = Exact(a.x) - Exact(c.x), bcx = Exact(b.x) - Exact(c.x);
  Exact acy = Exact(a.y) - Exact(c.y), bcy = Exact(b.y) - Exact(c.y);
  Exact det = acx * bcy - acy * bcx;
  return det.sign() > 0 ? 1.0 : (det.sign() < 0 ? -1.0 : 0.0);
}

double incircle_exact(Point2 a, Point2 b, Point2 c, Point2 d) {
  Exact adx = Exact(a.x) - Exact(d.x), ady = Exact(a.y) - Exact(d.y);
  Exact bdx = Exact(b.x) - Exact(d.x), bdy = Exact(b.y) - Exact(d.y);
  Exact cdx = Exact(c.x) - Exact(d.x), cdy = Exact(c.y) - Exact(d.y);
  Exact alift = adx * adx + ady * ady;
  Exact blift = bdx * bdx + bdy * bdy;
  Exact clift = cdx * cdx + cdy * cdy;
  Exact det = alift * (bdx * cdy - bdy * cdx) + blift * (cdx * ady - cdy * adx) +
              clift * (adx * bdy - ady * bdx);
  return det.sign() > 0 ? 1.0 : (det.sign() < 0 ? -1.0 : 0.0);
}

}  // namespace

double orient2d(Point2 a, Point2 b, Point2 c) {
  const double detleft = (a.x - c.x) * (b.y - c.y);
  const double detright = (a.y - c.y) * (b.x - c.x);
  const double det = detleft - detright;
  const double bound = (3.0 * kEps + 16.0 * kEps * kEps) * (std::abs(detleft) + std::abs(detright));
  if (std::abs(det) > bound) return det;
  return orient_exact(a, b, c);
}

double incircle(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                           (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                           (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  const double bound = (10.0 * kEps + 96.0 * kEps * kEps) * permanent;
  if (std::abs(det) > bound) return det;
  return incircle_exact(a, b, c, d);
}

Point2 circumcenter(Point2 a, Point2 b, Point2 c) {
  const Point2 ba = b - a, ca = c - a;
  const double d = 2.0 * cross(ba, ca);
  const double bl = dot(ba, ba), cl = dot(ca, ca);
  return {a.x + (ca.y * bl - ba.y * cl) / d, a.y + (ba.x * cl - ca.x * bl) / d};
}

}  // namespace abpole

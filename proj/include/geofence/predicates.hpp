#pragma once

// Orientation and in-circle tests with a floating-point filter and an exact
// rational fallback. The filter bounds follow Shewchuk's "stage A" error
// bounds; anything inside the uncertainty band is re-evaluated exactly.

#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

namespace geofence::detail {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr double kOrientErrBound = 3.3306690738754716e-16;
inline constexpr double kInCircleErrBound = 1.1102230246251577e-15;

inline int sign_of(const Rational& v) { return v.sign(); }

inline int orient_exact(double ax, double ay, double bx, double by, double cx, double cy)
{
    const Rational acx = Rational(ax) - Rational(cx);
    const Rational bcx = Rational(bx) - Rational(cx);
    const Rational acy = Rational(ay) - Rational(cy);
    const Rational bcy = Rational(by) - Rational(cy);
    return sign_of(acx * bcy - acy * bcx);
}

/// Sign of the oriented area of (a, b, c): +1 counter-clockwise, -1 clockwise,
/// 0 collinear. Exact for all finite inputs.
inline int orient_sign(double ax, double ay, double bx, double by, double cx, double cy)
{
    const double detleft = (ax - cx) * (by - cy);
    const double detright = (ay - cy) * (bx - cx);
    const double det = detleft - detright;
    double detsum = 0.0;
    if (detleft > 0.0) {
        if (detright <= 0.0) return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
        detsum = detleft + detright;
    } else if (detleft < 0.0) {
        if (detright >= 0.0) return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
        detsum = -detleft - detright;
    } else {
        return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
    }
    const double bound = kOrientErrBound * detsum;
    if (det >= bound) return det > 0.0 ? 1 : 0;
    if (-det >= bound) return det < 0.0 ? -1 : 0;
    return orient_exact(ax, ay, bx, by, cx, cy);
}

inline int incircle_exact(double ax, double ay, double bx, double by, double cx, double cy,
                          double dx, double dy)
{
    const Rational adx = Rational(ax) - Rational(dx), ady = Rational(ay) - Rational(dy);
    const Rational bdx = Rational(bx) - Rational(dx), bdy = Rational(by) - Rational(dy);
    const Rational cdx = Rational(cx) - Rational(dx), cdy = Rational(cy) - Rational(dy);
    const Rational alift = adx * adx + ady * ady;
    const Rational blift = bdx * bdx + bdy * bdy;
    const Rational clift = cdx * cdx + cdy * cdy;
    const Rational det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy)
                         + clift * (adx * bdy - bdx * ady);
    return sign_of(det);
}

/// +1 when d lies strictly inside the circle through the counter-clockwise
/// triangle (a, b, c), -1 strictly outside, 0 on the circle.
inline int incircle_sign(double ax, double ay, double bx, double by, double cx, double cy,
                         double dx, double dy)
{
    const double adx = ax - dx, ady = ay - dy;
    const double bdx = bx - dx, bdy = by - dy;
    const double cdx = cx - dx, cdy = cy - dy;
    const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    const double cdxady = cdx * ady, adxcdy = adx * cdy;
    const double adxbdy = adx * bdy, bdxady = bdx * ady;
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;
    const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy)
                       + clift * (adxbdy - bdxady);
    const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift
                             + (std::abs(cdxady) + std::abs(adxcdy)) * blift
                             + (std::abs(adxbdy) + std::abs(bdxady)) * clift;
    const double bound = kInCircleErrBound * permanent;
    if (det > bound) return 1;
    if (-det > bound) return -1;
    return incircle_exact(ax, ay, bx, by, cx, cy, dx, dy);
}

}  // namespace geofence::detail

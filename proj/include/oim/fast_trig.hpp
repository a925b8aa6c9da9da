#pragma once

// Branch-free sin/cos for arguments in [-2 pi, 4 pi], written so the compiler
// can vectorize loops over phase arrays. Quadrant reduction by pi/2 in two
// parts (Cody-Waite) followed by the fdlibm minimax kernels on [-pi/4, pi/4].
// Absolute error stays below 4e-16 on the supported range.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <span>

namespace oim {

struct SinCos {
  double sin;
  double cos;
};

inline SinCos fast_sincos(double x) noexcept {
  constexpr double kTwoOverPi = 6.36619772367581382433e-01;
  constexpr double kPio2Hi = 1.57079632673412561417e+00;
  constexpr double kPio2Lo = 6.07710050650619224932e-11;

  // Adding 1.5 * 2^52 rounds to the nearest integer and leaves it in the low
  // mantissa bits, which gives the quadrant without a float-to-int conversion.
  constexpr double kRoundShift = 0x1.8p52;
  const double shifted = x * kTwoOverPi + kRoundShift;
  const double k = shifted - kRoundShift;
  const double r = (x - k * kPio2Hi) - k * kPio2Lo;
  const double z = r * r;

  const double s = r + r * z *
                           (-1.66666666666666324348e-01 +
                            z * (8.33333333332248946124e-03 +
                                 z * (-1.98412698298579493134e-04 +
                                      z * (2.75573137070700676789e-06 +
                                           z * (-2.50507602534068634195e-08 + z * 1.58969099521155010221e-10)))));
  const double c = 1.0 - 0.5 * z +
                   z * z *
                       (4.16666666666666019037e-02 +
                        z * (-1.38888888888741095749e-03 +
                             z * (2.48015872894767294178e-05 +
                                  z * (-2.75573143513906633035e-07 +
                                       z * (2.08757232129817482790e-09 + z * -1.13596475577881948265e-11)))));

  // quadrant q = k mod 4: (sin, cos) -> (s, c), (c, -s), (-s, -c), (-c, s)
  const auto q = std::bit_cast<std::uint64_t>(shifted);
  const bool odd = (q & 1) != 0;
  const double sin_out = odd ? c : s;
  const double cos_out = odd ? s : c;
  return {(q & 2) ? -sin_out : sin_out, ((q + 1) & 2) ? -cos_out : cos_out};
}

inline void fast_sincos(std::span<const double> x, std::span<double> sin_out, std::span<double> cos_out) noexcept {
  const std::size_t n = x.size();
  const double* __restrict in = x.data();
  double* __restrict so = sin_out.data();
  double* __restrict co = cos_out.data();
  for (std::size_t i = 0; i < n; ++i) {
    const auto sc = fast_sincos(in[i]);
    so[i] = sc.sin;
    co[i] = sc.cos;
  }
}

}  // namespace oim

#pragma once

#include <complex>

namespace microdisk::numerics
{

using cplx = std::complex<double>;

inline constexpr int kMaxBesselOrder = 2000;
inline constexpr double kMaxBesselArgument = 5000.0;

/// Complex value stored as mantissa * 2^exponent. Used where Bessel values of high
/// order leave the double range (Y_l for l >> |z|, J_l deep inside the caustic).
struct ScaledComplex
{
    cplx mantissa{0.0, 0.0};
    long exponent = 0;

    /// Plain value; may underflow to zero or overflow to infinity.
    cplx value() const;
    /// this / other as a plain value.
    cplx ratio(const ScaledComplex &other) const;
};

ScaledComplex operator*(const ScaledComplex &a, const ScaledComplex &b);
ScaledComplex operator+(const ScaledComplex &a, const ScaledComplex &b);
ScaledComplex scaled_from(cplx v);

/// J_n(z). Throws RangeError outside n <= 2000, |z| <= 5000.
cplx bessel_j(int n, cplx z);

/// Y_n(z). Requires Re z >= 0; z = 0 raises SingularityError.
cplx bessel_y(int n, cplx z);

/// H^(1)_n(z) = J_n + i Y_n. Same domain as bessel_y.
cplx hankel1(int n, cplx z);

ScaledComplex bessel_j_scaled(int n, cplx z);
ScaledComplex bessel_y_scaled(int n, cplx z);
ScaledComplex hankel1_scaled(int n, cplx z);

/// J_{n+1}(z) / J_n(z). Independent of normalization, so it stays accurate where
/// J_n itself underflows.
cplx bessel_j_ratio(int n, cplx z);

/// H^(1)_{n+1}(z) / H^(1)_n(z). Where Y dominates J the ratio is formed as
/// Y_{n+1}/Y_n + 2/(pi z H_n Y_n), which keeps the tiny imaginary part accurate.
cplx hankel1_ratio(int n, cplx z);

} // namespace microdisk::numerics

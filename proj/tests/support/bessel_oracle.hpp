#pragma once

// Extended-precision reference values for J_n and Y_n (test use only).
// J: Miller backward recurrence in 50-digit arithmetic normalized by
//    J_0 + 2 sum J_{2k} = 1, started far above the turning point.
// Y: Neumann series for Y_0, Y_1 followed by forward recurrence.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <cmath>
#include <complex>
#include <vector>

namespace oracle
{

using real50 = boost::multiprecision::cpp_bin_float_50;
using cplx50 = boost::multiprecision::cpp_complex_50;

inline std::complex<double> to_double(const cplx50 &v)
{
    return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

// Normalized J_0 .. J_top
inline std::vector<cplx50> j_sequence(int nmax, std::complex<double> zd)
{
    const cplx50 z(zd.real(), zd.imag());
    const double az = std::abs(zd);
    int top = static_cast<int>(std::max<double>(nmax, az) + 60 + 30 * std::cbrt(az + 1.0));
    top += top % 2;
    std::vector<cplx50> f(top + 2, cplx50(0));
    f[top] = cplx50(real50("1e-40"));
    for (int k = top; k >= 1; --k)
        f[k - 1] = real50(2 * k) / z * f[k] - f[k + 1];
    cplx50 norm = f[0];
    for (int k = 2; k <= top; k += 2)
        norm += 2 * f[k];
    for (auto &v : f)
        v /= norm;
    return f;
}

inline std::complex<double> j(int n, std::complex<double> z)
{
    return to_double(j_sequence(n, z)[n]);
}

inline cplx50 y_n(int n, std::complex<double> zd, std::vector<cplx50> *j_out = nullptr)
{
    const cplx50 z(zd.real(), zd.imag());
    const auto jj = j_sequence(std::max(n, 2), zd);
    const real50 pi = boost::math::constants::pi<real50>();
    const real50 gamma = boost::math::constants::euler<real50>();
    const cplx50 lg = log(z / 2) + gamma;
    cplx50 s0(0), s1(0);
    const int top = static_cast<int>(jj.size()) - 2;
    for (int k = 1; 2 * k + 1 <= top; ++k)
    {
        const int sign = (k % 2 == 0) ? 1 : -1;
        s0 += real50(sign) * jj[2 * k] / real50(k);
        s1 += real50(sign) * (jj[2 * k - 1] - jj[2 * k + 1]) / real50(k);
    }
    cplx50 y0 = 2 / pi * (lg * jj[0] - 2 * s0);
    cplx50 y1 = 2 / pi * (lg * jj[1] - jj[0] / z + s1);
    if (j_out)
        *j_out = jj;
    if (n == 0)
        return y0;
    for (int k = 1; k < n; ++k)
    {
        cplx50 y2 = real50(2 * k) / z * y1 - y0;
        y0 = y1;
        y1 = y2;
    }
    return y1;
}

inline std::complex<double> y(int n, std::complex<double> z)
{
    return to_double(y_n(n, z));
}

} // namespace oracle

#include "microdisk/numerics/bessel.hpp"

#include "microdisk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace microdisk::numerics
{

namespace
{

constexpr int kRescaleBits = 500;
const double kRescaleUp = std::ldexp(1.0, kRescaleBits);
const double kRescaleDown = std::ldexp(1.0, -kRescaleBits);
constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = std::numbers::egamma;
constexpr double kAsymptoticThreshold = 20.0;

double max_component(cplx v)
{
    return std::max(std::abs(v.real()), std::abs(v.imag()));
}

cplx ldexp_c(cplx v, long e)
{
    if (e > 4000)
        e = 4000;
    if (e < -4000)
        e = -4000;
    return {std::ldexp(v.real(), static_cast<int>(e)), std::ldexp(v.imag(), static_cast<int>(e))};
}

void check_domain(int n, cplx z)
{
    if (n < 0 || n > kMaxBesselOrder)
        throw RangeError("Bessel order " + std::to_string(n) + " outside [0, 2000]");
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > kMaxBesselArgument)
        throw RangeError("Bessel argument outside |z| <= 5000");
}

void check_second_kind(cplx z)
{
    if (z == cplx(0.0, 0.0))
        throw SingularityError("Y_n and H_n are singular at z = 0");
    if (z.real() < 0.0)
        throw RangeError("Y_n and H_n are evaluated on Re z >= 0 only");
}

cplx checked(cplx v, const char *what)
{
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw RangeError(std::string(what) + " exceeds double range");
    return v;
}

// Hankel asymptotic expansion for order 0 or 1. Returns (J_nu, Y_nu).
std::pair<cplx, cplx> asymptotic_jy(int nu, cplx z)
{
    const double mu = 4.0 * nu * nu;
    cplx p(1.0, 0.0), q(0.0, 0.0);
    double a = 1.0;
    cplx zpow(1.0, 0.0);
    const cplx zinv = 1.0 / z;
    double last = 1.0;
    for (int k = 1; k < 200; ++k)
    {
        a *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k);
        zpow *= zinv;
        const cplx term = a * zpow;
        const double mag = std::abs(term);
        if (mag > last)
            break;
        last = mag;
        // P takes even k with sign (-1)^(k/2); Q takes odd k with sign (-1)^((k-1)/2)
        const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0)
            p += sign * term;
        else
            q += sign * term;
        if (mag < 1e-17 * (std::abs(p) + std::abs(q)))
            break;
    }
    const cplx chi = z - (0.5 * nu + 0.25) * kPi;
    const cplx pref = std::sqrt(2.0 / (kPi * z));
    const cplx c = std::cos(chi);
    const cplx s = std::sin(chi);
    return {pref * (p * c - q * s), pref * (p * s + q * c)};
}

int miller_start(int n, double az)
{
    int start = static_cast<int>(std::max<double>(n, az) + 20.0 + 16.0 * std::cbrt(az / 2.0));
    return start + (start % 2);
}

struct MillerSweep
{
    // f_n, f_{n+1} relative to the final scale of f_0 (exponent <= 0)
    ScaledComplex fn, fn1;
    cplx f0, f1;
    cplx norm;         // J_0 + 2 sum (is)^k J_k accumulated unnormalized
    cplx neumann_y0;   // sum (-1)^k f_{2k}/k
    cplx neumann_y1;   // sum (-1)^k (f_{2k-1} - f_{2k+1})/k
    double s = 1.0;
};

// Backward recurrence from a start index well above max(n, |z|).
// Requires Re z >= 0 and z != 0.
MillerSweep miller(int n, cplx z)
{
    MillerSweep out;
    const int top = miller_start(n + 1, std::abs(z));
    out.s = z.imag() > 0.0 ? -1.0 : 1.0;
    const cplx is(0.0, out.s);
    const cplx is_pow[4] = {cplx(1.0, 0.0), is, cplx(-1.0, 0.0), -is};

    const cplx two_over_z = 2.0 / z;
    cplx f_next2(0.0, 0.0);
    cplx f_next(0.0, 0.0);
    cplx f_cur(1e-30, 0.0);
    long shift = 0, shift_n = 0, shift_n1 = 0;
    cplx sum_norm(0.0, 0.0), sum_y0(0.0, 0.0), sum_y1(0.0, 0.0);

    // f_cur = f_k, f_next = f_{k+1}, f_next2 = f_{k+2}
    auto accumulate = [&](int k) {
        if (k >= 1)
            sum_norm += 2.0 * is_pow[k % 4] * f_cur;
        if (k >= 2 && k % 2 == 0)
        {
            const int m = k / 2;
            sum_y0 += (m % 2 == 0 ? 1.0 : -1.0) * f_cur / static_cast<double>(m);
        }
        if (k % 2 == 1)
        {
            const int m = (k + 1) / 2;
            sum_y1 += (m % 2 == 0 ? 1.0 : -1.0) * (f_cur - f_next2) / static_cast<double>(m);
        }
    };

    accumulate(top);
    for (int k = top; k >= 1; --k)
    {
        const cplx f_prev = (static_cast<double>(k) * two_over_z) * f_cur - f_next;
        f_next2 = f_next;
        f_next = f_cur;
        f_cur = f_prev;
        if (max_component(f_cur) > kRescaleUp)
        {
            f_cur *= kRescaleDown;
            f_next *= kRescaleDown;
            f_next2 *= kRescaleDown;
            sum_norm *= kRescaleDown;
            sum_y0 *= kRescaleDown;
            sum_y1 *= kRescaleDown;
            shift += kRescaleBits;
        }
        accumulate(k - 1);
        if (k - 1 == n + 1)
        {
            out.fn1.mantissa = f_cur;
            shift_n1 = shift;
        }
        else if (k - 1 == n)
        {
            out.fn.mantissa = f_cur;
            shift_n = shift;
        }
    }
    out.f0 = f_cur;
    out.f1 = f_next;
    out.norm = f_cur + sum_norm;
    out.neumann_y0 = sum_y0;
    out.neumann_y1 = sum_y1;
    // values captured before later rescales are relatively smaller
    out.fn.exponent = shift_n - shift;
    out.fn1.exponent = shift_n1 - shift;
    return out;
}

struct FirstKind
{
    ScaledComplex jn, jn1;
    cplx j0, j1;
    MillerSweep sweep;
};

// J_n and J_{n+1} for Re z >= 0, z != 0.
FirstKind first_kind(int n, cplx z)
{
    FirstKind out;
    out.sweep = miller(n, z);
    const MillerSweep &m = out.sweep;
    cplx scale;
    if (std::abs(z) < kAsymptoticThreshold)
    {
        scale = std::exp(cplx(0.0, m.s) * z) / m.norm;
        out.j0 = m.f0 * scale;
        out.j1 = m.f1 * scale;
    }
    else
    {
        const cplx j0 = asymptotic_jy(0, z).first;
        const cplx j1 = asymptotic_jy(1, z).first;
        scale = std::abs(m.f0) >= std::abs(m.f1) ? j0 / m.f0 : j1 / m.f1;
        out.j0 = j0;
        out.j1 = j1;
    }
    out.jn = {m.fn.mantissa * scale, m.fn.exponent};
    out.jn1 = {m.fn1.mantissa * scale, m.fn1.exponent};
    return out;
}

// Y_0, Y_1 for Re z >= 0, z != 0.
std::pair<cplx, cplx> y01(cplx z, const FirstKind &fk)
{
    if (std::abs(z) >= kAsymptoticThreshold)
        return {asymptotic_jy(0, z).second, asymptotic_jy(1, z).second};
    const MillerSweep &m = fk.sweep;
    const cplx scale = std::exp(cplx(0.0, m.s) * z) / m.norm;
    const cplx log_term = std::log(0.5 * z) + kEulerGamma;
    const cplx y0 = (2.0 / kPi) * (log_term * fk.j0 - 2.0 * m.neumann_y0 * scale);
    const cplx y1 = (2.0 / kPi) * (log_term * fk.j1 - fk.j0 / z + m.neumann_y1 * scale);
    return {y0, y1};
}

// Forward recurrence for Y_n, Y_{n+1}.
std::pair<ScaledComplex, ScaledComplex> second_kind(int n, cplx z, const FirstKind &fk)
{
    auto [y_prev, y_cur] = y01(z, fk);
    if (n == 0)
        return {{y_prev, 0}, {y_cur, 0}};
    long shift = 0;
    const cplx two_over_z = 2.0 / z;
    for (int k = 1; k < n; ++k)
    {
        const cplx y_next = (static_cast<double>(k) * two_over_z) * y_cur - y_prev;
        y_prev = y_cur;
        y_cur = y_next;
        if (max_component(y_cur) > kRescaleUp)
        {
            y_cur *= kRescaleDown;
            y_prev *= kRescaleDown;
            shift += kRescaleBits;
        }
    }
    const cplx y_n1 = (static_cast<double>(n) * two_over_z) * y_cur - y_prev;
    return {{y_cur, shift}, {y_n1, shift}};
}

// Reflection to Re z >= 0 for the first kind.
cplx reflect_sign(int n)
{
    return (n % 2 == 0) ? cplx(1.0, 0.0) : cplx(-1.0, 0.0);
}

} // namespace

cplx ScaledComplex::value() const
{
    return ldexp_c(mantissa, exponent);
}

cplx ScaledComplex::ratio(const ScaledComplex &other) const
{
    return ldexp_c(mantissa / other.mantissa, exponent - other.exponent);
}

ScaledComplex operator*(const ScaledComplex &a, const ScaledComplex &b)
{
    return {a.mantissa * b.mantissa, a.exponent + b.exponent};
}

ScaledComplex operator+(const ScaledComplex &a, const ScaledComplex &b)
{
    if (a.mantissa == cplx(0.0, 0.0))
        return b;
    if (b.mantissa == cplx(0.0, 0.0))
        return a;
    const long e = std::max(a.exponent, b.exponent);
    return {ldexp_c(a.mantissa, a.exponent - e) + ldexp_c(b.mantissa, b.exponent - e), e};
}

ScaledComplex scaled_from(cplx v)
{
    return {v, 0};
}

ScaledComplex bessel_j_scaled(int n, cplx z)
{
    check_domain(n, z);
    if (z == cplx(0.0, 0.0))
        return {n == 0 ? cplx(1.0, 0.0) : cplx(0.0, 0.0), 0};
    if (z.real() < 0.0)
    {
        ScaledComplex r = first_kind(n, -z).jn;
        r.mantissa *= reflect_sign(n);
        return r;
    }
    return first_kind(n, z).jn;
}

cplx bessel_j(int n, cplx z)
{
    return checked(bessel_j_scaled(n, z).value(), "J_n");
}

ScaledComplex bessel_y_scaled(int n, cplx z)
{
    check_domain(n, z);
    check_second_kind(z);
    const FirstKind fk = first_kind(n, z);
    return second_kind(n, z, fk).first;
}

cplx bessel_y(int n, cplx z)
{
    return checked(bessel_y_scaled(n, z).value(), "Y_n");
}

ScaledComplex hankel1_scaled(int n, cplx z)
{
    check_domain(n, z);
    check_second_kind(z);
    const FirstKind fk = first_kind(n, z);
    const ScaledComplex yn = second_kind(n, z, fk).first;
    return fk.jn + ScaledComplex{cplx(0.0, 1.0) * yn.mantissa, yn.exponent};
}

cplx hankel1(int n, cplx z)
{
    return checked(hankel1_scaled(n, z).value(), "H_n");
}

cplx bessel_j_ratio(int n, cplx z)
{
    check_domain(n + 1, z);
    if (z == cplx(0.0, 0.0))
        throw SingularityError("J_{n+1}/J_n at z = 0");
    cplx sign(1.0, 0.0);
    if (z.real() < 0.0)
    {
        z = -z;
        sign = -1.0;
    }
    const MillerSweep m = miller(n, z);
    return sign * m.fn1.ratio(m.fn);
}

cplx hankel1_ratio(int n, cplx z)
{
    check_domain(n + 1, z);
    check_second_kind(z);
    const FirstKind fk = first_kind(n, z);
    const auto [yn, yn1] = second_kind(n, z, fk);
    const ScaledComplex i_yn{cplx(0.0, 1.0) * yn.mantissa, yn.exponent};
    const ScaledComplex i_yn1{cplx(0.0, 1.0) * yn1.mantissa, yn1.exponent};
    const ScaledComplex hn = fk.jn + i_yn;
    const double log_y = std::log2(std::abs(yn.mantissa)) + yn.exponent;
    const double log_j = std::log2(std::abs(fk.jn.mantissa)) + fk.jn.exponent;
    if (log_y > log_j)
    {
        const ScaledComplex denom = hn * yn;
        const ScaledComplex two_over_piz = scaled_from(2.0 / (kPi * z));
        return yn1.ratio(yn) + two_over_piz.ratio(denom);
    }
    const ScaledComplex hn1 = fk.jn1 + i_yn1;
    return hn1.ratio(hn);
}

} // namespace microdisk::numerics

#include "microdisk/constants.hpp"
#include "microdisk/errors.hpp"
#include "microdisk/fdtd.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include <algorithm>
#include <cmath>

namespace microdisk::fdtd
{

namespace
{

struct Candidate
{
    std::size_t index;
    double depth;
    double width; // FWHM estimate, Hz
};

// Baseline (linear) minus a sum of Lorentzian dips, in scaled frequency u = (f - fc) / scale.
// Parameters: b0, b1, then (u_j, log half-width_j, depth_j) per dip.
struct DipModel
{
    using Scalar = double;
    enum
    {
        InputsAtCompileTime = Eigen::Dynamic,
        ValuesAtCompileTime = Eigen::Dynamic
    };
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;

    std::vector<double> u, t;
    int n_dips = 0;

    int inputs() const { return 2 + 3 * n_dips; }
    int values() const { return static_cast<int>(u.size()); }

    static double eval(const Eigen::VectorXd &p, int n, double x)
    {
        double y = p[0] + p[1] * x;
        for (int j = 0; j < n; ++j)
        {
            const double hw = std::exp(p[3 + 3 * j]);
            const double d = (x - p[2 + 3 * j]) / hw;
            y -= p[4 + 3 * j] / (1.0 + d * d);
        }
        return y;
    }

    int operator()(const Eigen::VectorXd &p, Eigen::VectorXd &r) const
    {
        for (std::size_t i = 0; i < u.size(); ++i)
            r[static_cast<Eigen::Index>(i)] = eval(p, n_dips, u[i]) - t[i];
        return 0;
    }
};

std::vector<Candidate> find_candidates(const Spectrum &s, double min_depth)
{
    const auto &T = s.transmission;
    const auto &f = s.frequencies;
    const std::size_t n = T.size();
    std::vector<Candidate> out;
    for (std::size_t i = 1; i + 1 < n; ++i)
    {
        if (!(T[i] < T[i - 1] && T[i] <= T[i + 1]))
            continue;
        double left = T[i], right = T[i];
        std::size_t a = i, b = i;
        while (a > 0 && T[a - 1] >= T[i])
            left = std::max(left, T[--a]);
        while (b + 1 < n && T[b + 1] >= T[i])
            right = std::max(right, T[++b]);
        const double prominence = std::min(left, right) - T[i];
        if (prominence < min_depth)
            continue;
        const double half = T[i] + 0.5 * prominence;
        std::size_t lo = i, hi = i;
        while (lo > a && T[lo] < half)
            --lo;
        while (hi < b && T[hi] < half)
            ++hi;
        const double df = f[1] - f[0];
        out.push_back({i, prominence, std::max(f[hi] - f[lo], 2.0 * df)});
    }
    return out;
}

} // namespace

std::vector<Resonance> extract_resonances(const Spectrum &spectrum, const ResonanceOptions &opts)
{
    const auto &f = spectrum.frequencies;
    const auto &T = spectrum.transmission;
    if (f.size() != T.size() || f.size() < 5)
        throw ValidationError("spectrum", "need at least five matching samples");
    for (std::size_t i = 1; i < f.size(); ++i)
        if (!(f[i] > f[i - 1]))
            throw ValidationError("spectrum", "frequencies must be strictly ascending");
    const double df = (f.back() - f.front()) / static_cast<double>(f.size() - 1);

    const std::vector<Candidate> cands = find_candidates(spectrum, opts.min_depth);
    std::vector<Resonance> out;

    // group dips whose fit windows overlap
    std::size_t g0 = 0;
    while (g0 < cands.size())
    {
        std::size_t g1 = g0 + 1;
        while (g1 < cands.size() &&
               f[cands[g1].index] - 2.0 * cands[g1].width < f[cands[g1 - 1].index] + 2.0 * cands[g1 - 1].width)
            ++g1;

        const double f_lo = f[cands[g0].index] - 2.5 * cands[g0].width;
        const double f_hi = f[cands[g1 - 1].index] + 2.5 * cands[g1 - 1].width;
        const double fc = 0.5 * (f_lo + f_hi);
        const double scale = 0.5 * (f_hi - f_lo);

        DipModel model;
        model.n_dips = static_cast<int>(g1 - g0);
        for (std::size_t i = 0; i < f.size(); ++i)
            if (f[i] >= f_lo && f[i] <= f_hi)
            {
                model.u.push_back((f[i] - fc) / scale);
                model.t.push_back(T[i]);
            }

        Eigen::VectorXd p(model.inputs());
        double base = 0.0;
        for (std::size_t j = g0; j < g1; ++j)
            base = std::max(base, T[cands[j].index] + cands[j].depth);
        p[0] = base;
        p[1] = 0.0;
        for (std::size_t j = g0; j < g1; ++j)
        {
            const int o = 2 + 3 * static_cast<int>(j - g0);
            p[o] = (f[cands[j].index] - fc) / scale;
            p[o + 1] = std::log(0.5 * cands[j].width / scale);
            p[o + 2] = cands[j].depth;
        }

        bool fit_ok = model.values() > model.inputs();
        if (fit_ok)
        {
            Eigen::NumericalDiff<DipModel> diff(model);
            Eigen::LevenbergMarquardt<Eigen::NumericalDiff<DipModel>> lm(diff);
            lm.parameters.maxfev = 4000;
            lm.parameters.xtol = 1e-12;
            lm.parameters.ftol = 1e-14;
            const auto status = lm.minimize(p);
            fit_ok = status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters;
        }

        for (std::size_t j = g0; j < g1; ++j)
        {
            const int o = 2 + 3 * static_cast<int>(j - g0);
            Resonance r;
            double f0 = fc + scale * p[o];
            double fwhm = 2.0 * scale * std::exp(p[o + 1]);
            double depth = p[o + 2];
            const bool sane = fit_ok && std::isfinite(f0) && std::isfinite(fwhm) && f0 > f_lo && f0 < f_hi &&
                              fwhm > 0.0 && depth > 0.0;
            if (!sane)
            {
                f0 = f[cands[j].index];
                fwhm = cands[j].width;
                depth = cands[j].depth;
            }
            r.frequency = f0;
            r.wavelength = kSpeedOfLight / f0;
            r.q_loaded = f0 / fwhm;
            r.depth = depth;
            r.lower_bound = !sane || fwhm / df < opts.min_samples_per_linewidth;
            // ring-down must run for at least 10 Q / omega
            if (spectrum.duration > 0.0 && spectrum.duration < 10.0 * r.q_loaded / (2.0 * kPi * f0))
                r.lower_bound = true;
            out.push_back(r);
        }
        g0 = g1;
    }
    std::sort(out.begin(), out.end(), [](const Resonance &a, const Resonance &b) { return a.frequency < b.frequency; });
    return out;
}

} // namespace microdisk::fdtd

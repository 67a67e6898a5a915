#include "microdisk/tuning.hpp"

#include "microdisk/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace microdisk
{

double frequency_shift(double dn_over_n, double dD_over_D)
{
    return -dn_over_n - dD_over_D;
}

TuningRequirement fsr_scan_requirement(const DiskGeometry &geom, double lambda, double fsr_fraction)
{
    if (!(fsr_fraction > 0.0) || !std::isfinite(fsr_fraction))
        throw ValidationError("tuning.fsr_fraction", "must be positive");
    const WgmMode m = find_resonance_near(lambda, geom, 1);
    TuningRequirement r;
    r.l = m.l;
    r.fsr_fraction = fsr_fraction;
    // |frequency_shift| is linear with unit slope in either argument
    r.dD_over_D = fsr_fraction / m.l;
    r.dn_over_n = fsr_fraction / m.l;
    return r;
}

std::vector<TuningRow> tuning_curve(const std::vector<double> &diameters, const std::vector<double> &indices,
                                    double lambda, const DiskGeometry &base)
{
    std::vector<TuningRow> rows;
    for (double n : indices)
        for (double d : diameters)
        {
            DiskGeometry g = base;
            g.diameter = d;
            g.n_core = n;
            rows.push_back({d, n, fsr_scan_requirement(g, lambda)});
        }
    return rows;
}

void write_tuning_csv(const std::vector<TuningRow> &rows, const std::string &path, const std::string &header_comment)
{
    std::ostringstream os;
    if (!header_comment.empty())
        os << "# " << header_comment << '\n';
    os << "D_um,n,l,dD_over_D,dn_over_n\n";
    char buf[160];
    for (const TuningRow &r : rows)
    {
        std::snprintf(buf, sizeof buf, "%.9e,%.9e,%d,%.9e,%.9e\n", r.diameter * 1e6, r.n_core, r.req.l,
                      r.req.dD_over_D, r.req.dn_over_n);
        os << buf;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open " + path);
    f << os.str();
}

} // namespace microdisk

#pragma once

#include "microdisk/wgm.hpp"

#include <string>
#include <vector>

namespace microdisk
{

/// First-order resonance shift dnu/nu = -dn/n - dD/D.
double frequency_shift(double dn_over_n, double dD_over_D);

/// Relative change of diameter or index (the other held fixed) that moves the
/// resonance by `fsr_fraction` of a free spectral range, i.e. dnu/nu = fraction / l.
struct TuningRequirement
{
    double dD_over_D = 0.0;
    double dn_over_n = 0.0;
    int l = 0;
    double fsr_fraction = 1.0;
};

/// l is the q = 1 mode found nearest to `lambda`.
TuningRequirement fsr_scan_requirement(const DiskGeometry &geom, double lambda, double fsr_fraction = 1.0);

struct TuningRow
{
    double diameter = 0.0; // m
    double n_core = 0.0;
    TuningRequirement req;
};

std::vector<TuningRow> tuning_curve(const std::vector<double> &diameters, const std::vector<double> &indices,
                                    double lambda, const DiskGeometry &base = {});

/// Columns D_um,n,l,dD_over_D,dn_over_n.
void write_tuning_csv(const std::vector<TuningRow> &rows, const std::string &path, const std::string &header_comment = {});

} // namespace microdisk

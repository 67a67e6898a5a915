#include "microdisk/detection.hpp"

#include "microdisk/errors.hpp"
#include "microdisk/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace microdisk
{

void DetectionSetup::validate() const
{
    disk.validate();
    surface.validate();
    atom.validate();
    if (l < 0)
        throw ValidationError("mode.l", "must be >= 0");
    if (q < 1)
        throw ValidationError("mode.q", "must be >= 1");
    if (!(width >= 0.2e-6 && width <= 2.0e-6))
        throw ValidationError("coupler.width", "must lie in [0.2, 2.0] um");
    if (!(gap >= 0.0))
        throw ValidationError("coupler.gap", "must be non-negative");
    if (!(loss_db_per_km > 0.0))
        throw ValidationError("losses.db_per_km", "must be positive");
    if (!(atom_distance >= 0.0))
        throw ValidationError("atom.distance", "must be non-negative");
    if (!(tau > 0.0))
        throw ValidationError("detection.tau", "must be positive");
    if (!(pump >= 0.0))
        throw ValidationError("detection.pump", "must be non-negative");
    if (!(epsilon_over_kappa_loss >= 0.0))
        throw ValidationError("detection.epsilon", "must be non-negative");
}

bool ScanRow::has_flag(const std::string &f) const
{
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

DetectionModel::DetectionModel(const DetectionSetup &setup) : setup_(setup)
{
    setup_.validate();
    if (setup_.l > 0)
        mode_ = solve_mode(setup_.l, setup_.q, setup_.disk, setup_.target_wavelength);
    else
        mode_ = find_resonance_near(setup_.target_wavelength, setup_.disk, setup_.q);
    coupler_ = std::make_shared<CouplerModel>(mode_, setup_.disk, setup_.width);
    const double r_atom = setup_.disk.radius() + setup_.atom_distance;
    g_ = rabi_frequency(mode_, setup_.disk, r_atom, setup_.atom);
    q_wgm_ = mode_.q_wgm();
    q_mat_ = q_material(setup_.disk.n_core, attenuation_from_db_per_km(setup_.loss_db_per_km), mode_.wavelength());
    q_surf_ = q_surface(setup_.disk.diameter, mode_.wavelength(), setup_.surface);
}

DetectionModel::Point DetectionModel::assemble(double gap, double pump, double eps_ratio, DeltaCMode delta_c) const
{
    Point p;
    p.coupler = coupler_->transmission(gap);
    LossComponents c;
    c.q_wgm = q_wgm_;
    c.q_mat = q_mat_;
    c.q_surf = q_surf_;
    c.q_coup = q_coup(p.coupler, mode_.l);
    c.kappa_T = kappa_T(p.coupler);
    c.k_r = mode_.k_r();
    c.l = mode_.l;
    p.budget = total_q(c);

    CavitySystem &s = p.system;
    s.kappa = p.budget.kappa;
    s.kappa_T = p.budget.kappa_T;
    s.t11 = p.coupler.t11;
    s.t12 = p.coupler.t12;
    s.t21 = p.coupler.t21;
    s.round_trip_time = p.coupler.round_trip_time;
    s.epsilon = eps_ratio * p.budget.kappa_loss;
    switch (delta_c)
    {
    case DeltaCMode::zero: s.delta_c = 0.0; break;
    case DeltaCMode::plus_eps: s.delta_c = std::abs(s.epsilon); break;
    case DeltaCMode::minus_eps: s.delta_c = -std::abs(s.epsilon); break;
    }
    s.a_in_plus = std::sqrt(pump);
    s.a_in_minus = 0.0;
    p.atom = setup_.atom;
    p.atom.radius = setup_.disk.radius() + setup_.atom_distance;
    set_atom_coupling(s, g_, mode_.l, p.atom.azimuth);
    return p;
}

ScanRow DetectionModel::evaluate(double var, const Point &p) const
{
    const DetectionMetrics m = detection_metrics(p.system, p.atom, setup_.tau);
    ScanRow row;
    row.var = var;
    row.signal = m.signal;
    row.signal_quadrature = m.signal_quadrature;
    row.scattered = m.scattered;
    row.m10 = m.m10;
    row.rho11 = m.with_atom.rho11;
    row.q_total = p.budget.q_total;
    row.kappa = p.budget.kappa;
    row.kappa_T = p.budget.kappa_T;
    row.kappa_loss = p.budget.kappa_loss;
    row.strong_coupling = strong_coupling_parameter(p.system, p.atom);
    if (m.divergent)
        row.flags.emplace_back("divergent");
    if (m.bistable)
        row.flags.emplace_back("bistable");
    return row;
}

cplx DetectionModel::reference_output(double gap, double eps_ratio, DeltaCMode delta_c) const
{
    Point p = assemble(gap, 1.0, eps_ratio, delta_c);
    p.system.g_plus = p.system.g_minus = 0.0;
    return steady_state(p.system, p.atom).a_out_plus / p.system.a_in_plus;
}

std::vector<ScanRow> scan_pump(const DetectionModel &model, const std::vector<double> &pumps, int threads)
{
    const auto &s = model.setup();
    return parallel_map(pumps.size(), threads, [&](std::size_t i) {
        return model.evaluate(pumps[i], model.assemble(s.gap, pumps[i], s.epsilon_over_kappa_loss, s.delta_c));
    });
}

std::vector<ScanRow> scan_epsilon(const DetectionModel &model, const std::vector<double> &ratios, DeltaCMode delta_c,
                                  int threads)
{
    const auto &s = model.setup();
    return parallel_map(ratios.size(), threads, [&](std::size_t i) {
        return model.evaluate(ratios[i], model.assemble(s.gap, s.pump, ratios[i], delta_c));
    });
}

std::vector<ScanRow> scan_gap(const DetectionModel &model, const std::vector<double> &gaps, int threads)
{
    const auto &s = model.setup();
    struct Eval
    {
        ScanRow row;
        cplx reference;
    };
    auto evals = parallel_map(gaps.size(), threads, [&](std::size_t i) {
        const auto p = model.assemble(gaps[i], s.pump, s.epsilon_over_kappa_loss, s.delta_c);
        CavitySystem empty = p.system;
        empty.g_plus = empty.g_minus = 0.0;
        const cplx ref = steady_state(empty, p.atom).a_out_plus / p.system.a_in_plus;
        return Eval{model.evaluate(gaps[i], p), ref};
    });

    std::vector<ScanRow> rows;
    for (std::size_t i = 0; i < evals.size(); ++i)
    {
        rows.push_back(evals[i].row);
        if (i + 1 == evals.size())
            break;
        const cplx a = evals[i].reference, b = evals[i + 1].reference;
        // The empty-cavity output is real on resonance without mode coupling; a sign
        // change brackets critical coupling.
        const bool real_valued = std::abs(a.imag()) < 1e-9 && std::abs(b.imag()) < 1e-9;
        if (!real_valued || (a.real() > 0.0) == (b.real() > 0.0) || a.real() == 0.0)
            continue;
        double lo = gaps[i], hi = gaps[i + 1];
        double flo = a.real();
        for (int it = 0; it < 60 && hi - lo > 1e-16; ++it)
        {
            const double mid = 0.5 * (lo + hi);
            const double fm = model.reference_output(mid, s.epsilon_over_kappa_loss, s.delta_c).real();
            if ((fm > 0.0) == (flo > 0.0))
            {
                lo = mid;
                flo = fm;
            }
            else
            {
                hi = mid;
            }
        }
        const double gc = 0.5 * (lo + hi);
        ScanRow crit = model.evaluate(gc, model.assemble(gc, s.pump, s.epsilon_over_kappa_loss, s.delta_c));
        crit.flags.insert(crit.flags.begin(), "critical");
        if (!crit.has_flag("divergent"))
        {
            // bisection stopped short of an exactly dark port
            crit.flags.emplace_back("near-critical");
        }
        rows.push_back(crit);
    }

    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].m10 && (!best || *rows[i].m10 < *rows[*best].m10))
            best = i;
    if (best)
        rows[*best].flags.insert(rows[*best].flags.begin(), "optimum");
    return rows;
}

} // namespace microdisk

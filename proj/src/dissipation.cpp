#include "smd/dissipation.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "stencils.hpp"

namespace smd {

EpsSplit eps_instant(VelocityField& f, const DampingProfile& profile,
                     const DomainParams& dom, const Grid& g) {
    apply_boundary(f, g, dom.lid_speed);
    const double cs_delta_sq = dom.cs_delta() * dom.cs_delta();
    const double vol = g.cell_volume();

    EpsSplit eps;
    for (int k = 0; k < g.nz; ++k) {
        const double beta = eval_beta(profile, g.z_center(k), dom);
        double slab_visc = 0.0, slab_model = 0.0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double gn = detail::grad_frobenius(f, g, i, j, k);
                slab_visc += gn * gn;
                slab_model += beta * gn * gn * gn;
            }
        eps.viscous += dom.viscosity * slab_visc * vol;
        eps.model += cs_delta_sq * slab_model * vol;
    }
    const double box_volume = dom.box_length * dom.box_length * dom.box_length;
    eps.viscous /= box_volume;
    eps.model /= box_volume;
    return eps;
}

double kinetic_energy(VelocityField& f, const DomainParams& dom, const Grid& g) {
    apply_boundary(f, g, dom.lid_speed);
    double sum = 0.0;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double uc = 0.5 * (f.u(i, j, k) + f.u(i + 1, j, k));
                const double vc = 0.5 * (f.v(i, j, k) + f.v(i, j + 1, k));
                const double wc = 0.5 * (f.w(i, j, k) + f.w(i, j, k + 1));
                sum += uc * uc + vc * vc + wc * wc;
            }
    return 0.5 * sum * g.cell_volume();
}

DissipationRecord& DissipationSeries::add(double time, double ke, double eps_viscous,
                                          double eps_model) {
    DissipationRecord rec;
    rec.time = time;
    rec.kinetic_energy = ke;
    rec.eps_viscous = eps_viscous;
    rec.eps_model = eps_model;
    rec.eps_total = eps_viscous + eps_model;

    if (records_.empty()) {
        rec.running_average = rec.eps_total;
    } else {
        const DissipationRecord& prev = records_.back();
        if (!(time > prev.time))
            throw std::runtime_error("dissipation samples must have strictly increasing times");
        integral_ += 0.5 * (time - prev.time) * (rec.eps_total + prev.eps_total);
        const double elapsed = time - records_.front().time;
        rec.running_average = elapsed > 0.0 ? integral_ / elapsed : rec.eps_total;
    }
    records_.push_back(rec);
    return records_.back();
}

double DissipationSeries::limsup_proxy(double trailing_fraction) const {
    if (records_.empty()) return 0.0;
    const double t0 = records_.front().time;
    const double t1 = records_.back().time;
    const double cutoff = t1 - trailing_fraction * (t1 - t0);
    double sup = records_.back().running_average;
    for (const auto& r : records_)
        if (r.time >= cutoff) sup = std::max(sup, r.running_average);
    return sup;
}

void DissipationSeries::write_csv(std::ostream& out) const {
    out << "time,ke,eps_viscous,eps_model,eps_total,running_avg\n";
    char line[256];
    for (const auto& r : records_) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      r.time, r.kinetic_energy, r.eps_viscous, r.eps_model,
                      r.eps_total, r.running_average);
        out << line;
    }
}

}  // namespace smd
